#include <iostream>

#include <CLI11.hpp>

#include "gravnet/commands.hpp"

namespace {

void add_flags(CLI::App* cmd, gravnet::ExperimentConfig& cfg) {
  cmd->add_option("--n", cfg.n, "ambient dimension N");
  cmd->add_option("--k", cfg.k, "subspace dimension K");
  cmd->add_option("--m", cfg.m, "number of points / agents");
  cmd->add_option("--sigma", cfg.sigma, "cluster spread");
  cmd->add_option("--alpha", cfg.alpha, "stop-band edge");
  cmd->add_option("--topology", cfg.topology,
                  "hypercube, cycle, complete or custom:<edge file>");
  cmd->add_option("--rounds", cfg.rounds, "consensus rounds per iteration");
  cmd->add_option("--variant", cfg.variant, "finite or asymptotic")
      ->check(CLI::IsMember({"finite", "asymptotic"}));
  cmd->add_option("--algo", cfg.algo,
                  "avg: rgrav|power; dravg: drgrav|deepca; kmeans: rgrav|power|frechet|flag");
  cmd->add_option("--T", cfg.T, "finite-variant iterations / polynomial degree");
  cmd->add_option("--max-iter", cfg.max_iter, "iteration cap");
  cmd->add_option("--tol", cfg.tol, "stop tolerance");
  cmd->add_option("--ortho", cfg.ortho, "orthonormalize every n iterations (0: never)");
  cmd->add_option("--clusters", cfg.clusters, "planted clusters (gen) / centers (kmeans)");
  cmd->add_option("--seed", cfg.seed, "RNG seed; GRAVNET_SEED overrides");
  cmd->add_option("--in", cfg.in, "dataset directory");
  cmd->add_option("--out", cfg.out, "output directory (cheb-dump: file)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grassmannian averaging experiments"};
  app.require_subcommand(1);
  gravnet::ExperimentConfig cfg;
  for (const char* name : {"gen", "avg", "dravg", "kmeans", "cheb-dump"}) {
    add_flags(app.add_subcommand(name), cfg);
  }
  CLI11_PARSE(app, argc, argv);
  cfg.mode = app.get_subcommands().front()->get_name();

  try {
    gravnet::apply_seed_env(cfg);
    gravnet::run_command(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "gravnet " << cfg.mode << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
