#include "gravnet/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "gravnet/chebfilter.hpp"
#include "gravnet/dataset.hpp"
#include "gravnet/kmeans.hpp"
#include "gravnet/netsim.hpp"
#include "gravnet/rgrav.hpp"

namespace gravnet {

namespace fs = std::filesystem;

namespace {

// Separate stream from the one cmd_gen uses, so u0 is never the dataset center.
Rng u0_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x75u};
  return Rng(seq);
}

fs::path require_out(const ExperimentConfig& cfg) {
  if (cfg.out.empty()) throw InvalidArgument(cfg.mode + ": --out is required");
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error("cannot create " + cfg.out + ": " + ec.message());
  return cfg.out;
}

Dataset require_in(const ExperimentConfig& cfg) {
  if (cfg.in.empty()) throw InvalidArgument(cfg.mode + ": --in is required");
  return read_dataset(cfg.in);
}

GrassmannPoint ground_truth(const Dataset& d) {
  if (d.ground_truth) {
    return GrassmannPoint(StiefelBasis(orthonormalize(*d.ground_truth)));
  }
  return iam_ground_truth(d.bases).mean;
}

std::string fmt(double x, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x + 0.0, std::chars_format::general,
                                 precision);
  return std::string(buf, res.ptr);
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg,
                    nlohmann::ordered_json summary) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = cfg.to_json();
  j["summary"] = std::move(summary);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << '\n';
}

Topology make_topology(const ExperimentConfig& cfg, int m) {
  constexpr std::string_view kCustom = "custom:";
  if (cfg.topology.rfind(kCustom, 0) == 0) {
    return read_edge_list(cfg.topology.substr(kCustom.size()), m);
  }
  return build_topology(parse_topology_kind(cfg.topology), m);
}

Variant parse_variant(const std::string& v) {
  if (v == "finite") return Variant::kFinite;
  if (v == "asymptotic") return Variant::kAsymptotic;
  throw InvalidArgument("unknown variant '" + v + "'");
}

}  // namespace

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["n"] = n;
  j["k"] = k;
  j["m"] = m;
  j["sigma"] = sigma;
  j["alpha"] = alpha;
  j["topology"] = topology;
  j["rounds"] = rounds;
  j["variant"] = variant;
  j["algo"] = algo;
  j["T"] = T;
  j["max_iter"] = max_iter;
  j["tol"] = tol ? nlohmann::ordered_json(*tol) : nlohmann::ordered_json(nullptr);
  j["ortho"] = ortho;
  j["clusters"] = clusters;
  j["seed"] = seed;
  j["in"] = in;
  j["out"] = out;
  return j;
}

void apply_seed_env(ExperimentConfig& config) {
  const char* env = std::getenv("GRAVNET_SEED");
  if (env == nullptr) return;
  const std::string_view s(env);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("GRAVNET_SEED: not an unsigned integer: '" + std::string(s) + "'");
  }
  config.seed = seed;
}

void write_records(const fs::path& path, const std::vector<ExperimentRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "iteration,comm_rounds,mse,msd\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.comm_rounds << ',' << format_double(r.mse) << ',';
    if (r.msd) out << format_double(*r.msd);
    out << '\n';
  }
}

void cmd_gen(const ExperimentConfig& cfg) {
  if (cfg.out.empty()) throw InvalidArgument("gen: --out is required");
  const Dataset d = generate_dataset(cfg.n, cfg.k, cfg.m, cfg.sigma, cfg.seed, cfg.clusters);
  write_dataset(cfg.out, d);
}

std::vector<ExperimentRecord> cmd_avg(const ExperimentConfig& cfg) {
  const Dataset d = require_in(cfg);
  const fs::path out = require_out(cfg);
  const GrassmannPoint truth = ground_truth(d);
  const std::string algo = cfg.algo.empty() ? "rgrav" : cfg.algo;
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 100;
  const double tol = cfg.tol.value_or(1e-14);

  Rng rng = u0_rng(cfg.seed);
  const StiefelBasis u0 = sample_uniform(d.n, d.k, rng);

  std::vector<ExperimentRecord> records;
  records.push_back({0, 0, squared_chordal_distance(u0.matrix(), truth.matrix()), {}});
  RunHooks hooks;
  hooks.observer = [&](int t, const Matrix& iterate) {
    records.push_back(
        {t, 0, squared_chordal_distance(orthonormalize(iterate), truth.matrix()), {}});
  };

  AverageResult result = [&] {
    if (algo == "rgrav") {
      RGravConfig rc;
      rc.alpha = cfg.alpha;
      rc.variant = parse_variant(cfg.variant);
      rc.T = cfg.T;
      rc.ortho = OrthoSchedule::every(cfg.ortho);
      rc.max_iter = max_iter;
      rc.tol = tol;
      return rgrav(d.bases, u0, rc, hooks);
    }
    if (algo == "power") return power_method(d.bases, u0, max_iter, tol, hooks);
    throw InvalidArgument("avg: --algo must be rgrav or power, got '" + algo + "'");
  }();

  write_records(out / "results.csv", records);
  nlohmann::ordered_json summary;
  summary["algo"] = algo;
  summary["iterations"] = result.iterations;
  summary["final_mse"] = squared_chordal_distance(result.mean.matrix(), truth.matrix());
  write_manifest(out, cfg, summary);
  return records;
}

std::vector<ExperimentRecord> cmd_dravg(const ExperimentConfig& cfg) {
  const Dataset d = require_in(cfg);
  const fs::path out = require_out(cfg);
  const GrassmannPoint truth = ground_truth(d);
  const std::string algo = cfg.algo.empty() ? "drgrav" : cfg.algo;
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 30;

  const Topology topo = make_topology(cfg, d.m());
  const int rounds = cfg.rounds > 0 ? cfg.rounds : default_rounds(topo.kind());
  const ConsensusSpec spec = make_consensus(topo, rounds);

  Rng rng = u0_rng(cfg.seed);
  const StiefelBasis u0 = sample_uniform(d.n, d.k, rng);
  std::vector<AgentState> agents = make_agents(d.bases, u0);

  std::vector<ExperimentRecord> records;
  records.push_back({0, 0, mse_metric(std::span<const AgentState>(agents), truth),
                     msd_metric(std::span<const AgentState>(agents))});
  RoundLedger ledger;
  const AgentObserver observer = [&](int t, std::span<const AgentState> state) {
    records.push_back({t, ledger.total_rounds(), mse_metric(state, truth), msd_metric(state)});
  };

  if (algo == "drgrav") {
    RGravConfig rc;
    rc.alpha = cfg.alpha;
    rc.variant = parse_variant(cfg.variant);
    rc.T = cfg.T;
    rc.ortho = OrthoSchedule::every(cfg.ortho);
    rc.max_iter = max_iter;
    if (rc.variant == Variant::kFinite) {
      drgrav_finite(agents, spec, rc.alpha, rc.T, rc.ortho, ledger, observer);
    } else {
      drgrav_asymptotic(agents, spec, rc, ledger, observer);
    }
  } else if (algo == "deepca") {
    deepca_adapted(agents, spec, max_iter, ledger, observer);
  } else {
    throw InvalidArgument("dravg: --algo must be drgrav or deepca, got '" + algo + "'");
  }

  write_records(out / "results.csv", records);
  nlohmann::ordered_json summary;
  summary["algo"] = algo;
  summary["topology"] = to_string(topo.kind());
  summary["agents"] = topo.m();
  summary["rounds_per_iteration"] = rounds;
  summary["mixing_constant"] = mixing_constant(topo);
  summary["iterations"] = records.back().iteration;
  summary["comm_rounds"] = ledger.total_rounds();
  summary["final_mse"] = records.back().mse;
  summary["final_msd"] = *records.back().msd;
  write_manifest(out, cfg, summary);
  return records;
}

double cmd_kmeans(const ExperimentConfig& cfg) {
  const Dataset d = require_in(cfg);
  const fs::path out = require_out(cfg);
  if (d.labels.empty()) throw InvalidArgument("kmeans: dataset has no labels.csv");

  ClusteringConfig kc;
  kc.c = cfg.clusters > 0 ? cfg.clusters : d.clusters;
  if (kc.c < 1) throw InvalidArgument("kmeans: set --clusters");
  kc.averaging.mode = parse_averaging_mode(cfg.algo.empty() ? "rgrav" : cfg.algo);
  kc.averaging.alpha = cfg.alpha;
  kc.tol = cfg.tol.value_or(1e-6);
  kc.averaging.tol = kc.tol;
  kc.max_iter = cfg.max_iter > 0 ? cfg.max_iter : 100;
  kc.seed = cfg.seed;

  const ClusteringResult res = grassmann_kmeans(d.bases, kc);
  const double purity = cluster_purity(res.assignments, d.labels);

  {
    std::ofstream f(out / "assignments.csv");
    if (!f) throw Error("cannot write assignments.csv");
    f << "point,cluster,label\n";
    for (std::size_t i = 0; i < res.assignments.size(); ++i) {
      f << i << ',' << res.assignments[i] << ',' << d.labels[i] << '\n';
    }
  }
  {
    std::ofstream f(out / "averaging_calls.csv");
    if (!f) throw Error("cannot write averaging_calls.csv");
    f << "iteration,cluster,members,inner_iterations,matmuls,decompositions\n";
    for (const auto& c : res.calls) {
      f << c.iteration << ',' << c.cluster << ',' << c.members << ','
        << c.inner_iterations << ',' << c.tally.matmuls << ',' << c.tally.decompositions
        << '\n';
    }
  }
  const OpTally total = res.total_tally();
  nlohmann::ordered_json summary;
  summary["averaging"] = to_string(kc.averaging.mode);
  summary["clusters"] = kc.c;
  summary["purity"] = purity;
  summary["iterations"] = res.iterations_used;
  summary["averaging_calls"] = res.calls.size();
  summary["matmuls"] = total.matmuls;
  summary["decompositions"] = total.decompositions;
  write_manifest(out, cfg, summary);
  return purity;
}

void cmd_cheb_dump(const ExperimentConfig& cfg, std::ostream& out) {
  const int t = cfg.T;
  if (t < 1) throw InvalidArgument("cheb-dump: --T must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw InvalidArgument("cheb-dump: alpha must lie in (0, 1)");
  }
  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out);
    if (!file) throw Error("cannot write " + cfg.out);
  }
  std::ostream& os = cfg.out.empty() ? out : file;
  os << "lambda,f_star,f_tilde,power\n";
  for (int i = 0; i <= 1000; ++i) {
    const double lambda = i / 1000.0;
    os << fmt(lambda, 12) << ',' << fmt(eval_f_star(t, cfg.alpha, lambda), 12) << ','
       << fmt(eval_f_tilde(t, cfg.alpha, lambda), 12) << ','
       << fmt(std::pow(lambda, t), 12) << '\n';
  }
}

void run_command(const ExperimentConfig& config, std::ostream& out) {
  if (config.mode == "gen") {
    cmd_gen(config);
  } else if (config.mode == "avg") {
    cmd_avg(config);
  } else if (config.mode == "dravg") {
    cmd_dravg(config);
  } else if (config.mode == "kmeans") {
    cmd_kmeans(config);
  } else if (config.mode == "cheb-dump") {
    cmd_cheb_dump(config, out);
  } else {
    throw InvalidArgument("unknown mode '" + config.mode + "'");
  }
}

}  // namespace gravnet
