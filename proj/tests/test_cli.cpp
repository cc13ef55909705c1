#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gravnet/commands.hpp"
#include "gravnet/dataset.hpp"
#include "oracles.hpp"

using namespace gravnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gravnet_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

ExperimentConfig small(const std::string& mode, const fs::path& in, const fs::path& out) {
  ExperimentConfig c;
  c.mode = mode;
  c.n = 12;
  c.k = 3;
  c.m = 8;
  c.sigma = 0.3;
  c.seed = 5;
  c.in = in.string();
  c.out = out.string();
  return c;
}

struct ProcessResult {
  int status;
  std::string output;
};

ProcessResult run_binary(const std::string& args) {
  const std::string cmd = std::string(GRAVNET_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string output;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) output += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

}  // namespace

TEST(CmdGen, WritesDatasetLayout) {
  const fs::path dir = scratch("gen");
  cmd_gen(small("gen", "", dir));
  for (const char* f : {"meta.json", "center.csv", "ground_truth.csv", "basis_000.csv",
                        "basis_007.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir / "basis_008.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
  EXPECT_EQ(meta["n"], 12);
  EXPECT_EQ(meta["m"], 8);
  EXPECT_EQ(meta["format"], kDatasetFormat);
  const Dataset d = read_dataset(dir);
  for (const auto& b : d.bases) {
    EXPECT_LT((b.matrix().transpose() * b.matrix() - Matrix::Identity(3, 3)).norm(), 1e-12);
  }
}

TEST(CmdGen, ZeroSpreadReproducesCenter) {
  const Dataset d = generate_dataset(10, 2, 4, 0.0, 1);
  for (const auto& b : d.bases) {
    EXPECT_LT(oracle::chordal_sq(b.matrix(), d.centers[0]), 1e-28);
  }
  EXPECT_LT(oracle::chordal_sq(*d.ground_truth, d.centers[0]), 1e-24);
}

TEST(CmdGen, ByteIdenticalReruns) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  cmd_gen(small("gen", "", a));
  cmd_gen(small("gen", "", b));
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().filename() == "meta.json") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
  }
}

TEST(DatasetIo, BitwiseRoundTrip) {
  const Dataset d = generate_dataset(9, 2, 5, 0.4, 2, 2);
  const fs::path dir = scratch("roundtrip");
  write_dataset(dir, d);
  const Dataset r = read_dataset(dir);
  ASSERT_EQ(r.m(), d.m());
  for (int i = 0; i < d.m(); ++i) EXPECT_EQ(r.bases[i].matrix(), d.bases[i].matrix());
  EXPECT_EQ(r.labels, d.labels);
  EXPECT_EQ(r.clusters, 2);
  EXPECT_EQ(r.centers.size(), 2u);
}

TEST(DatasetIo, FormatDoubleRoundTrips) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(gen) * std::pow(10.0, i % 40 - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(DatasetIo, RejectsBadFiles) {
  const fs::path dir = scratch("bad");
  write_dataset(dir, generate_dataset(6, 2, 2, 0.2, 4));
  std::ofstream(dir / "basis_001.csv") << "1,2\n3\n";
  EXPECT_THROW(read_dataset(dir), Error);
  EXPECT_THROW(read_dataset(scratch("missing")), Error);
}

TEST(CmdAvg, SinglePointIsExactAfterOneIteration) {
  const fs::path data = scratch("avg_one_data"), out = scratch("avg_one_out");
  ExperimentConfig g = small("gen", "", data);
  g.m = 1;
  cmd_gen(g);
  const auto rec = cmd_avg(small("avg", data, out));
  ASSERT_GE(rec.size(), 2u);
  EXPECT_LE(rec[1].mse, 1e-14);
  const auto rows = lines(slurp(out / "results.csv"));
  EXPECT_EQ(rows[0], "iteration,comm_rounds,mse,msd");
  const auto first = split(rows[1]);
  ASSERT_EQ(first.size(), 4u);
  EXPECT_EQ(first[0], "0");
  EXPECT_EQ(first[1], "0");
  EXPECT_EQ(first[3], "");
}

TEST(CmdAvg, FiniteVariantRunsTIterations) {
  const fs::path data = scratch("avg_fin_data"), out = scratch("avg_fin_out");
  cmd_gen(small("gen", "", data));
  ExperimentConfig c = small("avg", data, out);
  c.variant = "finite";
  c.T = 4;
  const auto rec = cmd_avg(c);
  EXPECT_EQ(rec.back().iteration, 4);
  EXPECT_LT(rec.back().mse, rec.front().mse);
}

TEST(CmdDravg, RecordsAndManifest) {
  const fs::path data = scratch("dr_data"), out = scratch("dr_out");
  cmd_gen(small("gen", "", data));
  ExperimentConfig c = small("dravg", data, out);
  c.max_iter = 6;
  const auto rec = cmd_dravg(c);
  ASSERT_EQ(rec.size(), 7u);
  for (std::size_t i = 1; i < rec.size(); ++i) {
    EXPECT_GT(rec[i].comm_rounds, rec[i - 1].comm_rounds);
    ASSERT_TRUE(rec[i].msd.has_value());
  }
  EXPECT_EQ(rec.back().comm_rounds, 60);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["version"], kVersion);
  EXPECT_EQ(manifest["config"]["max_iter"], 6);
  EXPECT_EQ(manifest["config"]["topology"], "hypercube");
  EXPECT_NEAR(manifest["summary"]["mixing_constant"].get<double>(), 1.0 / 4.0, 1e-15);
  EXPECT_EQ(lines(slurp(out / "results.csv")).size(), 8u);
}

TEST(CmdDravg, DeterministicResults) {
  const fs::path data = scratch("det_data");
  cmd_gen(small("gen", "", data));
  ExperimentConfig a = small("dravg", data, scratch("det_a"));
  ExperimentConfig b = small("dravg", data, scratch("det_b"));
  a.max_iter = b.max_iter = 4;
  cmd_dravg(a);
  cmd_dravg(b);
  EXPECT_EQ(slurp(fs::path(a.out) / "results.csv"), slurp(fs::path(b.out) / "results.csv"));
}

TEST(CmdDravg, CustomTopology) {
  const fs::path data = scratch("custom_data");
  cmd_gen(small("gen", "", data));
  const fs::path edges = scratch("edges.txt");
  {
    std::ofstream e(edges);
    for (int i = 0; i < 8; ++i) e << i << ',' << (i + 1) % 8 << '\n';
  }
  ExperimentConfig c = small("dravg", data, scratch("custom_out"));
  c.topology = "custom:" + edges.string();
  c.rounds = 3;
  c.max_iter = 2;
  const auto rec = cmd_dravg(c);
  EXPECT_EQ(rec.back().comm_rounds, 6);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(c.out) / "manifest.json"));
  EXPECT_EQ(manifest["summary"]["topology"], "custom");
}

TEST(CmdDravg, AgentCountMustMatchGraph) {
  const fs::path data = scratch("mismatch_data");
  ExperimentConfig g = small("gen", "", data);
  g.m = 6;
  cmd_gen(g);
  EXPECT_THROW(cmd_dravg(small("dravg", data, scratch("mismatch_out"))), Error);
}

TEST(CmdKmeans, WritesAssignmentsAndCalls) {
  const fs::path data = scratch("km_data"), out = scratch("km_out");
  ExperimentConfig g = small("gen", "", data);
  g.m = 12;
  g.sigma = 0.1;
  g.clusters = 2;
  cmd_gen(g);
  ExperimentConfig c = small("kmeans", data, out);
  c.clusters = 0;
  const double purity = cmd_kmeans(c);
  EXPECT_GE(purity, 0.9);
  const auto rows = lines(slurp(out / "assignments.csv"));
  EXPECT_EQ(rows.front(), "point,cluster,label");
  EXPECT_EQ(rows.size(), 13u);
  EXPECT_EQ(lines(slurp(out / "averaging_calls.csv")).front(),
            "iteration,cluster,members,inner_iterations,matmuls,decompositions");
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_DOUBLE_EQ(manifest["summary"]["purity"].get<double>(), purity);
}

TEST(CmdKmeans, NeedsLabels) {
  const fs::path data = scratch("km_nolabel");
  cmd_gen(small("gen", "", data));
  EXPECT_THROW(cmd_kmeans(small("kmeans", data, scratch("km_nolabel_out"))), InvalidArgument);
}

TEST(CmdChebDump, KnownRows) {
  ExperimentConfig c;
  c.mode = "cheb-dump";
  c.T = 3;
  std::ostringstream out;
  cmd_cheb_dump(c, out);
  const auto rows = lines(out.str());
  ASSERT_EQ(rows.size(), 1002u);
  EXPECT_EQ(rows[0], "lambda,f_star,f_tilde,power");
  EXPECT_EQ(rows[1], "0,0,0,0");
  const auto one = split(rows[1001]);
  EXPECT_EQ(std::stod(one[0]), 1.0);
  EXPECT_NEAR(std::stod(one[1]), 1.0, 1e-11);
  EXPECT_NEAR(std::stod(one[2]), 1.0, 1e-11);
  EXPECT_EQ(std::stod(one[3]), 1.0);
  const auto half = split(rows[501]);
  EXPECT_NEAR(std::stod(half[1]), oracle::f_star(3, 0.15, 0.5), 1e-11);
  EXPECT_NEAR(std::stod(half[3]), 0.125, 1e-12);
}

TEST(SeedEnv, OverridesAndValidates) {
  ExperimentConfig c;
  c.seed = 1;
  setenv("GRAVNET_SEED", "42", 1);
  apply_seed_env(c);
  EXPECT_EQ(c.seed, 42u);
  setenv("GRAVNET_SEED", "4x2", 1);
  EXPECT_THROW(apply_seed_env(c), InvalidArgument);
  unsetenv("GRAVNET_SEED");
  apply_seed_env(c);
  EXPECT_EQ(c.seed, 42u);
}

TEST(Binary, RuntimeErrorIsOneLine) {
  const ProcessResult r = run_binary("avg --in " + scratch("nowhere").string() + " --out " +
                           scratch("nowhere_out").string());
  EXPECT_NE(r.status, 0);
  const auto l = lines(r.output);
  ASSERT_EQ(l.size(), 1u) << r.output;
  EXPECT_EQ(l[0].rfind("gravnet avg: ", 0), 0u);
}

TEST(Binary, BadArgumentsFail) {
  EXPECT_NE(run_binary("").status, 0);
  EXPECT_NE(run_binary("avg --variant sometimes").status, 0);
  EXPECT_NE(run_binary("gen --n notanumber").status, 0);
}

TEST(Binary, ChebDumpToStdout) {
  const ProcessResult r = run_binary("cheb-dump --T 2 --alpha 0.5");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.output).size(), 1002u);
}
