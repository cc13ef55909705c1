#include <gtest/gtest.h>

#include <numbers>

#include "gravnet/dataset.hpp"
#include "gravnet/kmeans.hpp"
#include "oracles.hpp"

using namespace gravnet;

TEST(Purity, WorkedExamples) {
  const std::vector<int> labels{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(cluster_purity(std::vector<int>{1, 1, 0, 0}, labels), 1.0);
  EXPECT_DOUBLE_EQ(cluster_purity(std::vector<int>{0, 1, 0, 1}, labels), 0.5);
  EXPECT_DOUBLE_EQ(cluster_purity(std::vector<int>{0, 0, 0, 0}, labels), 0.5);
  EXPECT_DOUBLE_EQ(cluster_purity(std::vector<int>{0, 1, 2, 3}, labels), 1.0);
  EXPECT_THROW(cluster_purity(std::vector<int>{0, 1}, labels), DimensionMismatch);
  EXPECT_THROW(cluster_purity(std::vector<int>{}, std::vector<int>{}), InvalidArgument);
}

TEST(AveragingMode, ParseRoundTrip) {
  for (auto m : {AveragingMode::kRgrav, AveragingMode::kPower, AveragingMode::kFrechet,
                 AveragingMode::kFlag}) {
    EXPECT_EQ(parse_averaging_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_averaging_mode("karcher"), InvalidArgument);
}

TEST(Kmeans, SingleClusterIsTheAverage) {
  const Dataset d = generate_dataset(12, 2, 10, 0.2, 1);
  ClusteringConfig cfg;
  cfg.c = 1;
  cfg.averaging.tol = 1e-9;
  const ClusteringResult r = grassmann_kmeans(d.bases, cfg);
  EXPECT_LE(r.iterations_used, 2);
  for (int a : r.assignments) EXPECT_EQ(a, 0);
  EXPECT_LT(squared_chordal_distance(r.centers[0].matrix(), *d.ground_truth), 1e-14);
}

TEST(Kmeans, IdenticalPointsCollapse) {
  std::mt19937 gen(2);
  const StiefelBasis p(oracle::random_stiefel(10, 3, gen));
  const std::vector<StiefelBasis> pts(6, p);
  ClusteringConfig cfg;
  cfg.c = 2;
  const ClusteringResult r = grassmann_kmeans(pts, cfg);
  bool hit = false;
  for (const auto& c : r.centers) hit |= squared_chordal_distance(c.matrix(), p.matrix()) < 1e-20;
  EXPECT_TRUE(hit);
}

TEST(Kmeans, RecoversPlantedClusters) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = generate_dataset(32, 4, 40, std::numbers::pi / 16, seed, 2);
    ClusteringConfig cfg;
    cfg.c = 2;
    cfg.seed = seed;
    const ClusteringResult r = grassmann_kmeans(d.bases, cfg);
    EXPECT_GE(cluster_purity(r.assignments, d.labels), 0.9) << "seed " << seed;
  }
}

TEST(Kmeans, DeterministicForSeed) {
  const Dataset d = generate_dataset(16, 2, 20, 0.2, 3, 2);
  ClusteringConfig cfg;
  cfg.seed = 9;
  const ClusteringResult a = grassmann_kmeans(d.bases, cfg);
  const ClusteringResult b = grassmann_kmeans(d.bases, cfg);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.iterations_used, b.iterations_used);
  for (std::size_t c = 0; c < a.centers.size(); ++c) {
    EXPECT_EQ(a.centers[c].matrix(), b.centers[c].matrix());
  }
}

TEST(Kmeans, TerminalAssignmentsAreNearest) {
  const Dataset d = generate_dataset(16, 2, 24, 0.3, 4, 3);
  ClusteringConfig cfg;
  cfg.c = 3;
  cfg.seed = 4;
  const ClusteringResult r = grassmann_kmeans(d.bases, cfg);
  ASSERT_LT(r.iterations_used, cfg.max_iter);
  for (std::size_t i = 0; i < d.bases.size(); ++i) {
    EXPECT_EQ(r.assignments[i], nearest_center(d.bases[i], r.centers));
  }
}

TEST(Kmeans, OneClusterPerPoint) {
  const Dataset d = generate_dataset(10, 2, 5, 0.5, 5, 5);
  ClusteringConfig cfg;
  cfg.c = 5;
  const ClusteringResult r = grassmann_kmeans(d.bases, cfg);
  EXPECT_DOUBLE_EQ(cluster_purity(r.assignments, d.labels), 1.0);
}

TEST(Kmeans, RgravAndPowerAgree) {
  const Dataset d = generate_dataset(32, 4, 40, 0.2, 6, 2);
  ClusteringConfig cfg;
  cfg.seed = 6;
  const ClusteringResult rg = grassmann_kmeans(d.bases, cfg);
  cfg.averaging.mode = AveragingMode::kPower;
  const ClusteringResult pw = grassmann_kmeans(d.bases, cfg);
  EXPECT_NEAR(cluster_purity(rg.assignments, d.labels), cluster_purity(pw.assignments, d.labels),
              0.05);
  EXPECT_EQ(rg.assignments, pw.assignments);
}

TEST(Kmeans, NearestCenterTiesGoLow) {
  const Matrix e = Matrix::Identity(3, 3);
  const std::vector<GrassmannPoint> centers{GrassmannPoint(StiefelBasis(e.col(1))),
                                            GrassmannPoint(StiefelBasis(e.col(2)))};
  EXPECT_EQ(nearest_center(StiefelBasis(e.col(0)), centers), 0);
}

TEST(Kmeans, ConfigValidation) {
  const Dataset d = generate_dataset(8, 2, 3, 0.2, 7);
  ClusteringConfig cfg;
  cfg.c = 4;
  EXPECT_THROW(grassmann_kmeans(d.bases, cfg), InvalidArgument);
  cfg.c = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.c = 2;
  cfg.averaging.tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}
