#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gravnet/manifold.hpp"

namespace gravnet {

enum class AveragingMode { kRgrav, kPower, kFrechet, kFlag };

AveragingMode parse_averaging_mode(const std::string& name);
std::string to_string(AveragingMode mode);

/// Center-update rule. `tol` is a chordal distance shared by the iterative
/// modes: rgrav and power stop when successive iterates are closer than tol,
/// frechet when its gradient norm drops below tol.
struct AveragingConfig {
  AveragingMode mode = AveragingMode::kRgrav;
  double alpha = 0.15;
  double frechet_step = 1.0;
  double tol = 1e-6;
  int max_iter = 200;
};

struct ClusteringConfig {
  int c = 2;
  AveragingConfig averaging;
  double tol = 1e-6;  // max chordal center movement
  int max_iter = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One invocation of the averaging subroutine.
struct AveragingCall {
  int iteration = 0;
  int cluster = 0;
  int members = 0;
  int inner_iterations = 0;
  OpTally tally;
};

struct ClusteringResult {
  std::vector<GrassmannPoint> centers;
  std::vector<int> assignments;
  int iterations_used = 0;
  std::vector<AveragingCall> calls;

  OpTally total_tally() const;
};

/// Lloyd iterations on Gr(n, k) under the chordal distance. Centers start
/// Haar-uniform from config.seed; each cluster is averaged starting from its
/// lowest-index member. Empty clusters are reseeded at the point farthest
/// from its center.
ClusteringResult grassmann_kmeans(std::span<const StiefelBasis> points,
                                  const ClusteringConfig& config);

/// Index of the nearest center, lowest index on ties.
int nearest_center(const StiefelBasis& point,
                   std::span<const GrassmannPoint> centers);

/// sum_c (largest label count in cluster c) / T.
double cluster_purity(std::span<const int> assignments, std::span<const int> labels);

}  // namespace gravnet
