#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gravnet/manifold.hpp"

namespace gravnet {

enum class TopologyKind { kHypercube, kCycle, kComplete, kCustom };

/// Undirected, connected, simple communication graph on agents 0..m-1.
class Topology {
 public:
  using Edge = std::pair<int, int>;  // first < second

  /// Throws InvalidArgument on self-loops or out-of-range agents and
  /// DisconnectedGraph if the graph is not connected. Duplicate edges merge.
  static Topology custom(int m, const std::vector<Edge>& edges);

  int m() const { return m_; }
  TopologyKind kind() const { return kind_; }
  /// Sorted, deduplicated edge list.
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<int> degrees() const;
  /// Graph Laplacian D - A.
  Matrix laplacian() const;

 private:
  friend Topology build_topology(TopologyKind kind, int size);
  Topology(int m, std::vector<Edge> edges, TopologyKind kind);

  int m_;
  std::vector<Edge> edges_;
  TopologyKind kind_;
};

/// Standard edge sets: hypercube(size = 2^d), cycle(size >= 3), complete(size).
Topology build_topology(TopologyKind kind, int size);

/// Reads a custom graph: one "u,v" pair per line, 0-indexed. The agent count
/// is one more than the largest index seen unless `m` is given.
Topology read_edge_list(const std::filesystem::path& path, int m = -1);

TopologyKind parse_topology_kind(const std::string& name);
std::string to_string(TopologyKind kind);

/// Default consensus rounds per algorithm iteration for a topology kind.
int default_rounds(TopologyKind kind);

struct ConsensusSpec {
  Matrix w;  // symmetric, doubly stochastic
  int rounds_per_iteration = 10;
};

/// Mixing constant c in W = I - c L, c = 2 / (lambda_2 + lambda_max).
double mixing_constant(const Topology& topology);

/// W = I - c L with the optimal constant. Throws DisconnectedGraph when
/// lambda_2(L) <= 1e-12.
Matrix consensus_matrix(const Topology& topology);

ConsensusSpec make_consensus(const Topology& topology, int rounds_per_iteration);

/// Communication-round accounting.
class RoundLedger {
 public:
  void record(int iteration, int rounds);

  std::int64_t total_rounds() const { return total_; }
  const std::vector<std::pair<int, int>>& log() const { return log_; }

 private:
  std::int64_t total_ = 0;
  std::vector<std::pair<int, int>> log_;
};

/// rounds_per_iteration synchronous rounds of state_i <- sum_j W_ij state_j,
/// with j ascending. Charges the rounds to `iteration` in the ledger.
std::vector<Matrix> average_consensus(const std::vector<Matrix>& states,
                                      const ConsensusSpec& spec,
                                      RoundLedger& ledger, int iteration = 0);

}  // namespace gravnet
