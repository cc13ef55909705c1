#include "gravnet/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>

#include <Eigen/Dense>

namespace gravnet {

namespace {

bool is_connected(int m, const std::vector<Topology::Edge>& edges) {
  std::vector<std::vector<int>> adj(m);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<bool> seen(m, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == m;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Topology::Topology(int m, std::vector<Edge> edges, TopologyKind kind)
    : m_(m), edges_(std::move(edges)), kind_(kind) {
  if (m_ < 2) {
    throw InvalidArgument("Topology: need at least 2 agents");
  }
  for (auto& e : edges_) {
    if (e.first == e.second) {
      throw InvalidArgument("Topology: self-loop at agent " +
                            std::to_string(e.first));
    }
    if (e.first < 0 || e.second < 0 || e.first >= m_ || e.second >= m_) {
      throw InvalidArgument("Topology: edge (" + std::to_string(e.first) + "," +
                            std::to_string(e.second) + ") out of range");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  if (!is_connected(m_, edges_)) {
    throw DisconnectedGraph("Topology: graph on " + std::to_string(m_) +
                            " agents is not connected");
  }
}

Topology Topology::custom(int m, const std::vector<Edge>& edges) {
  return Topology(m, edges, TopologyKind::kCustom);
}

std::vector<int> Topology::degrees() const {
  std::vector<int> deg(m_, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Matrix Topology::laplacian() const {
  Matrix l = Matrix::Zero(m_, m_);
  for (const auto& [u, v] : edges_) {
    l(u, v) -= 1.0;
    l(v, u) -= 1.0;
    l(u, u) += 1.0;
    l(v, v) += 1.0;
  }
  return l;
}

Topology build_topology(TopologyKind kind, int size) {
  std::vector<Topology::Edge> edges;
  switch (kind) {
    case TopologyKind::kHypercube: {
      if (size < 2 || (size & (size - 1)) != 0) {
        throw InvalidArgument("hypercube: size must be a power of 2 >= 2, got " +
                              std::to_string(size));
      }
      for (int u = 0; u < size; ++u) {
        for (int bit = 1; bit < size; bit <<= 1) {
          const int v = u ^ bit;
          if (u < v) edges.emplace_back(u, v);
        }
      }
      break;
    }
    case TopologyKind::kCycle:
      if (size < 3) {
        throw InvalidArgument("cycle: size must be >= 3, got " +
                              std::to_string(size));
      }
      for (int u = 0; u < size; ++u) edges.emplace_back(u, (u + 1) % size);
      break;
    case TopologyKind::kComplete:
      if (size < 2) {
        throw InvalidArgument("complete: size must be >= 2");
      }
      for (int u = 0; u < size; ++u) {
        for (int v = u + 1; v < size; ++v) edges.emplace_back(u, v);
      }
      break;
    case TopologyKind::kCustom:
      throw InvalidArgument("build_topology: custom graphs come from an edge list");
  }
  return Topology(size, std::move(edges), kind);
}

Topology read_edge_list(const std::filesystem::path& path, int m) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open edge list " + path.string());
  }
  std::vector<Topology::Edge> edges;
  int max_index = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    int u = 0;
    int v = 0;
    char comma = 0;
    if (!(fields >> u >> comma >> v) || comma != ',' || !(fields >> std::ws).eof()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) +
                            ": expected 'u,v'");
    }
    edges.emplace_back(u, v);
    max_index = std::max({max_index, u, v});
  }
  return Topology::custom(m > 0 ? m : max_index + 1, edges);
}

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "hypercube") return TopologyKind::kHypercube;
  if (name == "cycle") return TopologyKind::kCycle;
  if (name == "complete") return TopologyKind::kComplete;
  if (name == "custom") return TopologyKind::kCustom;
  throw InvalidArgument("unknown topology '" + name + "'");
}

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kHypercube: return "hypercube";
    case TopologyKind::kCycle: return "cycle";
    case TopologyKind::kComplete: return "complete";
    case TopologyKind::kCustom: return "custom";
  }
  return "unknown";
}

int default_rounds(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kHypercube: return 10;
    case TopologyKind::kCycle: return 50;
    case TopologyKind::kComplete: return 1;
    case TopologyKind::kCustom: return 10;
  }
  return 10;
}

double mixing_constant(const Topology& topology) {
  const int m = topology.m();
  double lambda2 = 0.0;
  double lambda_max = 0.0;
  switch (topology.kind()) {
    case TopologyKind::kHypercube: {
      const int d = static_cast<int>(std::lround(std::log2(m)));
      lambda2 = 2.0;
      lambda_max = 2.0 * d;
      break;
    }
    case TopologyKind::kCycle: {
      constexpr double kPi = std::numbers::pi;
      lambda2 = 2.0 - 2.0 * std::cos(2.0 * kPi / m);
      lambda_max = 2.0 - 2.0 * std::cos(2.0 * kPi * (m / 2) / m);
      break;
    }
    case TopologyKind::kComplete:
      lambda2 = m;
      lambda_max = m;
      break;
    case TopologyKind::kCustom: {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(topology.laplacian(),
                                                Eigen::EigenvaluesOnly);
      lambda2 = eig.eigenvalues()(1);
      lambda_max = eig.eigenvalues()(m - 1);
      break;
    }
  }
  if (!(lambda2 > 1e-12)) {
    throw DisconnectedGraph("consensus_matrix: lambda_2(L) = " +
                            std::to_string(lambda2));
  }
  return 2.0 / (lambda2 + lambda_max);
}

Matrix consensus_matrix(const Topology& topology) {
  const double c = mixing_constant(topology);
  return Matrix::Identity(topology.m(), topology.m()) - c * topology.laplacian();
}

ConsensusSpec make_consensus(const Topology& topology, int rounds_per_iteration) {
  if (rounds_per_iteration < 1) {
    throw InvalidArgument("consensus: rounds per iteration must be >= 1");
  }
  return {consensus_matrix(topology), rounds_per_iteration};
}

void RoundLedger::record(int iteration, int rounds) {
  if (rounds < 0) {
    throw InvalidArgument("RoundLedger: negative round count");
  }
  total_ += rounds;
  log_.emplace_back(iteration, rounds);
}

std::vector<Matrix> average_consensus(const std::vector<Matrix>& states,
                                      const ConsensusSpec& spec,
                                      RoundLedger& ledger, int iteration) {
  const Index m = spec.w.rows();
  if (static_cast<Index>(states.size()) != m || spec.w.cols() != m) {
    throw DimensionMismatch("average_consensus: " + std::to_string(states.size()) +
                            " states for a " + std::to_string(m) + "-agent W");
  }
  for (const auto& s : states) {
    if (s.rows() != states.front().rows() || s.cols() != states.front().cols()) {
      throw DimensionMismatch("average_consensus: agent states differ in shape");
    }
  }
  std::vector<Matrix> cur = states;
  std::vector<Matrix> next(states.size());
  for (int round = 0; round < spec.rounds_per_iteration; ++round) {
    for (Index i = 0; i < m; ++i) {
      Matrix acc = Matrix::Zero(cur[i].rows(), cur[i].cols());
      for (Index j = 0; j < m; ++j) {
        const double w = spec.w(i, j);
        if (w != 0.0) acc += w * cur[j];
      }
      next[i] = std::move(acc);
    }
    std::swap(cur, next);
  }
  ledger.record(iteration, spec.rounds_per_iteration);
  return cur;
}

}  // namespace gravnet
