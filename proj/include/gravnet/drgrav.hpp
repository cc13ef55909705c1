#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gravnet/manifold.hpp"
#include "gravnet/netsim.hpp"
#include "gravnet/rgrav.hpp"

namespace gravnet {

/// Local state of one simulated agent.
struct AgentState {
  StiefelBasis data_basis;  // U_m, never communicated
  Matrix u_curr;            // U_m^(t)
  Matrix u_prev;            // U_m^(t-1)
  Matrix y_curr;            // Y_m^(t)
  Matrix y_prev;            // Y_m^(t-1)
  Matrix z_track;           // Z_m^(t), the gradient-tracking variable
  Matrix z_hat;             // consensus output for Z_m^(t)
  Matrix s_cache;           // S_m
  bool orthonormal = true;  // u_curr came from an exact StableQR
};

/// Agents holding `data`, all starting from the shared estimate u0.
std::vector<AgentState> make_agents(std::span<const StiefelBasis> data,
                                    const StiefelBasis& u0);

using AgentObserver =
    std::function<void(int t, std::span<const AgentState> agents)>;

/// Finite DRGrAv: T iterations, one root of f*_T each.
std::vector<GrassmannPoint> drgrav_finite(std::vector<AgentState>& agents,
                                          const ConsensusSpec& spec,
                                          double alpha, int T,
                                          OrthoSchedule ortho,
                                          RoundLedger& ledger,
                                          const AgentObserver& observer = {});

/// Asymptotic DRGrAv with gradient tracking. Runs exactly config.max_iter
/// iterations (agents have no global view to evaluate a stop rule).
std::vector<GrassmannPoint> drgrav_asymptotic(std::vector<AgentState>& agents,
                                              const ConsensusSpec& spec,
                                              const RGravConfig& config,
                                              RoundLedger& ledger,
                                              const AgentObserver& observer = {});

/// DeEPCA-style tracked power iteration with U_m U_m^T as the local operator
/// and StableQR every iteration.
std::vector<GrassmannPoint> deepca_adapted(std::vector<AgentState>& agents,
                                           const ConsensusSpec& spec, int T,
                                           RoundLedger& ledger,
                                           const AgentObserver& observer = {});

/// Orthonormal span bases of the agents' current iterates.
std::vector<Matrix> agent_bases(std::span<const AgentState> agents);

/// (1/M) sum_m d^2([U_m], truth), chordal d. Bases must be orthonormal.
double mse_metric(std::span<const Matrix> bases, const GrassmannPoint& truth);
double mse_metric(std::span<const AgentState> agents, const GrassmannPoint& truth);

/// Mean of d^2 over all unordered agent pairs; needs M >= 2.
double msd_metric(std::span<const Matrix> bases);
double msd_metric(std::span<const AgentState> agents);

/// One output row of an averaging experiment.
struct ExperimentRecord {
  int iteration = 0;
  std::int64_t comm_rounds = 0;
  double mse = 0.0;
  std::optional<double> msd;  // empty for centralized runs
};

}  // namespace gravnet
