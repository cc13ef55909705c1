#include "gravnet/drgrav.hpp"

#include <string>

#include "gravnet/chebfilter.hpp"

namespace gravnet {

namespace {

enum class StepRule { kFiniteRoots, kAsymptotic, kPower };

struct StepParams {
  StepRule rule = StepRule::kPower;
  double alpha = 0.15;
  int T = 1;
  OrthoSchedule ortho;
};

StableQrResult agent_qr(const Matrix& z, std::size_t agent, int t) {
  try {
    return stable_qr(z);
  } catch (const RankDeficient& e) {
    throw RankDeficient("agent " + std::to_string(agent) + ", iteration " +
                        std::to_string(t) + ": " + e.what());
  }
}

std::vector<GrassmannPoint> run(std::vector<AgentState>& agents,
                                const ConsensusSpec& spec, int iterations,
                                const StepParams& p, RoundLedger& ledger,
                                const AgentObserver& observer) {
  if (agents.empty()) {
    throw InvalidArgument("decentralized run: no agents");
  }
  if (static_cast<Index>(agents.size()) != spec.w.rows()) {
    throw DimensionMismatch("decentralized run: " + std::to_string(agents.size()) +
                            " agents but W is " + std::to_string(spec.w.rows()) +
                            "x" + std::to_string(spec.w.rows()));
  }
  if (iterations < 1) {
    throw InvalidArgument("decentralized run: need at least one iteration");
  }

  std::vector<Matrix> tracked(agents.size());
  for (int t = 1; t <= iterations; ++t) {
    double r = 0.0;
    ChebRecurrence rec;
    if (p.rule == StepRule::kFiniteRoots) {
      r = chebyshev_root(t - 1, p.T, p.alpha);
    } else if (p.rule == StepRule::kAsymptotic && t >= 2) {
      rec = chebyshev_coefficients(t, p.alpha);
    }

    for (std::size_t m = 0; m < agents.size(); ++m) {
      AgentState& ag = agents[m];
      const Matrix a = local_project(ag.data_basis, ag.u_curr);
      Matrix y;
      switch (p.rule) {
        case StepRule::kFiniteRoots:
          y = (a - r * ag.u_curr) / (1.0 - r);
          break;
        case StepRule::kAsymptotic:
          y = t == 1 ? a : Matrix(rec.a * (a + rec.b * ag.u_curr + rec.c * ag.u_prev));
          break;
        case StepRule::kPower:
          y = a;
          break;
      }
      ag.y_prev = std::move(ag.y_curr);
      ag.y_curr = std::move(y);
      ag.z_track = t == 1 ? ag.y_curr : Matrix(ag.z_hat + ag.y_curr - ag.y_prev);
      tracked[m] = ag.z_track;
    }

    std::vector<Matrix> mixed = average_consensus(tracked, spec, ledger, t);

    for (std::size_t m = 0; m < agents.size(); ++m) {
      AgentState& ag = agents[m];
      ag.z_hat = std::move(mixed[m]);
      ag.u_prev = std::move(ag.u_curr);
      if (p.ortho.on(t)) {
        StableQrResult qr = agent_qr(ag.z_hat, m, t);
        ag.u_curr = qr.u.matrix();
        ag.s_cache = std::move(qr.s);
        ag.orthonormal = true;
      } else {
        ag.u_curr = ag.z_hat * ag.s_cache;
        ag.orthonormal = false;
      }
      if (p.rule == StepRule::kAsymptotic) {
        ag.u_prev = ag.u_prev * ag.s_cache;
      }
    }
    if (observer) observer(t, agents);
  }

  std::vector<GrassmannPoint> out;
  out.reserve(agents.size());
  for (Matrix& basis : agent_bases(agents)) {
    out.emplace_back(StiefelBasis(std::move(basis)));
  }
  return out;
}

}  // namespace

std::vector<AgentState> make_agents(std::span<const StiefelBasis> data,
                                    const StiefelBasis& u0) {
  std::vector<AgentState> agents;
  agents.reserve(data.size());
  for (const auto& u : data) {
    if (u.n() != u0.n() || u.k() != u0.k()) {
      throw DimensionMismatch("make_agents: data and u0 shapes differ");
    }
    const Matrix zero = Matrix::Zero(u0.n(), u0.k());
    agents.push_back(AgentState{u, u0.matrix(), u0.matrix(), zero, zero, zero,
                                zero, Matrix::Identity(u0.k(), u0.k()), true});
  }
  return agents;
}

std::vector<GrassmannPoint> drgrav_finite(std::vector<AgentState>& agents,
                                          const ConsensusSpec& spec,
                                          double alpha, int T,
                                          OrthoSchedule ortho,
                                          RoundLedger& ledger,
                                          const AgentObserver& observer) {
  RGravConfig{alpha, Variant::kFinite, T, ortho}.validate();
  return run(agents, spec, T, {StepRule::kFiniteRoots, alpha, T, ortho}, ledger,
             observer);
}

std::vector<GrassmannPoint> drgrav_asymptotic(std::vector<AgentState>& agents,
                                              const ConsensusSpec& spec,
                                              const RGravConfig& config,
                                              RoundLedger& ledger,
                                              const AgentObserver& observer) {
  config.validate();
  return run(agents, spec, config.max_iter,
             {StepRule::kAsymptotic, config.alpha, 1, config.ortho}, ledger,
             observer);
}

std::vector<GrassmannPoint> deepca_adapted(std::vector<AgentState>& agents,
                                           const ConsensusSpec& spec, int T,
                                           RoundLedger& ledger,
                                           const AgentObserver& observer) {
  return run(agents, spec, T, {StepRule::kPower, 0.15, 1, OrthoSchedule::every(1)},
             ledger, observer);
}

std::vector<Matrix> agent_bases(std::span<const AgentState> agents) {
  std::vector<Matrix> bases;
  bases.reserve(agents.size());
  for (const auto& ag : agents) {
    bases.push_back(ag.orthonormal ? ag.u_curr : orthonormalize(ag.u_curr));
  }
  return bases;
}

double mse_metric(std::span<const Matrix> bases, const GrassmannPoint& truth) {
  if (bases.empty()) {
    throw InvalidArgument("mse_metric: no agents");
  }
  double sum = 0.0;
  for (const auto& b : bases) {
    sum += squared_chordal_distance(b, truth.matrix());
  }
  return sum / static_cast<double>(bases.size());
}

double mse_metric(std::span<const AgentState> agents, const GrassmannPoint& truth) {
  const std::vector<Matrix> bases = agent_bases(agents);
  return mse_metric(std::span<const Matrix>(bases), truth);
}

double msd_metric(std::span<const Matrix> bases) {
  const std::size_t m = bases.size();
  if (m < 2) {
    throw InvalidArgument("msd_metric: need at least 2 agents");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      sum += squared_chordal_distance(bases[i], bases[j]);
    }
  }
  return 2.0 * sum / (static_cast<double>(m) * static_cast<double>(m - 1));
}

double msd_metric(std::span<const AgentState> agents) {
  const std::vector<Matrix> bases = agent_bases(agents);
  return msd_metric(std::span<const Matrix>(bases));
}

}  // namespace gravnet
