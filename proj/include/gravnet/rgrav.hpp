#pragma once

#include <functional>
#include <span>

#include "gravnet/manifold.hpp"

namespace gravnet {

/// Which iterations perform an exact StableQR; in between, the cached
/// triangular factor from the last one is applied instead.
struct OrthoSchedule {
  int period = 1;  // 0 = never orthonormalize

  bool on(int t) const { return period > 0 && t % period == 0; }

  static OrthoSchedule every(int period) { return OrthoSchedule{period}; }
  static OrthoSchedule never() { return OrthoSchedule{0}; }
};

enum class Variant { kFinite, kAsymptotic };

struct RGravConfig {
  double alpha = 0.15;
  Variant variant = Variant::kAsymptotic;
  int T = 10;  // finite variant: number of iterations (polynomial degree)
  OrthoSchedule ortho;
  int max_iter = 100;  // asymptotic variant
  double tol = 1e-14;  // asymptotic: stop when d^2(U^(t), U^(t-1)) < tol

  void validate() const;
};

/// Centralized iterate buffers. u_prev is kept in the same right coordinates
/// as u_curr (both rescaled by the newest S).
struct IterateState {
  Matrix u_curr;
  Matrix u_prev;
  Matrix s_cache;
  int t = 0;
};

/// Called after iteration t with the current (possibly unnormalized) iterate.
using IterateObserver = std::function<void(int t, const Matrix& iterate)>;

struct RunHooks {
  IterateObserver observer;
  OpTally* tally = nullptr;
};

struct AverageResult {
  GrassmannPoint mean;
  int iterations = 0;
};

/// (1/M) sum_m U_m U_m^T X, summed in ascending m.
Matrix averaged_projection(std::span<const StiefelBasis> collection,
                           const Matrix& x, OpTally* tally = nullptr);

/// Finite RGrAv: applies the T roots of f*_T, one per iteration.
AverageResult rgrav_finite(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, double alpha, int T,
                           OrthoSchedule ortho = {}, const RunHooks& hooks = {});

/// Asymptotic RGrAv: three-term Chebyshev recursion, runs until the
/// successive-iterate squared chordal distance drops below config.tol or
/// config.max_iter iterations.
AverageResult rgrav_asymptotic(std::span<const StiefelBasis> collection,
                               const StiefelBasis& u0,
                               const RGravConfig& config,
                               const RunHooks& hooks = {});

/// Dispatches on config.variant.
AverageResult rgrav(std::span<const StiefelBasis> collection,
                    const StiefelBasis& u0, const RGravConfig& config,
                    const RunHooks& hooks = {});

/// Block power method, exactly T iterations.
AverageResult power_method(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, int T,
                           const RunHooks& hooks = {});

/// Block power method with the asymptotic stop rule.
AverageResult power_method(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, int max_iter, double tol,
                           const RunHooks& hooks = {});

}  // namespace gravnet
