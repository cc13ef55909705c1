#include "gravnet/rgrav.hpp"

#include <string>

#include "gravnet/chebfilter.hpp"

namespace gravnet {

namespace {

void check_inputs(std::span<const StiefelBasis> collection,
                  const StiefelBasis& u0, const char* where) {
  if (collection.empty()) {
    throw InvalidArgument(std::string(where) + ": empty collection");
  }
  for (const auto& u : collection) {
    if (u.n() != u0.n() || u.k() != u0.k()) {
      throw DimensionMismatch(std::string(where) +
                              ": collection and u0 shapes differ");
    }
  }
}

StableQrResult qr_at(const Matrix& z, int t, const char* where,
                     OpTally* tally) {
  try {
    return stable_qr(z, tally);
  } catch (const RankDeficient& e) {
    throw RankDeficient(std::string(where) + ": iteration " +
                        std::to_string(t) + ": " + e.what());
  }
}

// Orthonormal basis for the span of an iterate, for stop checks and output.
Matrix span_basis(const Matrix& u, bool orthonormal, int t, const char* where) {
  return orthonormal ? u : qr_at(u, t, where, nullptr).u.matrix();
}

void add_matmuls(OpTally* tally, std::int64_t n) {
  if (tally != nullptr) tally->matmuls += n;
}

}  // namespace

void RGravConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("RGravConfig: alpha must lie in (0, 1)");
  }
  if (variant == Variant::kFinite && T < 1) {
    throw InvalidArgument("RGravConfig: finite variant requires T >= 1");
  }
  if (ortho.period < 0) {
    throw InvalidArgument("RGravConfig: ortho period must be >= 0");
  }
  if (max_iter < 1 || !(tol >= 0.0)) {
    throw InvalidArgument("RGravConfig: need max_iter >= 1 and tol >= 0");
  }
}

Matrix averaged_projection(std::span<const StiefelBasis> collection,
                           const Matrix& x, OpTally* tally) {
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (const auto& u : collection) {
    sum += local_project(u, x);
  }
  add_matmuls(tally, 2 * static_cast<std::int64_t>(collection.size()));
  return sum / static_cast<double>(collection.size());
}

AverageResult rgrav_finite(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, double alpha, int T,
                           OrthoSchedule ortho, const RunHooks& hooks) {
  constexpr const char* kWhere = "rgrav_finite";
  check_inputs(collection, u0, kWhere);
  RGravConfig{alpha, Variant::kFinite, T, ortho}.validate();

  IterateState st{u0.matrix(), u0.matrix(), Matrix::Identity(u0.k(), u0.k()), 0};
  bool orthonormal = true;
  for (int t = 1; t <= T; ++t) {
    const Matrix a_hat = averaged_projection(collection, st.u_curr, hooks.tally);
    const double r = chebyshev_root(t - 1, T, alpha);
    Matrix z_hat = (a_hat - r * st.u_curr) / (1.0 - r);
    st.u_prev = std::move(st.u_curr);
    if (ortho.on(t)) {
      StableQrResult qr = qr_at(z_hat, t, kWhere, hooks.tally);
      st.u_curr = qr.u.matrix();
      st.s_cache = std::move(qr.s);
      orthonormal = true;
    } else {
      st.u_curr = z_hat * st.s_cache;
      add_matmuls(hooks.tally, 1);
      orthonormal = false;
    }
    st.t = t;
    if (hooks.observer) hooks.observer(t, st.u_curr);
  }
  return {GrassmannPoint(StiefelBasis(span_basis(st.u_curr, orthonormal, T, kWhere))),
          T};
}

AverageResult rgrav_asymptotic(std::span<const StiefelBasis> collection,
                               const StiefelBasis& u0,
                               const RGravConfig& config,
                               const RunHooks& hooks) {
  constexpr const char* kWhere = "rgrav_asymptotic";
  check_inputs(collection, u0, kWhere);
  config.validate();

  IterateState st{u0.matrix(), u0.matrix(), Matrix::Identity(u0.k(), u0.k()), 0};
  Matrix prev_basis = u0.matrix();
  bool orthonormal = true;
  for (int t = 1; t <= config.max_iter; ++t) {
    const Matrix a_hat = averaged_projection(collection, st.u_curr, hooks.tally);
    Matrix z_hat;
    if (t == 1) {
      z_hat = a_hat;
    } else {
      const ChebRecurrence rec = chebyshev_coefficients(t, config.alpha);
      z_hat = rec.a * (a_hat + rec.b * st.u_curr + rec.c * st.u_prev);
    }
    // The buffer holding U^(t-1) becomes U^(t-2) for the next step.
    st.u_prev = std::move(st.u_curr);
    if (config.ortho.on(t)) {
      StableQrResult qr = qr_at(z_hat, t, kWhere, hooks.tally);
      st.u_curr = qr.u.matrix();
      st.s_cache = std::move(qr.s);
      orthonormal = true;
    } else {
      st.u_curr = z_hat * st.s_cache;
      add_matmuls(hooks.tally, 1);
      orthonormal = false;
    }
    st.u_prev = st.u_prev * st.s_cache;
    add_matmuls(hooks.tally, 1);
    st.t = t;
    if (hooks.observer) hooks.observer(t, st.u_curr);

    Matrix basis = span_basis(st.u_curr, orthonormal, t, kWhere);
    const double step = squared_chordal_distance(basis, prev_basis);
    if (step < config.tol || t == config.max_iter) {
      return {GrassmannPoint(StiefelBasis(std::move(basis))), t};
    }
    prev_basis = std::move(basis);
  }
  throw Error("rgrav_asymptotic: unreachable");
}

AverageResult rgrav(std::span<const StiefelBasis> collection,
                    const StiefelBasis& u0, const RGravConfig& config,
                    const RunHooks& hooks) {
  if (config.variant == Variant::kFinite) {
    return rgrav_finite(collection, u0, config.alpha, config.T, config.ortho,
                        hooks);
  }
  return rgrav_asymptotic(collection, u0, config, hooks);
}

namespace {

AverageResult run_power(std::span<const StiefelBasis> collection,
                        const StiefelBasis& u0, int max_iter, double tol,
                        const RunHooks& hooks) {
  constexpr const char* kWhere = "power_method";
  check_inputs(collection, u0, kWhere);
  if (max_iter < 1) {
    throw InvalidArgument("power_method: need at least one iteration");
  }
  Matrix u = u0.matrix();
  for (int t = 1; t <= max_iter; ++t) {
    Matrix next =
        qr_at(averaged_projection(collection, u, hooks.tally), t, kWhere,
              hooks.tally)
            .u.matrix();
    if (hooks.observer) hooks.observer(t, next);
    const bool stop = t == max_iter ||
                      (tol >= 0.0 && squared_chordal_distance(next, u) < tol);
    u = std::move(next);
    if (stop) {
      return {GrassmannPoint(StiefelBasis(std::move(u))), t};
    }
  }
  throw Error("power_method: unreachable");
}

}  // namespace

AverageResult power_method(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, int T,
                           const RunHooks& hooks) {
  return run_power(collection, u0, T, -1.0, hooks);
}

AverageResult power_method(std::span<const StiefelBasis> collection,
                           const StiefelBasis& u0, int max_iter, double tol,
                           const RunHooks& hooks) {
  return run_power(collection, u0, max_iter, tol, hooks);
}

}  // namespace gravnet
