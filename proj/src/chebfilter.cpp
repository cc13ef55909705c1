#include "gravnet/chebfilter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "gravnet/errors.hpp"

namespace gravnet {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha, const char* where) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument(std::string(where) + ": alpha must lie in (0, 1)");
  }
}

// log(g_s) with g_s = T_s(z_s - r_s) / z_s^s, r_s = cos(pi / 2s),
// z_s = (1 + r_s) / alpha. The argument of T_s exceeds 1, so
// T_s(x) = cosh(s acosh x), taken in log form to stay finite for large s.
double log_g(int s, double alpha) {
  if (s == 0) return 0.0;
  const double r = std::cos(kPi / (2.0 * s));
  const double z = (1.0 + r) / alpha;
  const double u = s * std::acosh(z - r);
  const double log_tau = u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
  return log_tau - s * std::log(z);
}

struct ZQ {
  double z;
  double q;
};

ZQ z_and_q(int s, double alpha) {
  const double r = std::cos(kPi / (2.0 * s));
  const double z = (1.0 + r) / alpha;
  return {z, -r / z};
}

}  // namespace

double MonomialPoly::operator()(double lambda) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * lambda + *it;
  }
  return acc;
}

double chebyshev_root(int s, int T, double alpha) {
  if (T < 1 || s < 0 || s >= T) {
    throw InvalidArgument("chebyshev_root: need 0 <= s < T, got s=" +
                          std::to_string(s) + " T=" + std::to_string(T));
  }
  check_alpha(alpha, "chebyshev_root");
  // cos(pi (T - 1/2) / T) = -cos(pi / 2T) exactly; rounding would not cancel.
  if (s == T - 1) return 0.0;
  const double c = std::cos(kPi / (2.0 * T));
  return alpha * (std::cos(kPi * (s + 0.5) / T) + c) / (1.0 + c);
}

ChebRecurrence chebyshev_coefficients(int t, double alpha) {
  if (t < 2) {
    throw InvalidArgument("chebyshev_coefficients: need t >= 2, got " +
                          std::to_string(t));
  }
  check_alpha(alpha, "chebyshev_coefficients");

  const double lg_tm2 = log_g(t - 2, alpha);
  const double lg_tm1 = log_g(t - 1, alpha);
  const double lg_t = log_g(t, alpha);
  const double a_tm1 = 2.0 * std::exp(lg_tm2 - lg_tm1);
  const double a_t = 2.0 * std::exp(lg_tm1 - lg_t);

  const ZQ prev = z_and_q(t - 1, alpha);
  const ZQ cur = z_and_q(t, alpha);

  ChebRecurrence rec;
  rec.t = t;
  rec.alpha = alpha;
  rec.a = a_t;
  rec.b = t * cur.q - (t - 1) * prev.q;
  if (t == 2) {
    rec.c = 0.0;
  } else {
    const double dq = cur.q - prev.q;
    rec.c = 0.25 * a_tm1 *
            (2.0 * t * (t - 1) * dq * dq - t / (cur.z * cur.z) +
             (t - 1) / (prev.z * prev.z));
  }
  return rec;
}

double eval_f_star(int t, double alpha, double lambda) {
  if (t < 1) {
    throw InvalidArgument("eval_f_star: need t >= 1");
  }
  double value = 1.0;
  for (int s = 0; s < t; ++s) {
    const double r = chebyshev_root(s, t, alpha);
    value *= (lambda - r) / (1.0 - r);
  }
  return value;
}

double eval_f_tilde(int t, double alpha, double lambda) {
  if (t < 1) {
    throw InvalidArgument("eval_f_tilde: need t >= 1");
  }
  if (t == 1) return eval_f_star(1, alpha, lambda);
  double older = 1.0;
  double old = lambda;
  for (int s = 2; s <= t; ++s) {
    const ChebRecurrence rec = chebyshev_coefficients(s, alpha);
    const double next = rec.a * ((lambda + rec.b) * old + rec.c * older);
    older = old;
    old = next;
  }
  return old;
}

MonomialPoly expand_poly(const PolyEvaluator& f, int degree) {
  if (degree < 0) {
    throw InvalidArgument("expand_poly: negative degree");
  }
  const int n = degree + 1;
  // Chebyshev coefficients of f(l) in y = 2l - 1 from values at the n
  // Chebyshev-Gauss nodes (discrete orthogonality).
  std::vector<double> values(n);
  for (int j = 0; j < n; ++j) {
    const double y = std::cos(kPi * (j + 0.5) / n);
    values[j] = f(0.5 * (y + 1.0));
  }
  std::vector<double> cheb(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += values[j] * std::cos(kPi * k * (j + 0.5) / n);
    }
    cheb[k] = (k == 0 ? 1.0 : 2.0) * acc / n;
  }
  // Convert: T_0 = 1, T_1 = 2l - 1, T_{k+1} = 2(2l - 1) T_k - T_{k-1}.
  std::vector<double> out(n, 0.0);
  std::vector<double> t_prev(n, 0.0);
  std::vector<double> t_cur(n, 0.0);
  t_prev[0] = 1.0;
  if (n > 1) {
    t_cur[0] = -1.0;
    t_cur[1] = 2.0;
  }
  out[0] += cheb[0];
  for (int k = 1; k < n; ++k) {
    for (int i = 0; i < n; ++i) out[i] += cheb[k] * t_cur[i];
    if (k + 1 < n) {
      std::vector<double> t_next(n, 0.0);
      for (int i = 0; i < n; ++i) {
        t_next[i] -= 2.0 * t_cur[i] + t_prev[i];
        if (i + 1 < n) t_next[i + 1] += 4.0 * t_cur[i];
      }
      t_prev = std::move(t_cur);
      t_cur = std::move(t_next);
    }
  }
  return MonomialPoly(std::move(out));
}

MonomialPoly expand_f_star(int t, double alpha) {
  if (t < 1) {
    throw InvalidArgument("expand_f_star: need t >= 1");
  }
  std::vector<double> c{1.0};
  for (int s = 0; s < t; ++s) {
    const double r = chebyshev_root(s, t, alpha);
    const double scale = 1.0 / (1.0 - r);
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i] * scale;
      next[i] -= c[i] * r * scale;
    }
    c = std::move(next);
  }
  return MonomialPoly(std::move(c));
}

MonomialPoly expand_f_tilde(int t, double alpha) {
  if (t < 1) {
    throw InvalidArgument("expand_f_tilde: need t >= 1");
  }
  check_alpha(alpha, "expand_f_tilde");
  std::vector<double> older{1.0};
  std::vector<double> old{0.0, 1.0};
  for (int s = 2; s <= t; ++s) {
    const ChebRecurrence rec = chebyshev_coefficients(s, alpha);
    std::vector<double> next(old.size() + 1, 0.0);
    for (std::size_t i = 0; i < old.size(); ++i) {
      next[i + 1] += old[i];
      next[i] += rec.b * old[i];
    }
    for (std::size_t i = 0; i < older.size(); ++i) {
      next[i] += rec.c * older[i];
    }
    for (double& v : next) v *= rec.a;
    older = std::move(old);
    old = std::move(next);
  }
  return MonomialPoly(std::move(old));
}

double band_ratio(const PolyEvaluator& f, double alpha, double beta,
                  int grid_size) {
  if (!(alpha > 0.0 && alpha < beta && beta <= 1.0)) {
    throw InvalidArgument("band_ratio: need 0 < alpha < beta <= 1");
  }
  if (grid_size < 1000) {
    throw InvalidArgument("band_ratio: grid_size must be >= 1000");
  }
  const double last = grid_size - 1;
  double stop_max = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    stop_max = std::max(stop_max, std::abs(f(alpha * i / last)));
  }
  double pass_min = std::numeric_limits<double>::infinity();
  double first_sign = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double lambda = i == grid_size - 1 ? 1.0 : beta + (1.0 - beta) * i / last;
    const double v = f(lambda);
    const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    if (sign == 0.0 || (first_sign != 0.0 && sign != first_sign)) {
      throw UnboundedObjective("band_ratio: polynomial has a root in [beta, 1]");
    }
    first_sign = sign;
    pass_min = std::min(pass_min, std::abs(v));
  }
  if (pass_min < 1e-300) {
    throw UnboundedObjective("band_ratio: pass-band minimum is zero");
  }
  return stop_max / pass_min;
}

std::vector<double> equioscillation_points(int t, double alpha) {
  if (t < 1) {
    throw InvalidArgument("equioscillation_points: need t >= 1");
  }
  check_alpha(alpha, "equioscillation_points");
  const double c = std::cos(kPi / (2.0 * t));
  std::vector<double> gamma(t);
  for (int s = 0; s < t; ++s) {
    gamma[s] = alpha * (std::cos(kPi * s / t) + c) / (1.0 + c);
  }
  return gamma;
}

}  // namespace gravnet
