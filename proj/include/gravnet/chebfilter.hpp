#pragma once

#include <functional>
#include <vector>

namespace gravnet {

/// Coefficients of the three-term recursion
///   f~_t(l) = a_t * ((l + b_t) f~_{t-1}(l) + c_t f~_{t-2}(l)),
/// chosen so f~_t matches the optimal dual-band polynomial f*_t in its three
/// leading monomial coefficients.
struct ChebRecurrence {
  int t = 2;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Degree-ascending monomial coefficients.
class MonomialPoly {
 public:
  MonomialPoly() = default;
  explicit MonomialPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double coeff(int power) const {
    return power >= 0 && power <= degree() ? coeffs_[power] : 0.0;
  }
  /// Horner evaluation.
  double operator()(double lambda) const;

 private:
  std::vector<double> coeffs_;
};

using PolyEvaluator = std::function<double(double)>;

/// s-th root (0 <= s < T) of the degree-T optimal polynomial for stop band
/// [0, alpha]. The root at s = T-1 is exactly zero.
double chebyshev_root(int s, int T, double alpha);

/// Recursion coefficients for step t >= 2.
ChebRecurrence chebyshev_coefficients(int t, double alpha);

/// f*_t(lambda) in product form; f*_t(0) = 0 and f*_t(1) = 1.
double eval_f_star(int t, double alpha, double lambda);

/// f~_t(lambda) by running the recursion from f~_0 = 1, f~_1 = lambda.
double eval_f_tilde(int t, double alpha, double lambda);

/// Monomial coefficients of a degree-`degree` polynomial recovered by
/// interpolation at Chebyshev nodes on [0, 1].
MonomialPoly expand_poly(const PolyEvaluator& f, int degree);

/// f*_t expanded from its roots.
MonomialPoly expand_f_star(int t, double alpha);

/// f~_t expanded by running the recursion on coefficient vectors.
MonomialPoly expand_f_tilde(int t, double alpha);

/// max |f| over [0, alpha] divided by min |f| over [beta, 1], both on uniform
/// grids of `grid_size` points. Throws UnboundedObjective when f vanishes or
/// changes sign on the pass band.
double band_ratio(const PolyEvaluator& f, double alpha, double beta,
                  int grid_size = 10000);

/// The t alternation points of f*_t on [0, alpha], strictly decreasing from
/// gamma_0 = alpha.
std::vector<double> equioscillation_points(int t, double alpha);

}  // namespace gravnet
