#include "gravnet/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gravnet {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(where) + ": shape " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}

void require_uniform_collection(std::span<const StiefelBasis> collection,
                                const char* where) {
  if (collection.empty()) {
    throw InvalidArgument(std::string(where) + ": empty collection");
  }
  for (const auto& u : collection) {
    require_same_shape(u.matrix(), collection.front().matrix(), where);
  }
}

void count(OpTally* tally, std::int64_t matmuls, std::int64_t decomps) {
  if (tally != nullptr) {
    tally->matmuls += matmuls;
    tally->decompositions += decomps;
  }
}

}  // namespace

StiefelBasis::StiefelBasis(Matrix data, double tol) : data_(std::move(data)) {
  if (data_.cols() == 0 || data_.rows() < data_.cols()) {
    throw DimensionMismatch("StiefelBasis: need n >= k >= 1, got " +
                            std::to_string(data_.rows()) + "x" +
                            std::to_string(data_.cols()));
  }
  const double err = orthonormality_error(data_);
  if (!(err <= tol)) {
    throw NotOrthonormal("StiefelBasis: max |U^T U - I| = " +
                         std::to_string(err));
  }
}

double StiefelBasis::orthonormality_error(const Matrix& u) {
  const Matrix gram = u.transpose() * u;
  return (gram - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

bool GrassmannPoint::approx_equal(const GrassmannPoint& other,
                                  double tol) const {
  return chordal_distance(*this, other) <= tol;
}

TangentVector::TangentVector(StiefelBasis base, Matrix delta, double tol)
    : base_(std::move(base)), delta_(std::move(delta)) {
  require_same_shape(base_.matrix(), delta_, "TangentVector");
  const double off = (base_.matrix().transpose() * delta_).cwiseAbs().maxCoeff();
  if (!(off <= tol)) {
    throw InvalidArgument("TangentVector: not horizontal, max |U^T D| = " +
                          std::to_string(off));
  }
}

StableQrResult stable_qr_from_factors(const Matrix& q, const Matrix& r) {
  const Index k = r.cols();
  // Flip signs first so that the triangular solve always sees the same
  // positive-diagonal R, whatever convention produced (q, r).
  Vector d(k);
  for (Index i = 0; i < k; ++i) {
    const double rii = r(i, i);
    if (rii == 0.0 || !std::isfinite(rii)) {
      throw RankDeficient("stable_qr: zero pivot in column " +
                          std::to_string(i));
    }
    d(i) = rii > 0.0 ? 1.0 : -1.0;
  }
  Matrix r_pos = d.asDiagonal() * r.topRows(k);
  r_pos.triangularView<Eigen::StrictlyLower>().setZero();
  Matrix u = q.leftCols(k) * d.asDiagonal();
  Matrix s = r_pos.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  return {StiefelBasis(std::move(u)), std::move(s)};
}

StableQrResult stable_qr(const Matrix& z, OpTally* tally) {
  const Index n = z.rows();
  const Index k = z.cols();
  if (k == 0 || n < k) {
    throw RankDeficient("stable_qr: " + std::to_string(n) + "x" +
                        std::to_string(k) + " cannot have full column rank");
  }
  if (!z.allFinite()) {
    throw RankDeficient("stable_qr: non-finite input");
  }
  Eigen::HouseholderQR<Matrix> qr(z);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  const Vector sv = Eigen::JacobiSVD<Matrix>(r).singularValues();
  const double smax = sv(0);
  const double smin = sv(k - 1);
  if (!(smax > 0.0) || !(smin > 1e-12 * smax)) {
    throw RankDeficient("stable_qr: numerically rank deficient (sigma_min/"
                        "sigma_max = " + std::to_string(smax > 0 ? smin / smax : 0.0) +
                        ")");
  }
  count(tally, 0, 1);
  return stable_qr_from_factors(q, r);
}

Matrix orthonormalize(const Matrix& x) { return stable_qr(x).u.matrix(); }

double squared_chordal_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "chordal_distance");
  // ||(I - P_a) U_b||_F^2 = K - ||U_a^T U_b||_F^2 for orthonormal inputs; the
  // residual form keeps full relative accuracy for nearby subspaces. Averaging
  // both directions makes the result exactly symmetric.
  const double ra = (b - a * (a.transpose() * b)).squaredNorm();
  const double rb = (a - b * (b.transpose() * a)).squaredNorm();
  return 0.5 * (ra + rb);
}

double chordal_distance(const GrassmannPoint& a, const GrassmannPoint& b) {
  return std::sqrt(squared_chordal_distance(a.matrix(), b.matrix()));
}

Matrix local_project(const StiefelBasis& basis, const Matrix& x) {
  require_same_shape(basis.matrix(), x, "local_project");
  const Matrix coeffs = basis.matrix().transpose() * x;
  return basis.matrix() * coeffs;
}

IamResult iam_ground_truth(std::span<const StiefelBasis> collection) {
  require_uniform_collection(collection, "iam_ground_truth");
  const Index n = collection.front().n();
  const Index k = collection.front().k();

  Matrix p_bar = Matrix::Zero(n, n);
  for (const auto& u : collection) {
    p_bar.noalias() += u.matrix() * u.matrix().transpose();
  }
  p_bar /= static_cast<double>(collection.size());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(p_bar);
  if (eig.info() != Eigen::Success) {
    throw Error("iam_ground_truth: eigendecomposition failed");
  }
  // Eigen sorts ascending; flip to non-increasing.
  ProjectorSpectrum spectrum{eig.eigenvalues().reverse(),
                             eig.eigenvectors().rowwise().reverse()};
  if (k < n) {
    const double gap = spectrum.eigenvalues(k - 1) - spectrum.eigenvalues(k);
    if (gap <= kGapTol) {
      throw DegenerateGap("iam_ground_truth: lambda_K - lambda_{K+1} = " +
                          std::to_string(gap));
    }
  }
  GrassmannPoint mean{StiefelBasis(spectrum.eigenvectors.leftCols(k))};
  return {std::move(mean), std::move(spectrum)};
}

Matrix gaussian_matrix(Index n, Index k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      g(i, j) = normal(rng);
    }
  }
  return g;
}

StiefelBasis sample_uniform(Index n, Index k, Rng& rng) {
  if (k < 1 || n < k) {
    throw InvalidArgument("sample_uniform: need 1 <= k <= n");
  }
  for (;;) {
    try {
      return stable_qr(gaussian_matrix(n, k, rng)).u;
    } catch (const RankDeficient&) {
      // probability zero; draw again
    }
  }
}

StiefelBasis exp_map(const TangentVector& t) {
  const Matrix& base = t.base().matrix();
  const Matrix& delta = t.delta();
  if (delta.isZero(0.0)) {
    return t.base();
  }
  Eigen::JacobiSVD<Matrix> svd(delta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Matrix& w = svd.matrixU();
  const Matrix& v = svd.matrixV();
  const Vector c = sigma.array().cos();
  const Vector s = sigma.array().sin();
  Matrix out = (base * v) * c.asDiagonal() * v.transpose() +
               w * s.asDiagonal() * v.transpose();
  return StiefelBasis(std::move(out));
}

Matrix log_map(const StiefelBasis& base, const StiefelBasis& target,
               OpTally* tally) {
  require_same_shape(base.matrix(), target.matrix(), "log_map");
  const Matrix m = base.matrix().transpose() * target.matrix();
  const Vector msv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  if (!(msv(msv.size() - 1) > 1e-12)) {
    throw LogMapUndefined("log_map: U_base^T U is singular (sigma_min = " +
                          std::to_string(msv(msv.size() - 1)) + ")");
  }
  const Matrix residual = target.matrix() - base.matrix() * m;
  // L = residual * M^{-1}, via M^T L^T = residual^T.
  const Matrix l =
      m.transpose().partialPivLu().solve(residual.transpose()).transpose();
  Eigen::JacobiSVD<Matrix> svd(l, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector theta = svd.singularValues().array().atan();
  count(tally, 4, 2);
  return svd.matrixU() * theta.asDiagonal() * svd.matrixV().transpose();
}

StiefelBasis sample_cluster(const StiefelBasis& center, double sigma,
                            Rng& rng) {
  const Index n = center.n();
  const Index k = center.k();
  if (n < 2 * k) {
    throw InvalidArgument("sample_cluster: need n >= 2k, got n=" +
                          std::to_string(n) + " k=" + std::to_string(k));
  }
  if (!(sigma >= 0.0)) {
    throw InvalidArgument("sample_cluster: sigma must be >= 0");
  }
  const Matrix& c = center.matrix();

  Matrix u_perp;
  for (;;) {
    Matrix g = gaussian_matrix(n, k, rng);
    // two passes of projection keep C^T g at rounding level
    g -= c * (c.transpose() * g);
    g -= c * (c.transpose() * g);
    try {
      u_perp = stable_qr(g).u.matrix();
      break;
    } catch (const RankDeficient&) {
    }
  }
  const StiefelBasis v = sample_uniform(k, k, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(k);
  for (Index i = 0; i < k; ++i) {
    z(i) = sigma * normal(rng);
  }
  Matrix tangent = u_perp * z.asDiagonal() * v.matrix().transpose();
  return exp_map(TangentVector(center, std::move(tangent)));
}

GrassmannPoint flag_mean(std::span<const StiefelBasis> collection,
                         OpTally* tally) {
  require_uniform_collection(collection, "flag_mean");
  const Index n = collection.front().n();
  const Index k = collection.front().k();
  const Index total = k * static_cast<Index>(collection.size());

  Matrix stacked(n, total);
  for (std::size_t m = 0; m < collection.size(); ++m) {
    stacked.middleCols(static_cast<Index>(m) * k, k) = collection[m].matrix();
  }
  Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (sv.size() > k && sv(k - 1) - sv(k) <= kGapTol) {
    throw DegenerateGap("flag_mean: sigma_K - sigma_{K+1} = " +
                        std::to_string(sv(k - 1) - sv(k)));
  }
  count(tally, 0, 1);
  return GrassmannPoint(StiefelBasis(svd.matrixU().leftCols(k)));
}

GrassmannPoint frechet_mean(std::span<const StiefelBasis> collection,
                            const FrechetOptions& opts, OpTally* tally,
                            int* iterations_used) {
  require_uniform_collection(collection, "frechet_mean");
  if (opts.max_iter < 1 || !(opts.tol > 0.0) || !(opts.step > 0.0)) {
    throw InvalidArgument("frechet_mean: need max_iter >= 1, tol > 0, step > 0");
  }
  const double inv_m = 1.0 / static_cast<double>(collection.size());
  StiefelBasis mean = collection.front();
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Matrix grad = Matrix::Zero(mean.n(), mean.k());
    for (const auto& u : collection) {
      grad += log_map(mean, u, tally);
    }
    grad *= opts.step * inv_m;
    if (grad.norm() < opts.tol) {
      if (iterations_used != nullptr) *iterations_used = iter;
      return GrassmannPoint(std::move(mean));
    }
    mean = exp_map(TangentVector(mean, std::move(grad)));
    count(tally, 3, 1);
  }
  throw NotConverged("frechet_mean: no convergence after " +
                         std::to_string(opts.max_iter) + " iterations",
                     mean.matrix());
}

}  // namespace gravnet
