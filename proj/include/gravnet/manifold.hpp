#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gravnet/errors.hpp"

namespace gravnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// Tolerance on max |U^T U - I| accepted for a Stiefel representative.
inline constexpr double kStiefelTol = 1e-10;
/// Tolerance on lambda_K - lambda_{K+1} (and sigma_K - sigma_{K+1}) below
/// which the leading subspace is treated as not unique.
inline constexpr double kGapTol = 1e-10;
/// Two Grassmann points closer than this (chordal) compare equal.
inline constexpr double kPointEqualityTol = 1e-8;

/// Running count of dense work done by an averaging routine. A "matmul" is one
/// dense matrix-matrix product with an N-sized dimension; decompositions
/// (QR, SVD) are counted separately.
struct OpTally {
  std::int64_t matmuls = 0;
  std::int64_t decompositions = 0;

  OpTally& operator+=(const OpTally& o) {
    matmuls += o.matmuls;
    decompositions += o.decompositions;
    return *this;
  }
};

/// An N x K matrix with orthonormal columns.
class StiefelBasis {
 public:
  /// Validates orthonormality; throws NotOrthonormal otherwise.
  explicit StiefelBasis(Matrix data, double tol = kStiefelTol);

  const Matrix& matrix() const { return data_; }
  Index n() const { return data_.rows(); }
  Index k() const { return data_.cols(); }

  /// max |U^T U - I|
  static double orthonormality_error(const Matrix& u);

 private:
  Matrix data_;
};

/// A point of Gr(n, k), held through one Stiefel representative.
class GrassmannPoint {
 public:
  explicit GrassmannPoint(StiefelBasis rep) : rep_(std::move(rep)) {}

  const StiefelBasis& rep() const { return rep_; }
  const Matrix& matrix() const { return rep_.matrix(); }
  Index n() const { return rep_.n(); }
  Index k() const { return rep_.k(); }

  /// Span equality: chordal distance <= tol.
  bool approx_equal(const GrassmannPoint& other,
                    double tol = kPointEqualityTol) const;

 private:
  StiefelBasis rep_;
};

/// A tangent vector at `base`; delta must be horizontal (base^T delta = 0).
class TangentVector {
 public:
  TangentVector(StiefelBasis base, Matrix delta, double tol = kStiefelTol);

  const StiefelBasis& base() const { return base_; }
  const Matrix& delta() const { return delta_; }

 private:
  StiefelBasis base_;
  Matrix delta_;
};

/// Full eigendecomposition of the averaged projector, eigenvalues sorted
/// non-increasing. Only produced by iam_ground_truth.
struct ProjectorSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;
};

struct StableQrResult {
  StiefelBasis u;
  Matrix s;  // upper triangular, Z * S = U
};

/// Sign-stabilized thin QR: U is the Q-factor whose R-factor has a strictly
/// positive diagonal and S = R^{-1}. Throws RankDeficient if the smallest
/// singular value of Z is <= 1e-12 times the largest.
StableQrResult stable_qr(const Matrix& z, OpTally* tally = nullptr);

/// Completes stable_qr from an arbitrary thin QR factorization Z = Q R.
/// The result depends only on Z, not on the column signs of Q.
StableQrResult stable_qr_from_factors(const Matrix& q, const Matrix& r);

/// Squared chordal distance, 0.5 * ||U_a U_a^T - U_b U_b^T||_F^2.
double squared_chordal_distance(const Matrix& a, const Matrix& b);
double chordal_distance(const GrassmannPoint& a, const GrassmannPoint& b);

/// U (U^T X) without forming the N x N projector.
Matrix local_project(const StiefelBasis& basis, const Matrix& x);

struct IamResult {
  GrassmannPoint mean;
  ProjectorSpectrum spectrum;
};

/// Induced arithmetic mean via dense eigendecomposition of the averaged
/// projector. Forms an N x N matrix; intended as a ground-truth oracle.
IamResult iam_ground_truth(std::span<const StiefelBasis> collection);

/// Haar-uniform point of St(n, k) (Q-factor of a Gaussian matrix).
StiefelBasis sample_uniform(Index n, Index k, Rng& rng);

/// Grassmann exponential map via the thin SVD of the tangent direction.
StiefelBasis exp_map(const TangentVector& t);

/// Inverse of exp_map: the horizontal tangent at `base` pointing to [target].
Matrix log_map(const StiefelBasis& base, const StiefelBasis& target,
               OpTally* tally = nullptr);

/// exp_{center}(U~ diag(sigma z) V~^T) with U~ uniform on the orthogonal
/// complement of the center, V~ uniform on O(k) and z standard normal.
StiefelBasis sample_cluster(const StiefelBasis& center, double sigma,
                            Rng& rng);

/// Span of the top-K left singular vectors of [U_1 | ... | U_M].
GrassmannPoint flag_mean(std::span<const StiefelBasis> collection,
                         OpTally* tally = nullptr);

struct FrechetOptions {
  double step = 1.0;
  double tol = 1e-10;
  int max_iter = 200;
};

/// Karcher mean under the geodesic distance by Riemannian gradient descent,
/// started from the first element of the collection.
GrassmannPoint frechet_mean(std::span<const StiefelBasis> collection,
                            const FrechetOptions& opts,
                            OpTally* tally = nullptr,
                            int* iterations_used = nullptr);

/// Thin orthonormal basis for span(x) (stable_qr's U), for metrics on
/// iterates that are not on the orthonormalization schedule.
Matrix orthonormalize(const Matrix& x);

/// Draws an n x k matrix of i.i.d. standard normals in column-major order.
Matrix gaussian_matrix(Index n, Index k, Rng& rng);

}  // namespace gravnet
