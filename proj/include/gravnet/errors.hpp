#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gravnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that should have been orthonormal was not.
class NotOrthonormal : public Error {
 public:
  using Error::Error;
};

/// Input to a QR-based orthonormalization was numerically rank deficient.
/// In the averaging algorithms this usually means the initial estimate is
/// (nearly) orthogonal to the leading eigenspace, or lambda_K is degenerate.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// The leading K-dimensional subspace is not unique (tied eigenvalues or
/// singular values at the K / K+1 boundary).
class DegenerateGap : public Error {
 public:
  using Error::Error;
};

/// A polynomial has a root in the pass band, so the band ratio is unbounded.
class UnboundedObjective : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

/// The log map is undefined because the base and target contain orthogonal
/// directions (U_base^T U singular).
class LogMapUndefined : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap; carries the last iterate.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, Eigen::MatrixXd last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const Eigen::MatrixXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::MatrixXd last_iterate_;
};

}  // namespace gravnet
