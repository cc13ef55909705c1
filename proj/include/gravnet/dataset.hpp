#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gravnet/manifold.hpp"

namespace gravnet {

inline constexpr const char* kDatasetFormat = "f64-csv-v1";

/// On-disk layout of a dataset directory:
///   meta.json          {"n","k","m","sigma","seed","format"} (+ "clusters")
///   center.csv         single-center datasets
///   center_000.csv...  planted-cluster datasets, one per cluster
///   ground_truth.csv   single-center datasets only
///   basis_000.csv...   one N x K matrix per point
///   labels.csv         optional, one integer per point
struct Dataset {
  int n = 0;
  int k = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  int clusters = 0;  // 0 for a single-center dataset
  std::vector<Matrix> centers;
  std::vector<StiefelBasis> bases;
  std::optional<Matrix> ground_truth;
  std::vector<int> labels;

  int m() const { return static_cast<int>(bases.size()); }
};

/// Seeded synthetic data. With clusters == 0: one Haar center, m points from
/// sample_cluster around it, and the IAM ground truth. With clusters >= 1:
/// that many Haar centers, point i drawn around center i * clusters / m and
/// labelled accordingly.
Dataset generate_dataset(int n, int k, int m, double sigma, std::uint64_t seed,
                         int clusters = 0);

void write_dataset(const std::filesystem::path& dir, const Dataset& data);

/// Reads a dataset directory. Point matrices that are not orthonormal to
/// 1e-10 are replaced by an orthonormal basis of their span.
Dataset read_dataset(const std::filesystem::path& dir);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// One row per line, comma separated.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace gravnet
