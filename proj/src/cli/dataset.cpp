#include "gravnet/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gravnet {

namespace fs = std::filesystem;

namespace {

std::string indexed(const char* stem, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03d.csv", stem, i);
  return buf;
}

double parse_double(std::string_view s, const fs::path& path, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(path.string() + ":" + std::to_string(line) +
                          ": bad number '" + std::string(s) + "'");
  }
  return x;
}

StiefelBasis as_basis(Matrix m) {
  if (StiefelBasis::orthonormality_error(m) <= kStiefelTol) {
    return StiefelBasis(std::move(m));
  }
  return StiefelBasis(orthonormalize(m));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), path, lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionMismatch(path.string() + ":" + std::to_string(lineno) +
                              ": expected " + std::to_string(rows.front().size()) +
                              " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument(path.string() + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Dataset generate_dataset(int n, int k, int m, double sigma, std::uint64_t seed,
                         int clusters) {
  if (k < 1 || n < 2 * k) {
    throw InvalidArgument("gen: need k >= 1 and n >= 2k, got n=" + std::to_string(n) +
                          " k=" + std::to_string(k));
  }
  if (m < 1) throw InvalidArgument("gen: m must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidArgument("gen: sigma must be >= 0");
  if (clusters < 0 || clusters > m) {
    throw InvalidArgument("gen: clusters must lie in [0, m]");
  }

  Dataset d;
  d.n = n;
  d.k = k;
  d.sigma = sigma;
  d.seed = seed;
  d.clusters = clusters;

  Rng rng(seed);
  const int centers = clusters == 0 ? 1 : clusters;
  std::vector<StiefelBasis> c;
  for (int i = 0; i < centers; ++i) {
    c.push_back(sample_uniform(n, k, rng));
    d.centers.push_back(c.back().matrix());
  }
  for (int i = 0; i < m; ++i) {
    const int label = clusters == 0 ? 0 : static_cast<int>(
        static_cast<std::int64_t>(i) * clusters / m);
    d.bases.push_back(sample_cluster(c[label], sigma, rng));
    if (clusters > 0) d.labels.push_back(label);
  }
  if (clusters == 0) {
    d.ground_truth = iam_ground_truth(d.bases).mean.matrix();
  }
  return d;
}

void write_dataset(const fs::path& dir, const Dataset& data) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta;
  meta["n"] = data.n;
  meta["k"] = data.k;
  meta["m"] = data.m();
  meta["sigma"] = data.sigma;
  meta["seed"] = data.seed;
  meta["format"] = kDatasetFormat;
  if (data.clusters > 0) meta["clusters"] = data.clusters;
  open_out(dir / "meta.json") << meta.dump(2) << '\n';

  if (data.clusters == 0) {
    write_matrix_csv(dir / "center.csv", data.centers.at(0));
  } else {
    for (std::size_t i = 0; i < data.centers.size(); ++i) {
      write_matrix_csv(dir / indexed("center", static_cast<int>(i)), data.centers[i]);
    }
  }
  if (data.ground_truth) write_matrix_csv(dir / "ground_truth.csv", *data.ground_truth);
  for (int i = 0; i < data.m(); ++i) {
    write_matrix_csv(dir / indexed("basis", i), data.bases[i].matrix());
  }
  if (!data.labels.empty()) {
    std::ofstream out = open_out(dir / "labels.csv");
    for (int label : data.labels) out << label << '\n';
  }
}

Dataset read_dataset(const fs::path& dir) {
  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in) throw InvalidArgument("no meta.json in " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }
  if (meta.value("format", std::string()) != kDatasetFormat) {
    throw InvalidArgument((dir / "meta.json").string() + ": unsupported format");
  }

  Dataset d;
  int m = 0;
  try {
    d.n = meta.at("n").get<int>();
    d.k = meta.at("k").get<int>();
    m = meta.at("m").get<int>();
    d.sigma = meta.at("sigma").get<double>();
    d.seed = meta.at("seed").get<std::uint64_t>();
    d.clusters = meta.value("clusters", 0);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }

  auto check_shape = [&](const Matrix& x, const fs::path& path) {
    if (x.rows() != d.n || x.cols() != d.k) {
      throw DimensionMismatch(path.string() + ": expected " + std::to_string(d.n) +
                              "x" + std::to_string(d.k));
    }
  };

  if (fs::exists(dir / "center.csv")) {
    d.centers.push_back(read_matrix_csv(dir / "center.csv"));
  }
  for (int i = 0; i < d.clusters; ++i) {
    d.centers.push_back(read_matrix_csv(dir / indexed("center", i)));
  }
  for (const auto& c : d.centers) check_shape(c, dir);
  if (fs::exists(dir / "ground_truth.csv")) {
    d.ground_truth = read_matrix_csv(dir / "ground_truth.csv");
    check_shape(*d.ground_truth, dir / "ground_truth.csv");
  }
  for (int i = 0; i < m; ++i) {
    const fs::path path = dir / indexed("basis", i);
    Matrix x = read_matrix_csv(path);
    check_shape(x, path);
    d.bases.push_back(as_basis(std::move(x)));
  }
  if (fs::exists(dir / "labels.csv")) {
    std::ifstream in(dir / "labels.csv");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      try {
        d.labels.push_back(std::stoi(line));
      } catch (const std::exception&) {
        throw InvalidArgument((dir / "labels.csv").string() + ": bad label '" +
                              line + "'");
      }
    }
    if (static_cast<int>(d.labels.size()) != m) {
      throw DimensionMismatch((dir / "labels.csv").string() + ": " +
                              std::to_string(d.labels.size()) + " labels for " +
                              std::to_string(m) + " points");
    }
  }
  return d;
}

}  // namespace gravnet
