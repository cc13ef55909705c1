#include "gravnet/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "gravnet/rgrav.hpp"

namespace gravnet {

namespace {

struct Averaged {
  GrassmannPoint mean;
  int iterations;
};

Averaged average(std::span<const StiefelBasis> members, const AveragingConfig& cfg,
                 OpTally* tally) {
  const StiefelBasis& u0 = members.front();
  const double d2_tol = cfg.tol * cfg.tol;
  switch (cfg.mode) {
    case AveragingMode::kRgrav: {
      RGravConfig rc;
      rc.alpha = cfg.alpha;
      rc.variant = Variant::kAsymptotic;
      rc.max_iter = cfg.max_iter;
      rc.tol = d2_tol;
      AverageResult r = rgrav_asymptotic(members, u0, rc, {{}, tally});
      return {std::move(r.mean), r.iterations};
    }
    case AveragingMode::kPower: {
      AverageResult r = power_method(members, u0, cfg.max_iter, d2_tol, {{}, tally});
      return {std::move(r.mean), r.iterations};
    }
    case AveragingMode::kFrechet: {
      int used = 0;
      GrassmannPoint mean = frechet_mean(
          members, FrechetOptions{cfg.frechet_step, cfg.tol, cfg.max_iter}, tally,
          &used);
      return {std::move(mean), used};
    }
    case AveragingMode::kFlag:
      return {flag_mean(members, tally), 1};
  }
  throw InvalidArgument("unknown averaging mode");
}

}  // namespace

AveragingMode parse_averaging_mode(const std::string& name) {
  if (name == "rgrav") return AveragingMode::kRgrav;
  if (name == "power") return AveragingMode::kPower;
  if (name == "frechet") return AveragingMode::kFrechet;
  if (name == "flag") return AveragingMode::kFlag;
  throw InvalidArgument("unknown averaging mode '" + name + "'");
}

std::string to_string(AveragingMode mode) {
  switch (mode) {
    case AveragingMode::kRgrav: return "rgrav";
    case AveragingMode::kPower: return "power";
    case AveragingMode::kFrechet: return "frechet";
    case AveragingMode::kFlag: return "flag";
  }
  return "unknown";
}

void ClusteringConfig::validate() const {
  if (c < 1) throw InvalidArgument("kmeans: c must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("kmeans: tol must be > 0");
  if (max_iter < 1) throw InvalidArgument("kmeans: max_iter must be >= 1");
  if (!(averaging.tol > 0.0) || averaging.max_iter < 1) {
    throw InvalidArgument("kmeans: averaging needs tol > 0 and max_iter >= 1");
  }
}

OpTally ClusteringResult::total_tally() const {
  OpTally sum;
  for (const auto& call : calls) sum += call.tally;
  return sum;
}

int nearest_center(const StiefelBasis& point, std::span<const GrassmannPoint> centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared_chordal_distance(point.matrix(), centers[c].matrix());
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

ClusteringResult grassmann_kmeans(std::span<const StiefelBasis> points,
                                  const ClusteringConfig& config) {
  config.validate();
  const std::size_t count = points.size();
  if (count < static_cast<std::size_t>(config.c)) {
    throw InvalidArgument("kmeans: " + std::to_string(count) + " points for " +
                          std::to_string(config.c) + " clusters");
  }
  const Index n = points.front().n();
  const Index k = points.front().k();
  for (const auto& p : points) {
    if (p.n() != n || p.k() != k) {
      throw DimensionMismatch("kmeans: points differ in shape");
    }
  }

  Rng rng(config.seed);
  ClusteringResult res;
  for (int c = 0; c < config.c; ++c) {
    res.centers.emplace_back(sample_uniform(n, k, rng));
  }
  auto assign = [&] {
    res.assignments.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      res.assignments[i] = nearest_center(points[i], res.centers);
    }
  };
  assign();

  for (int it = 1; it <= config.max_iter; ++it) {
    std::vector<std::vector<std::size_t>> members(config.c);
    for (std::size_t i = 0; i < count; ++i) members[res.assignments[i]].push_back(i);

    std::vector<bool> taken(count, false);
    for (int c = 0; c < config.c; ++c) {
      if (!members[c].empty()) continue;
      std::size_t far = count;
      double far_d = -1.0;
      for (std::size_t i = 0; i < count; ++i) {
        const int owner = res.assignments[i];
        if (taken[i] || members[owner].size() <= 1) continue;
        const double d = squared_chordal_distance(points[i].matrix(),
                                                  res.centers[owner].matrix());
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == count) {
        throw Error("kmeans: no point available to reseed cluster " + std::to_string(c));
      }
      taken[far] = true;
      auto& old = members[res.assignments[far]];
      old.erase(std::find(old.begin(), old.end(), far));
      members[c].push_back(far);
      res.assignments[far] = c;
    }

    double movement = 0.0;
    for (int c = 0; c < config.c; ++c) {
      std::vector<StiefelBasis> cluster;
      cluster.reserve(members[c].size());
      for (std::size_t i : members[c]) cluster.push_back(points[i]);

      AveragingCall call{it, c, static_cast<int>(cluster.size()), 0, {}};
      try {
        Averaged avg = average(cluster, config.averaging, &call.tally);
        call.inner_iterations = avg.iterations;
        movement = std::max(movement, chordal_distance(avg.mean, res.centers[c]));
        res.centers[c] = std::move(avg.mean);
      } catch (const Error& e) {
        throw Error("kmeans: averaging cluster " + std::to_string(c) +
                    " at iteration " + std::to_string(it) + ": " + e.what());
      }
      res.calls.push_back(call);
    }
    assign();
    res.iterations_used = it;
    if (movement < config.tol) break;
  }
  return res;
}

double cluster_purity(std::span<const int> assignments, std::span<const int> labels) {
  if (assignments.size() != labels.size()) {
    throw DimensionMismatch("cluster_purity: " + std::to_string(assignments.size()) +
                            " assignments vs " + std::to_string(labels.size()) +
                            " labels");
  }
  if (assignments.empty()) {
    throw InvalidArgument("cluster_purity: no points");
  }
  std::map<int, std::map<int, int>> counts;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    ++counts[assignments[i]][labels[i]];
  }
  int matched = 0;
  for (const auto& [cluster, by_label] : counts) {
    int best = 0;
    for (const auto& [label, n] : by_label) best = std::max(best, n);
    matched += best;
  }
  return static_cast<double>(matched) / static_cast<double>(assignments.size());
}

}  // namespace gravnet
