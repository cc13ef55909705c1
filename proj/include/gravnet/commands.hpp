#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gravnet/drgrav.hpp"

namespace gravnet {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  std::string mode;  // gen, avg, dravg, kmeans, cheb-dump
  int n = 150;
  int k = 30;
  int m = 64;
  double sigma = 0.7853981633974483;
  double alpha = 0.15;
  std::string topology = "hypercube";  // or custom:<edge file>
  int rounds = 0;                      // 0: topology default
  std::string variant = "asymptotic";
  std::string algo;  // empty: mode default
  int T = 10;
  int max_iter = 0;           // 0: mode default
  std::optional<double> tol;  // mode default when unset
  int ortho = 1;
  int clusters = 0;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;

  nlohmann::ordered_json to_json() const;
};

/// Applies GRAVNET_SEED if set. Throws InvalidArgument on a malformed value.
void apply_seed_env(ExperimentConfig& config);

void cmd_gen(const ExperimentConfig& config);

/// Centralized averaging; returns the emitted records.
std::vector<ExperimentRecord> cmd_avg(const ExperimentConfig& config);

/// Decentralized averaging; returns the emitted records.
std::vector<ExperimentRecord> cmd_dravg(const ExperimentConfig& config);

/// Returns the achieved purity.
double cmd_kmeans(const ExperimentConfig& config);

/// CSV lambda,f_star,f_tilde,power on lambda = i/1000, i = 0..1000, for the
/// degree-config.T polynomials.
void cmd_cheb_dump(const ExperimentConfig& config, std::ostream& out);

/// Dispatch on config.mode.
void run_command(const ExperimentConfig& config, std::ostream& out);

void write_records(const std::filesystem::path& path,
                   const std::vector<ExperimentRecord>& records);

}  // namespace gravnet
