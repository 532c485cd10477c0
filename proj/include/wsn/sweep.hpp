#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsn/config.hpp"
#include "wsn/metrics.hpp"

namespace wsn {

inline constexpr const char* kToolVersion = "wsnsim 0.1.0";

/// Cartesian experiment grid. Every axis missing from the grid file takes
/// the single value from `base`.
struct SweepGrid {
  SimConfig base;
  std::vector<ProtocolKind> protocols;
  std::vector<std::size_t> nodes;
  std::vector<double> lambda;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 1;
  nlohmann::json source;  // the grid as given, for the digest
};

// Keys: protocols, nodes, lambda, alpha, beta, seeds | (replicates,
// master_seed), base. Throws ConfigError.
SweepGrid parse_grid(const nlohmann::json& j);
SweepGrid load_grid(const std::string& path);

/// Cells in deterministic order: nodes, lambda, alpha, beta, protocol, seed.
std::vector<SimConfig> expand(const SweepGrid& grid);

struct SweepRow {
  SimConfig cfg;
  bool ok = false;
  std::string error;
  Metrics metrics;
  double wall_time_s = 0.0;
};

SweepRow run_cell(const SimConfig& cfg);

std::string csv_header();
std::string csv_row(const SweepRow& row);

/// Runs the grid and writes CSV. A cell that fails validation becomes a
/// '#'-comment line and the sweep carries on.
void run_sweep(const SweepGrid& grid, std::ostream& out, unsigned threads = 1);

}  // namespace wsn
