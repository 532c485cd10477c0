#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wsn/core_types.hpp"
#include "wsn/protocols.hpp"

namespace wsn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Deployment : std::uint8_t { Square, Disk };

/// Everything that defines one simulation run besides the seed.
struct SimConfig {
  ProtocolKind protocol = ProtocolKind::Daibsp;
  std::size_t nodes = 1000;  // including the sink, which is node 0
  Deployment deployment = Deployment::Square;
  double area = 500.0;  // square side or disk radius, metres
  double range_m = 50.0;
  double lambda = 5.0;  // events per second
  std::size_t total_events = 2000;

  double alpha = 1.0;
  double beta = 0.0;
  Duration t_min = 0.002;
  Duration t_max_initial = 0.05;
  std::optional<Duration> t_cap;      // default 50 * t_min
  std::optional<Duration> airtime;    // default 0.9 * t_min
  std::optional<Duration> ttl;        // default 100 * t_max_initial
  std::optional<double> d_initial;    // default: mean neighbour count over the deployment
  std::optional<double> i_initial;    // default lambda
  Duration t_inactive = 3600.0;

  std::size_t hop_table_capacity = 10;
  Duration hop_timer = 2.0;
  std::optional<Duration> rebeacon_interval;  // default hop_timer / 2

  std::uint64_t seed = 1;
  bool trace = false;

  Duration effective_t_cap() const { return t_cap.value_or(50.0 * t_min); }
  Duration effective_airtime() const { return airtime.value_or(0.9 * t_min); }
  Duration effective_ttl() const { return ttl.value_or(100.0 * t_max_initial); }
  Duration effective_rebeacon() const { return rebeacon_interval.value_or(hop_timer / 2.0); }
  double deployment_area() const;
  double effective_d_initial() const;
  double effective_i_initial() const { return i_initial.value_or(lambda); }

  MacParams mac_params() const;
  AdaptiveWindowState initial_window() const;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

std::string to_string(Deployment d);

nlohmann::json to_json(const SimConfig& cfg);
// Applies the keys present in `j` on top of `base`; unknown keys throw.
SimConfig apply_overrides(SimConfig base, const nlohmann::json& j);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string digest(const nlohmann::json& j);

}  // namespace wsn
