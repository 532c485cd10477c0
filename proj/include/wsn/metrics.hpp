#pragma once

#include <cstdint>
#include <vector>

#include "wsn/core_types.hpp"

namespace wsn {

/// Per-run outcome. Everything here is reconstructible from an event trace.
struct Metrics {
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::vector<Duration> delays;  // first arrival per delivered msg_id
  std::uint64_t drops = 0;       // collision + gate + ttl
  std::uint64_t tx_count = 0;    // every frame put on air
  std::uint64_t fallback_count = 0;

  std::uint64_t collision_drops = 0;
  std::uint64_t gate_drops = 0;
  std::uint64_t ttl_drops = 0;
  std::uint64_t beacon_tx = 0;
  std::uint64_t control_tx = 0;
  std::uint64_t data_tx = 0;

  // Mean of first-arrival delays; NaN when nothing was delivered.
  double avg_delay() const;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Counters that are useful for diagnosis but not part of the run outcome.
struct RunStats {
  std::uint64_t collision_episodes = 0;
  std::uint64_t half_duplex_losses = 0;
  std::uint64_t events_processed = 0;
  std::uint64_t tx_start_events = 0;
  SimTime end_time = 0.0;
};

/// 100 * delivered / sent. Throws std::domain_error when nothing was sent.
double success_rate(const Metrics& m);

}  // namespace wsn
