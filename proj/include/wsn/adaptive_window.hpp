#pragma once

#include <utility>
#include <vector>

#include "wsn/core_types.hpp"

namespace wsn {

/// Local-density estimator: senders heard within the last t_inactive.
class DensityTable {
 public:
  explicit DensityTable(Duration t_inactive = 3600.0) : t_inactive_(t_inactive) {}

  void observe(NodeId sender, SimTime now);
  void purge(SimTime now);

  // d_l(now): live senders after purging.
  std::size_t density(SimTime now);
  std::size_t size() const { return entries_.size(); }
  Duration t_inactive() const { return t_inactive_; }

 private:
  Duration t_inactive_;
  std::vector<std::pair<NodeId, SimTime>> entries_;
};

/// Message-traffic estimator: receptions counted per 1 s period.
class TrafficCounter {
 public:
  static constexpr Duration kPeriod = 1.0;

  explicit TrafficCounter(SimTime start = 0.0) : period_start_(start) {}

  void record(SimTime now);

  // Closes every period that ended by `now`. Returns true if at least one
  // period completed; last_rate() then holds the count of the latest one.
  bool roll(SimTime now);

  std::size_t current_count() const { return count_; }
  double last_rate() const { return last_rate_; }
  SimTime period_start() const { return period_start_; }

 private:
  SimTime period_start_;
  std::size_t count_ = 0;
  double last_rate_ = 0.0;
};

struct AdaptiveWindowState {
  Duration t_min = 0.002;
  Duration t_max = 0.06;
  Duration t_cap = 0.1;
  double d_prev = 0.0;
  double i_prev = 0.0;
  double alpha = 1.0;
  double beta = 0.0;

  Duration t_floor() const { return t_min * 1.01; }
};

// prev_window * (now - prev) / (now + prev), with 0/0 defined as 0.
Duration change_term(Duration prev_window, double now, double prev);

/// T_max(t) = T_max(t-1) + alpha*C_d(t) + beta*C_i(t), clamped to
/// [1.01*t_min, t_cap]. Updates the previous-measurement fields.
Duration adapt_tmax(AdaptiveWindowState& state, double d_now, double i_now);

}  // namespace wsn
