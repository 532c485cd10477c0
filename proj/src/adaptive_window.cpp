#include "wsn/adaptive_window.hpp"

#include <algorithm>
#include <cmath>

namespace wsn {

void DensityTable::observe(NodeId sender, SimTime now) {
  for (auto& [id, last] : entries_) {
    if (id == sender) {
      last = now;
      return;
    }
  }
  entries_.emplace_back(sender, now);
}

void DensityTable::purge(SimTime now) {
  std::erase_if(entries_, [&](const auto& e) { return now - e.second > t_inactive_; });
}

std::size_t DensityTable::density(SimTime now) {
  purge(now);
  return entries_.size();
}

void TrafficCounter::record(SimTime now) {
  roll(now);
  ++count_;
}

bool TrafficCounter::roll(SimTime now) {
  if (now - period_start_ < kPeriod) return false;
  const double elapsed = std::floor((now - period_start_) / kPeriod);
  // A gap of several periods means the later ones saw nothing.
  last_rate_ = elapsed > 1.0 ? 0.0 : static_cast<double>(count_);
  count_ = 0;
  period_start_ += elapsed * kPeriod;
  return true;
}

Duration change_term(Duration prev_window, double now, double prev) {
  const double denom = now + prev;
  if (denom == 0.0) return 0.0;
  return prev_window * ((now - prev) / denom);
}

Duration adapt_tmax(AdaptiveWindowState& state, double d_now, double i_now) {
  const Duration c_d = change_term(state.t_max, d_now, state.d_prev);
  const Duration c_i = change_term(state.t_max, i_now, state.i_prev);
  const Duration next = state.t_max + state.alpha * c_d + state.beta * c_i;
  state.t_max = std::clamp(next, state.t_floor(), std::max(state.t_cap, state.t_floor()));
  state.d_prev = d_now;
  state.i_prev = i_now;
  return state.t_max;
}

}  // namespace wsn
