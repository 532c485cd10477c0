#include "wsn/hop_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace wsn {

HopTable::HopTable(std::size_t capacity, Duration timer) : capacity_(capacity), timer_(timer) {
  if (capacity == 0) throw std::invalid_argument("hop table capacity must be positive");
  entries_.reserve(capacity);
}

void HopTable::enlist(int hop, SimTime now) {
  if (hop < 0) return;
  purge(now);
  const SimTime expiry = now + timer_;
  for (auto& e : entries_) {
    if (e.hop == hop) {
      e.expires_at = std::max(e.expires_at, expiry);
      return;
    }
  }
  if (entries_.size() < capacity_) {
    entries_.push_back({hop, expiry});
    return;
  }
  auto worst = std::max_element(entries_.begin(), entries_.end(),
                                [](const Entry& a, const Entry& b) { return a.hop < b.hop; });
  if (worst->hop > hop) *worst = Entry{hop, expiry};
}

int HopTable::current(SimTime now) const {
  int best = kUnknownHop;
  for (const auto& e : entries_) {
    if (e.expires_at < now) continue;
    if (best == kUnknownHop || e.hop < best) best = e.hop;
  }
  return best;
}

void HopTable::purge(SimTime now) {
  std::erase_if(entries_, [&](const Entry& e) { return e.expires_at < now; });
}

}  // namespace wsn
