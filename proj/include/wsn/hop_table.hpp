#pragma once

#include <span>
#include <vector>

#include "wsn/core_types.hpp"

namespace wsn {

/// Bounded table of candidate hop counts with soft-state expiry. The node's
/// hop is the smallest entry whose timer is still live.
class HopTable {
 public:
  struct Entry {
    int hop;
    SimTime expires_at;
  };

  explicit HopTable(std::size_t capacity = 10, Duration timer = 2.0);

  // Inserts `hop` with expiry now + timer, refreshing an existing entry of
  // the same value. When full, the largest hop value is evicted (possibly
  // the candidate itself).
  void enlist(int hop, SimTime now);

  // Smallest live entry at `now`, or kUnknownHop. Entries with
  // expires_at < now are dead.
  int current(SimTime now) const;

  void purge(SimTime now);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t capacity() const { return capacity_; }
  Duration timer() const { return timer_; }

 private:
  std::size_t capacity_;
  Duration timer_;
  std::vector<Entry> entries_;
};

}  // namespace wsn
