#include "wsn/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wsn {

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Beacon:
      return "beacon";
    case PacketKind::Control:
      return "control";
    case PacketKind::Data:
      return "data";
  }
  return "unknown";
}

Packet Packet::beacon(MsgId id, NodeId sender, int hop) {
  Packet p;
  p.kind = PacketKind::Beacon;
  p.msg_id = id;
  p.origin = sender;
  p.sender = sender;
  p.hop_count = hop;
  return p;
}

Packet Packet::control(MsgId id, NodeId sender, SimTime announced, int hop) {
  Packet p;
  p.kind = PacketKind::Control;
  p.msg_id = id;
  p.origin = sender;
  p.sender = sender;
  p.hop_count = hop;
  p.announced_backoff = announced;
  return p;
}

Packet Packet::data(MsgId id, NodeId origin, SimTime created_at) {
  Packet p;
  p.kind = PacketKind::Data;
  p.msg_id = id;
  p.origin = origin;
  p.sender = origin;
  p.created_at = created_at;
  return p;
}

void Packet::validate() const {
  if (announced_backoff.has_value() != (kind == PacketKind::Control)) {
    throw std::invalid_argument("announced_backoff must be present iff the frame is Control");
  }
  if (kind == PacketKind::Beacon && hop_count < 0) {
    throw std::invalid_argument("beacon frames must carry a known hop count");
  }
  if (hop_count < kUnknownHop) {
    throw std::invalid_argument("hop_count below the unknown sentinel");
  }
}

BackoffWindow::BackoffWindow(SimTime lo, SimTime hi) : lo_(lo), hi_(hi) {
  if (!(lo < hi)) {
    throw std::invalid_argument("back-off window needs lo < hi, got [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  }
}

ForbiddenZones::ForbiddenZones(BackoffWindow window) : window_(window) {}

void ForbiddenZones::insert(SimTime lo, SimTime hi) {
  lo = std::max(lo, window_.lo());
  hi = std::min(hi, window_.hi());
  if (lo > hi) return;

  // Find the run of intervals that overlap or touch [lo, hi] and fold them in.
  auto first = std::lower_bound(intervals_.begin(), intervals_.end(), lo,
                                [](const Interval& iv, SimTime v) { return iv.hi < v; });
  auto last = first;
  while (last != intervals_.end() && last->lo <= hi) {
    lo = std::min(lo, last->lo);
    hi = std::max(hi, last->hi);
    ++last;
  }
  first = intervals_.erase(first, last);
  intervals_.insert(first, Interval{lo, hi});
}

bool ForbiddenZones::contains(SimTime t) const {
  auto it = std::lower_bound(intervals_.begin(), intervals_.end(), t,
                             [](const Interval& iv, SimTime v) { return iv.hi < v; });
  return it != intervals_.end() && it->lo <= t;
}

Duration ForbiddenZones::measure() const {
  Duration total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

ForbiddenZones zones_subtract(ForbiddenZones zones, SimTime t_n, Duration t_min) {
  zones.insert(t_n - t_min, t_n + t_min);
  return zones;
}

SimTime uniform_open(Rng& rng, SimTime lo, SimTime hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (;;) {
    const double v = dist(rng);
    if (v > lo && v < hi) return v;
  }
}

std::optional<SimTime> sample_eligible(const BackoffWindow& window,
                                       const ForbiddenZones& zones, Rng& rng) {
  std::vector<Interval> gaps;
  gaps.reserve(zones.intervals().size() + 1);
  SimTime cursor = window.lo();
  for (const auto& iv : zones.intervals()) {
    if (iv.lo > cursor) gaps.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  if (window.hi() > cursor) gaps.push_back({cursor, window.hi()});

  Duration total = 0.0;
  for (const auto& g : gaps) total += g.length();
  if (total <= kSaturationEpsilon) return std::nullopt;

  std::uniform_real_distribution<double> dist(0.0, total);
  double u = dist(rng);
  for (const auto& g : gaps) {
    if (u < g.length() || &g == &gaps.back()) {
      SimTime t = g.lo + std::min(u, g.length());
      // Gap edges belong to the closed forbidden intervals or to the open
      // window boundary, so keep the draw strictly inside.
      if (t <= g.lo) t = std::nextafter(g.lo, g.hi);
      if (t >= g.hi) t = std::nextafter(g.hi, g.lo);
      return t;
    }
    u -= g.length();
  }
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index) {
  // FNV-1a over the purpose tag, then mixed with the master seed and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(master ^ h) + index);
}

}  // namespace wsn
