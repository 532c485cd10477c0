#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace wsn {

// All times are in seconds of simulated time.
using SimTime = double;
using Duration = double;

using NodeId = std::uint32_t;
using MsgId = std::int64_t;

inline constexpr int kUnknownHop = -1;

using Rng = std::mt19937_64;

enum class PacketKind : std::uint8_t { Beacon, Control, Data };

std::string_view to_string(PacketKind kind);

/// A MAC frame. msg_id is shared by every flooded copy of the same logical
/// message. announced_backoff is an absolute simulation time and is only
/// carried by Control frames.
struct Packet {
  PacketKind kind = PacketKind::Data;
  MsgId msg_id = 0;
  NodeId origin = 0;
  NodeId sender = 0;
  int hop_count = kUnknownHop;
  std::optional<SimTime> announced_backoff;
  SimTime created_at = 0.0;

  static Packet beacon(MsgId id, NodeId sender, int hop);
  static Packet control(MsgId id, NodeId sender, SimTime announced, int hop);
  static Packet data(MsgId id, NodeId origin, SimTime created_at);

  // Checks the kind-dependent field rules; throws std::invalid_argument.
  void validate() const;
};

/// Back-off window (lo, hi); construction enforces lo < hi.
class BackoffWindow {
 public:
  BackoffWindow(SimTime lo, SimTime hi);

  SimTime lo() const { return lo_; }
  SimTime hi() const { return hi_; }
  Duration width() const { return hi_ - lo_; }

  friend bool operator==(const BackoffWindow&, const BackoffWindow&) = default;

 private:
  SimTime lo_;
  SimTime hi_;
};

struct Interval {
  SimTime lo;
  SimTime hi;

  Duration length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Complement measures at or below this are treated as an exhausted
/// eligible set.
inline constexpr Duration kSaturationEpsilon = 1e-6;

/// Sorted, disjoint, non-touching closed intervals clipped to a window.
class ForbiddenZones {
 public:
  explicit ForbiddenZones(BackoffWindow window);

  const BackoffWindow& window() const { return window_; }
  std::span<const Interval> intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  // Union with [lo, hi] clipped to the window. No-op if disjoint from it.
  void insert(SimTime lo, SimTime hi);

  // Membership is closed: an endpoint counts as forbidden.
  bool contains(SimTime t) const;

  Duration measure() const;
  Duration eligible_measure() const { return window_.width() - measure(); }

  friend bool operator==(const ForbiddenZones&, const ForbiddenZones&) = default;

 private:
  BackoffWindow window_;
  std::vector<Interval> intervals_;
};

/// Adds the band [t_n - t_min, t_n + t_min] to the zones.
ForbiddenZones zones_subtract(ForbiddenZones zones, SimTime t_n, Duration t_min);

/// Uniform draw from window \ zones. Returns nullopt (saturated) when the
/// eligible measure is at or below kSaturationEpsilon.
std::optional<SimTime> sample_eligible(const BackoffWindow& window,
                                       const ForbiddenZones& zones, Rng& rng);

/// Uniform draw on the open interval (lo, hi).
SimTime uniform_open(Rng& rng, SimTime lo, SimTime hi);

/// SplitMix64 finalizer; used to derive independent stream seeds from the
/// master seed.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          std::uint64_t index = 0);

}  // namespace wsn
