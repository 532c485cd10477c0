#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "wsn/adaptive_window.hpp"
#include "wsn/core_types.hpp"
#include "wsn/hop_table.hpp"

namespace wsn {

enum class ProtocolKind : std::uint8_t { Arbp, Ibsp, Daibsp };

std::string_view to_string(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol(std::string_view name);

// Beacon waves get msg ids from this base upward so they never clash with
// sensed-event ids.
inline constexpr MsgId kBeaconIdBase = MsgId{1} << 40;

struct MacParams {
  Duration t_min = 0.002;
  Duration airtime = 0.0018;
  Duration ttl = 5.0;
  std::size_t hop_capacity = 10;
  Duration hop_timer = 2.0;
  Duration rebeacon_interval = 1.0;  // 0 disables periodic sink beacons
};

enum class TimerKind : std::uint8_t { Backoff, PhaseOne, PhaseTwo, Beacon, Rebeacon, Purge };
enum class DropReason : std::uint8_t { Gate, Ttl };

std::string_view to_string(TimerKind kind);
std::string_view to_string(DropReason reason);

struct Transmit {
  Packet packet;
};
struct StartTimer {
  TimerKind kind;
  SimTime at;
  std::uint64_t token;
};
struct Drop {
  MsgId msg;
  DropReason reason;
};
// The phase-II eligible set was exhausted and the draw fell back to the
// full window.
struct Fallback {
  MsgId msg;
};

using Action = std::variant<Transmit, StartTimer, Drop, Fallback>;
using Actions = std::vector<Action>;

/// Growable bitset of message ids.
class SeenSet {
 public:
  bool contains(MsgId id) const;
  // Returns false if the id was already present.
  bool insert(MsgId id);

 private:
  std::vector<std::uint64_t> words_;
};

struct QueuedPacket {
  Packet packet;
  // Hop stamped by the neighbour we heard it from; unused for own events.
  int heard_hop = kUnknownHop;
  bool own = false;
};

/// One IBSP two-phase round, all times absolute.
struct IbspRound {
  BackoffWindow window;
  ForbiddenZones zones;
  SimTime phase1_at = 0.0;
  SimTime phase2_at = 0.0;
  bool announced = false;
  bool fallback = false;
};

struct NodeState {
  NodeState(NodeId id, bool is_sink, const AdaptiveWindowState& adaptive,
            Duration t_inactive, std::size_t hop_capacity, Duration hop_timer);

  NodeId id;
  bool is_sink;
  std::deque<QueuedPacket> queue;
  AdaptiveWindowState adaptive;
  DensityTable density;
  TrafficCounter traffic;
  HopTable hop_table;
  SeenSet seen;
  SeenSet gate_dropped;
  std::vector<SimTime> reservations;
  std::optional<IbspRound> round;

  // Bumped whenever pending timers of a kind must be invalidated.
  std::uint64_t data_token = 0;
  std::uint64_t beacon_token = 0;
  bool backoff_pending = false;
  bool beacon_pending = false;
  bool purge_pending = false;
  SimTime adapted_through = 0.0;
  MsgId beacon_wave = -1;
  MsgId beacon_sent_wave = -1;  // at most one rebroadcast per wave
  std::uint64_t fallbacks = 0;

  int hop(SimTime now) const { return is_sink ? 0 : hop_table.current(now); }
};

/// Uniform offset in (t_min, t_max) from the node's current window.
Duration arbp_backoff(const NodeState& state, Rng& rng);

enum class GateDecision : std::uint8_t { Forward, Drop };

/// Base for the three MAC state machines. Handlers mutate the node's own
/// state and emit actions for the engine to carry out.
class MacProtocol {
 public:
  explicit MacProtocol(MacParams params) : params_(params) {}
  virtual ~MacProtocol() = default;

  virtual ProtocolKind kind() const = 0;

  virtual void on_start(NodeState& state, SimTime now, Rng& rng, Actions& out);
  virtual void on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) = 0;
  virtual void on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                          Actions& out) = 0;
  virtual void on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now,
                        Rng& rng, Actions& out) = 0;

  // Closes the 1 s traffic period and adapts T_max.
  void on_traffic_tick(NodeState& state, SimTime now);

  const MacParams& params() const { return params_; }

 protected:
  void observe(NodeState& state, const Packet& pkt, SimTime now);
  bool expired(const Packet& pkt, SimTime now) const { return now - pkt.created_at > params_.ttl; }
  void drop_expired_head(NodeState& state, SimTime now, Actions& out);

  MacParams params_;
};

class ArbpMac : public MacProtocol {
 public:
  using MacProtocol::MacProtocol;

  ProtocolKind kind() const override { return ProtocolKind::Arbp; }
  void on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) override;
  void on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                  Actions& out) override;
  void on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now, Rng& rng,
                Actions& out) override;

 private:
  void schedule(NodeState& state, SimTime now, Rng& rng, Actions& out);
};

class IbspMac : public MacProtocol {
 public:
  using MacProtocol::MacProtocol;

  ProtocolKind kind() const override { return ProtocolKind::Ibsp; }
  void on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) override;
  void on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                  Actions& out) override;
  void on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now, Rng& rng,
                Actions& out) override;

  void ibsp_on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out);
  void ibsp_on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                       Actions& out);
  void ibsp_on_phase1_timer(NodeState& state, SimTime now, Actions& out);
  void ibsp_on_phase2_timer(NodeState& state, SimTime now, Rng& rng, Actions& out);

 protected:
  // Starts a round if the node is idle and has something it may send.
  void maybe_start_round(NodeState& state, SimTime now, Rng& rng, Actions& out);
  void enqueue_forward(NodeState& state, const Packet& pkt, SimTime now, Actions& out);

  virtual bool can_send(const NodeState&, SimTime) const { return true; }
  virtual int stamp_hop(const NodeState&, SimTime) const { return kUnknownHop; }
  enum class Admit : std::uint8_t { Send, Dropped, Hold };
  // Final check on a dequeued packet before it goes on air.
  virtual Admit admit(const NodeState&, const QueuedPacket&, SimTime, Actions&) const {
    return Admit::Send;
  }
  virtual void on_blocked(NodeState&, SimTime, Actions&) {}

 private:
  void start_round(NodeState& state, SimTime now, Rng& rng, Actions& out);
  void draw_phase2(NodeState& state, Rng& rng, Actions& out);
  void handle_announcement(NodeState& state, SimTime t_n, SimTime now, Rng& rng, Actions& out);
  void gc_reservations(NodeState& state, SimTime now) const;
};

class DaibspMac : public IbspMac {
 public:
  using IbspMac::IbspMac;

  ProtocolKind kind() const override { return ProtocolKind::Daibsp; }
  void on_start(NodeState& state, SimTime now, Rng& rng, Actions& out) override;
  void on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                  Actions& out) override;
  void on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now, Rng& rng,
                Actions& out) override;

  // Beacon handling: adopt beacon.hop + 1 and re-flood on strict improvement.
  void daibsp_build(NodeState& state, const Packet& beacon, SimTime now, Rng& rng, Actions& out);
  // Sink-ward filter for a Data frame; also enlists the sender-derived hop.
  GateDecision daibsp_gate(NodeState& state, const Packet& pkt, SimTime now) const;
  int daibsp_recover(const NodeState& state, SimTime now) const { return state.hop(now); }

 protected:
  bool can_send(const NodeState& state, SimTime now) const override;
  int stamp_hop(const NodeState& state, SimTime now) const override { return state.hop(now); }
  Admit admit(const NodeState& state, const QueuedPacket& qp, SimTime now,
              Actions& out) const override;
  void on_blocked(NodeState& state, SimTime now, Actions& out) override;

 private:
  void send_sink_beacon(NodeState& state, SimTime now, Actions& out);
};

std::unique_ptr<MacProtocol> make_protocol(ProtocolKind kind, const MacParams& params);

}  // namespace wsn
