#include "wsn/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace wsn {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Arbp:
      return "arbp";
    case ProtocolKind::Ibsp:
      return "ibsp";
    case ProtocolKind::Daibsp:
      return "daibsp";
  }
  return "unknown";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "arbp") return ProtocolKind::Arbp;
  if (lower == "ibsp") return ProtocolKind::Ibsp;
  if (lower == "daibsp") return ProtocolKind::Daibsp;
  return std::nullopt;
}

std::string_view to_string(TimerKind kind) {
  switch (kind) {
    case TimerKind::Backoff:
      return "backoff";
    case TimerKind::PhaseOne:
      return "phase1";
    case TimerKind::PhaseTwo:
      return "phase2";
    case TimerKind::Beacon:
      return "beacon";
    case TimerKind::Rebeacon:
      return "rebeacon";
    case TimerKind::Purge:
      return "purge";
  }
  return "unknown";
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::Gate:
      return "gate";
    case DropReason::Ttl:
      return "ttl";
  }
  return "unknown";
}

bool SeenSet::contains(MsgId id) const {
  if (id < 0) return false;
  const auto word = static_cast<std::size_t>(id) / 64;
  return word < words_.size() && (words_[word] >> (id % 64) & 1U) != 0;
}

bool SeenSet::insert(MsgId id) {
  if (id < 0) return false;
  const auto word = static_cast<std::size_t>(id) / 64;
  if (word >= words_.size()) words_.resize(std::max(word + 1, words_.size() * 2), 0);
  const std::uint64_t bit = std::uint64_t{1} << (id % 64);
  if (words_[word] & bit) return false;
  words_[word] |= bit;
  return true;
}

NodeState::NodeState(NodeId id_, bool is_sink_, const AdaptiveWindowState& adaptive_,
                     Duration t_inactive, std::size_t hop_capacity, Duration hop_timer)
    : id(id_),
      is_sink(is_sink_),
      adaptive(adaptive_),
      density(t_inactive),
      traffic(0.0),
      hop_table(hop_capacity, hop_timer) {}

Duration arbp_backoff(const NodeState& state, Rng& rng) {
  return uniform_open(rng, state.adaptive.t_min, state.adaptive.t_max);
}

// ---------------------------------------------------------------------------

void MacProtocol::on_start(NodeState&, SimTime, Rng&, Actions&) {}

void MacProtocol::observe(NodeState& state, const Packet& pkt, SimTime now) {
  state.density.observe(pkt.sender, now);
  state.traffic.record(now);
}

void MacProtocol::on_traffic_tick(NodeState& state, SimTime now) {
  state.traffic.roll(now);
  if (state.traffic.period_start() <= state.adapted_through) return;
  state.adapted_through = state.traffic.period_start();
  const auto d_now = state.density.density(now);
  // Nothing heard yet: there is no density evidence to adapt on.
  if (d_now == 0) return;
  adapt_tmax(state.adaptive, static_cast<double>(d_now), state.traffic.last_rate());
}

void MacProtocol::drop_expired_head(NodeState& state, SimTime now, Actions& out) {
  while (!state.queue.empty() && expired(state.queue.front().packet, now)) {
    out.push_back(Drop{state.queue.front().packet.msg_id, DropReason::Ttl});
    state.queue.pop_front();
  }
}

// ---------------------------------------------------------------------------
// ARBP: one uniform back-off per queued packet.

void ArbpMac::schedule(NodeState& state, SimTime now, Rng& rng, Actions& out) {
  if (state.backoff_pending || state.queue.empty()) return;
  state.backoff_pending = true;
  out.push_back(StartTimer{TimerKind::Backoff, now + arbp_backoff(state, rng), ++state.data_token});
}

void ArbpMac::on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) {
  state.seen.insert(msg);
  state.queue.push_back({Packet::data(msg, state.id, now), kUnknownHop, true});
  schedule(state, now, rng, out);
}

void ArbpMac::on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                         Actions& out) {
  observe(state, pkt, now);
  if (pkt.kind != PacketKind::Data) return;
  if (!state.seen.insert(pkt.msg_id) || state.is_sink) return;
  if (expired(pkt, now)) {
    out.push_back(Drop{pkt.msg_id, DropReason::Ttl});
    return;
  }
  state.queue.push_back({pkt, pkt.hop_count, false});
  schedule(state, now, rng, out);
}

void ArbpMac::on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now,
                       Rng& rng, Actions& out) {
  if (kind != TimerKind::Backoff || token != state.data_token || !state.backoff_pending) return;
  state.backoff_pending = false;
  drop_expired_head(state, now, out);
  if (state.queue.empty()) return;
  Packet pkt = state.queue.front().packet;
  state.queue.pop_front();
  pkt.sender = state.id;
  pkt.hop_count = kUnknownHop;
  out.push_back(Transmit{pkt});
  schedule(state, now, rng, out);
}

// ---------------------------------------------------------------------------
// IBSP: Control frame announces the phase-II time, Data follows at it.

void IbspMac::on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) {
  ibsp_on_sense(state, msg, now, rng, out);
}

void IbspMac::on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                         Actions& out) {
  ibsp_on_receive(state, pkt, now, rng, out);
}

void IbspMac::on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now,
                       Rng& rng, Actions& out) {
  if (token != state.data_token) return;
  if (kind == TimerKind::PhaseOne) {
    ibsp_on_phase1_timer(state, now, out);
  } else if (kind == TimerKind::PhaseTwo) {
    ibsp_on_phase2_timer(state, now, rng, out);
  }
}

void IbspMac::ibsp_on_sense(NodeState& state, MsgId msg, SimTime now, Rng& rng, Actions& out) {
  state.seen.insert(msg);
  state.queue.push_back({Packet::data(msg, state.id, now), kUnknownHop, true});
  maybe_start_round(state, now, rng, out);
}

void IbspMac::ibsp_on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                              Actions& out) {
  observe(state, pkt, now);
  switch (pkt.kind) {
    case PacketKind::Control:
      if (pkt.announced_backoff) handle_announcement(state, *pkt.announced_backoff, now, rng, out);
      break;
    case PacketKind::Data:
      if (state.is_sink) {
        state.seen.insert(pkt.msg_id);
        break;
      }
      enqueue_forward(state, pkt, now, out);
      maybe_start_round(state, now, rng, out);
      break;
    case PacketKind::Beacon:
      break;
  }
}

void IbspMac::enqueue_forward(NodeState& state, const Packet& pkt, SimTime now, Actions& out) {
  if (!state.seen.insert(pkt.msg_id)) return;
  if (expired(pkt, now)) {
    out.push_back(Drop{pkt.msg_id, DropReason::Ttl});
    return;
  }
  state.queue.push_back({pkt, pkt.hop_count, false});
}

void IbspMac::maybe_start_round(NodeState& state, SimTime now, Rng& rng, Actions& out) {
  if (state.round || state.queue.empty() || state.is_sink) return;
  if (!can_send(state, now)) {
    on_blocked(state, now, out);
    return;
  }
  start_round(state, now, rng, out);
}

void IbspMac::gc_reservations(NodeState& state, SimTime now) const {
  const Duration keep = state.adaptive.t_min + params_.airtime;
  std::erase_if(state.reservations, [&](SimTime t) { return t + keep < now; });
}

void IbspMac::start_round(NodeState& state, SimTime now, Rng& rng, Actions& out) {
  drop_expired_head(state, now, out);
  if (state.queue.empty()) return;
  gc_reservations(state, now);

  const Duration t_min = state.adaptive.t_min;
  const Duration t_max = state.adaptive.t_max;
  BackoffWindow window(now + t_max + t_min, now + 2.0 * t_max);
  ForbiddenZones zones(window);
  for (SimTime t : state.reservations) zones.insert(t - t_min, t + t_min);

  state.round.emplace(IbspRound{window, std::move(zones), now + arbp_backoff(state, rng), 0.0,
                                false, false});
  draw_phase2(state, rng, out);
  out.push_back(StartTimer{TimerKind::PhaseOne, state.round->phase1_at, ++state.data_token});
}

void IbspMac::draw_phase2(NodeState& state, Rng& rng, Actions& out) {
  IbspRound& round = *state.round;
  auto t = sample_eligible(round.window, round.zones, rng);
  if (!t) {
    round.fallback = true;
    ++state.fallbacks;
    out.push_back(Fallback{state.queue.front().packet.msg_id});
    t = uniform_open(rng, round.window.lo(), round.window.hi());
  }
  round.phase2_at = *t;
}

void IbspMac::handle_announcement(NodeState& state, SimTime t_n, SimTime now, Rng& rng,
                                  Actions& out) {
  state.reservations.push_back(t_n);
  if (!state.round) return;
  IbspRound& round = *state.round;
  const Duration t_min = state.adaptive.t_min;
  round.zones.insert(t_n - t_min, t_n + t_min);
  if (round.fallback || std::abs(round.phase2_at - t_n) > t_min) return;

  if (!round.announced) {
    draw_phase2(state, rng, out);
    return;
  }

  // Already announced a now-conflicting time: pick again and re-announce
  // after a fresh phase-I back-off, keeping data strictly after the Control.
  const SimTime announce_at = now + arbp_backoff(state, rng);
  SimTime lo = std::max(round.window.lo(), announce_at + t_min);
  SimTime hi = round.window.hi();
  if (hi - lo <= kSaturationEpsilon) {
    const Duration width = round.window.width();
    lo = announce_at + t_min;
    hi = lo + width;
  }
  round.window = BackoffWindow(lo, hi);
  round.zones = ForbiddenZones(round.window);
  for (SimTime t : state.reservations) round.zones.insert(t - t_min, t + t_min);
  round.phase1_at = announce_at;
  round.announced = false;
  draw_phase2(state, rng, out);
  out.push_back(StartTimer{TimerKind::PhaseOne, announce_at, ++state.data_token});
}

void IbspMac::ibsp_on_phase1_timer(NodeState& state, SimTime now, Actions& out) {
  if (!state.round || state.round->announced || state.queue.empty()) return;
  IbspRound& round = *state.round;
  round.announced = true;
  out.push_back(Transmit{Packet::control(state.queue.front().packet.msg_id, state.id,
                                         round.phase2_at, stamp_hop(state, now))});
  out.push_back(StartTimer{TimerKind::PhaseTwo, round.phase2_at, state.data_token});
}

void IbspMac::ibsp_on_phase2_timer(NodeState& state, SimTime now, Rng& rng, Actions& out) {
  if (!state.round) return;
  state.round.reset();
  while (!state.queue.empty()) {
    const QueuedPacket qp = state.queue.front();
    if (expired(qp.packet, now)) {
      out.push_back(Drop{qp.packet.msg_id, DropReason::Ttl});
      state.queue.pop_front();
      continue;
    }
    const Admit verdict = admit(state, qp, now, out);
    if (verdict == Admit::Hold) break;
    state.queue.pop_front();
    if (verdict == Admit::Dropped) continue;
    Packet pkt = qp.packet;
    pkt.sender = state.id;
    pkt.hop_count = stamp_hop(state, now);
    out.push_back(Transmit{pkt});
    break;
  }
  maybe_start_round(state, now, rng, out);
}

// ---------------------------------------------------------------------------
// DAIBSP: IBSP plus a beacon-built hop gradient that gates forwarding.

void DaibspMac::on_start(NodeState& state, SimTime now, Rng&, Actions& out) {
  if (!state.is_sink) return;
  send_sink_beacon(state, now, out);
  if (params_.rebeacon_interval > 0.0) {
    out.push_back(StartTimer{TimerKind::Rebeacon, now + params_.rebeacon_interval, 0});
  }
}

void DaibspMac::send_sink_beacon(NodeState& state, SimTime, Actions& out) {
  ++state.beacon_wave;
  out.push_back(Transmit{Packet::beacon(kBeaconIdBase + state.beacon_wave, state.id, 0)});
}

void DaibspMac::on_timer(NodeState& state, TimerKind kind, std::uint64_t token, SimTime now,
                         Rng& rng, Actions& out) {
  switch (kind) {
    case TimerKind::Rebeacon:
      if (!state.is_sink) return;
      send_sink_beacon(state, now, out);
      out.push_back(StartTimer{TimerKind::Rebeacon, now + params_.rebeacon_interval, 0});
      return;
    case TimerKind::Beacon: {
      if (token != state.beacon_token || !state.beacon_pending) return;
      state.beacon_pending = false;
      const int hop = state.hop(now);
      if (hop >= 0 && state.beacon_wave > state.beacon_sent_wave) {
        state.beacon_sent_wave = state.beacon_wave;
        out.push_back(Transmit{Packet::beacon(kBeaconIdBase + state.beacon_wave, state.id, hop)});
      }
      return;
    }
    case TimerKind::Purge: {
      state.purge_pending = false;
      std::erase_if(state.queue, [&](const QueuedPacket& qp) {
        if (!expired(qp.packet, now)) return false;
        out.push_back(Drop{qp.packet.msg_id, DropReason::Ttl});
        return true;
      });
      maybe_start_round(state, now, rng, out);
      return;
    }
    default:
      IbspMac::on_timer(state, kind, token, now, rng, out);
  }
}

void DaibspMac::on_receive(NodeState& state, const Packet& pkt, SimTime now, Rng& rng,
                           Actions& out) {
  if (pkt.kind == PacketKind::Beacon) {
    observe(state, pkt, now);
    daibsp_build(state, pkt, now, rng, out);
    return;
  }
  if (state.is_sink) {
    ibsp_on_receive(state, pkt, now, rng, out);
    return;
  }
  if (pkt.kind == PacketKind::Data) {
    if (daibsp_gate(state, pkt, now) == GateDecision::Drop) {
      observe(state, pkt, now);
      if (!state.seen.contains(pkt.msg_id) && state.gate_dropped.insert(pkt.msg_id)) {
        out.push_back(Drop{pkt.msg_id, DropReason::Gate});
      }
      maybe_start_round(state, now, rng, out);
      return;
    }
  } else if (pkt.hop_count >= 0) {
    state.hop_table.enlist(pkt.hop_count + 1, now);
  }
  ibsp_on_receive(state, pkt, now, rng, out);
  // A reception may have taught a blocked node its hop.
  maybe_start_round(state, now, rng, out);
}

void DaibspMac::daibsp_build(NodeState& state, const Packet& beacon, SimTime now, Rng& rng,
                             Actions& out) {
  if (state.is_sink || beacon.kind != PacketKind::Beacon) return;
  const int before = state.hop(now);
  state.hop_table.enlist(beacon.hop_count + 1, now);
  if (before != kUnknownHop && beacon.hop_count + 1 >= before) return;

  state.beacon_wave = std::max(state.beacon_wave, beacon.msg_id - kBeaconIdBase);
  if (!state.beacon_pending && state.beacon_wave > state.beacon_sent_wave) {
    state.beacon_pending = true;
    out.push_back(StartTimer{TimerKind::Beacon, now + arbp_backoff(state, rng), ++state.beacon_token});
  }
  maybe_start_round(state, now, rng, out);
}

GateDecision DaibspMac::daibsp_gate(NodeState& state, const Packet& pkt, SimTime now) const {
  const int own = state.hop(now);
  if (pkt.hop_count >= 0) state.hop_table.enlist(pkt.hop_count + 1, now);
  // Unknown position: listen only.
  if (own == kUnknownHop || pkt.hop_count < own) return GateDecision::Drop;
  return GateDecision::Forward;
}

bool DaibspMac::can_send(const NodeState& state, SimTime now) const {
  return state.hop(now) != kUnknownHop;
}

IbspMac::Admit DaibspMac::admit(const NodeState& state, const QueuedPacket& qp, SimTime now,
                                Actions& out) const {
  const int own = state.hop(now);
  if (own == kUnknownHop) return Admit::Hold;
  // Never carry a packet away from the sink relative to where we heard it.
  if (!qp.own && own > qp.heard_hop) {
    out.push_back(Drop{qp.packet.msg_id, DropReason::Gate});
    return Admit::Dropped;
  }
  return Admit::Send;
}

void DaibspMac::on_blocked(NodeState& state, SimTime, Actions& out) {
  if (state.purge_pending || state.queue.empty()) return;
  SimTime oldest = state.queue.front().packet.created_at;
  for (const auto& qp : state.queue) oldest = std::min(oldest, qp.packet.created_at);
  // first instant at which expired() holds; rounding can make oldest + ttl
  // itself compare as not yet expired
  SimTime at = oldest + params_.ttl;
  while (!(at - oldest > params_.ttl)) at = std::nextafter(at, 1e300);
  state.purge_pending = true;
  out.push_back(StartTimer{TimerKind::Purge, at, 0});
}

// ---------------------------------------------------------------------------

std::unique_ptr<MacProtocol> make_protocol(ProtocolKind kind, const MacParams& params) {
  switch (kind) {
    case ProtocolKind::Arbp:
      return std::make_unique<ArbpMac>(params);
    case ProtocolKind::Ibsp:
      return std::make_unique<IbspMac>(params);
    case ProtocolKind::Daibsp:
      return std::make_unique<DaibspMac>(params);
  }
  return nullptr;
}

}  // namespace wsn
