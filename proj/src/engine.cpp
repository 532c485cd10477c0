#include "wsn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsn {

Workload make_workload(const SimConfig& cfg) {
  Workload w;
  w.lambda = cfg.lambda;
  w.total_events = cfg.total_events;
  return w;
}

std::vector<SimTime> poisson_arrivals(double lambda, std::optional<std::size_t> max_events,
                                      std::optional<SimTime> horizon, Rng& rng) {
  if (!max_events && !horizon) throw std::invalid_argument("poisson_arrivals: unbounded workload");
  std::vector<SimTime> out;
  if (!(lambda > 0.0)) return out;
  std::exponential_distribution<double> gap(lambda);
  SimTime t = 0.0;
  while (!max_events || out.size() < *max_events) {
    t += gap(rng);
    if (horizon && t > *horizon) break;
    out.push_back(t);
  }
  return out;
}

Topology make_topology(const SimConfig& cfg, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "topology"));
  if (cfg.deployment == Deployment::Square) return deploy_square(cfg.nodes, cfg.area, cfg.range_m, rng);
  return deploy_disk(cfg.nodes, cfg.area, cfg.range_m, rng);
}

Simulator::Simulator(const SimConfig& cfg, Topology topo, const Workload& workload,
                     std::uint64_t seed, TraceWriter* trace)
    : cfg_(cfg),
      topo_(std::move(topo)),
      mac_(nullptr),
      channel_(topo_),
      source_rng_(derive_seed(seed, "sources")),
      trace_(trace) {
  cfg_.validate();
  if (topo_.size() == 0) throw ConfigError("topology has no sink (node 0)");
  for (const auto& s : workload.scripted) {
    if (s.node >= topo_.size()) throw ConfigError("scripted event at unknown node");
  }
  mac_ = make_protocol(cfg_.protocol, cfg_.mac_params());

  const std::size_t n = topo_.size();
  const AdaptiveWindowState window = cfg_.initial_window();
  nodes_.reserve(n);
  node_rng_.reserve(n);
  for (NodeId i = 0; i < n; ++i) {
    nodes_.emplace_back(i, i == 0, window, cfg_.t_inactive, cfg_.hop_table_capacity, cfg_.hop_timer);
    node_rng_.emplace_back(derive_seed(seed, "node", i));
  }
  busy_until_.assign(n, 0.0);

  Rng arrivals_rng(derive_seed(seed, "arrivals"));
  SimTime last = 0.0;
  for (SimTime t : poisson_arrivals(workload.lambda, workload.total_events,
                                    workload.horizon ? workload.horizon
                                                     : std::optional<SimTime>{},
                                    arrivals_rng)) {
    push(t, EvKind::Sense, 0, TimerKind::Backoff, 0);
    ++senses_left_;
    last = t;
  }
  for (const auto& s : workload.scripted) {
    push(s.at, EvKind::Sense, s.node, TimerKind::Backoff, 1);
    ++senses_left_;
    last = std::max(last, s.at);
  }
  // Backstop only; runs normally end once no data is pending.
  horizon_ = last + 20.0 * cfg_.effective_ttl() + 10.0 * cfg_.hop_timer + 60.0;

  push(TrafficCounter::kPeriod, EvKind::TrafficTick, 0);
  for (NodeId i = 0; i < n; ++i) {
    scratch_.clear();
    mac_->on_start(nodes_[i], 0.0, node_rng_[i], scratch_);
    apply(i, scratch_);
  }
}

Simulator::~Simulator() = default;

void Simulator::push(SimTime at, EvKind kind, NodeId node, TimerKind timer, std::uint64_t ref) {
  queue_.push(Event{at, seq_++, kind, node, timer, ref});
}

void Simulator::schedule_kill(SimTime at, NodeId node) {
  if (node >= topo_.size()) throw std::invalid_argument("kill_node: unknown node");
  if (node == 0) throw std::invalid_argument("kill_node: the sink cannot be killed");
  push(std::max(at, now_), EvKind::Kill, node);
}

void Simulator::trace(std::string_view kind, NodeId node, MsgId msg, int hop) {
  if (trace_) trace_->line(now_, kind, node, msg, hop);
}

void Simulator::apply(NodeId node, Actions& actions) {
  for (auto& action : actions) {
    if (auto* tx = std::get_if<Transmit>(&action)) {
      std::uint64_t slot;
      if (free_slots_.empty()) {
        slot = slots_.size();
        slots_.emplace_back();
      } else {
        slot = free_slots_.back();
        free_slots_.pop_back();
      }
      // A node sends one frame at a time; later frames queue behind it.
      const SimTime start = std::max(now_, busy_until_[node]);
      const SimTime end = start + cfg_.effective_airtime();
      busy_until_[node] = end;
      tx->packet.sender = node;
      slots_[slot] = Transmission{node, tx->packet, start, end};
      if (tx->packet.kind == PacketKind::Data) ++airborne_data_;
      push(start, EvKind::TxStart, node, TimerKind::Backoff, slot);
    } else if (auto* t = std::get_if<StartTimer>(&action)) {
      push(std::max(t->at, now_), EvKind::Timer, node, t->kind, t->token);
    } else if (auto* d = std::get_if<Drop>(&action)) {
      ++metrics_.drops;
      if (d->reason == DropReason::Gate) {
        ++metrics_.gate_drops;
        trace("drop_gate", node, d->msg, nodes_[node].hop(now_));
      } else {
        ++metrics_.ttl_drops;
        trace("drop_ttl", node, d->msg, nodes_[node].hop(now_));
      }
    } else if (auto* f = std::get_if<Fallback>(&action)) {
      ++metrics_.fallback_count;
      trace("fallback", node, f->msg, nodes_[node].hop(now_));
    }
  }
  actions.clear();
}

NodeId Simulator::pick_source() {
  std::vector<NodeId> alive;
  const std::size_t n = topo_.size();
  // Fast path: draw until an alive non-sink node comes up.
  std::uniform_int_distribution<NodeId> pick(1, static_cast<NodeId>(n - 1));
  for (int tries = 0; tries < 64; ++tries) {
    const NodeId c = pick(source_rng_);
    if (topo_.alive(c)) return c;
  }
  for (NodeId i = 1; i < n; ++i) {
    if (topo_.alive(i)) alive.push_back(i);
  }
  if (alive.empty()) return 0;
  std::uniform_int_distribution<std::size_t> pick_alive(0, alive.size() - 1);
  return alive[pick_alive(source_rng_)];
}

void Simulator::on_sense(SimTime, std::optional<NodeId> fixed) {
  --senses_left_;
  NodeId node;
  if (fixed) {
    node = *fixed;
  } else {
    if (topo_.size() < 2) return;
    node = pick_source();
  }
  if (node == 0 || !topo_.alive(node)) return;
  const MsgId msg = static_cast<MsgId>(metrics_.data_sent);
  ++metrics_.data_sent;
  trace("sense", node, msg, nodes_[node].hop(now_));
  NodeState& st = nodes_[node];
  const std::size_t before = st.queue.size();
  mac_->on_sense(st, msg, now_, node_rng_[node], scratch_);
  queued_data_ = queued_data_ + st.queue.size() - before;
  apply(node, scratch_);
}

void Simulator::on_tx_start(std::uint64_t slot) {
  Transmission& tx = slots_[slot];
  if (!topo_.alive(tx.sender)) {
    if (tx.packet.kind == PacketKind::Data) --airborne_data_;
    free_slots_.push_back(slot);
    return;
  }
  ++stats_.tx_start_events;
  ++metrics_.tx_count;
  switch (tx.packet.kind) {
    case PacketKind::Beacon:
      ++metrics_.beacon_tx;
      trace("tx_beacon", tx.sender, tx.packet.msg_id, tx.packet.hop_count);
      break;
    case PacketKind::Control:
      ++metrics_.control_tx;
      trace("tx_control", tx.sender, tx.packet.msg_id, tx.packet.hop_count);
      break;
    case PacketKind::Data:
      ++metrics_.data_tx;
      trace("tx_data", tx.sender, tx.packet.msg_id, tx.packet.hop_count);
      break;
  }
  if (log_tx_) tx_log_.push_back(tx);
  channel_.begin(slot, tx.sender);
  push(tx.end, EvKind::TxEnd, tx.sender, TimerKind::Backoff, slot);
}

void Simulator::on_tx_end(std::uint64_t slot) {
  const Transmission tx = slots_[slot];
  free_slots_.push_back(slot);
  fates_.clear();
  channel_.end(slot, tx.sender, fates_);
  // Handlers can schedule new transmissions, so work from a copy.
  const std::vector<Channel::Result> fates = fates_;
  for (const auto& r : fates) {
    switch (r.fate) {
      case Channel::Fate::Collided:
        ++metrics_.drops;
        ++metrics_.collision_drops;
        trace("drop_collision", r.receiver, tx.packet.msg_id, tx.packet.hop_count);
        continue;
      case Channel::Fate::HalfDuplex:
        ++stats_.half_duplex_losses;
        continue;
      case Channel::Fate::Dead:
        continue;
      case Channel::Fate::Delivered:
        break;
    }
    if (r.receiver == 0 && tx.packet.kind == PacketKind::Data &&
        delivered_.insert(tx.packet.msg_id)) {
      ++metrics_.data_delivered;
      metrics_.delays.push_back(now_ - tx.packet.created_at);
      deliveries_.push_back({now_, tx.packet.msg_id, tx.packet.origin});
      trace("deliver", 0, tx.packet.msg_id, tx.packet.hop_count);
    }
    NodeState& st = nodes_[r.receiver];
    const std::size_t before = st.queue.size();
    mac_->on_receive(st, tx.packet, now_, node_rng_[r.receiver], scratch_);
    queued_data_ = queued_data_ + st.queue.size() - before;
    apply(r.receiver, scratch_);
  }
  if (tx.packet.kind == PacketKind::Data) --airborne_data_;
}

void Simulator::on_kill(NodeId node) {
  if (!topo_.alive(node)) return;
  topo_.set_alive(node, false);
  NodeState& st = nodes_[node];
  queued_data_ -= st.queue.size();
  st.queue.clear();
  st.round.reset();
  trace("kill", node, -1, kUnknownHop);
}

bool Simulator::quiescent() const {
  return senses_left_ == 0 && queued_data_ == 0 && airborne_data_ == 0;
}

bool Simulator::step() {
  if (finished_) return false;
  if (queue_.empty() || queue_.top().at > horizon_) {
    finished_ = true;
    stats_.end_time = now_;
    stats_.collision_episodes = channel_.collisions();
    return false;
  }
  const Event ev = queue_.top();
  queue_.pop();
  now_ = ev.at;
  ++stats_.events_processed;

  switch (ev.kind) {
    case EvKind::Timer:
      if (topo_.alive(ev.node)) {
        NodeState& st = nodes_[ev.node];
        const std::size_t before = st.queue.size();
        mac_->on_timer(st, ev.timer, ev.ref, now_, node_rng_[ev.node], scratch_);
        queued_data_ = queued_data_ + st.queue.size() - before;
        apply(ev.node, scratch_);
      }
      break;
    case EvKind::TxStart:
      on_tx_start(ev.ref);
      break;
    case EvKind::TxEnd:
      on_tx_end(ev.ref);
      break;
    case EvKind::Sense:
      on_sense(ev.at, ev.ref ? std::optional<NodeId>(ev.node) : std::nullopt);
      break;
    case EvKind::Kill:
      on_kill(ev.node);
      break;
    case EvKind::TrafficTick:
      // One tick event covers every node; all periods share boundaries.
      for (NodeId i = 0; i < nodes_.size(); ++i) {
        if (topo_.alive(i)) mac_->on_traffic_tick(nodes_[i], now_);
      }
      push(now_ + TrafficCounter::kPeriod, EvKind::TrafficTick, 0);
      break;
  }

  if (quiescent()) {
    finished_ = true;
    stats_.end_time = now_;
    stats_.collision_episodes = channel_.collisions();
    return false;
  }
  return true;
}

const Metrics& Simulator::run() {
  while (step()) {
  }
  return metrics_;
}

Metrics run(const SimConfig& cfg, const Topology& topo, const Workload& workload,
            std::uint64_t seed, TraceWriter* trace, RunStats* stats) {
  Simulator sim(cfg, topo, workload, seed, trace);
  Metrics m = sim.run();
  if (stats) *stats = sim.stats();
  return m;
}

Metrics run_simulation(const SimConfig& cfg, TraceWriter* trace, RunStats* stats) {
  cfg.validate();
  return run(cfg, make_topology(cfg, cfg.seed), make_workload(cfg), cfg.seed, trace, stats);
}

}  // namespace wsn
