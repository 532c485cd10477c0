#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/medium.hpp"
#include "wsn/metrics.hpp"
#include "wsn/protocols.hpp"
#include "wsn/trace.hpp"

namespace wsn {

struct ScriptedSense {
  SimTime at;
  NodeId node;
};

/// Event arrivals. Poisson arrivals at rate lambda, capped at total_events
/// and/or cut at horizon, plus any scripted events at fixed nodes.
struct Workload {
  double lambda = 5.0;
  std::optional<std::size_t> total_events = 2000;
  std::optional<SimTime> horizon;
  std::vector<ScriptedSense> scripted;
};

Workload make_workload(const SimConfig& cfg);

/// Arrival times of a Poisson process; stops at `max_events` or `horizon`,
/// whichever comes first. One of the two must be set.
std::vector<SimTime> poisson_arrivals(double lambda, std::optional<std::size_t> max_events,
                                      std::optional<SimTime> horizon, Rng& rng);

/// Placement from the config's deployment and the seed's topology stream.
Topology make_topology(const SimConfig& cfg, std::uint64_t seed);

struct Delivery {
  SimTime at;
  MsgId msg;
  NodeId origin;
};

class Simulator {
 public:
  Simulator(const SimConfig& cfg, Topology topo, const Workload& workload, std::uint64_t seed,
            TraceWriter* trace = nullptr);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  // Throws std::invalid_argument for the sink or an unknown node.
  void schedule_kill(SimTime at, NodeId node);

  // Processes one event. Returns false once the run is over.
  bool step();
  const Metrics& run();

  bool finished() const { return finished_; }
  SimTime now() const { return now_; }
  const Metrics& metrics() const { return metrics_; }
  const RunStats& stats() const { return stats_; }
  const Topology& topology() const { return topo_; }
  const NodeState& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Delivery>& deliveries() const { return deliveries_; }

  // Every transmission that went on air, in start order.
  void keep_transmission_log(bool on) { log_tx_ = on; }
  const std::vector<Transmission>& transmission_log() const { return tx_log_; }

 private:
  enum class EvKind : std::uint8_t { Timer, TxStart, TxEnd, Sense, Kill, TrafficTick };
  struct Event {
    SimTime at;
    std::uint64_t seq;
    EvKind kind;
    NodeId node;
    TimerKind timer;
    std::uint64_t ref;  // timer token or transmission slot
    // A frame ending at t is off the air before anything else happens at t.
    bool later_than(const Event& b) const {
      if (at != b.at) return at > b.at;
      const bool a_end = kind == EvKind::TxEnd, b_end = b.kind == EvKind::TxEnd;
      if (a_end != b_end) return b_end;
      return seq > b.seq;
    }
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return a.later_than(b); }
  };

  void push(SimTime at, EvKind kind, NodeId node, TimerKind timer = TimerKind::Backoff,
            std::uint64_t ref = 0);
  void apply(NodeId node, Actions& actions);
  void on_sense(SimTime at, std::optional<NodeId> fixed);
  void on_tx_start(std::uint64_t slot);
  void on_tx_end(std::uint64_t slot);
  void on_kill(NodeId node);
  void trace(std::string_view kind, NodeId node, MsgId msg, int hop);
  NodeId pick_source();
  bool quiescent() const;

  SimConfig cfg_;
  Topology topo_;
  std::unique_ptr<MacProtocol> mac_;
  Channel channel_;
  std::vector<NodeState> nodes_;
  std::vector<Rng> node_rng_;
  std::vector<SimTime> busy_until_;
  Rng source_rng_;
  TraceWriter* trace_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  SimTime now_ = 0.0;
  SimTime horizon_ = 0.0;
  bool finished_ = false;

  std::vector<Transmission> slots_;
  std::vector<std::uint64_t> free_slots_;
  std::vector<Channel::Result> fates_;
  Actions scratch_;

  std::size_t senses_left_ = 0;
  std::size_t queued_data_ = 0;
  std::size_t airborne_data_ = 0;
  SeenSet delivered_;

  Metrics metrics_;
  RunStats stats_;
  std::vector<Delivery> deliveries_;
  bool log_tx_ = false;
  std::vector<Transmission> tx_log_;
};

/// One complete run on a given topology.
Metrics run(const SimConfig& cfg, const Topology& topo, const Workload& workload,
            std::uint64_t seed, TraceWriter* trace = nullptr, RunStats* stats = nullptr);

/// Topology and workload derived from the config and its seed.
Metrics run_simulation(const SimConfig& cfg, TraceWriter* trace = nullptr,
                       RunStats* stats = nullptr);

}  // namespace wsn
