#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wsn/core_types.hpp"

namespace wsn {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

/// Unit-disk radio graph. Node ids are dense 0..N-1.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Position> positions, double range);

  std::size_t size() const { return positions_.size(); }
  double range() const { return range_; }
  const Position& position(NodeId id) const;
  std::span<const Position> positions() const { return positions_; }

  bool alive(NodeId id) const;
  void set_alive(NodeId id, bool alive);

  bool in_range(NodeId a, NodeId b) const;

  // Alive nodes within range of `node`, excluding itself. Throws
  // std::out_of_range for an unknown id.
  std::vector<NodeId> neighbors(NodeId node) const;

  // Every node within range regardless of liveness; precomputed.
  std::span<const NodeId> candidates(NodeId node) const;

  double mean_degree() const;

 private:
  void check(NodeId id) const;
  void build_adjacency();

  std::vector<Position> positions_;
  std::vector<std::uint8_t> alive_;
  double range_ = 0.0;
  std::vector<std::uint32_t> adj_offsets_;
  std::vector<NodeId> adj_;
};

/// Uniform scatter; node 0 (the sink) sits at the centre.
Topology deploy_square(std::size_t n, double side, double range, Rng& rng);
Topology deploy_disk(std::size_t n, double radius, double range, Rng& rng);

/// Plain-text node list, one "id x y" line per node.
void write_topology(std::ostream& out, const Topology& topo);
Topology read_topology(std::istream& in, double range);

struct Transmission {
  NodeId sender = 0;
  Packet packet;
  SimTime start = 0.0;
  SimTime end = 0.0;
};

bool overlaps(const Transmission& a, const Transmission& b);

struct ReceptionOutcome {
  std::map<NodeId, std::vector<Packet>> delivered;
  // Overlap episodes per receiver: each maximal run of overlapping in-range
  // transmissions with two or more members counts once.
  std::map<NodeId, std::size_t> collisions;
  std::size_t destroyed = 0;       // receptions lost to overlap
  std::size_t half_duplex = 0;     // receptions lost because the receiver was sending
};

ReceptionOutcome resolve_receptions(const Topology& topo, std::span<const Transmission> txs);

/// Incremental form of resolve_receptions driven by start/end events.
class Channel {
 public:
  enum class Fate : std::uint8_t { Delivered, Collided, HalfDuplex, Dead };
  struct Result {
    NodeId receiver;
    Fate fate;
  };

  explicit Channel(const Topology& topo);

  void begin(std::uint64_t tx, NodeId sender);
  // Appends the fate of every receiver that heard the start of `tx`.
  void end(std::uint64_t tx, NodeId sender, std::vector<Result>& out);

  std::size_t collisions_at(NodeId node) const { return nodes_[node].collisions; }
  std::size_t collisions() const { return total_collisions_; }
  bool transmitting(NodeId node) const { return nodes_[node].transmitting > 0; }

 private:
  struct Rx {
    std::uint64_t tx;
    bool destroyed;
    bool deaf;
  };
  struct NodeRx {
    std::vector<Rx> active;
    int transmitting = 0;
    bool episode_collided = false;
    std::size_t collisions = 0;
  };

  const Topology* topo_;
  std::vector<NodeRx> nodes_;
  std::size_t total_collisions_ = 0;
};

}  // namespace wsn
