#include "wsn/medium.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace wsn {

double distance(const Position& a, const Position& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Topology::Topology(std::vector<Position> positions, double range)
    : positions_(std::move(positions)), alive_(positions_.size(), 1), range_(range) {
  if (!(range > 0.0)) throw std::invalid_argument("radio range must be positive");
  build_adjacency();
}

void Topology::build_adjacency() {
  const std::size_t n = positions_.size();
  adj_offsets_.assign(n + 1, 0);
  adj_.clear();
  if (n == 0) return;

  // Bucket nodes into range-sized cells so each lookup scans a 3x3 block.
  double min_x = positions_[0].x, min_y = positions_[0].y;
  for (const auto& p : positions_) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
  }
  auto cell_of = [&](const Position& p) {
    return std::pair<long, long>{static_cast<long>(std::floor((p.x - min_x) / range_)),
                                 static_cast<long>(std::floor((p.y - min_y) / range_))};
  };
  auto key = [](long cx, long cy) { return (static_cast<std::int64_t>(cx) << 32) ^ (cy & 0xffffffff); };
  std::unordered_map<std::int64_t, std::vector<NodeId>> cells;
  for (NodeId i = 0; i < n; ++i) {
    auto [cx, cy] = cell_of(positions_[i]);
    cells[key(cx, cy)].push_back(i);
  }

  std::vector<NodeId> scratch;
  for (NodeId i = 0; i < n; ++i) {
    scratch.clear();
    auto [cx, cy] = cell_of(positions_[i]);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find(key(cx + dx, cy + dy));
        if (it == cells.end()) continue;
        for (NodeId j : it->second) {
          if (j != i && distance(positions_[i], positions_[j]) <= range_) scratch.push_back(j);
        }
      }
    }
    std::sort(scratch.begin(), scratch.end());
    adj_.insert(adj_.end(), scratch.begin(), scratch.end());
    adj_offsets_[i + 1] = static_cast<std::uint32_t>(adj_.size());
  }
}

void Topology::check(NodeId id) const {
  if (id >= positions_.size()) {
    throw std::out_of_range("unknown node id " + std::to_string(id));
  }
}

const Position& Topology::position(NodeId id) const {
  check(id);
  return positions_[id];
}

bool Topology::alive(NodeId id) const {
  check(id);
  return alive_[id] != 0;
}

void Topology::set_alive(NodeId id, bool alive) {
  check(id);
  alive_[id] = alive ? 1 : 0;
}

bool Topology::in_range(NodeId a, NodeId b) const {
  check(a);
  check(b);
  return a != b && distance(positions_[a], positions_[b]) <= range_;
}

std::span<const NodeId> Topology::candidates(NodeId node) const {
  check(node);
  return {adj_.data() + adj_offsets_[node], adj_.data() + adj_offsets_[node + 1]};
}

std::vector<NodeId> Topology::neighbors(NodeId node) const {
  std::vector<NodeId> out;
  for (NodeId j : candidates(node)) {
    if (alive_[j]) out.push_back(j);
  }
  return out;
}

double Topology::mean_degree() const {
  if (positions_.empty()) return 0.0;
  return static_cast<double>(adj_.size()) / static_cast<double>(positions_.size());
}

Topology deploy_square(std::size_t n, double side, double range, Rng& rng) {
  if (n == 0) throw std::invalid_argument("deployment needs at least one node");
  if (!(side > 0.0)) throw std::invalid_argument("deployment side must be positive");
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<Position> pos;
  pos.reserve(n);
  pos.push_back({side / 2.0, side / 2.0});
  for (std::size_t i = 1; i < n; ++i) {
    const double x = coord(rng);
    const double y = coord(rng);
    pos.push_back({x, y});
  }
  return Topology(std::move(pos), range);
}

Topology deploy_disk(std::size_t n, double radius, double range, Rng& rng) {
  if (n == 0) throw std::invalid_argument("deployment needs at least one node");
  if (!(radius > 0.0)) throw std::invalid_argument("deployment radius must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Position> pos;
  pos.reserve(n);
  pos.push_back({0.0, 0.0});
  for (std::size_t i = 1; i < n; ++i) {
    const double rad = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    pos.push_back({rad * std::cos(theta), rad * std::sin(theta)});
  }
  return Topology(std::move(pos), range);
}

void write_topology(std::ostream& out, const Topology& topo) {
  out.precision(17);
  for (NodeId i = 0; i < topo.size(); ++i) {
    const auto& p = topo.position(i);
    out << i << ' ' << p.x << ' ' << p.y << '\n';
  }
}

Topology read_topology(std::istream& in, double range) {
  std::vector<std::pair<long long, Position>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long id;
    Position p;
    std::string extra;
    if (!(ls >> id >> p.x >> p.y) || (ls >> extra)) {
      throw std::runtime_error("topology line " + std::to_string(lineno) + ": expected \"id x y\"");
    }
    rows.emplace_back(id, p);
  }
  std::vector<Position> pos(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [id, p] : rows) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows.size() || seen[id]) {
      throw std::runtime_error("topology ids must be dense and unique, bad id " + std::to_string(id));
    }
    seen[id] = true;
    pos[id] = p;
  }
  return Topology(std::move(pos), range);
}

bool overlaps(const Transmission& a, const Transmission& b) {
  return a.start < b.end && b.start < a.end;
}

ReceptionOutcome resolve_receptions(const Topology& topo, std::span<const Transmission> txs) {
  ReceptionOutcome out;
  std::vector<const Transmission*> incoming;
  std::vector<const Transmission*> own;
  for (NodeId r = 0; r < topo.size(); ++r) {
    if (!topo.alive(r)) continue;
    incoming.clear();
    own.clear();
    for (const auto& tx : txs) {
      if (tx.sender == r) {
        own.push_back(&tx);
      } else if (topo.in_range(tx.sender, r)) {
        incoming.push_back(&tx);
      }
    }
    if (incoming.empty()) continue;
    std::stable_sort(incoming.begin(), incoming.end(),
                     [](const Transmission* a, const Transmission* b) { return a->start < b->start; });

    std::size_t i = 0;
    while (i < incoming.size()) {
      std::size_t j = i + 1;
      SimTime busy_until = incoming[i]->end;
      while (j < incoming.size() && incoming[j]->start < busy_until) {
        busy_until = std::max(busy_until, incoming[j]->end);
        ++j;
      }
      if (j - i >= 2) {
        ++out.collisions[r];
        out.destroyed += j - i;
      } else {
        const Transmission& tx = *incoming[i];
        const bool deaf = std::any_of(own.begin(), own.end(),
                                      [&](const Transmission* o) { return overlaps(*o, tx); });
        if (deaf) {
          ++out.half_duplex;
        } else {
          out.delivered[r].push_back(tx.packet);
        }
      }
      i = j;
    }
  }
  return out;
}

Channel::Channel(const Topology& topo) : topo_(&topo), nodes_(topo.size()) {}

void Channel::begin(std::uint64_t tx, NodeId sender) {
  NodeRx& self = nodes_[sender];
  ++self.transmitting;
  for (auto& rx : self.active) rx.deaf = true;

  for (NodeId r : topo_->candidates(sender)) {
    if (!topo_->alive(r)) continue;
    NodeRx& node = nodes_[r];
    bool destroyed = false;
    if (!node.active.empty()) {
      for (auto& rx : node.active) rx.destroyed = true;
      destroyed = true;
      if (!node.episode_collided) {
        node.episode_collided = true;
        ++node.collisions;
        ++total_collisions_;
      }
    }
    node.active.push_back({tx, destroyed, node.transmitting > 0});
  }
}

void Channel::end(std::uint64_t tx, NodeId sender, std::vector<Result>& out) {
  --nodes_[sender].transmitting;
  for (NodeId r : topo_->candidates(sender)) {
    NodeRx& node = nodes_[r];
    auto it = std::find_if(node.active.begin(), node.active.end(),
                           [&](const Rx& rx) { return rx.tx == tx; });
    if (it == node.active.end()) continue;
    const Rx rx = *it;
    *it = node.active.back();
    node.active.pop_back();
    if (node.active.empty()) node.episode_collided = false;

    Fate fate = Fate::Delivered;
    if (rx.destroyed) {
      fate = Fate::Collided;
    } else if (rx.deaf) {
      fate = Fate::HalfDuplex;
    } else if (!topo_->alive(r)) {
      fate = Fate::Dead;
    }
    out.push_back({r, fate});
  }
}

}  // namespace wsn
