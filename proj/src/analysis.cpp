#include "wsn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wsn/medium.hpp"

namespace wsn {

void CellModel::validate() const {
  if (!(window_width > 0.0)) throw std::invalid_argument("cell: window width must be positive");
  if (!(n >= 0.0) || !(t_min >= 0.0)) throw std::invalid_argument("cell: n and t_min must be >= 0");
}

double expected_neighbors(double r, double R, double N) {
  if (R == 0.0) throw std::invalid_argument("expected_neighbors: R must be nonzero");
  return N * r * r / (R * R);
}

double prob_arbp(const CellModel& cell) {
  cell.validate();
  return std::min(1.0, 2.0 * cell.n * cell.t_min / cell.window_width);
}

double prob_ibsp(const CellModel& cell) {
  const double p = prob_arbp(cell);
  return p * p;
}

double expected_tx(FloodKind kind, double N) { return kind == FloodKind::Flood ? N : N / 2.0; }

double mc_pair_collision(Duration t_min, Duration width, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) return 0.0;
  Rng rng(derive_seed(seed, "mc_pair"));
  std::uniform_real_distribution<double> u(0.0, width);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (std::abs(u(rng) - u(rng)) < t_min) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

namespace {

bool any_within(const std::vector<double>& xs, std::size_t self, Duration t_min) {
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (j != self && std::abs(xs[j] - xs[self]) < t_min) return true;
  }
  return false;
}

}  // namespace

double mc_cell(ProtocolKind protocol, std::size_t k, const CellModel& cell, std::uint64_t trials,
               std::uint64_t seed) {
  cell.validate();
  if (k < 2) throw std::invalid_argument("mc_cell: need at least two contenders");
  if (trials == 0) return 0.0;
  const Duration w = cell.window_width;
  const Duration t_min = cell.t_min;
  Rng rng(derive_seed(seed, "mc_cell", static_cast<std::uint64_t>(protocol)));
  std::uniform_real_distribution<double> u(0.0, w);

  std::vector<double> phase1(k), phase2(k);
  std::vector<std::size_t> order(k);
  std::vector<char> heard(k);
  std::uint64_t hits = 0;
  const BackoffWindow window(0.0, w);

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    if (protocol == ProtocolKind::Arbp) {
      for (auto& x : phase2) x = u(rng);
    } else {
      for (auto& x : phase1) x = u(rng);
      // An announcement is heard only if no other Control overlaps it.
      for (std::size_t i = 0; i < k; ++i) heard[i] = !any_within(phase1, i, t_min);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return phase1[a] < phase1[b]; });
      // Each contender picks its phase-II time when its turn comes, avoiding
      // every earlier announcement that got through.
      ForbiddenZones zones(window);
      for (std::size_t idx : order) {
        auto t = sample_eligible(window, zones, rng);
        phase2[idx] = t ? *t : u(rng);
        if (heard[idx]) zones.insert(phase2[idx] - t_min, phase2[idx] + t_min);
      }
    }
    if (any_within(phase2, 0, t_min)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

std::vector<int> bfs_hops(const Topology& topo, NodeId root) {
  std::vector<int> hop(topo.size(), kInf);
  std::deque<NodeId> q{root};
  hop[root] = 0;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    for (NodeId w : topo.candidates(v)) {
      if (hop[w] == kInf) {
        hop[w] = hop[v] + 1;
        q.push_back(w);
      }
    }
  }
  return hop;
}

// Number of nodes that transmit when `admit(sender, receiver)` decides
// whether a reception is relayed. The source always transmits.
template <typename Admit>
std::size_t flood_count(const Topology& topo, NodeId source, Admit admit) {
  std::vector<char> seen(topo.size(), 0);
  std::deque<NodeId> q{source};
  seen[source] = 1;
  std::size_t tx = 0;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop_front();
    ++tx;
    for (NodeId w : topo.candidates(v)) {
      // A rejected copy leaves the node free to relay a later one.
      if (seen[w] || w == 0 || !admit(v, w)) continue;
      seen[w] = 1;
      q.push_back(w);
    }
  }
  return tx;
}

}  // namespace

FloodStats flood_statistics(std::size_t N, double R, double r, std::size_t topologies,
                            std::size_t sources_per_topology, std::uint64_t seed) {
  FloodStats out;
  double reach_sum = 0.0, flood_sum = 0.0, confined_sum = 0.0, gated_sum = 0.0;
  for (std::size_t t = 0; t < topologies; ++t) {
    Rng rng(derive_seed(seed, "flood_topology", t));
    const Topology topo = deploy_disk(N, R, r, rng);
    const std::vector<int> hop = bfs_hops(topo, 0);
    std::vector<NodeId> pool;
    for (NodeId i = 1; i < topo.size(); ++i) {
      if (hop[i] != kInf) pool.push_back(i);
    }
    if (pool.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t s = 0; s < sources_per_topology; ++s) {
      const NodeId src = pool[pick(rng)];
      const std::size_t flood = flood_count(topo, src, [](NodeId, NodeId) { return true; });
      const int limit = hop[src];
      const std::size_t confined =
          flood_count(topo, src, [&](NodeId, NodeId w) { return hop[w] <= limit; });
      const std::size_t gated =
          flood_count(topo, src, [&](NodeId v, NodeId w) { return hop[w] <= hop[v]; });
      // The sink hears the flood (it is reachable) but does not relay it.
      reach_sum += static_cast<double>(flood + 1);
      flood_sum += static_cast<double>(flood);
      confined_sum += static_cast<double>(confined);
      gated_sum += static_cast<double>(gated);
      ++out.sources;
    }
  }
  if (out.sources > 0) {
    const double n = static_cast<double>(out.sources);
    out.reachable = reach_sum / n;
    out.flood_tx = flood_sum / n;
    out.confined_tx = confined_sum / n;
    out.sender_gated_tx = gated_sum / n;
  }
  return out;
}

}  // namespace wsn
