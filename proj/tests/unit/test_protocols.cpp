#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>

#include "stats.hpp"
#include "wsn/protocols.hpp"

using namespace wsn;

namespace {

AdaptiveWindowState window(double t_min = 0.002, double t_max = 0.05) {
  AdaptiveWindowState s;
  s.t_min = t_min;
  s.t_max = t_max;
  s.t_cap = 0.1;
  return s;
}

NodeState node(NodeId id, bool sink = false, AdaptiveWindowState w = window()) {
  return NodeState(id, sink, w, 3600.0, 10, 2.0);
}

MacParams params() {
  MacParams p;
  p.t_min = 0.002;
  p.airtime = 0.0018;
  p.ttl = 5.0;
  return p;
}

template <typename T>
std::vector<T> all(const Actions& acts) {
  std::vector<T> out;
  for (const auto& a : acts)
    if (auto* x = std::get_if<T>(&a)) out.push_back(*x);
  return out;
}

}  // namespace

TEST_CASE("arbp back-off is uniform on (t_min, t_max)") {
  Rng rng(41);
  NodeState s = node(1, false, window(0.01, 1.0));
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) {
    const double b = arbp_backoff(s, rng);
    REQUIRE(b > 0.01);
    REQUIRE(b < 1.0);
    xs.push_back(b);
  }
  CHECK(ks_statistic(xs, [](double x) { return (x - 0.01) / 0.99; }) < ks_critical(xs.size()));

  NodeState tight = node(1, false, window(0.01, 0.0101));
  for (int i = 0; i < 1000; ++i) {
    const double b = arbp_backoff(tight, rng);
    CHECK(b > 0.01);
    CHECK(b < 0.0101);
  }
}

TEST_CASE("arbp forwards each message once") {
  Rng rng(42);
  ArbpMac mac(params());
  NodeState s = node(3);
  Actions out;
  Packet d = Packet::data(5, 9, 0.0);
  d.sender = 9;
  mac.on_receive(s, d, 0.1, rng, out);
  auto timers = all<StartTimer>(out);
  REQUIRE(timers.size() == 1);
  out.clear();
  mac.on_receive(s, d, 0.11, rng, out);
  CHECK(out.empty());
  mac.on_timer(s, TimerKind::Backoff, timers[0].token, timers[0].at, rng, out);
  auto tx = all<Transmit>(out);
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].packet.msg_id == 5);
  CHECK(tx[0].packet.sender == 3);
  CHECK(s.queue.empty());
}

TEST_CASE("isolated ibsp node picks phase II inside (T_max + T_min, 2 T_max)") {
  Rng rng(43);
  IbspMac mac(params());
  for (int i = 0; i < 1000; ++i) {
    NodeState s = node(1);
    Actions out;
    const double now = 3.0;
    mac.on_sense(s, i, now, rng, out);
    REQUIRE(s.round);
    CHECK(s.round->phase2_at > now + 0.05 + 0.002);
    CHECK(s.round->phase2_at < now + 0.1);
    CHECK(s.round->phase1_at > now + 0.002);
    CHECK(s.round->phase1_at < now + 0.05);
    auto timers = all<StartTimer>(out);
    REQUIRE(timers.size() == 1);
    CHECK(timers[0].kind == TimerKind::PhaseOne);
  }
}

TEST_CASE("phase II avoids bands announced before the round") {
  Rng rng(44);
  IbspMac mac(params());
  for (int i = 0; i < 2000; ++i) {
    NodeState s = node(1);
    Actions out;
    const double now = 1.0;
    const double t1 = 1.07, t2 = 1.08;
    mac.on_receive(s, Packet::control(100, 2, t1, -1), now, rng, out);
    if (i % 2) mac.on_receive(s, Packet::control(101, 3, t2, -1), now, rng, out);
    mac.on_sense(s, i, now, rng, out);
    const double p = s.round->phase2_at;
    CHECK(std::abs(p - t1) > 0.002);
    if (i % 2) CHECK(std::abs(p - t2) > 0.002);
  }
}

TEST_CASE("conflicting announcement forces a redraw before our own Control") {
  Rng rng(45);
  IbspMac mac(params());
  for (int i = 0; i < 1000; ++i) {
    NodeState s = node(1);
    Actions out;
    mac.on_sense(s, i, 0.0, rng, out);
    const double mine = s.round->phase2_at;
    out.clear();
    mac.on_receive(s, Packet::control(200, 2, mine + 0.0005, -1), 0.001, rng, out);
    CHECK(std::abs(s.round->phase2_at - (mine + 0.0005)) > 0.002);
    CHECK_FALSE(s.round->announced);

    // a far-away reservation leaves the choice alone
    const double kept = s.round->phase2_at;
    mac.on_receive(s, Packet::control(201, 3, kept + 0.5, -1), 0.001, rng, out);
    CHECK(s.round->phase2_at == kept);
  }
}

TEST_CASE("conflict after announcing re-announces after a fresh back-off") {
  Rng rng(46);
  IbspMac mac(params());
  NodeState s = node(1);
  Actions out;
  mac.on_sense(s, 0, 0.0, rng, out);
  const auto t1 = all<StartTimer>(out)[0];
  out.clear();
  mac.on_timer(s, TimerKind::PhaseOne, t1.token, t1.at, rng, out);
  REQUIRE(all<Transmit>(out).size() == 1);
  CHECK(all<Transmit>(out)[0].packet.kind == PacketKind::Control);
  const double mine = s.round->phase2_at;
  out.clear();
  mac.on_receive(s, Packet::control(9, 2, mine, -1), t1.at + 0.001, rng, out);
  auto timers = all<StartTimer>(out);
  REQUIRE(timers.size() == 1);
  CHECK(timers[0].kind == TimerKind::PhaseOne);
  CHECK(std::abs(s.round->phase2_at - mine) > 0.002);
  CHECK(s.round->phase2_at > timers[0].at + 0.002);
  // stale phase-II timer is ignored
  out.clear();
  mac.on_timer(s, TimerKind::PhaseTwo, t1.token, mine, rng, out);
  CHECK(all<Transmit>(out).empty());
}

TEST_CASE("ibsp duplicate data is not queued twice") {
  Rng rng(47);
  IbspMac mac(params());
  NodeState s = node(1);
  Actions out;
  Packet d = Packet::data(7, 4, 0.0);
  mac.on_receive(s, d, 0.1, rng, out);
  mac.on_receive(s, d, 0.2, rng, out);
  CHECK(s.queue.size() == 1);
}

TEST_CASE("phase II sends one data frame and starts a new round for the next") {
  Rng rng(48);
  IbspMac mac(params());
  NodeState s = node(1);
  Actions out;
  mac.on_sense(s, 0, 0.0, rng, out);
  mac.on_sense(s, 1, 0.0, rng, out);
  REQUIRE(s.queue.size() == 2);
  auto t1 = all<StartTimer>(out)[0];
  out.clear();
  mac.on_timer(s, TimerKind::PhaseOne, t1.token, t1.at, rng, out);
  const auto t2 = all<StartTimer>(out)[0];
  CHECK(t2.kind == TimerKind::PhaseTwo);
  out.clear();
  mac.on_timer(s, TimerKind::PhaseTwo, t2.token, t2.at, rng, out);
  auto tx = all<Transmit>(out);
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].packet.kind == PacketKind::Data);
  CHECK(tx[0].packet.msg_id == 0);
  auto next = all<StartTimer>(out);
  REQUIRE(next.size() == 1);
  CHECK(next[0].kind == TimerKind::PhaseOne);
  CHECK(s.queue.size() == 1);
}

TEST_CASE("an empty queue makes the phase II timer a no-op") {
  Rng rng(49);
  IbspMac mac(params());
  NodeState s = node(1);
  Actions out;
  mac.ibsp_on_phase2_timer(s, 1.0, rng, out);
  CHECK(out.empty());
}

TEST_CASE("clique members that exchanged Controls keep phase II apart") {
  // Every Control reaches the whole clique. Data start times must then be
  // pairwise more than T_min apart unless the eligible set ran out.
  Rng rng(50);
  IbspMac mac(params());
  std::uniform_int_distribution<int> kk(2, 6);
  std::uniform_real_distribution<double> start(0.0, 0.03);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = kk(rng);
    std::vector<NodeState> nodes;
    for (int i = 0; i < k; ++i) nodes.push_back(node(i));
    struct Ev {
      double at;
      int node;
      TimerKind kind;
      std::uint64_t token;
      bool operator>(const Ev& o) const { return at > o.at; }
    };
    std::priority_queue<Ev, std::vector<Ev>, std::greater<>> q;
    std::vector<double> data_at;
    Actions out;
    auto apply = [&](int n, double now) {
      for (const auto& a : out) {
        if (auto* t = std::get_if<StartTimer>(&a)) q.push({t->at, n, t->kind, t->token});
        if (auto* x = std::get_if<Transmit>(&a)) {
          if (x->packet.kind == PacketKind::Data) {
            data_at.push_back(now);
            continue;
          }
          Actions rx;
          for (int j = 0; j < k; ++j) {
            if (j == n) continue;
            Packet p = x->packet;
            mac.on_receive(nodes[j], p, now, rng, rx);
            for (const auto& r : rx)
              if (auto* t = std::get_if<StartTimer>(&r)) q.push({t->at, j, t->kind, t->token});
            rx.clear();
          }
        }
      }
      out.clear();
    };
    for (int i = 0; i < k; ++i) {
      const double at = start(rng);
      mac.on_sense(nodes[i], i, at, rng, out);
      apply(i, at);
    }
    while (!q.empty()) {
      const Ev e = q.top();
      q.pop();
      mac.on_timer(nodes[e.node], e.kind, e.token, e.at, rng, out);
      apply(e.node, e.at);
    }
    REQUIRE(data_at.size() == static_cast<std::size_t>(k));
    bool fell_back = false;
    for (const auto& n : nodes) fell_back |= n.fallbacks > 0;
    if (fell_back) continue;
    ++checked;
    std::sort(data_at.begin(), data_at.end());
    for (std::size_t i = 1; i < data_at.size(); ++i) CHECK(data_at[i] - data_at[i - 1] > 0.002);
  }
  CHECK(checked >= 900);
}

TEST_CASE("hop table keeps the smallest live entry") {
  HopTable t(3, 2.0);
  t.enlist(3, 0.0);
  t.enlist(5, 1.0);
  CHECK(t.current(1.5) == 3);
  CHECK(t.current(2.5) == 5);  // 3 expired at 2.0
  CHECK(t.current(3.5) == -1);
  HopTable empty;
  CHECK(empty.current(0.0) == -1);

  HopTable full(2, 2.0);
  full.enlist(4, 0.0);
  full.enlist(6, 0.0);
  full.enlist(7, 0.0);  // larger than all, not kept
  CHECK(full.entries().size() == 2);
  full.enlist(2, 0.0);  // evicts 6
  std::vector<int> hops;
  for (auto e : full.entries()) hops.push_back(e.hop);
  std::sort(hops.begin(), hops.end());
  CHECK(hops == std::vector<int>{2, 4});
  CHECK_THROWS(HopTable(0, 1.0));
}

TEST_CASE("daibsp_build examples") {
  Rng rng(51);
  DaibspMac mac(params());
  {
    NodeState s = node(1);
    Actions out;
    mac.daibsp_build(s, Packet::beacon(kBeaconIdBase, 0, 0), 0.0, rng, out);
    CHECK(s.hop(0.0) == 1);
    auto t = all<StartTimer>(out);
    REQUIRE(t.size() == 1);
    CHECK(t[0].kind == TimerKind::Beacon);
    out.clear();
    mac.on_timer(s, TimerKind::Beacon, t[0].token, t[0].at, rng, out);
    auto tx = all<Transmit>(out);
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].packet.kind == PacketKind::Beacon);
    CHECK(tx[0].packet.hop_count == 1);
  }
  {
    NodeState s = node(1);
    s.hop_table.enlist(2, 0.0);
    Actions out;
    mac.daibsp_build(s, Packet::beacon(kBeaconIdBase, 7, 4), 0.1, rng, out);
    CHECK(s.hop(0.1) == 2);
    CHECK(all<StartTimer>(out).empty());
  }
  {
    NodeState s = node(1);
    s.hop_table.enlist(5, 0.0);
    Actions out;
    mac.daibsp_build(s, Packet::beacon(kBeaconIdBase, 7, 2), 0.1, rng, out);
    CHECK(s.hop(0.1) == 3);
    CHECK(all<StartTimer>(out).size() == 1);
  }
}

TEST_CASE("daibsp_gate examples") {
  DaibspMac mac(params());
  auto with_hop = [](int h) {
    NodeState s = node(1);
    s.hop_table.enlist(h, 0.0);
    return s;
  };
  auto data = [](int hop) {
    Packet p = Packet::data(1, 9, 0.0);
    p.hop_count = hop;
    return p;
  };
  {
    NodeState s = with_hop(2);
    CHECK(mac.daibsp_gate(s, data(4), 0.5) == GateDecision::Forward);
    bool has5 = false;
    for (auto e : s.hop_table.entries()) has5 |= e.hop == 5;
    CHECK(has5);
    CHECK(s.hop(0.5) == 2);
  }
  {
    NodeState s = with_hop(3);
    CHECK(mac.daibsp_gate(s, data(1), 0.5) == GateDecision::Drop);
  }
  {
    NodeState s = with_hop(3);
    CHECK(mac.daibsp_gate(s, data(3), 0.5) == GateDecision::Forward);
  }
  {
    NodeState s = node(1);
    CHECK(mac.daibsp_gate(s, data(3), 0.5) == GateDecision::Drop);
  }
}

TEST_CASE("daibsp_recover examples") {
  DaibspMac mac(params());
  NodeState s = node(1);
  CHECK(mac.daibsp_recover(s, 0.0) == -1);
  s.hop_table.enlist(3, 0.0);
  s.hop_table.enlist(5, 1.0);
  CHECK(mac.daibsp_recover(s, 1.5) == 3);
  CHECK(mac.daibsp_recover(s, 2.5) == 5);
}

TEST_CASE("daibsp node without a hop holds its packets and purges them at TTL") {
  Rng rng(52);
  DaibspMac mac(params());
  NodeState s = node(1);
  Actions out;
  mac.on_sense(s, 0, 0.0, rng, out);
  CHECK_FALSE(s.round);
  auto t = all<StartTimer>(out);
  REQUIRE(t.size() == 1);
  CHECK(t[0].kind == TimerKind::Purge);
  CHECK(t[0].at > 5.0);
  out.clear();
  mac.on_timer(s, TimerKind::Purge, 0, t[0].at, rng, out);
  auto d = all<Drop>(out);
  REQUIRE(d.size() == 1);
  CHECK(d[0].reason == DropReason::Ttl);
  CHECK(s.queue.empty());
}

TEST_CASE("daibsp forwarder stamps its own hop") {
  Rng rng(53);
  DaibspMac mac(params());
  NodeState s = node(1);
  s.hop_table.enlist(2, 0.0);
  Actions out;
  Packet d = Packet::data(4, 9, 0.0);
  d.hop_count = 3;
  mac.on_receive(s, d, 0.01, rng, out);
  REQUIRE(s.round);
  auto t1 = all<StartTimer>(out)[0];
  out.clear();
  mac.on_timer(s, TimerKind::PhaseOne, t1.token, t1.at, rng, out);
  auto ctl = all<Transmit>(out);
  REQUIRE(ctl.size() == 1);
  CHECK(ctl[0].packet.hop_count == 2);
  auto t2 = all<StartTimer>(out)[0];
  out.clear();
  mac.on_timer(s, TimerKind::PhaseTwo, t2.token, t2.at, rng, out);
  auto tx = all<Transmit>(out);
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].packet.hop_count == 2);
}
