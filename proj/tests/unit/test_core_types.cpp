#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "stats.hpp"
#include "wsn/core_types.hpp"

using namespace wsn;

TEST_CASE("packet field rules") {
  CHECK_NOTHROW(Packet::beacon(1, 0, 0).validate());
  CHECK_NOTHROW(Packet::control(1, 3, 0.5, -1).validate());
  CHECK_NOTHROW(Packet::data(1, 3, 0.0).validate());

  Packet p = Packet::data(1, 3, 0.0);
  p.announced_backoff = 0.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  Packet c = Packet::control(1, 3, 0.5, 2);
  c.announced_backoff.reset();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  Packet b = Packet::beacon(1, 0, 0);
  b.hop_count = -1;
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("backoff window rejects empty ranges") {
  CHECK_THROWS_AS(BackoffWindow(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(BackoffWindow(2.0, 1.0), std::invalid_argument);
  CHECK(BackoffWindow(1.0, 3.0).width() == doctest::Approx(2.0));
}

TEST_CASE("zones_subtract examples") {
  const BackoffWindow w(4.0, 10.0);
  ForbiddenZones z(w);

  auto a = zones_subtract(z, 5.0, 1.0);
  REQUIRE(a.intervals().size() == 1);
  CHECK(a.intervals()[0] == Interval{4.0, 6.0});

  auto b = zones_subtract(a, 5.5, 1.0);
  REQUIRE(b.intervals().size() == 1);
  CHECK(b.intervals()[0] == Interval{4.0, 6.5});

  auto c = zones_subtract(a, 20.0, 1.0);
  CHECK(c == a);

  // idempotent
  CHECK(zones_subtract(a, 5.0, 1.0) == a);
}

TEST_CASE("closed membership and touching bands merge") {
  ForbiddenZones z(BackoffWindow(0.0, 10.0));
  z.insert(1.0, 2.0);
  z.insert(2.0, 3.0);
  REQUIRE(z.intervals().size() == 1);
  CHECK(z.contains(1.0));
  CHECK(z.contains(3.0));
  CHECK_FALSE(z.contains(3.0000001));
  CHECK(z.measure() == doctest::Approx(2.0));
}

namespace {

// Grid oracle: fraction of cell midpoints covered by any band.
double grid_measure(const BackoffWindow& w, const std::vector<Interval>& bands, int cells) {
  const double h = w.width() / cells;
  int covered = 0;
  for (int i = 0; i < cells; ++i) {
    const double x = w.lo() + (i + 0.5) * h;
    for (const auto& b : bands) {
      if (x >= b.lo && x <= b.hi) {
        ++covered;
        break;
      }
    }
  }
  return covered * h;
}

}  // namespace

TEST_CASE("zone measure matches a 10^4-point grid over random insertions") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-2.0, 12.0), len(0.0, 1.5);
  std::uniform_int_distribution<int> count(0, 12);
  const BackoffWindow w(0.0, 10.0);
  const int cells = 10000;
  for (int trial = 0; trial < 1000; ++trial) {
    ForbiddenZones z(w);
    std::vector<Interval> bands;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      const double t = u(rng), r = len(rng);
      z = zones_subtract(z, t, r);
      bands.push_back({t - r, t + r});
    }
    // Each band edge can misclassify at most one grid cell.
    const double tol = 2.0 * k * w.width() / cells + 1e-12;
    CHECK(std::abs(z.measure() - grid_measure(w, bands, cells)) <= tol);

    const auto iv = z.intervals();
    for (std::size_t i = 0; i < iv.size(); ++i) {
      CHECK(iv[i].lo >= w.lo());
      CHECK(iv[i].hi <= w.hi());
      CHECK(iv[i].lo <= iv[i].hi);
      if (i > 0) CHECK(iv[i - 1].hi < iv[i].lo);
    }
    CHECK(z.measure() <= w.width() + 1e-12);
  }
}

TEST_CASE("zones_subtract is order independent") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.0, 10.0), len(0.05, 1.0);
  const BackoffWindow w(0.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::pair<double, double>> ops(6);
    for (auto& op : ops) op = {u(rng), len(rng)};
    ForbiddenZones fwd(w), rev(w), shuffled(w);
    for (auto& [t, r] : ops) fwd = zones_subtract(fwd, t, r);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) rev = zones_subtract(rev, it->first, it->second);
    std::shuffle(ops.begin(), ops.end(), rng);
    for (auto& [t, r] : ops) shuffled = zones_subtract(shuffled, t, r);
    CHECK(fwd == rev);
    CHECK(fwd == shuffled);

    // (a + b) + c built separately, then merged interval-wise, equals a + (b + c).
    ForbiddenZones left(w), right(w);
    left = zones_subtract(zones_subtract(left, ops[0].first, ops[0].second), ops[1].first, ops[1].second);
    left = zones_subtract(left, ops[2].first, ops[2].second);
    ForbiddenZones bc = zones_subtract(zones_subtract(ForbiddenZones(w), ops[1].first, ops[1].second),
                                       ops[2].first, ops[2].second);
    right = zones_subtract(ForbiddenZones(w), ops[0].first, ops[0].second);
    for (const auto& iv : bc.intervals()) right.insert(iv.lo, iv.hi);
    CHECK(left == right);
  }
}

TEST_CASE("sample_eligible on an empty zone set is uniform") {
  Rng rng(13);
  const BackoffWindow w(0.0, 10.0);
  const ForbiddenZones z(w);
  std::vector<double> xs;
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    auto t = sample_eligible(w, z, rng);
    REQUIRE(t);
    CHECK_MESSAGE((*t > 0.0 && *t < 10.0), *t);
    xs.push_back(*t);
    sum += *t;
  }
  const double mean = sum / xs.size();
  CHECK(mean >= 4.9);
  CHECK(mean <= 5.1);
  CHECK(ks_statistic(xs, [](double x) { return x / 10.0; }) < ks_critical(xs.size()));
}

TEST_CASE("sample_eligible is uniform over the complement") {
  Rng rng(14);
  const BackoffWindow w(0.0, 10.0);
  ForbiddenZones z(w);
  z.insert(1.0, 3.0);
  z.insert(6.0, 6.5);
  // complement: (0,1) (3,6) (6.5,10), total 7.5
  auto cdf = [](double x) {
    double m = std::min(x, 1.0);
    if (x > 3.0) m += std::min(x, 6.0) - 3.0;
    if (x > 6.5) m += x - 6.5;
    return m / 7.5;
  };
  std::vector<double> xs;
  for (int i = 0; i < 50000; ++i) {
    auto t = sample_eligible(w, z, rng);
    REQUIRE(t);
    CHECK_FALSE(z.contains(*t));
    xs.push_back(*t);
  }
  CHECK(ks_statistic(xs, cdf) < ks_critical(xs.size()));
}

TEST_CASE("sample_eligible saturation and containment") {
  Rng rng(15);
  const BackoffWindow w(0.0, 10.0);
  ForbiddenZones full(w);
  full.insert(-1.0, 11.0);
  CHECK_FALSE(sample_eligible(w, full, rng).has_value());

  ForbiddenZones sliver(w);
  sliver.insert(0.0, 10.0 - 5e-7);
  CHECK_FALSE(sample_eligible(w, sliver, rng).has_value());

  ForbiddenZones half(w);
  half.insert(0.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    auto t = sample_eligible(w, half, rng);
    REQUIRE(t);
    CHECK((*t >= 5.0 && *t <= 10.0));
  }
}

TEST_CASE("sample_eligible never lands in a forbidden interval") {
  Rng rng(16);
  std::uniform_real_distribution<double> u(0.0, 1.0), len(0.0005, 0.02);
  const BackoffWindow w(0.1, 0.9);
  for (int trial = 0; trial < 2000; ++trial) {
    ForbiddenZones z(w);
    for (int i = 0; i < 20; ++i) {
      const double t = u(rng);
      z.insert(t - len(rng), t + len(rng));
    }
    auto t = sample_eligible(w, z, rng);
    if (z.eligible_measure() > kSaturationEpsilon) {
      REQUIRE(t);
      CHECK(*t > w.lo());
      CHECK(*t < w.hi());
      CHECK_FALSE(z.contains(*t));
    }
  }
}

TEST_CASE("derived seeds differ by purpose and index") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) {
    seen.insert(derive_seed(1, "node", i));
    seen.insert(derive_seed(1, "topology", i));
    seen.insert(derive_seed(2, "node", i));
  }
  CHECK(seen.size() == 300);
  CHECK(derive_seed(7, "x", 3) == derive_seed(7, "x", 3));
}
