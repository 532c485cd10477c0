#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wsn/adaptive_window.hpp"

using namespace wsn;

TEST_CASE("density table examples") {
  DensityTable t;
  t.observe(7, 0.0);
  CHECK(t.density(0.0) == 1);
  t.observe(9, 1.0);
  CHECK(t.density(1.0) == 2);
  t.observe(7, 2.0);
  CHECK(t.density(2.0) == 2);

  DensityTable old(3600.0);
  old.observe(7, 0.0);
  CHECK(old.density(3600.0) == 1);
  CHECK(old.density(3601.0) == 0);
}

TEST_CASE("traffic counter closes 1 s periods") {
  TrafficCounter c(0.0);
  c.record(0.1);
  c.record(0.5);
  c.record(0.99);
  CHECK(c.current_count() == 3);
  CHECK_FALSE(c.roll(0.999));
  CHECK(c.roll(1.0));
  CHECK(c.last_rate() == 3.0);
  CHECK(c.current_count() == 0);
  c.record(1.5);
  CHECK(c.roll(2.2));
  CHECK(c.last_rate() == 1.0);
  CHECK(c.period_start() == doctest::Approx(2.0));
  // silent gap of several periods
  c.record(2.5);
  CHECK(c.roll(5.5));
  CHECK(c.last_rate() == 0.0);
  CHECK(c.period_start() == doctest::Approx(5.0));
}

TEST_CASE("adapt_tmax examples") {
  AdaptiveWindowState s;
  s.t_min = 0.01;
  s.t_max = 1.0;
  s.t_cap = 5.0;
  s.d_prev = 10;
  s.i_prev = 4;
  CHECK(adapt_tmax(s, 10, 4) == doctest::Approx(1.0));

  CHECK(adapt_tmax(s, 15, 4) == doctest::Approx(1.2));
  CHECK(s.d_prev == 15);

  AdaptiveWindowState b = s;
  b.beta = 0.0;
  const double before = b.t_max;
  for (double i : {0.0, 100.0, 3.0, 0.0, 7.0}) adapt_tmax(b, 15, i);
  CHECK(b.t_max == before);
}

TEST_CASE("0/0 change term is no change") {
  CHECK(change_term(1.0, 0.0, 0.0) == 0.0);
  AdaptiveWindowState s;
  s.d_prev = 0;
  s.i_prev = 0;
  s.beta = 1.0;
  const double t = s.t_max;
  CHECK(adapt_tmax(s, 0, 0) == t);
}

TEST_CASE("change terms never exceed the previous window") {
  Rng rng(21);
  std::uniform_real_distribution<double> v(0.0, 200.0), w(0.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const double tm = w(rng), a = v(rng), b = v(rng);
    const double c = change_term(tm, a, b);
    CHECK(std::abs(c) <= tm * (1 + 1e-12));
    CHECK(change_term(tm, b, a) == doctest::Approx(-c));
  }
}

TEST_CASE("t_max is invariant under traffic when beta = 0 and density is constant") {
  Rng rng(22);
  std::uniform_real_distribution<double> traffic(0.0, 500.0), d(1.0, 60.0), alpha(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    AdaptiveWindowState s;
    s.t_min = 0.002;
    s.t_max = 0.05;
    s.t_cap = 0.1;
    s.alpha = alpha(rng);
    s.beta = 0.0;
    s.d_prev = d(rng);
    s.i_prev = traffic(rng);
    const double dens = s.d_prev;
    for (int k = 0; k < 20; ++k) adapt_tmax(s, dens, traffic(rng));
    CHECK(s.t_max == 0.05);
  }
}

TEST_CASE("t_max stays inside its clamp for arbitrary inputs") {
  Rng rng(23);
  std::uniform_real_distribution<double> x(0.0, 100.0), ab(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    AdaptiveWindowState s;
    s.alpha = ab(rng);
    s.beta = ab(rng);
    s.d_prev = x(rng);
    s.i_prev = x(rng);
    for (int k = 0; k < 30; ++k) {
      const double t = adapt_tmax(s, x(rng), x(rng));
      CHECK(t >= s.t_floor());
      CHECK(t <= s.t_cap);
      CHECK(t > s.t_min);
    }
  }
}

TEST_CASE("a single observation is gone just after t_inactive") {
  Rng rng(24);
  std::uniform_real_distribution<double> at(0.0, 1e4), ti(0.1, 5000.0);
  for (int trial = 0; trial < 1000; ++trial) {
    DensityTable t(ti(rng));
    const double t0 = at(rng);
    t.observe(static_cast<NodeId>(trial), t0);
    CHECK(t.density(t0 + t.t_inactive() * 0.999) == 1);
    t.purge(t0 + t.t_inactive() * 1.001 + 1e-9);
    CHECK(t.size() == 0);
  }
}
