#include <doctest.h>

#include <cmath>
#include <random>

#include "kmer/errors.hpp"
#include "kmer/observables.hpp"
#include "kmer/oracle.hpp"
#include "kmer/sampler.hpp"

using namespace kmer;

namespace {

RodConfig transpose(const RodConfig& c) {
  const BoxSpec& b = c.box();
  RodConfig t(BoxSpec{b.height, b.width, b.k, b.containment, b.bc});
  for (const Rod& r : c.rods()) t.apply({flipped(r.orientation), {r.center.y, r.center.x}});
  return t;
}

RodConfig random_config(const BoxSpec& box, std::mt19937_64& g, int attempts) {
  RodConfig c(box);
  for (int a = 0; a < attempts; ++a) {
    const Rod r{(g() & 1) ? Orientation::Vertical : Orientation::Horizontal,
                {int(g() % unsigned(box.width)), int(g() % unsigned(box.height))}};
    if (c.is_compatible(r)) c.apply(r);
  }
  return c;
}

}  // namespace

TEST_CASE("density and order parameter basics") {
  const BoxSpec box = BoxSpec::square(20, 4);
  RodConfig c(box);
  CHECK(density(c) == 0.0);
  CHECK(order_parameter(c) == 0.0);
  c.apply({Orientation::Horizontal, {2, 2}});
  c.apply({Orientation::Horizontal, {10, 2}});
  CHECK(order_parameter(c) == 1.0);
  CHECK(density(c) == doctest::Approx(2.0 / 400));
  c.apply({Orientation::Vertical, {2, 10}});
  c.apply({Orientation::Vertical, {10, 10}});
  CHECK(order_parameter(c) == 0.0);
  const Region r{0, 0, 8, 8};
  CHECK(density(c, r) == doctest::Approx(1.0 / 64));
  CHECK(order_parameter(c, r) == 1.0);
}

TEST_CASE("bulk region") {
  const Region b = Region::bulk(BoxSpec::square(80, 8));
  CHECK(b == Region{16, 16, 64, 64});
  CHECK(Region::bulk(BoxSpec::square(20, 8)).empty());
}

TEST_CASE("transposing a configuration negates M and keeps the density") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 200; ++trial) {
    const RodConfig c = random_config({17, 23, 3, Containment::CenterInBox, Boundary::Open}, g, 80);
    const RodConfig t = transpose(c);
    CHECK(order_parameter(t) == -order_parameter(c));
    CHECK(density(t) == density(c));
  }
}

TEST_CASE("mean density on the 2x2 dimer box") {
  const BoxSpec box{2, 2, 2, Containment::FullyContained, Boundary::Open};
  const double z = 0.5;
  const double exact = exact_expectation(box, z, [](const RodConfig& c) { return density(c); });
  CHECK(exact == doctest::Approx((4 * z + 4 * z * z) / (1 + 4 * z + 2 * z * z) / 4));
  SamplerParams params;
  params.z = z;
  params.sweeps = 100000;
  std::vector<double> rho;
  run_chain(box, params, 0, [&](long, const RodConfig& c) { rho.push_back(density(c)); });
  const Estimate e = mean_with_error(rho);
  CHECK(std::abs(e.value - exact) <= 3 * e.error);
}

TEST_CASE("event indicator") {
  const BoxSpec box = BoxSpec::square(80, 8, Containment::CenterInBox, Boundary::Plus);
  EventSpec e = default_event(box);
  CHECK(e.side == 4);
  CHECK(e.target == Orientation::Vertical);
  CHECK_NOTHROW(e.validate(box));
  const Region w = e.window();
  CHECK(w.area() == 16);
  CHECK(w.contains(Site{40, 40}));
  RodConfig c(box);
  CHECK_FALSE(event_indicator(c, e));
  e.include_vacuous = true;
  CHECK(event_indicator(c, e));
  e.include_vacuous = false;
  c.apply({Orientation::Vertical, {40, 40}});
  CHECK(event_indicator(c, e));
  e.min_rods = 2;
  CHECK_FALSE(event_indicator(c, e));
  c.apply({Orientation::Vertical, {41, 40}});
  CHECK(event_indicator(c, e));
  RodConfig wrong(box);
  wrong.apply({Orientation::Horizontal, {w.x0, w.y1 - 1}});
  CHECK_FALSE(event_indicator(wrong, e));
  wrong.apply({Orientation::Vertical, {w.x1 - 1, w.y0 - 7}});
  e.min_rods = 1;
  CHECK_FALSE(event_indicator(wrong, e));

  EventSpec peel = default_event(box);
  peel.center = {5, 40};
  CHECK_THROWS_AS(peel.validate(box), ValidationError);
  CHECK(default_event(BoxSpec::square(80, 8, Containment::CenterInBox, Boundary::Minus)).target ==
        Orientation::Horizontal);
}

TEST_CASE("event probabilities are monotone in the event definition") {
  std::mt19937_64 g(6);
  const BoxSpec box = BoxSpec::square(40, 4);
  EventSpec loose = default_event(box), strict = loose, vacuous = loose;
  strict.min_rods = 2;
  vacuous.include_vacuous = true;
  for (int i = 0; i < 3000; ++i) {
    const RodConfig c = random_config(box, g, 150);
    const bool l = event_indicator(c, loose), s = event_indicator(c, strict), v = event_indicator(c, vacuous);
    REQUIRE((!s || l));
    REQUIRE((!l || v));
  }
}

TEST_CASE("event probability matches the oracle on a tiny box") {
  const BoxSpec box{3, 3, 2, Containment::CenterInBox, Boundary::Open};
  EventSpec e;
  e.center = {1, 1};
  e.side = 2;
  e.target = Orientation::Vertical;
  const double z = 0.6;
  const double exact = exact_expectation(box, z, [&](const RodConfig& c) { return event_indicator(c, e) ? 1.0 : 0.0; });
  CHECK(exact > 0.0);
  SamplerParams params;
  params.z = z;
  params.sweeps = 100000;
  std::vector<double> hits;
  run_chain(box, params, 0, [&](long, const RodConfig& c) { hits.push_back(event_indicator(c, e)); });
  const Estimate est = mean_with_error(hits);
  CHECK(std::abs(est.value - exact) <= 3 * est.error);
}

TEST_CASE("z = 0 has no events and no correlations") {
  const BoxSpec box = BoxSpec::square(40, 4);
  SamplerParams params;
  params.sweeps = 64;
  auto acc = make_pair_correlation(box, Region::whole(box), default_separations(4));
  const EventSpec e = default_event(box);
  run_chain(box, params, 0, [&](long, const RodConfig& c) {
    CHECK_FALSE(event_indicator(c, e));
    add_frame(acc, c);
  });
  for (const auto& p : acc.results()) {
    CHECK(p.raw.value == 0.0);
    CHECK(p.connected.value == 0.0);
  }
}

TEST_CASE("default separations") {
  const auto s = default_separations(8);
  REQUIRE(s.size() == 16);
  CHECK(s.front() == Site{4, 0});
  CHECK(s[7] == Site{32, 0});
  CHECK(s.back() == Site{0, 32});
}

TEST_CASE("constant fields have zero connected correlation") {
  ConnectedCorrelation acc(6, 5, {1, 1, 5, 4}, {{1, 0}, {0, 1}, {2, 2}}, 4);
  std::vector<double> f(30, 0.7);
  for (int i = 0; i < 40; ++i) acc.add(f);
  for (const auto& p : acc.results()) {
    CHECK(p.raw.value == doctest::Approx(0.49));
    CHECK(p.connected.value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(p.connected.error == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("merging split accumulators reproduces the single accumulator") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  ConnectedCorrelation whole(5, 5, {0, 0, 5, 5}, {{1, 0}}, 8), a = whole, b = whole;
  for (int i = 0; i < 32; ++i) {
    std::vector<double> f(25);
    for (double& v : f) v = u(g);
    whole.add(f);
    (i < 16 ? a : b).add(f);
  }
  a.merge(b);
  CHECK(a.frames() == 32);
  CHECK(a.results()[0].raw.value == doctest::Approx(whole.results()[0].raw.value).epsilon(1e-12));
}

TEST_CASE("pair correlations match the oracle on a tiny box") {
  const BoxSpec box{3, 2, 2, Containment::CenterInBox, Boundary::Open};
  const double z = 0.8;
  const std::vector<Site> seps{{1, 0}, {2, 0}, {0, 1}, {1, 1}};
  auto mean_n = [&](int x, int y) {
    return exact_expectation(box, z, [&](const RodConfig& c) { return double(center_indicators(c)[y * 3 + x]); });
  };
  SamplerParams params;
  params.z = z;
  params.sweeps = 200000;
  auto acc = make_pair_correlation(box, Region::whole(box), seps);
  run_chain(box, params, 0, [&](long, const RodConfig& c) { add_frame(acc, c); });
  const auto res = acc.results();
  for (std::size_t d = 0; d < seps.size(); ++d) {
    const Site a = seps[d];
    double raw = 0, conn = 0;
    int pairs = 0;
    for (int y = 0; y + a.y < 2; ++y)
      for (int x = 0; x + a.x < 3; ++x) {
        const double nn = exact_expectation(box, z, [&](const RodConfig& c) {
          const auto n = center_indicators(c);
          return double(n[y * 3 + x] * n[(y + a.y) * 3 + x + a.x]);
        });
        raw += nn;
        conn += nn - mean_n(x, y) * mean_n(x + a.x, y + a.y);
        ++pairs;
      }
    CAPTURE(d);
    CHECK(res[d].pairs == std::size_t(pairs));
    CHECK(std::abs(res[d].raw.value - raw / pairs) <= 4 * res[d].raw.error + 1e-12);
    CHECK(std::abs(res[d].connected.value - conn / pairs) <= 4 * res[d].connected.error + 1e-12);
  }
}

TEST_CASE("tile spin correlation grid") {
  const BoxSpec box = BoxSpec::square(30, 4);
  auto acc = make_tile_spin_correlation(box, Region::whole(box), {{1, 0}});
  SpinField f(2, 15, 15);
  for (int i = 0; i < 10; ++i) add_frame(acc, f);
  CHECK(acc.frames() == 10);
}
