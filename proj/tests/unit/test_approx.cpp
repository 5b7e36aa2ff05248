#include <cmath>
#include <map>

#include "doctest.h"
#include "lowdisc/approx.hpp"
#include "lowdisc/errors.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/rng.hpp"
#include "oracles.hpp"

using namespace lowdisc;

namespace {

PointSet line(std::size_t n, std::uint64_t seed) { return gen_points(n, 1, PointDist::uniform_cube, seed); }

BitVec random_bits(std::size_t n, double p, Rng& rng) {
  BitVec b(n);
  for (std::size_t i = 0; i < n; ++i) b.assign(i, uniform01(rng) < p);
  return b;
}

// Direct floating evaluation of the relative approximation definition.
bool relative_ok(const SetSystem& sys, BitView z, double eps, double delta) {
  const double n = static_cast<double>(sys.n()), nz = static_cast<double>(z.count());
  for (std::size_t r = 0; r < sys.size(); ++r) {
    const double mx = static_cast<double>(sys.set_size(r)) / n;
    const double mz = nz == 0 ? 0.0 : static_cast<double>(intersection_size(sys[r], z)) / nz;
    const double allowed = mx >= eps ? delta * mx : delta * eps;
    if (std::fabs(mz - mx) > allowed * (1 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("d_nu examples") {
  CHECK(d_nu(0.3, 0.3, 0.1) == 0.0);
  CHECK(d_nu(0.5, 0.25, 0.25) == doctest::Approx(0.25));
  CHECK(d_nu(0.25, 0.5, 0.25) == d_nu(0.5, 0.25, 0.25));
  CHECK_THROWS_AS(d_nu(0.1, 0.2, 0.0), DomainError);
  CHECK_THROWS_AS(d_nu(0.1, 0.2, -1.0), DomainError);
}

TEST_CASE("d_nu satisfies the triangle inequality on a grid") {
  for (double nu : {0.01, 0.1, 0.5}) {
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b)
        for (int c = 0; c <= 20; ++c) {
          const double x = a * 0.05, y = b * 0.05, z = c * 0.05;
          CHECK(d_nu(x, z, nu) <= d_nu(x, y, nu) + d_nu(y, z, nu) + 1e-15);
          CHECK(d_nu(x, y, nu) == d_nu(y, x, nu));
          CHECK(d_nu(x, y, nu) == doctest::Approx(oracle::d_nu(x, y, nu)));
        }
  }
}

TEST_CASE("rationals") {
  CHECK(parse_rational("1/16") == Rational{1, 16});
  CHECK(parse_rational("0.25") == Rational{1, 4});
  CHECK(parse_rational("3/6") == Rational{1, 2});
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("abc").has_value());
  CHECK(rational_from_double(0.375) == Rational{3, 8});
  CHECK(rational_from_double(0.1).value() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("interval family agrees with the explicit interval system") {
  for (std::size_t n : {2u, 3u, 7u, 40u}) {
    auto pts = line(n, n);
    IntervalFamily fam(pts);
    auto sys = interval_ranges(pts);
    ExplicitFamily ex(sys);
    CHECK(fam.size() == sys.size());
    CHECK(fam.n() == n);
    Rng rng(n);
    auto a = random_bits(n, 0.5, rng), b = random_bits(n, 0.3, rng);
    std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> got, want;
    fam.for_each_pair(a, b, [&](std::uint64_t id, std::uint32_t x, std::uint32_t y) { got[id] = {x, y}; });
    ex.for_each_pair(a, b, [&](std::uint64_t id, std::uint32_t x, std::uint32_t y) { want[id] = {x, y}; });
    CHECK(got == want);
    auto order = sorted_order_1d(pts);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t e = s; e < n; ++e) {
        std::vector<std::uint32_t> ids(order.begin() + s, order.begin() + e + 1);
        CHECK(sys.find(BitVec::from_indices(n, ids)) == fam.id_of(s, e));
      }
  }
}

TEST_CASE("coloring systems contain X") {
  auto pts = line(30, 2);
  IntervalFamily fam(pts);
  Rng rng(1);
  auto x = random_bits(30, 0.6, rng);
  auto cs = fam.coloring_system(x);
  CHECK(cs.n() == x.count());
  CHECK(cs.find(BitVec::full(cs.n())).has_value());
  // prefixes: every interval restricted to x is a difference of two of them
  auto sys = interval_ranges(pts);
  auto restricted = project(sys, x);
  for (std::size_t r = 0; r < restricted.size(); ++r) {
    bool found = restricted.set_size(r) == 0;
    for (std::size_t p = 0; p < cs.size() && !found; ++p)
      for (std::size_t q = 0; q <= p && !found; ++q)
        found = equal(restricted[r], bit_minus(cs[p], cs[q])) || equal(restricted[r], cs[p]);
    CHECK(found);
  }
  SetSystem small(5);
  small.add_indices({0, 1});
  ExplicitFamily ex(small);
  auto ecs = ex.coloring_system(BitVec::full(5));
  CHECK(ecs.find(BitVec::full(5)).has_value());
  CHECK(ecs.size() == 2);
}

TEST_CASE("relative approximation verifier") {
  auto pts = line(64, 3);
  IntervalFamily fam(pts);
  auto sys = interval_ranges(pts);
  CHECK(verify_relative_approx(fam, BitVec::full(64), {1, 16}, {1, 4}).pass);
  auto none = verify_relative_approx(fam, BitVec(64), {1, 16}, {1, 4});
  CHECK_FALSE(none.pass);
  CHECK(none.worst_margin < 0);
  CHECK(none.checked == fam.size());

  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    auto z = random_bits(64, 0.1 + 0.02 * t, rng);
    const Rational eps{1, 8}, delta{1, 2};
    CHECK(verify_relative_approx(fam, z, eps, delta).pass == relative_ok(sys, z, 0.125, 0.5));
  }
}

TEST_CASE("nu-alpha verifier and nets") {
  auto pts = line(50, 5);
  IntervalFamily fam(pts);
  CHECK(verify_nu_alpha(fam, BitVec::full(50), 0.1, 0.01).pass);
  CHECK(verify_nu_alpha(fam, BitVec::full(50), 0.1, 0.01).worst == 0.0);
  Rng rng(2);
  auto z = random_bits(50, 0.2, rng);
  CHECK(verify_nu_alpha(fam, z, 0.1, 1.0).pass);
  CHECK(epsilon_net_check(fam, BitVec::full(50), 0.1).pass);
  CHECK(epsilon_net_check(fam, BitVec(50), 1.5).pass);
  auto miss = epsilon_net_check(fam, BitVec(50), 0.5);
  CHECK_FALSE(miss.pass);
  CHECK(miss.uncovered.has_value());
}

TEST_CASE("sampling") {
  CHECK(random_sample(100, 30, 1) == random_sample(100, 30, 1));
  CHECK(random_sample(100, 30, 1).count() == 30);
  CHECK(random_sample(100, 500, 1) == BitVec::full(100));
  const auto m = relative_sample_size(1.0 / 16, 0.25, 0.1, 2);
  CHECK(m == static_cast<std::size_t>(std::ceil((2 * std::log(16.0) + std::log(10.0)) / (0.0625 * 1.0 / 16))));
  auto z = random_sample_approx(64, 1.0 / 16, 0.25, 0.1, 2, 3);
  CHECK(z == BitVec::full(64));
  CHECK(verify_relative_approx(IntervalFamily(line(64, 1)), z, {1, 16}, {1, 4}).pass);
  CHECK(net_sample_size(0.1, 0.1, 2) == static_cast<std::size_t>(std::ceil(10 * (std::log(20.0) + std::log(10.0)))));
}

TEST_CASE("halving step") {
  BitVec x = BitVec::from_indices(10, std::vector<std::uint32_t>{1, 2, 4, 6, 7, 9});
  auto bal = halving_step(x, Coloring(std::vector<std::int8_t>{1, -1, 1, -1, 1, -1}));
  CHECK(bal.drift == Rational{0, 1});
  CHECK(bal.next.indices() == std::vector<std::uint32_t>{1, 4, 7});

  auto all = halving_step(x, Coloring(std::vector<std::int8_t>(6, 1)));
  CHECK(all.drift == Rational{1, 1});
  CHECK(all.next == x);

  auto minus = halving_step(x, Coloring(std::vector<std::int8_t>{-1, -1, 1, -1, 1, -1}));
  CHECK(minus.next.count() == 4);
  // 2 n_i = n_{i-1} (1 + drift)
  CHECK(Rational{2 * 4, 1} == Rational{6 * (minus.drift.den + minus.drift.num), minus.drift.den});

  CHECK_THROWS_AS(halving_step(x, Coloring(6)), DomainError);
  CHECK_THROWS_AS(halving_step(x, Coloring(std::vector<std::int8_t>(5, 1))), StructuralError);
}

TEST_CASE("halving on intervals") {
  auto pts = line(512, 7);
  IntervalFamily fam(pts);
  HalvingParams hp;
  hp.eps = {1, 4};
  hp.delta = {1, 1};
  PipelineParams pp;
  auto r = relative_approx_by_halving(fam, hp, pp, 3);
  auto check = verify_relative_approx(fam, r.z, hp.eps, hp.delta);
  CHECK(check.pass);
  CHECK(verify_nu_alpha(fam, r.z, r.trace.nu, r.trace.alpha).pass);
  std::size_t prev = 512;
  for (const auto& s : r.trace.steps) {
    CHECK(s.n_prev == prev);
    CHECK(Rational{static_cast<std::int64_t>(2 * s.n_i), 1} ==
          Rational{static_cast<std::int64_t>(s.n_prev) * (s.drift.den + s.drift.num), s.drift.den});
    CHECK(s.drift.num >= 0);
    CHECK(s.dnu_total < r.trace.alpha);
    prev = s.n_i;
  }
  CHECK(r.z.count() == prev);
  auto again = relative_approx_by_halving(fam, hp, pp, 3);
  CHECK(again.z == r.z);
  CHECK(halving_trace_json(r, &check) == halving_trace_json(again, &check));

  hp.d1 = 2;
  CHECK_THROWS_AS(relative_approx_by_halving(fam, hp, pp, 3), UnsupportedError);
}

TEST_CASE("eps = 1 takes at most one halving step") {
  auto pts = line(256, 2);
  IntervalFamily fam(pts);
  HalvingParams hp;
  hp.eps = {1, 1};
  hp.delta = {1, 2};
  auto r = relative_approx_by_halving(fam, hp, {}, 1);
  CHECK(r.trace.steps.size() <= 1);
  CHECK(verify_relative_approx(fam, r.z, hp.eps, hp.delta).pass);
}

TEST_CASE("telescoping bound on a real chain") {
  auto pts = line(300, 9);
  auto sys = interval_ranges(pts);
  IntervalFamily fam(pts);
  BitVec x = BitVec::full(300);
  std::vector<BitVec> chain{x};
  for (int i = 1; i <= 3; ++i) {
    auto cs = fam.coloring_system(chain.back());
    auto col = full_coloring(cs, {}, 10 + i);
    chain.push_back(halving_step(chain.back(), col.chi).next);
  }
  const double nu = 0.1;
  for (std::size_t r = 0; r < sys.size(); ++r) {
    auto meas = [&](const BitVec& z) { return measure(sys[r], z).value(); };
    double sum = 0;
    for (std::size_t t = 1; t < chain.size(); ++t) {
      sum += d_nu(meas(chain[t - 1]), meas(chain[t]), nu);
      CHECK(d_nu(meas(chain[0]), meas(chain[t]), nu) <= sum + 1e-12);
    }
  }
}
