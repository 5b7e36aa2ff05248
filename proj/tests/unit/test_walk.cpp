#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lowdisc/errors.hpp"
#include "lowdisc/rng.hpp"
#include "lowdisc/walk.hpp"

using namespace lowdisc;

namespace {

// `rows` random rows of density p over N coordinates, each with target delta.
ConstraintSystem random_rows(std::size_t N, std::size_t rows, double p, double delta, std::uint64_t seed) {
  Rng rng(seed);
  ConstraintSystem cs;
  cs.N = N;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < N; ++i)
      if (uniform01(rng) < p) idx.push_back(i);
    cs.add_row(idx, delta);
  }
  return cs;
}

double row_sum(const ConstraintSystem& cs, std::size_t r, const std::vector<double>& v) {
  double s = 0;
  for (auto c : cs.row(r)) s += v[c];
  return s;
}

void check_contract(const ConstraintSystem& cs, const WalkResult& res, std::span<const double> x0 = {}) {
  const std::size_t N = cs.N;
  CHECK(res.frozen >= (N + 1) / 2);
  std::size_t colored = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (res.partial[i] != 0) {
      ++colored;
      CHECK(res.x[i] == res.partial[i]);
    } else {
      CHECK(std::fabs(res.x[i]) < 1.0);
    }
  }
  CHECK(colored == res.frozen);
  double worst = -INFINITY;
  for (std::size_t r = 0; r < cs.rows(); ++r) {
    double s = 0;
    for (auto c : cs.row(r)) s += res.x[c] - (x0.empty() ? 0.0 : x0[c]);
    worst = std::max(worst, std::fabs(s) - cs.target[r]);
  }
  CHECK(worst <= 1.0 / static_cast<double>(N));
}

}  // namespace

TEST_CASE("constraint system validation") {
  ConstraintSystem cs;
  cs.N = 4;
  cs.add_row(std::vector<std::uint32_t>{0, 2}, 1.0);
  cs.add_row(BitVec::from_indices(4, std::vector<std::uint32_t>{1, 3}), 2.0);
  CHECK_NOTHROW(cs.validate());
  CHECK(cs.rows() == 2);
  CHECK(cs.row_size(1) == 2);
  cs.add_row(std::vector<std::uint32_t>{1}, 0.0);
  CHECK_THROWS_AS(cs.validate(), DomainError);
  ConstraintSystem bad;
  bad.N = 2;
  CHECK_THROWS_AS(bad.add_row(std::vector<std::uint32_t>{2}, 1.0), Error);
}

TEST_CASE("a vacuous row leaves the walk free") {
  ConstraintSystem cs;
  cs.N = 64;
  std::vector<std::uint32_t> all(64);
  for (std::uint32_t i = 0; i < 64; ++i) all[i] = i;
  cs.add_row(all, 64.0);
  auto res = lm_partial_coloring(cs, {}, 3);
  check_contract(cs, res);
}

TEST_CASE("two singleton rows with target 2 never bind") {
  ConstraintSystem cs;
  cs.N = 2;
  cs.add_row(std::vector<std::uint32_t>{0}, 2.0);
  cs.add_row(std::vector<std::uint32_t>{1}, 2.0);
  WalkParams wp;
  wp.stop_fraction = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Walker w(cs, wp, seed);
    while (w.step() == Walker::Status::moved) CHECK(w.tight_count() == 0);
    CHECK(w.frozen_count() == 2);
    CHECK(std::fabs(w.x()[0]) == 1.0);
    CHECK(std::fabs(w.x()[1]) == 1.0);
  }
  auto res = lm_partial_coloring(cs, {}, 1);
  CHECK(res.frozen >= 1);
}

TEST_CASE("without frozen coordinates or tight rows the step is the Gaussian draw") {
  ConstraintSystem cs;
  cs.N = 9;
  Walker w(cs, {}, 42);
  REQUIRE(w.step() == Walker::Status::moved);
  Rng rng(42);
  GaussianSource g;
  for (std::size_t i = 0; i < 9; ++i) CHECK(w.last_direction()[i] == g(rng));
}

TEST_CASE("walk soundness at every step") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto cs = random_rows(150, 12, seed % 2 ? 0.1 : 0.4, 0.5, seed);
    // a few wide rows with large targets
    auto extra = random_rows(150, 5, 0.7, 9.0, seed + 100);
    for (std::size_t r = 0; r < extra.rows(); ++r) cs.add_row(extra.row(r), extra.target[r]);
    WalkParams wp;
    wp.reorth_every = 5;
    Walker w(cs, wp, seed);
    std::size_t max_tight = 0;
    for (int s = 0; s < 20000; ++s) {
      const auto x_before = w.x();
      const auto frozen_before = w.frozen();
      std::vector<std::size_t> tight_before;
      for (std::size_t r = 0; r < cs.rows(); ++r)
        if (w.tight(r)) tight_before.push_back(r);
      const auto st = w.step();
      if (st != Walker::Status::moved) break;
      max_tight = std::max(max_tight, w.tight_count());
      const auto& u = w.last_direction();
      for (std::size_t i = 0; i < cs.N; ++i)
        if (frozen_before[i]) {
          CHECK(w.x()[i] == x_before[i]);
          CHECK(u[i] == 0.0);
        }
      for (auto r : tight_before) CHECK(std::fabs(row_sum(cs, r, u)) <= 1e-9);
      for (std::size_t r = 0; r < cs.rows(); ++r)
        CHECK(std::fabs(w.displacement(r)) <= cs.target[r] + w.row_tol(r));
      for (std::size_t i = 0; i < cs.N; ++i) CHECK(std::fabs(w.x()[i]) <= 1.0);
    }
    CHECK(max_tight > 0);
    CHECK(w.frozen_count() >= w.required_frozen());
  }
}

TEST_CASE("partial coloring contract on random systems") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto cs = random_rows(300, 15, 0.05 * static_cast<double>(seed), 1.0, seed);
    auto res = lm_partial_coloring(cs, {}, seed);
    check_contract(cs, res);
  }
}

TEST_CASE("partial coloring from a fractional start") {
  Rng rng(5);
  std::vector<double> x0(200);
  for (auto& v : x0) v = 1.6 * uniform01(rng) - 0.8;
  x0[7] = 1.0;
  auto cs = random_rows(200, 10, 0.2, 0.75, 9);
  auto res = lm_partial_coloring(cs, {}, 2, x0);
  CHECK(res.partial[7] == 1);
  check_contract(cs, res, x0);
  CHECK_THROWS_AS(lm_partial_coloring(cs, {}, 2, std::vector<double>(5, 0.0)), StructuralError);
}

TEST_CASE("the entropy condition gates the walk") {
  auto cs = random_rows(64, 40, 0.3, 0.01, 1);
  CHECK_THROWS_AS(lm_partial_coloring(cs, {}, 1), PreconditionError);
}

TEST_CASE("an exhausted step budget surfaces as WalkFailure") {
  auto cs = random_rows(100, 5, 0.3, 1.0, 1);
  WalkParams wp;
  wp.max_steps = 1;
  wp.retry_limit = 2;
  CHECK_THROWS_AS(lm_partial_coloring(cs, wp, 1), WalkFailure);
}

TEST_CASE("parameter defaults and validation") {
  auto p = WalkParams{}.resolved(100);
  CHECK(p.gamma == 0.1);
  CHECK(p.freeze_tol == doctest::Approx(0.5 / 1e4));
  CHECK(p.max_steps == 640000);
  WalkParams bad;
  bad.gamma = 2;
  CHECK_THROWS_AS(bad.resolved(10), DomainError);
}

TEST_CASE("walks are deterministic per seed") {
  auto cs = random_rows(250, 12, 0.1, 1.0, 4);
  auto a = lm_partial_coloring(cs, {}, 77);
  auto b = lm_partial_coloring(cs, {}, 77);
  CHECK(a.x == b.x);
  CHECK(a.partial == b.partial);
  CHECK(a.steps == b.steps);
  auto c = lm_partial_coloring(cs, {}, 78);
  CHECK(a.x != c.x);
}
