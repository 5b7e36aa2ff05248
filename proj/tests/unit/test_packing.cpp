#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "lowdisc/generators.hpp"
#include "lowdisc/packing.hpp"
#include "lowdisc/rng.hpp"
#include "oracles.hpp"

using namespace lowdisc;

namespace {

SetSystem singletons(std::size_t n, bool with_empty) {
  SetSystem s(n);
  for (std::uint32_t i = 0; i < n; ++i) s.add_indices({i});
  if (with_empty) s.add(BitVec(n));
  return s;
}

std::vector<std::uint32_t> iota_ids(std::size_t m) {
  std::vector<std::uint32_t> v(m);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

}  // namespace

TEST_CASE("singletons with delta 1") {
  auto sys = singletons(8, true);
  auto p = greedy_packing(sys, 1);
  CHECK(p.members == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(verify_separated(p, sys));
  CHECK(verify_maximal(p, sys));
}

TEST_CASE("delta >= n admits only the first scanned set") {
  auto sys = make_instance(InstanceKind::intervals, 12, 1).sys;
  auto p = greedy_packing(sys, 12);
  CHECK(p.members.size() == 1);
  CHECK(p.members[0] == 0);
  auto shuffled = greedy_packing(sys, 20, PackOrder::seeded_shuffle, 5);
  CHECK(shuffled.members.size() == 1);
  CHECK(shuffled.members[0] == scan_order(sys, PackOrder::seeded_shuffle, 5)[0]);
}

TEST_CASE("greedy packing equals the plain greedy oracle") {
  auto sys = make_instance(InstanceKind::intervals, 16, 1).sys;
  for (auto order : {PackOrder::input, PackOrder::by_size, PackOrder::seeded_shuffle}) {
    for (std::uint64_t delta : {1, 2, 4, 8}) {
      auto scan = scan_order(sys, order, 3);
      auto p = greedy_packing(sys, delta, order, 3);
      CHECK(p.members == oracle::greedy(sys, delta, scan));
    }
  }
  auto hp = make_instance(InstanceKind::halfplanes, 40, 2).sys;
  for (std::uint64_t delta : {1, 3, 6, 10, 20})
    CHECK(greedy_packing(hp, delta).members == oracle::greedy(hp, delta, iota_ids(hp.size())));
}

TEST_CASE("scan orders") {
  auto sys = make_instance(InstanceKind::intervals, 10, 1).sys;
  auto by_size = scan_order(sys, PackOrder::by_size, 0);
  for (std::size_t t = 1; t < by_size.size(); ++t) CHECK(sys.set_size(by_size[t - 1]) <= sys.set_size(by_size[t]));
  auto sh = scan_order(sys, PackOrder::seeded_shuffle, 9);
  CHECK(sh == scan_order(sys, PackOrder::seeded_shuffle, 9));
  std::sort(sh.begin(), sh.end());
  CHECK(sh == iota_ids(sys.size()));
}

TEST_CASE("capped packing") {
  auto sys = make_instance(InstanceKind::intervals, 16, 1).sys;
  auto zero = greedy_packing_capped(sys, 2, 0);
  CHECK(zero.members == std::vector<std::uint32_t>{0});
  auto no_empty = singletons(6, false);
  CHECK(greedy_packing_capped(no_empty, 1, 0).members.empty());
  CHECK(greedy_packing_capped(sys, 3, 16).members == greedy_packing(sys, 3).members);
  auto capped = greedy_packing_capped(sys, 1, 5);
  for (auto m : capped.members) CHECK(sys.set_size(m) <= 5);
  CHECK(verify_separated(capped, sys));
  CHECK(verify_maximal(capped, sys));
}

TEST_CASE("verify_separated boundary cases") {
  auto sys = singletons(8, false);
  Packing dup;
  dup.delta = 1;
  dup.members = {2, 2};
  CHECK_FALSE(verify_separated(dup, sys));
  Packing at_delta;
  at_delta.delta = 2;
  at_delta.members = {0, 1};  // distance exactly 2
  CHECK_FALSE(verify_separated(at_delta, sys));
  at_delta.delta = 1;
  CHECK(verify_separated(at_delta, sys));
}

TEST_CASE("verify_maximal negative cases") {
  auto sys = singletons(8, false);
  auto p = greedy_packing(sys, 1);
  p.members.erase(p.members.begin() + 3);
  CHECK(verify_separated(p, sys));
  CHECK_FALSE(verify_maximal(p, sys));
  Packing empty;
  empty.delta = 1;
  CHECK_FALSE(verify_maximal(empty, sys));
}

TEST_CASE("greedy outputs pass both verifiers and stay separated at smaller delta") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto sys = make_instance(InstanceKind::halfplanes, 64, seed).sys;
    for (std::uint64_t delta : {1, 2, 5, 11, 30}) {
      auto p = greedy_packing(sys, delta, PackOrder::seeded_shuffle, seed);
      CHECK(verify_separated(p, sys));
      CHECK(verify_maximal(p, sys));
      for (std::uint64_t smaller : {std::uint64_t{1}, delta / 2}) {
        Packing q = p;
        q.delta = std::max<std::uint64_t>(smaller, 1);
        CHECK(verify_separated(q, sys));
      }
    }
  }
}

TEST_CASE("MetricIndex matches exhaustive range queries") {
  auto sys = random_abstract_system(90, 300, SizeDist{SizeDist::Kind::bernoulli, 0.2, 0}, 4);
  Rng rng(5);
  for (std::uint64_t radius : {0, 3, 10, 17, 25, 40}) {
    MetricIndex idx(sys, radius);
    std::vector<std::uint32_t> stored;
    for (std::uint32_t id = 0; id < sys.size(); id += 3) {
      idx.insert(id);
      stored.push_back(id);
    }
    CHECK(idx.size() == stored.size());
    for (int t = 0; t < 100; ++t) {
      const auto q = static_cast<std::uint32_t>(uniform_index(rng, sys.size()));
      auto best = oracle::nearest(sys, stored, sys[q]);
      auto got = idx.nearest_within(q);
      if (best.second <= radius) {
        REQUIRE(got.has_value());
        CHECK(got->first == best.first);
        CHECK(got->second == best.second);
      } else {
        CHECK_FALSE(got.has_value());
      }
      CHECK(idx.any_within(q) == (best.second <= radius));
    }
  }
}

TEST_CASE("packing bound report") {
  auto singles = singletons(32, false);
  auto r = packing_bound_report(singles, {1}, 2);
  CHECK(r.rows.at(0).size == 32);
  CHECK(halving_deltas(64, 4) == std::vector<std::uint64_t>{32, 16, 8, 4});

  auto sys = make_instance(InstanceKind::intervals, 256, 1).sys;
  auto rep = packing_bound_report(sys, halving_deltas(256, 4), 2);
  CHECK(rep.fit.slope <= 2.3);
  CHECK(rep.fit.slope > 1.0);
  for (std::size_t t = 1; t < rep.rows.size(); ++t) CHECK(rep.rows[t].size >= rep.rows[t - 1].size);
}

TEST_CASE("capped packing counts shrink with the cap") {
  auto sys = make_instance(InstanceKind::halfplanes, 128, 3).sys;
  const std::uint64_t delta = 8;
  std::size_t prev = SIZE_MAX;
  for (int i = 1; i <= 5; ++i) {
    auto p = greedy_packing_capped(sys, delta, 4 * 128 >> (i - 1), PackOrder::by_size);
    CHECK(p.members.size() <= prev);
    prev = p.members.size();
  }
}
