#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lowdisc/geometry.hpp"
#include "lowdisc/set_system.hpp"

namespace lowdisc {

// Every distinct subset {p : <a, p> <= b} of the points, sorted by bit
// vector key. Ranges come from hyperplanes through each dim-subset T of the
// points: one open side plus any subset of T, for both sides, plus the empty
// and the full set. Throws GenerationError naming the tuple when a point
// lies on one of these hyperplanes.
SetSystem halfspace_ranges(const PointSet& pts);

// Ranges cut off by m random directions: for a Gaussian direction u and a
// log-uniform k in [1, n), the k points with smallest <u, p>. Always
// contains the empty and the full set. Sorted by bit vector key.
SetSystem sampled_halfspace_ranges(const PointSet& pts, std::size_t m, std::uint64_t seed);

// Empty set, then all runs of consecutive points in coordinate order,
// grouped by start. Requires dim = 1 and distinct coordinates.
SetSystem interval_ranges(const PointSet& pts1d);

// Element ids sorted by their 1D coordinate.
std::vector<std::uint32_t> sorted_order_1d(const PointSet& pts1d);

// Distinct halfspace ranges with at most k points, for each k.
std::vector<std::uint64_t> kset_counts(const PointSet& pts, const std::vector<std::size_t>& ks);
std::uint64_t kset_count(const PointSet& pts, std::size_t k);

struct SizeDist {
  enum class Kind { bernoulli, fixed } kind = Kind::bernoulli;
  double p = 0.5;
  std::size_t k = 0;
};

SetSystem random_abstract_system(std::size_t n, std::size_t m, SizeDist dist, std::uint64_t seed);

enum class InstanceKind { intervals, halfplanes, halfspaces3d, abstract };

std::optional<InstanceKind> parse_instance_kind(std::string_view s);
std::string_view instance_kind_name(InstanceKind k);
// Primal shatter dimension d and sensitivity exponent d1 of a family.
std::pair<int, int> shatter_exponents(InstanceKind k);

struct InstanceOptions {
  // Halfspace families with more points than this use sampled ranges.
  std::size_t full_enumeration_limit = 512;
  // Sampled family size as a multiple of n.
  double sampled_sets_per_point = 2.0;
  PointDist dist = PointDist::uniform_cube;
  // Abstract family: m = sets_per_point * n sets, each element with p = 1/2.
  double abstract_sets_per_point = 2.0;
};

struct Instance {
  InstanceKind kind;
  std::uint64_t seed = 0;
  std::optional<PointSet> points;
  SetSystem sys;
  bool sampled = false;
};

Instance make_instance(InstanceKind kind, std::size_t n, std::uint64_t seed, const InstanceOptions& opt = {});

}  // namespace lowdisc
