#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lowdisc {

enum class PointDist { uniform_cube, uniform_sphere, gaussian, convex_position };

std::optional<PointDist> parse_point_dist(std::string_view s);
std::string_view point_dist_name(PointDist d);

// n points in dim-space, row-major. Generated coordinates are integers
// stored as doubles, which keeps every orientation test exact.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::uint64_t seed = 0;
  // False when the instance was too large for an exhaustive check.
  bool general_position_verified = false;

  std::size_t size() const { return dim ? coords.size() / dim : 0; }
  double coord(std::size_t i, std::size_t c) const { return coords[i * dim + c]; }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

// Sign of det[p1 - p0, ..., pd - p0] for d = pts.dim and d + 1 point ids.
// Exact for integer coordinates below 2^26 in magnitude; other inputs use
// long double with an error filter and report 0 when it cannot decide.
int orientation(const PointSet& pts, const std::uint32_t* ids);

// Sign of the point q relative to the hyperplane through the dim points
// `base`; same sign convention as orientation(base..., q).
int side_of(const PointSet& pts, const std::uint32_t* base, std::uint32_t q);

PointSet gen_points(std::size_t n, std::size_t dim, PointDist dist, std::uint64_t seed);

// First affinely dependent (dim + 1)-tuple, if any. Exhaustive when
// C(n, dim+1) <= limit; in 2D an O(n^2) direction-hash scan is used.
// Returns nullopt and sets `complete = false` when the instance is too big.
std::optional<std::vector<std::uint32_t>> find_degenerate_tuple(const PointSet& pts, bool& complete,
                                                                std::uint64_t limit = 50'000'000);

}  // namespace lowdisc
