#include "lowdisc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {
namespace {

// Largest magnitude exponent L such that all coordinates below 2^L give
// determinants that fit in __int128 (and stay exactly representable as
// doubles).
constexpr int kExactBits[5] = {0, 53, 53, 38, 25};

bool exact_representable(const PointSet& pts, const std::uint32_t* ids, std::size_t count) {
  const double lim = std::ldexp(1.0, kExactBits[pts.dim]);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t c = 0; c < pts.dim; ++c) {
      const double v = pts.coord(ids[k], c);
      if (!(std::fabs(v) < lim) || v != std::trunc(v)) return false;
    }
  return true;
}

template <typename T>
T det(const T (&m)[4][4], std::size_t d) {
  switch (d) {
    case 1: return m[0][0];
    case 2: return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    case 3:
      return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
             m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    default: {
      T s = 0;
      for (std::size_t c = 0; c < 4; ++c) {
        T minor[4][4]{};
        for (std::size_t r = 1; r < 4; ++r)
          for (std::size_t cc = 0, k = 0; cc < 4; ++cc)
            if (cc != c) minor[r - 1][k++] = m[r][cc];
        const T term = m[0][c] * det(minor, 3);
        s = (c % 2) ? s - term : s + term;
      }
      return s;
    }
  }
}

template <typename T>
int sign_of(T v) {
  return (v > 0) - (v < 0);
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

// Open-addressing set of 2D directions, cleared between anchor points.
class DirectionTable {
 public:
  explicit DirectionTable(std::size_t capacity) {
    std::size_t cap = 16;
    while (cap < 2 * capacity) cap <<= 1;
    keys_.assign(cap, kEmpty);
    vals_.assign(cap, 0);
  }
  void clear() {
    for (auto s : used_) keys_[s] = kEmpty;
    used_.clear();
  }
  // Returns the stored value if the key was already present.
  std::optional<std::uint32_t> insert(std::uint64_t key, std::uint32_t val) {
    const std::size_t mask = keys_.size() - 1;
    std::size_t s = (key * 0x9e3779b97f4a7c15ULL) >> 20 & mask;
    while (keys_[s] != kEmpty) {
      if (keys_[s] == key) return vals_[s];
      s = (s + 1) & mask;
    }
    keys_[s] = key;
    vals_[s] = val;
    used_.push_back(s);
    return std::nullopt;
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> vals_;
  std::vector<std::size_t> used_;
};

std::optional<std::vector<std::uint32_t>> degenerate_2d(const PointSet& pts) {
  const std::size_t n = pts.size();
  DirectionTable table(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    table.clear();
    for (std::uint32_t j = i + 1; j < n; ++j) {
      std::int64_t dx = static_cast<std::int64_t>(pts.coord(j, 0) - pts.coord(i, 0));
      std::int64_t dy = static_cast<std::int64_t>(pts.coord(j, 1) - pts.coord(i, 1));
      if (dx == 0 && dy == 0) return std::vector<std::uint32_t>{i, j, j};
      const std::int64_t g = gcd64(dx, dy);
      dx /= g;
      dy /= g;
      if (dx < 0 || (dx == 0 && dy < 0)) {
        dx = -dx;
        dy = -dy;
      }
      // Coordinates are below 2^31 in magnitude, so each reduced component
      // fits in 32 bits with an offset.
      const std::uint64_t key = (static_cast<std::uint64_t>(dx) << 32) ^ static_cast<std::uint32_t>(dy);
      if (auto k = table.insert(key, j)) return std::vector<std::uint32_t>{i, *k, j};
    }
  }
  return std::nullopt;
}

bool all_integral_below(const PointSet& pts, double lim) {
  return std::all_of(pts.coords.begin(), pts.coords.end(),
                     [lim](double v) { return std::fabs(v) < lim && v == std::trunc(v); });
}

std::uint64_t binom_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  long double r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    if (r > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(r + 0.5L);
}

void draw_point(PointDist dist, std::size_t dim, Rng& rng, GaussianSource& gauss, double* out) {
  switch (dist) {
    case PointDist::uniform_cube:
      for (std::size_t c = 0; c < dim; ++c) out[c] = static_cast<double>(uniform_index(rng, 1u << 24));
      break;
    case PointDist::gaussian: {
      const double sigma = std::ldexp(1.0, 22), lim = std::ldexp(1.0, 25) - 1;
      for (std::size_t c = 0; c < dim; ++c) out[c] = std::clamp(std::round(sigma * gauss(rng)), -lim, lim);
      break;
    }
    case PointDist::uniform_sphere: {
      double v[4], norm = 0;
      do {
        norm = 0;
        for (std::size_t c = 0; c < dim; ++c) {
          v[c] = gauss(rng);
          norm += v[c] * v[c];
        }
      } while (norm < 1e-12);
      norm = std::sqrt(norm);
      const double radius = std::ldexp(1.0, 24);
      for (std::size_t c = 0; c < dim; ++c) out[c] = std::round(radius * v[c] / norm);
      break;
    }
    case PointDist::convex_position: break;
  }
}

PointSet convex_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointSet pts;
  pts.dim = 2;
  pts.seed = seed;
  const double radius = std::ldexp(1.0, 29);
  const double two_pi = 6.283185307179586;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = (static_cast<double>(i) + 0.25 + 0.5 * uniform01(rng)) * two_pi / static_cast<double>(n);
    pts.coords.push_back(std::round(radius * std::cos(theta)));
    pts.coords.push_back(std::round(radius * std::sin(theta)));
  }
  return pts;
}

bool strictly_convex_ccw(const PointSet& pts) {
  const std::size_t n = pts.size();
  if (n < 3) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t ids[3] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>((i + 1) % n),
                                  static_cast<std::uint32_t>((i + 2) % n)};
    if (orientation(pts, ids) <= 0) return false;
  }
  return true;
}

}  // namespace

std::optional<PointDist> parse_point_dist(std::string_view s) {
  if (s == "uniform-cube") return PointDist::uniform_cube;
  if (s == "uniform-sphere") return PointDist::uniform_sphere;
  if (s == "gaussian") return PointDist::gaussian;
  if (s == "convex-position") return PointDist::convex_position;
  return std::nullopt;
}

std::string_view point_dist_name(PointDist d) {
  switch (d) {
    case PointDist::uniform_cube: return "uniform-cube";
    case PointDist::uniform_sphere: return "uniform-sphere";
    case PointDist::gaussian: return "gaussian";
    case PointDist::convex_position: return "convex-position";
  }
  return "?";
}

int orientation(const PointSet& pts, const std::uint32_t* ids) {
  const std::size_t d = pts.dim;
  if (exact_representable(pts, ids, d + 1)) {
    __int128 m[4][4]{};
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        m[r][c] = static_cast<__int128>(static_cast<std::int64_t>(pts.coord(ids[r + 1], c))) -
                  static_cast<std::int64_t>(pts.coord(ids[0], c));
    return sign_of(det(m, d));
  }
  long double m[4][4]{}, a[4][4]{};
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      m[r][c] = static_cast<long double>(pts.coord(ids[r + 1], c)) - pts.coord(ids[0], c);
      a[r][c] = std::fabs(m[r][c]);
    }
  const long double v = det(m, d);
  // det of the absolute matrix bounds the permanent only for d <= 2; use the
  // product of row norms instead (Hadamard), which bounds every term.
  long double scale = 1;
  for (std::size_t r = 0; r < d; ++r) {
    long double s = 0;
    for (std::size_t c = 0; c < d; ++c) s += a[r][c];
    scale *= s;
  }
  if (std::fabs(v) <= scale * 64 * 24 * std::numeric_limits<long double>::epsilon()) return 0;
  return sign_of(v);
}

int side_of(const PointSet& pts, const std::uint32_t* base, std::uint32_t q) {
  std::uint32_t ids[5];
  std::copy(base, base + pts.dim, ids);
  ids[pts.dim] = q;
  return orientation(pts, ids);
}

std::optional<std::vector<std::uint32_t>> find_degenerate_tuple(const PointSet& pts, bool& complete,
                                                                std::uint64_t limit) {
  const std::size_t n = pts.size(), d = pts.dim;
  complete = true;
  if (d == 1) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pts.coord(a, 0) < pts.coord(b, 0); });
    for (std::size_t i = 1; i < n; ++i)
      if (pts.coord(order[i], 0) == pts.coord(order[i - 1], 0)) return std::vector{order[i - 1], order[i]};
    return std::nullopt;
  }
  if (d == 2 && all_integral_below(pts, std::ldexp(1.0, 30))) return degenerate_2d(pts);
  if (binom_capped(n, d + 1, limit) > limit) {
    complete = false;
    return std::nullopt;
  }
  std::vector<std::uint32_t> ids(d + 1);
  // Lexicographic enumeration of (d+1)-subsets.
  std::iota(ids.begin(), ids.end(), 0u);
  if (n < d + 1) return std::nullopt;
  while (true) {
    if (orientation(pts, ids.data()) == 0) return ids;
    std::size_t k = d + 1;
    while (k-- > 0 && ids[k] == n - (d + 1) + k) {
    }
    if (k > d) break;
    ++ids[k];
    for (std::size_t t = k + 1; t <= d; ++t) ids[t] = ids[t - 1] + 1;
  }
  return std::nullopt;
}

PointSet gen_points(std::size_t n, std::size_t dim, PointDist dist, std::uint64_t seed) {
  if (dim < 1 || dim > 4) throw DomainError("gen_points: dimension must lie in 1..4");
  if (n < dim + 1) throw DomainError("gen_points: need n >= dim + 1");
  if (dist == PointDist::convex_position) {
    if (dim != 2) throw DomainError("gen_points: convex-position is two-dimensional");
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
      PointSet pts = convex_points(n, attempt ? derive_seed(seed, 0xc0, attempt) : seed);
      pts.seed = seed;
      if (strictly_convex_ccw(pts)) {
        pts.general_position_verified = true;
        return pts;
      }
    }
    throw GenerationError("gen_points: could not place " + std::to_string(n) + " points in strictly convex position");
  }
  if (dist == PointDist::uniform_sphere && dim == 1 && n > 2)
    throw DomainError("gen_points: the 0-sphere has only two points");

  Rng rng(seed);
  GaussianSource gauss;
  PointSet pts;
  pts.dim = dim;
  pts.seed = seed;
  pts.coords.resize(n * dim);
  for (std::size_t i = 0; i < n; ++i) draw_point(dist, dim, rng, gauss, pts.coords.data() + i * dim);

  constexpr int kRetries = 64;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    bool complete = true;
    auto bad = find_degenerate_tuple(pts, complete);
    if (!bad) {
      pts.general_position_verified = complete;
      return pts;
    }
    // Resample the last point of the offending tuple.
    draw_point(dist, dim, rng, gauss, pts.coords.data() + static_cast<std::size_t>(bad->back()) * dim);
  }
  throw GenerationError("gen_points: general position not reached after " + std::to_string(kRetries) + " resamples");
}

}  // namespace lowdisc
