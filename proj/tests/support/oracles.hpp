#pragma once

// Slow, independent reference implementations used to check the library.
// Nothing here calls into the code under test beyond plain data access.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "lowdisc/geometry.hpp"
#include "lowdisc/set_system.hpp"

namespace oracle {

inline std::vector<std::uint32_t> members(lowdisc::BitView s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.test(i)) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

inline std::string key(lowdisc::BitView s) {
  std::string k(s.size(), '0');
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.test(i)) k[i] = '1';
  return k;
}

inline std::set<std::string> family(const lowdisc::SetSystem& sys) {
  std::set<std::string> out;
  for (std::size_t r = 0; r < sys.size(); ++r) out.insert(key(sys[r]));
  return out;
}

inline std::uint64_t popcount_bits(const std::uint64_t* w, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < words; ++i)
    for (int b = 0; b < 64; ++b) c += (w[i] >> b) & 1u;
  return c;
}

inline std::size_t sym_diff(lowdisc::BitView a, lowdisc::BitView b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += a.test(i) != b.test(i);
  return c;
}

inline std::int64_t signed_sum(const std::vector<int>& chi, lowdisc::BitView s) {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.test(i)) t += chi[i];
  return t;
}

inline std::uint64_t disc(const lowdisc::SetSystem& sys, const std::vector<int>& chi) {
  std::uint64_t best = 0;
  for (std::size_t r = 0; r < sys.size(); ++r)
    best = std::max<std::uint64_t>(best, static_cast<std::uint64_t>(std::llabs(signed_sum(chi, sys[r]))));
  return best;
}

// Minimum discrepancy over all 2^n colorings, no symmetry tricks.
inline std::uint64_t min_disc_exhaustive(const lowdisc::SetSystem& sys) {
  const std::size_t n = sys.n();
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<int> chi(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) chi[i] = (mask >> i) & 1u ? 1 : -1;
    best = std::min(best, disc(sys, chi));
  }
  return best;
}

// Number of subsets of n points in general position in R^d cut off by
// affine halfspaces (Cover's counting function), including empty and full.
inline std::uint64_t halfspace_range_count(std::uint64_t n, int d) {
  std::uint64_t total = 0, binom = 1;
  for (int i = 0; i <= d && static_cast<std::uint64_t>(i) <= n - 1; ++i) {
    total += binom;
    binom = binom * (n - 1 - i) / (i + 1);
  }
  return 2 * total;
}

// Nonempty runs of length <= k among m points, plus the empty set.
inline std::uint64_t interval_count_upto(std::uint64_t m, std::uint64_t k) {
  std::uint64_t c = 1;
  for (std::uint64_t len = 1; len <= std::min(k, m); ++len) c += m - len + 1;
  return c;
}

// Halfplane ranges of a planar point set by rotating a direction: between
// consecutive critical angles the order of projections is fixed, and every
// prefix of that order is a range.
inline std::set<std::string> halfplane_family(const lowdisc::PointSet& pts) {
  const std::size_t n = pts.size();
  std::vector<double> crit;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts.coord(j, 0) - pts.coord(i, 0);
      const double dy = pts.coord(j, 1) - pts.coord(i, 1);
      double a = std::atan2(dx, -dy);
      if (a < 0) a += 2 * std::numbers::pi;
      crit.push_back(a);
      crit.push_back(std::fmod(a + std::numbers::pi, 2 * std::numbers::pi));
    }
  std::sort(crit.begin(), crit.end());
  std::set<std::string> out;
  std::string all0(n, '0');
  out.insert(all0);
  for (std::size_t t = 0; t < crit.size(); ++t) {
    const double next = t + 1 < crit.size() ? crit[t + 1] : crit[0] + 2 * std::numbers::pi;
    const double a = 0.5 * (crit[t] + next);
    const double ux = std::cos(a), uy = std::sin(a);
    std::vector<std::pair<double, std::size_t>> proj;
    for (std::size_t i = 0; i < n; ++i) proj.push_back({ux * pts.coord(i, 0) + uy * pts.coord(i, 1), i});
    std::sort(proj.begin(), proj.end());
    std::string k = all0;
    for (auto& [v, i] : proj) {
      k[i] = '1';
      out.insert(k);
    }
  }
  return out;
}

// Nearest set to q among candidates; ties toward the smaller id.
inline std::pair<std::uint32_t, std::size_t> nearest(const lowdisc::SetSystem& sys,
                                                     const std::vector<std::uint32_t>& cand, lowdisc::BitView q) {
  std::pair<std::uint32_t, std::size_t> best{UINT32_MAX, SIZE_MAX};
  for (auto c : cand) {
    const std::size_t d = sym_diff(sys[c], q);
    if (d < best.second || (d == best.second && c < best.first)) best = {c, d};
  }
  return best;
}

// Plain greedy: admit a set iff it is farther than delta from every admitted one.
inline std::vector<std::uint32_t> greedy(const lowdisc::SetSystem& sys, std::size_t delta,
                                         const std::vector<std::uint32_t>& scan) {
  std::vector<std::uint32_t> out;
  for (auto id : scan) {
    bool ok = true;
    for (auto m : out)
      if (sym_diff(sys[id], sys[m]) <= delta) {
        ok = false;
        break;
      }
    if (ok) out.push_back(id);
  }
  return out;
}

inline double d_nu(double a, double b, double nu) { return std::fabs(a - b) / (a + b + nu); }

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace oracle
