#include "lowdisc/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {
namespace {

SetSystem sorted_by_key(const SetSystem& sys) {
  std::vector<std::uint32_t> order(sys.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key_less(sys.set(a), sys.set(b)); });
  SetSystem out(sys.n());
  out.reserve(sys.size());
  for (auto i : order) out.add(sys.set(i), sys.label(i));
  return out;
}

std::string tuple_text(const std::uint32_t* ids, std::size_t count) {
  std::string s = "(";
  for (std::size_t k = 0; k < count; ++k) s += (k ? "," : "") + std::to_string(ids[k]);
  return s + ")";
}

// Visits every dim-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(std::size_t n, std::size_t d, F f) {
  if (n < d) return;
  std::vector<std::uint32_t> ids(d);
  std::iota(ids.begin(), ids.end(), 0u);
  while (true) {
    f(ids.data());
    std::size_t k = d;
    while (k-- > 0 && ids[k] == n - d + k) {
    }
    if (k >= d) return;
    ++ids[k];
    for (std::size_t t = k + 1; t < d; ++t) ids[t] = ids[t - 1] + 1;
  }
}

// Calls emit(range) for every candidate range of the boundary enumeration.
template <typename Emit>
void enumerate_halfspace_candidates(const PointSet& pts, Emit emit) {
  const std::size_t n = pts.size(), d = pts.dim;
  BitVec neg(n), pos(n), cand(n);
  emit(BitVec(n).view());
  emit(BitVec::full(n).view());
  for_each_subset(n, d, [&](const std::uint32_t* base) {
    std::fill(neg.data(), neg.data() + neg.words(), 0);
    std::fill(pos.data(), pos.data() + pos.words(), 0);
    std::size_t t = 0;
    for (std::uint32_t q = 0; q < n; ++q) {
      if (t < d && base[t] == q) {
        ++t;
        continue;
      }
      const int s = side_of(pts, base, q);
      if (s == 0) {
        std::uint32_t bad[5];
        std::copy(base, base + d, bad);
        bad[d] = q;
        throw GenerationError("halfspace enumeration: degenerate tuple " + tuple_text(bad, d + 1));
      }
      (s < 0 ? neg : pos).set(q);
    }
    for (std::uint32_t u = 0; u < (1u << d); ++u) {
      for (const BitVec* side : {&neg, &pos}) {
        cand = *side;
        for (std::size_t b = 0; b < d; ++b)
          if ((u >> b) & 1u) cand.set(base[b]);
        emit(cand.view());
      }
    }
  });
}

}  // namespace

SetSystem halfspace_ranges(const PointSet& pts) {
  if (pts.size() == 0) throw DomainError("halfspace_ranges: empty point set");
  if (pts.size() < pts.dim) {
    // Fewer points than dimensions: every subset is cut off by some halfspace.
    const std::size_t n = pts.size();
    SetSystem all(n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      BitVec b(n);
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1u) b.set(i);
      all.add(b);
    }
    return sorted_by_key(all);
  }
  DistinctCollector out(pts.size());
  enumerate_halfspace_candidates(pts, [&](BitView r) { out.add(r); });
  return sorted_by_key(out.system());
}

SetSystem sampled_halfspace_ranges(const PointSet& pts, std::size_t m, std::uint64_t seed) {
  const std::size_t n = pts.size(), d = pts.dim;
  if (n == 0) throw DomainError("sampled_halfspace_ranges: empty point set");
  Rng rng(seed);
  GaussianSource gauss;
  DistinctCollector out(n);
  out.add(BitVec(n));
  out.add(BitVec::full(n));
  std::vector<double> proj(n);
  std::vector<std::uint32_t> order(n);
  const double log_n = std::log(static_cast<double>(n));
  for (std::size_t s = 0; s < m; ++s) {
    double u[4];
    for (std::size_t c = 0; c < d; ++c) u[c] = gauss(rng);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::exp(uniform01(rng) * log_n)), 1,
                                                  n > 1 ? n - 1 : 1);
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0;
      for (std::size_t c = 0; c < d; ++c) v += u[c] * pts.coord(i, c);
      proj[i] = v;
    }
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                     [&](auto a, auto b) { return proj[a] < proj[b] || (proj[a] == proj[b] && a < b); });
    BitVec r(n);
    for (std::size_t i = 0; i < k; ++i) r.set(order[i]);
    out.add(r);
  }
  return sorted_by_key(out.system());
}

std::vector<std::uint32_t> sorted_order_1d(const PointSet& pts) {
  if (pts.dim != 1) throw DomainError("interval ranges need a one-dimensional point set");
  std::vector<std::uint32_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pts.coord(a, 0) < pts.coord(b, 0); });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (pts.coord(order[i], 0) == pts.coord(order[i - 1], 0))
      throw DomainError("interval ranges: duplicate coordinate at points " + std::to_string(order[i - 1]) + " and " +
                        std::to_string(order[i]));
  return order;
}

SetSystem interval_ranges(const PointSet& pts) {
  const auto order = sorted_order_1d(pts);
  const std::size_t n = order.size();
  SetSystem sys(n);
  sys.reserve(n * (n + 1) / 2 + 1);
  sys.add(BitVec(n));
  BitVec run(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::fill(run.data(), run.data() + run.words(), 0);
    for (std::size_t b = a; b < n; ++b) {
      run.set(order[b]);
      sys.add(run);
    }
  }
  return sys;
}

std::vector<std::uint64_t> kset_counts(const PointSet& pts, const std::vector<std::size_t>& ks) {
  const SetSystem ranges = halfspace_ranges(pts);
  std::vector<std::uint64_t> out;
  for (auto k : ks) {
    if (k > pts.size()) throw DomainError("kset_count: k exceeds n");
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < ranges.size(); ++i) c += ranges.set_size(i) <= k;
    out.push_back(c);
  }
  return out;
}

std::uint64_t kset_count(const PointSet& pts, std::size_t k) { return kset_counts(pts, {k}).front(); }

SetSystem random_abstract_system(std::size_t n, std::size_t m, SizeDist dist, std::uint64_t seed) {
  if (m < 1) throw DomainError("random_abstract_system: m must be positive");
  if (dist.kind == SizeDist::Kind::fixed && dist.k > n) throw DomainError("random_abstract_system: k exceeds n");
  if (dist.kind == SizeDist::Kind::bernoulli && !(dist.p >= 0 && dist.p <= 1))
    throw DomainError("random_abstract_system: p must lie in [0, 1]");
  Rng rng(seed);
  SetSystem sys(n);
  sys.reserve(m);
  std::vector<std::uint32_t> ids(n);
  for (std::size_t s = 0; s < m; ++s) {
    BitVec b(n);
    if (dist.kind == SizeDist::Kind::fixed) {
      std::iota(ids.begin(), ids.end(), 0u);
      for (std::size_t i = 0; i < dist.k; ++i) {
        std::swap(ids[i], ids[i + uniform_index(rng, n - i)]);
        b.set(ids[i]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (uniform01(rng) < dist.p) b.set(i);
    }
    sys.add(b);
  }
  return sys;
}

std::optional<InstanceKind> parse_instance_kind(std::string_view s) {
  if (s == "intervals") return InstanceKind::intervals;
  if (s == "halfplanes") return InstanceKind::halfplanes;
  if (s == "halfspaces3d") return InstanceKind::halfspaces3d;
  if (s == "abstract") return InstanceKind::abstract;
  return std::nullopt;
}

std::string_view instance_kind_name(InstanceKind k) {
  switch (k) {
    case InstanceKind::intervals: return "intervals";
    case InstanceKind::halfplanes: return "halfplanes";
    case InstanceKind::halfspaces3d: return "halfspaces3d";
    case InstanceKind::abstract: return "abstract";
  }
  return "?";
}

std::pair<int, int> shatter_exponents(InstanceKind k) {
  switch (k) {
    case InstanceKind::intervals: return {2, 1};
    case InstanceKind::halfplanes: return {2, 1};
    case InstanceKind::halfspaces3d: return {3, 1};
    case InstanceKind::abstract: return {2, 2};
  }
  return {2, 1};
}

Instance make_instance(InstanceKind kind, std::size_t n, std::uint64_t seed, const InstanceOptions& opt) {
  Instance inst{kind, seed, std::nullopt, SetSystem(n), false};
  switch (kind) {
    case InstanceKind::intervals:
      inst.points = gen_points(n, 1, PointDist::uniform_cube, seed);
      inst.sys = interval_ranges(*inst.points);
      break;
    case InstanceKind::halfplanes:
    case InstanceKind::halfspaces3d: {
      const std::size_t dim = kind == InstanceKind::halfplanes ? 2 : 3;
      inst.points = gen_points(n, dim, opt.dist, seed);
      if (n <= opt.full_enumeration_limit) {
        inst.sys = halfspace_ranges(*inst.points);
      } else {
        const auto m = static_cast<std::size_t>(opt.sampled_sets_per_point * static_cast<double>(n));
        inst.sys = sampled_halfspace_ranges(*inst.points, m, derive_seed(seed, 0x5a));
        inst.sampled = true;
      }
      break;
    }
    case InstanceKind::abstract: {
      const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(opt.abstract_sets_per_point * static_cast<double>(n)));
      inst.sys = random_abstract_system(n, m, {}, seed);
      break;
    }
  }
  return inst;
}

}  // namespace lowdisc
