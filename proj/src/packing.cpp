#include "lowdisc/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {
namespace {

constexpr std::size_t kMaxPivots = 6;
constexpr std::size_t kPivotSample = 512;
constexpr std::size_t kExhaustiveMembers = 1024;

std::vector<std::uint32_t> eligible_scan(const SetSystem& sys, PackOrder order, std::uint64_t seed,
                                         std::optional<std::uint64_t> cap) {
  auto scan = scan_order(sys, order, seed);
  if (cap) std::erase_if(scan, [&](std::uint32_t s) { return sys.set_size(s) > *cap; });
  return scan;
}

}  // namespace

std::optional<PackOrder> parse_pack_order(std::string_view s) {
  if (s == "input") return PackOrder::input;
  if (s == "by-size") return PackOrder::by_size;
  if (s == "seeded-shuffle") return PackOrder::seeded_shuffle;
  return std::nullopt;
}

std::string_view pack_order_name(PackOrder o) {
  switch (o) {
    case PackOrder::input: return "input";
    case PackOrder::by_size: return "by-size";
    case PackOrder::seeded_shuffle: return "seeded-shuffle";
  }
  return "?";
}

MetricIndex::MetricIndex(const SetSystem& sys, std::uint64_t radius) : sys_(&sys), radius_(radius) {
  const std::size_t m = sys.size();
  // Pivot 0 is the empty set, whose coordinate is the set size. The rest are
  // picked farthest-first from an evenly spaced sample.
  std::vector<BitVec> pivots;
  pivots.emplace_back(sys.n());
  std::vector<std::uint32_t> sample;
  const std::size_t stride = std::max<std::size_t>(1, m / kPivotSample);
  for (std::size_t s = 0; s < m; s += stride) sample.push_back(static_cast<std::uint32_t>(s));
  std::vector<std::uint64_t> nearest(sample.size());
  for (std::size_t t = 0; t < sample.size(); ++t) nearest[t] = sys.set_size(sample[t]);
  while (pivots.size() < kMaxPivots && !sample.empty()) {
    const std::size_t best = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    if (nearest[best] == 0) break;
    pivots.emplace_back(sys.set(sample[best]));
    for (std::size_t t = 0; t < sample.size(); ++t)
      nearest[t] = std::min<std::uint64_t>(nearest[t], sym_diff_size(sys.set(sample[t]), pivots.back()));
  }
  pivots_ = pivots.size();
  coords_.resize(m * pivots_);
  for (std::size_t s = 0; s < m; ++s) {
    coords_[s * pivots_] = static_cast<std::uint32_t>(sys.set_size(s));
    for (std::size_t p = 1; p < pivots_; ++p)
      coords_[s * pivots_ + p] = static_cast<std::uint32_t>(sym_diff_size(sys.set(s), pivots[p]));
  }
}

std::uint64_t MetricIndex::cell_key(std::int64_t a, std::int64_t b) const {
  return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b);
}

void MetricIndex::insert(std::uint32_t id) {
  const std::uint64_t w = radius_ + 1;
  const std::int64_t a = coords_[id * pivots_] / w;
  const std::int64_t b = pivots_ > 1 ? coords_[id * pivots_ + 1] / w : 0;
  cells_[cell_key(a, b)].push_back(id);
  ++stored_;
}

void MetricIndex::clear() {
  cells_.clear();
  stored_ = 0;
}

void MetricIndex::reset(std::uint64_t radius) {
  clear();
  radius_ = radius;
}

template <typename F>
void MetricIndex::for_candidates(std::uint32_t q, F f) const {
  const std::uint64_t w = radius_ + 1;
  const std::uint32_t* cq = coords_.data() + static_cast<std::size_t>(q) * pivots_;
  const std::int64_t a = cq[0] / w;
  const std::int64_t b = pivots_ > 1 ? cq[1] / w : 0;
  for (std::int64_t da = -1; da <= 1; ++da) {
    for (std::int64_t db = -1; db <= 1; ++db) {
      if (a + da < 0 || b + db < 0) continue;
      auto it = cells_.find(cell_key(a + da, b + db));
      if (it == cells_.end()) continue;
      for (std::uint32_t id : it->second) {
        const std::uint32_t* ci = coords_.data() + static_cast<std::size_t>(id) * pivots_;
        bool close = true;
        for (std::size_t p = 0; p < pivots_ && close; ++p) {
          const std::uint64_t gap = cq[p] > ci[p] ? cq[p] - ci[p] : ci[p] - cq[p];
          close = gap <= radius_;
        }
        if (close && !f(id)) return;
      }
    }
  }
}

bool MetricIndex::any_within(std::uint32_t q, std::optional<std::uint32_t> skip) const {
  bool found = false;
  for_candidates(q, [&](std::uint32_t id) {
    if (skip && id == *skip) return true;
    if (sym_diff_bounded(sys_->set(q), sys_->set(id), radius_) <= radius_) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

std::optional<std::pair<std::uint32_t, std::uint64_t>> MetricIndex::nearest_within(std::uint32_t q) const {
  std::optional<std::pair<std::uint32_t, std::uint64_t>> best;
  for_candidates(q, [&](std::uint32_t id) {
    const std::uint64_t limit = best ? best->second : radius_;
    const std::uint64_t dist = sym_diff_bounded(sys_->set(q), sys_->set(id), limit);
    if (dist <= limit && (!best || dist < best->second || (dist == best->second && id < best->first)))
      best = std::pair{id, dist};
    return true;
  });
  return best;
}

std::vector<std::uint32_t> scan_order(const SetSystem& sys, PackOrder order, std::uint64_t seed) {
  std::vector<std::uint32_t> ids(sys.size());
  std::iota(ids.begin(), ids.end(), 0u);
  if (order == PackOrder::by_size) {
    std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) { return sys.set_size(a) < sys.set_size(b); });
  } else if (order == PackOrder::seeded_shuffle) {
    Rng rng(seed);
    shuffle(std::span(ids), rng);
  }
  return ids;
}

Packing greedy_packing_scan(const SetSystem& sys, std::uint64_t delta, const std::vector<std::uint32_t>& scan) {
  Packing p;
  p.delta = delta;
  p.parent_hash = content_hash(sys);
  MetricIndex index(sys, delta);
  for (std::uint32_t s : scan) {
    if (index.any_within(s)) continue;
    p.members.push_back(s);
    index.insert(s);
  }
  return p;
}

Packing greedy_packing(const SetSystem& sys, std::uint64_t delta, PackOrder order, std::uint64_t seed) {
  Packing p = greedy_packing_scan(sys, delta, eligible_scan(sys, order, seed, std::nullopt));
  p.order = order;
  p.seed = seed;
  return p;
}

Packing greedy_packing_capped(const SetSystem& sys, std::uint64_t delta, std::uint64_t size_cap, PackOrder order,
                              std::uint64_t seed) {
  Packing p = greedy_packing_scan(sys, delta, eligible_scan(sys, order, seed, size_cap));
  p.size_cap = size_cap;
  p.order = order;
  p.seed = seed;
  return p;
}

bool verify_separated(const Packing& p, const SetSystem& sys) {
  for (auto id : p.members)
    if (id >= sys.size()) throw StructuralError("packing member id " + std::to_string(id) + " out of range");
  auto sorted = p.members;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  if (p.size_cap)
    for (auto id : p.members)
      if (sys.set_size(id) > *p.size_cap) return false;
  if (p.members.size() <= kExhaustiveMembers) {
    for (std::size_t a = 0; a < p.members.size(); ++a)
      for (std::size_t b = a + 1; b < p.members.size(); ++b)
        if (sym_diff_bounded(sys.set(p.members[a]), sys.set(p.members[b]), p.delta) <= p.delta) return false;
    return true;
  }
  MetricIndex index(sys, p.delta);
  for (auto id : p.members) index.insert(id);
  for (auto id : p.members)
    if (index.any_within(id, id)) return false;
  return true;
}

bool verify_maximal(const Packing& p, const SetSystem& sys) {
  std::vector<char> member(sys.size(), 0);
  for (auto id : p.members) {
    if (id >= sys.size()) throw StructuralError("packing member id " + std::to_string(id) + " out of range");
    member[id] = 1;
  }
  const bool exhaustive = p.members.size() <= kExhaustiveMembers / 16;
  MetricIndex index(sys, p.delta);
  if (!exhaustive)
    for (auto id : p.members) index.insert(id);
  for (std::uint32_t s = 0; s < sys.size(); ++s) {
    if (member[s] || (p.size_cap && sys.set_size(s) > *p.size_cap)) continue;
    bool covered = false;
    if (exhaustive) {
      for (auto id : p.members)
        if (sym_diff_bounded(sys.set(s), sys.set(id), p.delta) <= p.delta) {
          covered = true;
          break;
        }
    } else {
      covered = index.any_within(s);
    }
    if (!covered) return false;
  }
  return true;
}

PackingBoundReport packing_bound_report(const SetSystem& sys, const std::vector<std::uint64_t>& deltas, int d,
                                        PackOrder order, std::uint64_t seed) {
  PackingBoundReport r;
  const double n = static_cast<double>(sys.n());
  std::vector<double> xs, ys;
  for (auto delta : deltas) {
    if (delta == 0) throw DomainError("packing_bound_report: delta must be positive");
    const Packing p = greedy_packing(sys, delta, order, seed);
    const double scale = n / static_cast<double>(delta);
    r.rows.push_back({delta, p.members.size(), static_cast<double>(p.members.size()) / std::pow(scale, d)});
    if (!p.members.empty()) {
      xs.push_back(scale);
      ys.push_back(static_cast<double>(p.members.size()));
    }
  }
  if (xs.size() >= 2) r.fit = log2_fit(xs, ys);
  return r;
}

std::vector<std::uint64_t> halving_deltas(std::uint64_t n, std::uint64_t min_delta) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = n / 2; d >= std::max<std::uint64_t>(1, min_delta); d /= 2) out.push_back(d);
  return out;
}

}  // namespace lowdisc
