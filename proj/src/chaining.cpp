#include "lowdisc/chaining.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "json.hpp"
#include "lowdisc/errors.hpp"

namespace lowdisc {
namespace {

// a * 2^e compared with b, exactly (e may be negative down to -1).
bool scaled_less(std::uint64_t a, int e, std::uint64_t b) {
  return e >= 0 ? (static_cast<unsigned __int128>(a) << e) < b : a < 2 * static_cast<unsigned __int128>(b);
}

}  // namespace

WorkingSystem prepare_working(const SetSystem& sys) {
  WorkingSystem w;
  DistinctCollector col(sys.n());
  w.working_of.reserve(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    auto [id, fresh] = col.add(sys.set(i), sys.label(i));
    if (fresh) w.source.push_back(static_cast<std::uint32_t>(i));
    w.working_of.push_back(static_cast<std::uint32_t>(id));
  }
  auto [empty, fresh] = col.add(BitVec(sys.n()), "(empty)");
  if (fresh) w.source.push_back(WorkingSystem::kInjected);
  w.empty_id = static_cast<std::uint32_t>(empty);
  w.empty_injected = fresh;
  w.sys = col.take();
  return w;
}

std::size_t padded_size(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(2, n)); }

std::uint32_t PackingHierarchy::parent(int j, std::uint32_t id) const {
  const auto& L = levels[static_cast<std::size_t>(j)];
  const std::int32_t p = L.pos[id];
  if (p < 0) throw ConsistencyError("set " + std::to_string(id) + " is not a member of level " + std::to_string(j));
  return L.link[static_cast<std::size_t>(p)];
}

PackingHierarchy build_hierarchy(const WorkingSystem& work, std::size_t n_pad, const HierarchyOptions& opt) {
  const SetSystem& sys = work.sys;
  if (!std::has_single_bit(n_pad) || n_pad < 2) throw DomainError("build_hierarchy: padded size must be a power of two");
  if (n_pad < sys.n()) throw DomainError("build_hierarchy: padded size below ground size");
  PackingHierarchy h;
  h.n_pad = n_pad;
  h.k = std::countr_zero(n_pad);
  h.size_cap = opt.size_cap;

  std::vector<std::uint32_t> scan = scan_order(sys, opt.order, opt.seed);
  if (opt.size_cap) std::erase_if(scan, [&](std::uint32_t s) { return sys.set_size(s) > *opt.size_cap; });
  // The empty set is scanned first, so F_0 = {empty} and it stays in every level.
  std::erase(scan, work.empty_id);
  scan.insert(scan.begin(), work.empty_id);

  MetricIndex prev(sys, 0), cur(sys, 0);
  h.levels.resize(static_cast<std::size_t>(h.k) + 1);
  for (int j = 0; j <= h.k; ++j) {
    HierarchyLevel& L = h.levels[static_cast<std::size_t>(j)];
    L.delta = j < h.k ? n_pad >> j : 0;
    L.pos.assign(sys.size(), -1);
    cur.reset(L.delta);
    if (j == h.k) {
      // Distinct sets are pairwise at distance > 0: every eligible set.
      L.members = scan;
    } else {
      for (std::uint32_t s : scan) {
        if (cur.any_within(s)) continue;
        L.members.push_back(s);
        cur.insert(s);
      }
    }
    for (std::size_t p = 0; p < L.members.size(); ++p) L.pos[L.members[p]] = static_cast<std::int32_t>(p);
    if (j >= 1) {
      const HierarchyLevel& up = h.levels[static_cast<std::size_t>(j) - 1];
      L.link.resize(L.members.size());
      L.link_dist.resize(L.members.size());
      for (std::size_t p = 0; p < L.members.size(); ++p) {
        const std::uint32_t f = L.members[p];
        if (up.contains(f)) {
          L.link[p] = f;
          L.link_dist[p] = 0;
          continue;
        }
        // Maximality of level j-1 puts the nearest member within its radius.
        auto nn = prev.nearest_within(f);
        if (!nn)
          throw ConsistencyError("level " + std::to_string(j - 1) + " is not maximal: set " + std::to_string(f) +
                                 " has no member within " + std::to_string(up.delta));
        L.link[p] = nn->first;
        L.link_dist[p] = static_cast<std::uint32_t>(nn->second);
      }
    }
    if (j < h.k) std::swap(prev, cur);
  }
  return h;
}

int size_class(std::size_t set_size, std::size_t n_pad) {
  const int k = std::countr_zero(n_pad);
  if (set_size == 0) return k;
  // n / 2^i <= s < n / 2^(i-1)  <=>  i = k - floor(log2 s)
  return k - static_cast<int>(std::bit_width(set_size)) + 1;
}

SizeClasses classify(const SetSystem& sys, std::size_t n_pad) {
  SizeClasses c;
  c.k = std::countr_zero(n_pad);
  c.class_of.resize(sys.size());
  c.classes.resize(static_cast<std::size_t>(c.k) + 1);
  for (std::size_t s = 0; s < sys.size(); ++s) {
    const int i = size_class(sys.set_size(s), n_pad);
    if (i < 0) throw DomainError("classify: set larger than the padded ground size");
    c.class_of[s] = i;
    c.classes[static_cast<std::size_t>(i)].push_back(static_cast<std::uint32_t>(s));
  }
  return c;
}

std::uint64_t Chaining::cap_for(int i) const {
  return static_cast<std::uint64_t>(std::floor(options.K * static_cast<double>(n_pad) / std::ldexp(1.0, i - 1)));
}

Chaining build_chaining(const SetSystem& sys, const ChainingOptions& opt, std::size_t n_pad) {
  Chaining ch;
  ch.work = prepare_working(sys);
  ch.n_pad = n_pad ? n_pad : padded_size(sys.n());
  ch.k = std::countr_zero(ch.n_pad);
  ch.options = opt;
  ch.classes = classify(ch.work.sys, ch.n_pad);
  const int k = ch.k;

  std::vector<std::vector<std::uint32_t>> by_layer(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i)
    for (auto s : ch.classes.classes[static_cast<std::size_t>(i)])
      by_layer[static_cast<std::size_t>(layer_class(i))].push_back(s);

  if (opt.mode == HierarchyMode::shared) {
    ch.hierarchies.push_back(build_hierarchy(ch.work, ch.n_pad, {opt.order, opt.seed, std::nullopt}));
  } else {
    ch.hierarchies.resize(static_cast<std::size_t>(k) + 1);
    for (int i = 1; i <= k; ++i)
      if (!by_layer[static_cast<std::size_t>(i)].empty())
        ch.hierarchies[static_cast<std::size_t>(i)] =
            build_hierarchy(ch.work, ch.n_pad, {opt.order, opt.seed, ch.cap_for(i)});
  }

  ch.layers.assign(static_cast<std::size_t>(k) + 1, std::vector<std::vector<std::uint32_t>>(static_cast<std::size_t>(k) + 1));
  for (int i = 1; i <= k; ++i) {
    const auto& members = by_layer[static_cast<std::size_t>(i)];
    if (members.empty()) continue;
    const PackingHierarchy& h = ch.hierarchy_for(i);
    auto& lay = ch.layers[static_cast<std::size_t>(i)];
    for (auto s : members) {
      std::uint32_t cur = s;
      lay[static_cast<std::size_t>(k)].push_back(cur);
      for (int j = k; j >= i; --j) {
        cur = h.parent(j, cur);
        lay[static_cast<std::size_t>(j) - 1].push_back(cur);
      }
    }
    for (auto& ids : lay) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
  }
  return ch;
}

CanonicalDecomposition decompose(const Chaining& ch, std::uint32_t set_id) {
  const SetSystem& sys = ch.work.sys;
  if (set_id >= sys.size()) throw StructuralError("decompose: set id out of range");
  CanonicalDecomposition dec;
  dec.set_id = set_id;
  dec.i = layer_class(ch.classes.class_of[set_id]);
  const PackingHierarchy& h = ch.hierarchy_for(dec.i);
  dec.chain.push_back(set_id);
  for (int j = ch.k; j >= dec.i; --j) dec.chain.push_back(h.parent(j, dec.chain.back()));
  dec.anchor = BitVec(sys.set(dec.chain.back()));
  for (int j = dec.i; j <= ch.k; ++j) {
    const BitView fj = sys.set(dec.chain[static_cast<std::size_t>(ch.k - j)]);
    const BitView fprev = sys.set(dec.chain[static_cast<std::size_t>(ch.k - j) + 1]);
    dec.added.push_back(bit_minus(fj, fprev));
    dec.removed.push_back(bit_minus(fprev, fj));
  }
  if (!equal(reconstruct(dec), sys.set(set_id)))
    throw ConsistencyError("decomposition of set " + std::to_string(set_id) + " does not reconstruct it");
  return dec;
}

BitVec reconstruct(const CanonicalDecomposition& dec) {
  BitVec x = dec.anchor;
  for (std::size_t t = 0; t < dec.added.size(); ++t) {
    if (intersects(x, dec.added[t]))
      throw ConsistencyError("reconstruct: added part at level " + std::to_string(dec.i + static_cast<int>(t)) +
                             " is not disjoint");
    x |= dec.added[t];
    if (!is_subset(dec.removed[t], x))
      throw ConsistencyError("reconstruct: removed part at level " + std::to_string(dec.i + static_cast<int>(t)) +
                             " is not contained");
    x.subtract(dec.removed[t]);
  }
  return x;
}

ChainingCheck check_chaining(const Chaining& ch) {
  const SetSystem& sys = ch.work.sys;
  const std::uint64_t n = ch.n_pad;
  const int k = ch.k;
  ChainingCheck r;
  for (std::uint32_t s = 0; s < sys.size(); ++s) {
    ++r.sets_checked;
    CanonicalDecomposition dec;
    try {
      dec = decompose(ch, s);
    } catch (const ConsistencyError&) {
      ++r.reconstruction_failures;
      continue;
    }
    const PackingHierarchy& h = ch.hierarchy_for(dec.i);
    std::uint64_t summed = 0;
    for (int j = k; j >= dec.i - 1; --j) {
      const std::uint32_t f = dec.chain[static_cast<std::size_t>(k - j)];
      const std::uint64_t dist = sym_diff_size(sys.set(s), sys.set(f));
      // |S △ F_j| < n / 2^(j-1)
      if (!scaled_less(dist, j - 1, n)) ++r.claim_violations;
      if (dist > summed || !scaled_less(summed, j - 1, n)) ++r.summed_bound_violations;
      // |F_j| <= K n / 2^(i-1)
      const double ratio = static_cast<double>(sys.set_size(f)) * std::ldexp(1.0, dec.i - 1) / static_cast<double>(n);
      r.max_size_ratio = std::max(r.max_size_ratio, ratio);
      if (ratio > ch.options.K) ++r.corollary_violations;
      if (j >= dec.i) {
        const auto& L = h.levels[static_cast<std::size_t>(j)];
        const std::uint64_t link = L.link_dist[static_cast<std::size_t>(L.pos[f])];
        if (scaled_less(n, 0, static_cast<std::uint64_t>(link) << std::max(j - 1, 0)) && j >= 1) ++r.link_violations;
        const std::size_t t = static_cast<std::size_t>(j - dec.i);
        const std::uint64_t sa = dec.added[t].count(), sb = dec.removed[t].count();
        if ((std::max(sa, sb) << std::max(j - 1, 0)) > n) ++r.canonical_size_violations;
        summed += link;
      }
    }
  }
  return r;
}

double duplication_factor(const Chaining& ch) {
  std::size_t total = 0;
  std::set<std::pair<std::size_t, std::uint32_t>> distinct;
  for (std::size_t i = 1; i < ch.layers.size(); ++i)
    for (std::size_t j = 0; j < ch.layers[i].size(); ++j) {
      total += ch.layers[i][j].size();
      for (auto id : ch.layers[i][j]) distinct.insert({j, id});
    }
  return distinct.empty() ? 1.0 : static_cast<double>(total) / static_cast<double>(distinct.size());
}

std::string chaining_summary_json(const Chaining& ch) {
  using nlohmann::json;
  json j;
  j["n"] = ch.work.sys.n();
  j["n_pad"] = ch.n_pad;
  j["k"] = ch.k;
  j["sets"] = ch.work.sys.size();
  j["empty_injected"] = ch.work.empty_injected;
  j["mode"] = ch.options.mode == HierarchyMode::shared ? "shared" : "capped";
  j["K"] = ch.options.K;
  json hs = json::array();
  for (std::size_t hi = 0; hi < ch.hierarchies.size(); ++hi) {
    const auto& h = ch.hierarchies[hi];
    if (h.levels.empty()) continue;
    json levels = json::array();
    for (std::size_t lv = 0; lv < h.levels.size(); ++lv) {
      const auto& L = h.levels[lv];
      std::uint32_t max_link = 0;
      for (auto d : L.link_dist) max_link = std::max(max_link, d);
      levels.push_back({{"j", lv}, {"delta", L.delta}, {"size", L.members.size()}, {"max_link_distance", max_link}});
    }
    json entry = {{"levels", levels}};
    if (h.size_cap) entry["size_cap"] = *h.size_cap;
    if (ch.options.mode == HierarchyMode::capped) entry["class"] = hi;
    hs.push_back(entry);
  }
  j["hierarchies"] = hs;
  json cls = json::array();
  for (const auto& c : ch.classes.classes) cls.push_back(c.size());
  j["class_sizes"] = cls;
  json lay = json::array();
  for (std::size_t i = 1; i < ch.layers.size(); ++i)
    for (std::size_t jj = 0; jj < ch.layers[i].size(); ++jj)
      if (!ch.layers[i][jj].empty()) lay.push_back({{"i", i}, {"j", jj}, {"count", ch.layers[i][jj].size()}});
  j["layers"] = lay;
  j["duplication_factor"] = duplication_factor(ch);
  return j.dump(2) + "\n";
}

}  // namespace lowdisc
