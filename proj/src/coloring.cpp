#include "lowdisc/coloring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "lowdisc/errors.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {

CanonicalRows canonical_rows(const Chaining& ch) {
  CanonicalRows out;
  const SetSystem& sys = ch.work.sys;
  out.n = sys.n();
  const auto k = static_cast<std::size_t>(ch.k);
  out.counts.assign(k + 1, std::vector<double>(k + 1, 0.0));
  std::unordered_multimap<std::uint64_t, std::size_t> seen;

  auto add = [&](BitVec&& s, int i, int j) {
    if (s.count() == 0) return;
    out.counts[i][j] += 1;
    const std::uint64_t h = hash_bits(s);
    auto [lo, hi] = seen.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (equal(out.sets[it->second], s)) {
        out.occurrences[it->second].push_back({i, j});
        return;
      }
    seen.emplace(h, out.sets.size());
    out.sets.push_back(std::move(s));
    out.occurrences.push_back({{i, j}});
  };

  for (int i = 1; i <= ch.k; ++i) {
    const auto& lay = ch.layers[static_cast<std::size_t>(i)];
    const PackingHierarchy& h = ch.hierarchy_for(i);
    for (auto id : lay[static_cast<std::size_t>(i - 1)]) add(BitVec(sys.set(id)), i, i - 1);
    for (int j = i; j <= ch.k; ++j)
      for (auto id : lay[static_cast<std::size_t>(j)]) {
        const std::uint32_t par = h.parent(j, id);
        add(bit_minus(sys.set(id), sys.set(par)), i, j);
        add(bit_minus(sys.set(par), sys.set(id)), i, j);
      }
  }
  return out;
}

ConstraintSystem constraint_system(const CanonicalRows& rows, const ScheduleParams& p) {
  ConstraintSystem cs;
  cs.N = rows.n;
  for (std::size_t r = 0; r < rows.sets.size(); ++r) {
    double delta = std::numeric_limits<double>::infinity();
    for (auto [i, j] : rows.occurrences[r]) delta = std::min(delta, delta_value(i, j, p));
    cs.add_row(rows.sets[r], delta);
  }
  return cs;
}

namespace {

struct RoundPlan {
  ConstraintSystem cs;
  ScheduleParams p;
  LayerCounts counts;
  double budget = 0;
  double lm = 0;
  std::vector<std::size_t> classes;
};

ScheduleParams round_params(const PipelineParams& pp, std::size_t n_pad) {
  ScheduleParams p = pp.mode == ScheduleMode::theory ? theory_params(n_pad, pp.d, pp.d1, pp.C, pp.K) : ScheduleParams{};
  p.d = pp.d;
  p.d1 = pp.d1;
  p.C = pp.C;
  p.c = pp.c;
  p.K = pp.K;
  if (pp.mode == ScheduleMode::calibrated) p.B = pp.B;
  p.n = n_pad;
  p.mode = pp.mode;
  return p;
}

std::vector<std::pair<std::size_t, double>> lm_sets(const ConstraintSystem& cs) {
  std::vector<std::pair<std::size_t, double>> v;
  v.reserve(cs.rows());
  for (std::size_t r = 0; r < cs.rows(); ++r) v.push_back({cs.row_size(r), cs.target[r]});
  return v;
}

// Chooses A and builds the rows for one round over `live_sys`.
RoundPlan plan_round(const CanonicalRows& rows, const PipelineParams& pp, std::size_t n_pad, std::size_t live_n) {
  RoundPlan plan;
  plan.p = round_params(pp, n_pad);
  plan.counts = rows.counts;
  const double target = static_cast<double>(live_n) / 16.0;
  if (pp.mode == ScheduleMode::calibrated) plan.p.A = calibrate_A(plan.p, plan.counts, target, pp.safety).A;
  plan.budget = entropy_budget(plan.p, plan.counts, target).total;
  plan.cs = constraint_system(rows, plan.p);
  auto lm = lm_condition(lm_sets(plan.cs), live_n);
  // Anchors of the shared hierarchy may exceed the layer size bound; raise
  // A until the rows themselves satisfy the condition.
  for (int t = 0; !lm.pass && pp.mode == ScheduleMode::calibrated && t < 64; ++t) {
    plan.p.A *= 1.25;
    plan.cs = constraint_system(rows, plan.p);
    lm = lm_condition(lm_sets(plan.cs), live_n);
    plan.budget = entropy_budget(plan.p, plan.counts, target).total;
  }
  plan.lm = lm.total;
  return plan;
}

}  // namespace

FullColoringResult full_coloring(const SetSystem& sys, const PipelineParams& pp, std::uint64_t seed) {
  if (sys.size() == 0) throw DomainError("full_coloring: empty set system");
  if (pp.d < 1 || pp.d1 < 1 || pp.d1 > pp.d) throw DomainError("full_coloring: need 1 <= d1 <= d");
  const std::size_t n = sys.n();
  FullColoringResult res;
  res.x.assign(n, 0.0);
  std::vector<char> colored(n, 0);
  std::size_t remaining = n;

  // Round-1 rows over the ground set, kept for the reuse experiment.
  std::optional<ConstraintSystem> first_rows;

  for (int round = 1; remaining > pp.n0; ++round) {
    if (round > static_cast<int>(std::bit_width(n)) + 2) throw ConsistencyError("full_coloring: too many rounds");
    RoundTrace tr;
    tr.round = round;
    tr.live_n = remaining;
    BitVec live_mask(n);
    for (std::size_t e = 0; e < n; ++e)
      if (!colored[e]) {
        live_mask.set(e);
        tr.live.push_back(static_cast<std::uint32_t>(e));
      }
    const std::size_t N = remaining;
    tr.n_pad = padded_size(N);
    tr.k = std::countr_zero(tr.n_pad);

    SetSystem live_sys = project(sys, live_mask);
    ChainingOptions copt = pp.chaining;
    copt.K = pp.K;
    copt.seed = derive_seed(pp.chaining.seed, static_cast<std::uint64_t>(round));
    const Chaining ch = build_chaining(live_sys, copt, tr.n_pad);
    tr.classes.assign(static_cast<std::size_t>(tr.k) + 1, 0);
    for (int ci : ch.classes.class_of) ++tr.classes[static_cast<std::size_t>(ci)];

    RoundPlan plan;
    if (pp.reuse_hierarchy && first_rows) {
      plan.p = round_params(pp, tr.n_pad);
      plan.cs.N = N;
      std::vector<std::int64_t> pos(n, -1);
      for (std::size_t t = 0; t < N; ++t) pos[tr.live[t]] = static_cast<std::int64_t>(t);
      for (std::size_t r = 0; r < first_rows->rows(); ++r) {
        std::vector<std::uint32_t> idx;
        for (auto c : first_rows->row(r))
          if (pos[c] >= 0) idx.push_back(static_cast<std::uint32_t>(pos[c]));
        if (!idx.empty()) plan.cs.add_row(idx, first_rows->target[r]);
      }
      plan.lm = lm_condition(lm_sets(plan.cs), N).total;
    } else {
      const CanonicalRows rows = canonical_rows(ch);
      plan = plan_round(rows, pp, tr.n_pad, N);
      if (pp.reuse_hierarchy && round == 1) first_rows = plan.cs;
    }
    tr.layer_counts = plan.counts;
    tr.A = plan.p.A;
    tr.budget_total = plan.budget;
    tr.lm_total = plan.lm;
    tr.rows = plan.cs.rows();
    tr.chain_bound.assign(static_cast<std::size_t>(tr.k) + 1, 0.0);
    for (int i = 1; i <= tr.k; ++i) tr.chain_bound[static_cast<std::size_t>(i)] = chain_bound(i, plan.p);

    std::vector<double> x0(N);
    for (std::size_t t = 0; t < N; ++t) x0[t] = res.x[tr.live[t]];
    WalkParams wp = pp.walk;
    wp.c = pp.c;
    const WalkResult w = lm_partial_coloring(plan.cs, wp, derive_seed(seed, 0xc0, static_cast<std::uint64_t>(round)), x0);
    tr.walk_steps = w.steps;
    tr.retries = w.retries;
    tr.max_row_violation = w.max_violation;
    tr.movement.resize(N);
    for (std::size_t t = 0; t < N; ++t) {
      const std::uint32_t e = tr.live[t];
      tr.movement[t] = w.x[t] - x0[t];
      res.x[e] = w.x[t];
      if (w.partial[t] != 0) {
        colored[e] = 1;
        --remaining;
        ++tr.colored;
      }
    }
    res.rounds.push_back(std::move(tr));
  }

  res.chi = Coloring(n);
  for (std::size_t e = 0; e < n; ++e)
    if (colored[e]) res.chi.set(e, static_cast<std::int8_t>(res.x[e] > 0 ? 1 : -1));
  std::int8_t next = 1;
  for (std::size_t e = 0; e < n; ++e)
    if (!colored[e]) {
      res.leftovers.push_back(static_cast<std::uint32_t>(e));
      res.chi.set(e, next);
      next = static_cast<std::int8_t>(-next);
    }

  if (pp.verify_rounds) {
    const RoundBoundCheck chk = check_round_bounds(sys, res, pp.c);
    if (chk.violations)
      throw ConsistencyError("full_coloring: " + std::to_string(chk.violations) +
                             " per-round chain bound violations, worst excess " + std::to_string(chk.worst_excess));
  }
  return res;
}

RoundBoundCheck check_round_bounds(const SetSystem& sys, const FullColoringResult& res, double c) {
  RoundBoundCheck out;
  const std::size_t n = sys.n();
  std::vector<double> move(n, 0.0);
  for (const auto& tr : res.rounds) {
    std::fill(move.begin(), move.end(), 0.0);
    BitVec live(n);
    for (std::size_t t = 0; t < tr.live.size(); ++t) {
      move[tr.live[t]] = tr.movement[t];
      live.set(tr.live[t]);
    }
    const double slack_unit = 1.0 / std::pow(static_cast<double>(tr.live_n), c);
    for (std::size_t s = 0; s < sys.size(); ++s) {
      const BitVec part = bit_and(sys.set(s), live);
      const auto idx = part.indices();
      if (idx.empty()) continue;
      double m = 0;
      for (auto e : idx) m += move[e];
      const int i = layer_class(size_class(idx.size(), tr.n_pad));
      const double bound = tr.chain_bound[static_cast<std::size_t>(i)] + (2.0 * (tr.k - i + 1) + 1.0) * slack_unit;
      ++out.checks;
      const double excess = std::fabs(m) - bound;
      // Row sums are accumulated in a different order than here.
      if (excess > 1e-9 * (1.0 + bound)) ++out.violations;
      out.worst_excess = out.checks == 1 ? excess : std::max(out.worst_excess, excess);
    }
  }
  return out;
}

std::string trace_jsonl(const FullColoringResult& res) {
  std::ostringstream out;
  for (const auto& tr : res.rounds) {
    nlohmann::json lc = nlohmann::json::array();
    for (std::size_t i = 0; i < tr.layer_counts.size(); ++i)
      for (std::size_t j = 0; j < tr.layer_counts[i].size(); ++j)
        if (tr.layer_counts[i][j] > 0) lc.push_back({{"i", i}, {"j", j}, {"count", tr.layer_counts[i][j]}});
    nlohmann::json j = {{"round", tr.round},
                        {"live_n", tr.live_n},
                        {"classes", tr.classes},
                        {"layer_counts", lc},
                        {"A", tr.A},
                        {"budget_total", tr.budget_total},
                        {"lm_total", tr.lm_total},
                        {"rows", tr.rows},
                        {"walk_steps", tr.walk_steps},
                        {"retries", tr.retries},
                        {"colored", tr.colored},
                        {"max_row_violation", tr.max_row_violation}};
    out << j.dump() << '\n';
  }
  return out.str();
}

Coloring random_coloring(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Coloring chi(n);
  for (std::size_t i = 0; i < n; ++i) chi.set(i, coin(rng) ? 1 : -1);
  return chi;
}

BruteForceResult brute_force_min_disc(const SetSystem& sys) {
  const std::size_t n = sys.n();
  if (n > kBruteForceLimit)
    throw DomainError("brute_force_min_disc: n = " + std::to_string(n) + " exceeds the limit of " +
                      std::to_string(kBruteForceLimit));
  BruteForceResult out;
  out.witness = Coloring(n);
  if (n == 0) return out;
  const std::size_t m = sys.size();
  std::vector<std::vector<std::uint32_t>> sets_of(n);
  for (std::size_t s = 0; s < m; ++s)
    for (auto e : sys.set(s).indices()) sets_of[e].push_back(static_cast<std::uint32_t>(s));

  // Start from all +1 and walk a Gray code over elements 0..n-2; element
  // n-1 stays +1 by sign symmetry.
  std::vector<std::int64_t> sum(m);
  for (std::size_t s = 0; s < m; ++s) sum[s] = static_cast<std::int64_t>(sys.set_size(s));
  std::vector<std::int8_t> chi(n, 1);
  auto value = [&] {
    std::int64_t v = 0;
    for (auto x : sum) v = std::max(v, x < 0 ? -x : x);
    return static_cast<std::uint64_t>(v);
  };
  std::uint64_t best = value();
  std::vector<std::int8_t> best_chi = chi;
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t t = 1; t < total && best > 0; ++t) {
    const auto e = static_cast<std::size_t>(std::countr_zero(t));
    chi[e] = static_cast<std::int8_t>(-chi[e]);
    const std::int64_t dv = 2 * chi[e];
    for (auto s : sets_of[e]) sum[s] += dv;
    const std::uint64_t v = value();
    if (v < best) {
      best = v;
      best_chi = chi;
    }
  }
  out.value = best;
  out.witness = Coloring(best_chi);
  return out;
}

SensitiveTable evaluate_sensitive(const SetSystem& sys, const Coloring& chi, int d, int d1) {
  if (d < 1 || d1 < 1 || d1 > d) throw DomainError("evaluate_sensitive: need 1 <= d1 <= d");
  if (chi.size() != sys.n()) throw StructuralError("evaluate_sensitive: coloring width differs from the ground set");
  SensitiveTable t;
  const std::size_t n = sys.n();
  const std::size_t n_pad = padded_size(n);
  const int k = std::countr_zero(n_pad);
  t.class_max_chi.assign(static_cast<std::size_t>(k) + 1, 0);
  t.class_count.assign(static_cast<std::size_t>(k) + 1, 0);
  const double size_exp = 0.5 - static_cast<double>(d1) / (2.0 * d);
  const double n_factor = std::pow(static_cast<double>(n), static_cast<double>(d1 - 1) / (2.0 * d));
  for (std::size_t s = 0; s < sys.size(); ++s) {
    SensitiveRow r;
    r.set_id = s;
    r.size = sys.set_size(s);
    r.class_i = size_class(r.size, n_pad);
    r.chi = signed_sum(chi, sys.set(s));
    if (r.size > 0) {
      r.envelope = std::pow(static_cast<double>(r.size), size_exp) * n_factor;
      r.ratio = static_cast<double>(r.chi < 0 ? -r.chi : r.chi) / r.envelope;
    }
    t.max_ratio = std::max(t.max_ratio, r.ratio);
    const auto ci = static_cast<std::size_t>(r.class_i);
    t.class_max_chi[ci] = std::max(t.class_max_chi[ci], r.chi < 0 ? -r.chi : r.chi);
    ++t.class_count[ci];
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace lowdisc
