#include "lowdisc/approx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "lowdisc/errors.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {

double d_nu(double a, double b, double nu) {
  if (!(nu > 0)) throw DomainError("d_nu: nu must be positive");
  return std::fabs(b - a) / (a + b + nu);
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("rational_from_double: value is not finite");
  int e = 0;
  const double m = std::frexp(v, &e);
  // v = m 2^e with |m| in [0.5, 1); m has 53 significant bits.
  const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  const int shift = 53 - e;  // v = mant / 2^shift
  if (v == 0) return {0, 1};
  if (shift <= 0 && shift > -10) return {mant << -shift, 1};
  if (shift > 0 && shift <= 93) {
    std::int64_t num = mant;
    int s = shift;
    while (s > 0 && (num & 1) == 0) {
      num >>= 1;
      --s;
    }
    if (s <= 40) return {num, std::int64_t{1} << s};
  }
  // Continued fraction with bounded denominator.
  const double x = std::fabs(v);
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000000) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (r - a < 1e-15) break;
    r = 1.0 / (r - a);
  }
  return reduced({v < 0 ? -h1 : h1, k1});
}

std::optional<Rational> parse_rational(std::string_view s) {
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    std::int64_t p = 0, q = 0;
    const auto a = s.substr(0, slash), b = s.substr(slash + 1);
    if (std::from_chars(a.data(), a.data() + a.size(), p).ec != std::errc{} ||
        std::from_chars(b.data(), b.data() + b.size(), q).ec != std::errc{} || q <= 0)
      return std::nullopt;
    return reduced({p, q});
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return rational_from_double(v);
}

void ExplicitFamily::for_each_pair(BitView a, BitView b, const PairVisitor& f) const {
  for (std::size_t s = 0; s < sys_->size(); ++s)
    f(s, static_cast<std::uint32_t>(intersection_size(sys_->set(s), a)),
      static_cast<std::uint32_t>(intersection_size(sys_->set(s), b)));
}

SetSystem ExplicitFamily::coloring_system(BitView x) const {
  SetSystem proj = project(*sys_, x);
  const BitVec all = BitVec::full(proj.n());
  if (!proj.find(all)) proj.add(all, "X");
  return proj;
}

IntervalFamily::IntervalFamily(const PointSet& pts1d) : order_(sorted_order_1d(pts1d)) {}

std::uint64_t IntervalFamily::size() const {
  const std::uint64_t n = order_.size();
  return n * (n + 1) / 2 + 1;
}

std::uint64_t IntervalFamily::id_of(std::size_t a, std::size_t b) const {
  const std::uint64_t n = order_.size();
  return 1 + a * n - a * (a - 1) / 2 + (b - a);
}

void IntervalFamily::for_each_pair(BitView a, BitView b, const PairVisitor& f) const {
  const std::size_t n = order_.size();
  if (a.size() != n || b.size() != n) throw StructuralError("IntervalFamily: width mismatch");
  std::vector<std::uint32_t> pa(n + 1, 0), pb(n + 1, 0);
  for (std::size_t t = 0; t < n; ++t) {
    pa[t + 1] = pa[t] + a.test(order_[t]);
    pb[t + 1] = pb[t] + b.test(order_[t]);
  }
  std::uint64_t id = 0;
  f(id++, 0, 0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t e = s; e < n; ++e) f(id++, pa[e + 1] - pa[s], pb[e + 1] - pb[s]);
}

SetSystem IntervalFamily::coloring_system(BitView x) const {
  const auto members = x.indices();
  std::vector<std::uint32_t> local(order_.size(), UINT32_MAX);
  for (std::size_t t = 0; t < members.size(); ++t) local[members[t]] = static_cast<std::uint32_t>(t);
  SetSystem sys(members.size());
  BitVec prefix(members.size());
  for (auto e : order_) {
    if (local[e] == UINT32_MAX) continue;
    prefix.set(local[e]);
    sys.add(prefix);
  }
  return sys;
}

namespace {

using i128 = __int128;

i128 iabs(i128 v) { return v < 0 ? -v : v; }

}  // namespace

RelativeApproxCheck verify_relative_approx(const RangeFamily& fam, BitView z, Rational eps, Rational delta) {
  if (eps.num < 0 || eps.den <= 0 || delta.num < 0 || delta.den <= 0) throw DomainError("verify_relative_approx: bad parameters");
  const std::size_t n = fam.n();
  if (z.size() != n) throw StructuralError("verify_relative_approx: width mismatch");
  const BitVec all = BitVec::full(n);
  const i128 X = static_cast<i128>(n);
  const i128 Z = static_cast<i128>(z.count());
  RelativeApproxCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  fam.for_each_pair(all, z, [&](std::uint64_t id, std::uint32_t cx, std::uint32_t cz) {
    ++out.checked;
    // Compare |zbar - xbar| with delta xbar or delta eps, all scaled by |X||Z|.
    const i128 diff = Z == 0 ? static_cast<i128>(cx) : iabs(static_cast<i128>(cz) * X - static_cast<i128>(cx) * Z);
    const i128 scale = Z == 0 ? X : X * Z;  // denominator of diff
    const bool heavy = static_cast<i128>(cx) * eps.den >= static_cast<i128>(eps.num) * X;
    i128 lhs, rhs;
    double allowed, actual = static_cast<double>(diff) / static_cast<double>(scale);
    if (heavy) {
      // diff/scale <= delta * cx / X
      lhs = diff * delta.den * X;
      rhs = static_cast<i128>(delta.num) * cx * scale;
      allowed = static_cast<double>(delta.num) / static_cast<double>(delta.den) * static_cast<double>(cx) /
                static_cast<double>(n);
    } else {
      lhs = diff * delta.den * eps.den;
      rhs = static_cast<i128>(delta.num) * eps.num * scale;
      allowed = static_cast<double>(delta.num) / static_cast<double>(delta.den) * static_cast<double>(eps.num) /
                static_cast<double>(eps.den);
    }
    const double margin = allowed - actual;
    const bool fails = lhs > rhs;
    if (fails && out.pass) {
      out.pass = false;
      out.worst_set = id;
      out.worst_margin = margin;
    } else if (fails == !out.pass && margin < out.worst_margin) {
      out.worst_set = id;
      out.worst_margin = margin;
    }
  });
  if (out.checked == 0) out.worst_margin = 0;
  return out;
}

NuAlphaCheck verify_nu_alpha(const RangeFamily& fam, BitView z, double nu, double alpha) {
  const std::size_t n = fam.n();
  if (z.size() != n) throw StructuralError("verify_nu_alpha: width mismatch");
  const double nx = static_cast<double>(n), nz = static_cast<double>(z.count());
  NuAlphaCheck out;
  fam.for_each_pair(BitVec::full(n), z, [&](std::uint64_t id, std::uint32_t cx, std::uint32_t cz) {
    const double v = d_nu(cx / nx, nz > 0 ? cz / nz : 0.0, nu);
    if (v > out.worst) {
      out.worst = v;
      out.worst_set = id;
    }
  });
  out.pass = out.worst < alpha;
  return out;
}

NetCheck epsilon_net_check(const RangeFamily& fam, BitView net, double eps) {
  const std::size_t n = fam.n();
  if (net.size() != n) throw StructuralError("epsilon_net_check: width mismatch");
  NetCheck out;
  fam.for_each_pair(BitVec::full(n), net, [&](std::uint64_t id, std::uint32_t cx, std::uint32_t cn) {
    if (static_cast<double>(cx) < eps * static_cast<double>(n) || cx == 0) return;
    ++out.heavy;
    if (cn == 0 && out.pass) {
      out.pass = false;
      out.uncovered = id;
    }
  });
  return out;
}

std::size_t relative_sample_size(double eps, double delta, double q, int d, double c) {
  if (!(eps > 0 && eps <= 1 && delta > 0 && q > 0 && q < 1)) throw DomainError("relative_sample_size: bad parameters");
  return static_cast<std::size_t>(std::ceil(c * (d * std::log(1.0 / eps) + std::log(1.0 / q)) / (delta * delta * eps)));
}

std::size_t net_sample_size(double eps, double q, int d, double c) {
  if (!(eps > 0 && eps <= 1 && q > 0 && q < 1)) throw DomainError("net_sample_size: bad parameters");
  return static_cast<std::size_t>(std::ceil(c / eps * (std::log(d / eps) + std::log(1.0 / q))));
}

BitVec random_sample(std::size_t n, std::size_t size, std::uint64_t seed) {
  if (size >= n) return BitVec::full(n);
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  Rng rng(seed);
  for (std::size_t t = 0; t < size; ++t) std::swap(ids[t], ids[t + uniform_index(rng, n - t)]);
  BitVec out(n);
  for (std::size_t t = 0; t < size; ++t) out.set(ids[t]);
  return out;
}

BitVec random_sample_approx(std::size_t n, double eps, double delta, double q, int d, std::uint64_t seed, double c) {
  return random_sample(n, relative_sample_size(eps, delta, q, d, c), seed);
}

HalvingStepResult halving_step(BitView x, const Coloring& chi) {
  const auto members = x.indices();
  if (chi.size() != members.size()) throw StructuralError("halving_step: coloring size differs from |X|");
  if (chi.colored_count() != chi.size()) throw DomainError("halving_step: coloring is not total");
  const std::size_t plus = chi.plus().count(), minus = chi.minus().count();
  const std::int8_t keep = plus >= minus ? 1 : -1;
  HalvingStepResult r;
  r.next = BitVec(x.size());
  for (std::size_t t = 0; t < members.size(); ++t)
    if (chi[t] == keep) r.next.set(members[t]);
  const auto kept = static_cast<std::int64_t>(std::max(plus, minus));
  const auto prev = static_cast<std::int64_t>(members.size());
  r.drift = reduced({2 * kept - prev, prev});
  return r;
}

std::string_view halving_stop_name(HalvingStop s) {
  switch (s) {
    case HalvingStop::reached_target_size: return "reached-target-size";
    case HalvingStop::i_star_cap: return "i-star-cap";
    case HalvingStop::budget: return "budget";
  }
  return "?";
}

HalvingResult relative_approx_by_halving(const RangeFamily& fam, const HalvingParams& hp, const PipelineParams& pp,
                                         std::uint64_t seed) {
  if (hp.d1 != 1) throw UnsupportedError("relative_approx_by_halving: only d1 = 1 is supported");
  if (hp.d < 1) throw DomainError("relative_approx_by_halving: d must be positive");
  const double eps = hp.eps.value(), delta = hp.delta.value();
  if (!(eps > 0 && eps <= 1 && delta > 0)) throw DomainError("relative_approx_by_halving: bad (eps, delta)");
  const std::size_t n = fam.n();
  HalvingResult res;
  HalvingTrace& tr = res.trace;
  tr.nu = hp.nu_scale * eps;
  tr.alpha = hp.alpha_scale * delta;
  const double d = hp.d;
  const double lg = std::log2(std::max<double>(static_cast<double>(n), 2.0));
  const double e_size = (3.0 + 1.0 / d) / (1.0 + 1.0 / d);
  const double inv_na = 1.0 / (tr.nu * tr.alpha);
  tr.target_size =
      hp.target_constant * std::max(std::pow(lg, e_size), std::pow(std::log2(std::max(inv_na, 2.0)), e_size) /
                                                              (tr.nu * std::pow(tr.alpha, 2.0 / (1.0 + 1.0 / d))));
  const double drift_pow_n = 0.5 + 1.0 / (2.0 * d), drift_pow_log = 1.5 + 1.0 / (2.0 * d);
  tr.i_star = std::numeric_limits<double>::infinity();

  BitVec x = BitVec::full(n);
  double total = 0;
  for (int i = 1;; ++i) {
    const std::size_t n_prev = x.count();
    if (n_prev < 2 || static_cast<double>(n_prev) / 2.0 < tr.target_size) {
      tr.stop = HalvingStop::reached_target_size;
      break;
    }
    if (hp.use_i_star && static_cast<double>(i) > tr.i_star) {
      tr.stop = HalvingStop::i_star_cap;
      break;
    }
    const SetSystem local = fam.coloring_system(x);
    const FullColoringResult fc = full_coloring(local, pp, derive_seed(seed, 0xa1, static_cast<std::uint64_t>(i)));
    const HalvingStepResult step = halving_step(x, fc.chi);

    HalvingStepTrace st;
    st.i = i;
    st.n_prev = n_prev;
    st.n_i = step.next.count();
    st.drift = step.drift;
    st.disc = discrepancy(local, fc.chi).max;
    const double lgp = std::log2(static_cast<double>(n_prev));
    st.drift_constant = lgp > 0 ? step.drift.value() * std::pow(static_cast<double>(n_prev), drift_pow_n) /
                                      std::pow(lgp, drift_pow_log)
                                : 0.0;
    const double np = static_cast<double>(n_prev), ni = static_cast<double>(st.n_i);
    fam.for_each_pair(x, step.next, [&](std::uint64_t, std::uint32_t ca, std::uint32_t cb) {
      st.dnu_step_max = std::max(st.dnu_step_max, d_nu(ca / np, cb / ni, tr.nu));
    });
    // The triangle inequality bounds the distance to X_0 by the running sum.
    if (total + st.dnu_step_max >= tr.alpha * (1.0 - 1e-9)) {
      tr.stop = HalvingStop::budget;
      break;
    }
    total += st.dnu_step_max;
    st.dnu_total = total;
    tr.steps.push_back(st);
    x = step.next;
    if (i == 1) {
      tr.K = std::max(st.drift_constant, 0.0);
      const double lk = tr.K > 1 ? std::pow(std::log2(tr.K), 1.0 / drift_pow_n) : 0.0;
      tr.i_star = lg - (drift_pow_log / drift_pow_n) * std::log2(lg) - lk;
    } else {
      tr.K = std::max(tr.K, st.drift_constant);
    }
  }
  res.z = std::move(x);
  return res;
}

std::string halving_trace_json(const HalvingResult& r, const RelativeApproxCheck* check) {
  const auto& tr = r.trace;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : tr.steps)
    steps.push_back({{"i", s.i},
                     {"n_prev", s.n_prev},
                     {"n_i", s.n_i},
                     {"delta_i", s.drift.value()},
                     {"delta_i_exact", std::to_string(s.drift.num) + "/" + std::to_string(s.drift.den)},
                     {"drift_constant", s.drift_constant},
                     {"disc", s.disc},
                     {"dnu_step_max", s.dnu_step_max},
                     {"dnu_total", s.dnu_total}});
  nlohmann::json j = {{"steps", steps},
                      {"stop_reason", halving_stop_name(tr.stop)},
                      {"nu", tr.nu},
                      {"alpha", tr.alpha},
                      {"target_size", tr.target_size},
                      {"K", tr.K},
                      {"i_star", std::isfinite(tr.i_star) ? nlohmann::json(tr.i_star) : nlohmann::json(nullptr)},
                      {"x0_injected", tr.x0_injected},
                      {"z_size", r.z.count()}};
  if (check)
    j["verify"] = {{"pass", check->pass}, {"worst_set", check->worst_set}, {"worst_margin", check->worst_margin}};
  return j.dump(2);
}

}  // namespace lowdisc
