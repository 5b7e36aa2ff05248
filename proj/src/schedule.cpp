#include "lowdisc/schedule.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lowdisc/errors.hpp"

namespace lowdisc {

std::optional<ScheduleMode> parse_schedule_mode(std::string_view s) {
  if (s == "theory") return ScheduleMode::theory;
  if (s == "calibrated") return ScheduleMode::calibrated;
  return std::nullopt;
}

std::string_view schedule_mode_name(ScheduleMode m) { return m == ScheduleMode::theory ? "theory" : "calibrated"; }

int ScheduleParams::k() const { return static_cast<int>(std::bit_width(n)) - 1; }

void ScheduleParams::validate() const {
  if (d < 2) throw DomainError("schedule: d must exceed 1");
  if (d1 < 1 || d1 > d) throw DomainError("schedule: d1 must lie in [1, d]");
  if (n < 4) throw DomainError("schedule: n must be at least 4");
  if (!(A > 0) || !(C > 0) || !(K > 0) || !(c > 0)) throw DomainError("schedule: A, C, K and c must be positive");
}

ScheduleParams theory_params(std::size_t n, int d, int d1, double C, double K) {
  ScheduleParams p;
  p.n = n;
  p.d = d;
  p.d1 = d1;
  p.C = C;
  p.K = K;
  p.mode = ScheduleMode::theory;
  p.B = std::ceil(6.0 + std::log2(C));
  p.A = std::exp2(6.0 + (p.B + 1.0) + std::log2(static_cast<double>(d))) * (1.0 + 1e-9);
  return p;
}

double compute_j0(int i, const ScheduleParams& p) {
  if (p.n < 4) throw DomainError("compute_j0: n must be at least 4");
  const double lg = std::log2(static_cast<double>(p.n));
  const double d = p.d, d1 = p.d1;
  return lg / d + (1.0 - d1 / d) * (i - 1) - (1.0 + 1.0 / d) * std::log2(lg) - p.B;
}

double closed_form_scale(int i, const ScheduleParams& p) {
  const double n = static_cast<double>(p.n), d = p.d, d1 = p.d1;
  const double lg = std::log2(n);
  return std::pow(n, 0.5 - 1.0 / (2 * d)) / std::exp2((0.5 - d1 / (2 * d)) * (i - 1)) *
         std::pow(lg, 0.5 + 1.0 / (2 * d));
}

double delta_value(int i, int j, const ScheduleParams& p) {
  const double gap = 1.0 + std::fabs(j - compute_j0(i, p));
  return p.A / (gap * gap) * closed_form_scale(i, p);
}

double layer_size_bound(int i, int j, const ScheduleParams& p) {
  const double n = static_cast<double>(p.n);
  if (j >= i) return n / std::exp2(j - 1);
  return p.K * n / std::exp2(i - 1);
}

LayerCounts analytic_layer_counts(const ScheduleParams& p) {
  const int k = p.k();
  LayerCounts c(static_cast<std::size_t>(k) + 1, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0));
  for (int i = 1; i <= k; ++i)
    for (int j = i - 1; j <= k; ++j)
      c[i][j] = p.C * std::pow(static_cast<double>(j), p.d) * std::exp2(static_cast<double>(j) * p.d) /
                std::exp2(static_cast<double>(p.d - p.d1) * (i - 1));
  return c;
}

BudgetResult entropy_budget(const ScheduleParams& p, const LayerCounts& counts, std::optional<double> target) {
  BudgetResult r;
  const int k = p.k();
  r.target = target ? *target : static_cast<double>(p.n) / 16.0;
  for (int i = 1; i <= k && i < static_cast<int>(counts.size()); ++i) {
    const double j0 = compute_j0(i, p);
    for (int j = i - 1; j <= k && j < static_cast<int>(counts[i].size()); ++j) {
      const double count = counts[i][j];
      if (count <= 0) continue;
      const double delta = delta_value(i, j, p);
      const double s = layer_size_bound(i, j, p);
      // A row of at most s elements moves by at most 2s from any start.
      const double term = delta >= 2.0 * s ? 0.0 : count * std::exp(-delta * delta / (16.0 * s));
      r.terms.push_back({i, j, j0, delta, count, s, term});
      r.total += term;
      (j >= j0 ? r.above_center : r.below_center) += term;
    }
  }
  r.pass = r.total <= r.target;
  return r;
}

LmResult lm_condition(const std::vector<std::pair<std::size_t, double>>& sets, std::size_t n_live) {
  LmResult r;
  r.target = static_cast<double>(n_live) / 16.0;
  for (const auto& [size, delta] : sets) {
    if (size == 0) continue;
    if (!(delta > 0)) throw DomainError("lm_condition: targets must be positive");
    if (delta >= 2.0 * static_cast<double>(size)) continue;
    r.total += std::exp(-delta * delta / (16.0 * static_cast<double>(size)));
  }
  r.pass = r.total <= r.target;
  return r;
}

Calibration calibrate_A(const ScheduleParams& p, const LayerCounts& counts, double target, double safety) {
  ScheduleParams q = p;
  auto budget = [&](double A) {
    q.A = A;
    return entropy_budget(q, counts, target).total;
  };
  const double goal = safety * target;
  constexpr double kFloor = 1e-6, kCap = 1e15;
  Calibration c;
  if (budget(kFloor) <= goal) {
    c.A = kFloor;
    c.budget = budget(kFloor);
    c.at_floor = true;
    return c;
  }
  double lo = kFloor, hi = 1.0;
  while (budget(hi) > goal) {
    lo = hi;
    hi *= 2;
    if (hi > kCap) throw DomainError("calibrate_A: no feasible amplitude below " + std::to_string(kCap));
  }
  while (hi / lo > 1.0 + 1e-3) {
    const double mid = std::sqrt(lo * hi);
    (budget(mid) > goal ? lo : hi) = mid;
  }
  c.A = hi;
  c.budget = budget(hi);
  return c;
}

double convergence_factor(int i, const ScheduleParams& p) {
  const double j0 = compute_j0(i, p);
  double s = 0;
  for (int j = i - 1; j <= p.k(); ++j) {
    const double g = 1.0 + std::fabs(j - j0);
    s += 1.0 / (g * g);
  }
  return s;
}

double chain_bound(int i, const ScheduleParams& p) {
  double s = 0;
  for (int j = i - 1; j <= p.k(); ++j) s += delta_value(i, j, p);
  return 2.0 * s;
}

std::string schedule_csv(const BudgetResult& b) {
  std::ostringstream out;
  out.precision(17);
  out << "i,j,j0,delta,count,s_j,term\n";
  for (const auto& t : b.terms)
    out << t.i << ',' << t.j << ',' << t.j0 << ',' << t.delta << ',' << t.count << ',' << t.s_j << ',' << t.term
        << '\n';
  return out.str();
}

std::string budget_summary_json(const ScheduleParams& p, const BudgetResult& b) {
  nlohmann::json j;
  j["mode"] = schedule_mode_name(p.mode);
  j["n"] = p.n;
  j["d"] = p.d;
  j["d1"] = p.d1;
  j["A"] = p.A;
  j["B"] = p.B;
  j["C"] = p.C;
  j["K"] = p.K;
  j["c"] = p.c;
  j["total"] = b.total;
  j["above_center"] = b.above_center;
  j["below_center"] = b.below_center;
  j["target"] = b.target;
  j["pass"] = b.pass;
  return j.dump(2) + "\n";
}

}  // namespace lowdisc
