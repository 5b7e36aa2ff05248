#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lowdisc {

enum class ScheduleMode { theory, calibrated };

std::optional<ScheduleMode> parse_schedule_mode(std::string_view s);
std::string_view schedule_mode_name(ScheduleMode m);

// All logarithms are base 2.
struct ScheduleParams {
  int d = 2;
  int d1 = 1;
  double A = 1.0;
  double B = 6.0;
  double C = 1.0;
  double c = 1.0;
  double K = 4.0;
  std::size_t n = 0;  // padded ground size, a power of two
  ScheduleMode mode = ScheduleMode::calibrated;

  int k() const;
  void validate() const;
};

// Theory-mode constants: B = ceil(6 + log C), A = 2^(6 + (B+1) + log d)
// scaled by (1 + 1e-9) so that the strict inequality holds.
ScheduleParams theory_params(std::size_t n, int d, int d1, double C = 1.0, double K = 4.0);

double compute_j0(int i, const ScheduleParams& p);
double delta_value(int i, int j, const ScheduleParams& p);
// Size bound of the canonical sets of layer (i, j): n / 2^(j-1) for j >= i,
// and K n / 2^(i-1) for the anchor layer j = i - 1.
double layer_size_bound(int i, int j, const ScheduleParams& p);

// counts[i][j] for i = 1..k, j = 0..k (entries with j < i-1 ignored).
using LayerCounts = std::vector<std::vector<double>>;

LayerCounts analytic_layer_counts(const ScheduleParams& p);

struct BudgetTerm {
  int i, j;
  double j0, delta, count, s_j, term;
};

struct BudgetResult {
  double total = 0;
  double above_center = 0;  // terms with j >= j0
  double below_center = 0;  // terms with j < j0
  double target = 0;
  bool pass = false;
  std::vector<BudgetTerm> terms;
};

// Sum of count * exp(-delta^2 / (16 s_j)) over layers with delta < 2 s_j
// (rows that cannot reach their target are dropped); passes when
// total <= target.
// The default target is n / 16.
BudgetResult entropy_budget(const ScheduleParams& p, const LayerCounts& counts, std::optional<double> target = {});

struct LmResult {
  double total = 0;
  double target = 0;
  bool pass = false;
};

// Sum over (|M|, delta_M) with delta_M < 2|M| of exp(-delta^2 / (16 |M|))
// against n_live / 16.
LmResult lm_condition(const std::vector<std::pair<std::size_t, double>>& sets, std::size_t n_live);

struct Calibration {
  double A = 0;
  double budget = 0;
  bool at_floor = false;  // the budget is met even as A -> 0
};

// Smallest A (to relative tolerance 1e-3) with budget <= safety * target.
Calibration calibrate_A(const ScheduleParams& p, const LayerCounts& counts, double target, double safety = 0.9);

// 2 * sum_{j=i-1}^{k} delta(i, j)
double chain_bound(int i, const ScheduleParams& p);
// sum_{j=i-1}^{k} 1 / (1 + |j - j0|)^2
double convergence_factor(int i, const ScheduleParams& p);
// n^(1/2 - 1/(2d)) / 2^((1/2 - d1/(2d))(i-1)) * log^(1/2 + 1/(2d)) n
double closed_form_scale(int i, const ScheduleParams& p);

// i,j,j0,delta,count,s_j,term
std::string schedule_csv(const BudgetResult& b);
std::string budget_summary_json(const ScheduleParams& p, const BudgetResult& b);

}  // namespace lowdisc
