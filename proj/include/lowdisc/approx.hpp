#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lowdisc/bitvec.hpp"
#include "lowdisc/coloring.hpp"
#include "lowdisc/geometry.hpp"
#include "lowdisc/set_system.hpp"

namespace lowdisc {

// |b - a| / (a + b + nu)
double d_nu(double a, double b, double nu);

// Exact value of a double with a power-of-two denominator up to 2^40;
// otherwise the closest fraction with denominator <= 10^9.
Rational rational_from_double(double v);
// "p/q" or a decimal.
std::optional<Rational> parse_rational(std::string_view s);

// A family of ranges over n elements that can be scanned without being
// stored explicitly.
class RangeFamily {
 public:
  virtual ~RangeFamily() = default;
  virtual std::size_t n() const = 0;
  virtual std::uint64_t size() const = 0;
  using PairVisitor = std::function<void(std::uint64_t set_id, std::uint32_t in_a, std::uint32_t in_b)>;
  // f(id, |S ∩ a|, |S ∩ b|) for every member set, in id order.
  virtual void for_each_pair(BitView a, BitView b, const PairVisitor& f) const = 0;
  // A system over the elements of x (re-indexed in increasing order) whose
  // low-discrepancy colorings are used for halving. Contains x itself.
  virtual SetSystem coloring_system(BitView x) const = 0;
};

class ExplicitFamily final : public RangeFamily {
 public:
  explicit ExplicitFamily(const SetSystem& sys) : sys_(&sys) {}
  std::size_t n() const override { return sys_->n(); }
  std::uint64_t size() const override { return sys_->size(); }
  void for_each_pair(BitView a, BitView b, const PairVisitor& f) const override;
  SetSystem coloring_system(BitView x) const override;

 private:
  const SetSystem* sys_;
};

// All intervals of a 1D point set, with ids as in interval_ranges: the
// empty set first, then [a, b] by start a and end b in sorted order.
class IntervalFamily final : public RangeFamily {
 public:
  explicit IntervalFamily(const PointSet& pts1d);
  std::size_t n() const override { return order_.size(); }
  std::uint64_t size() const override;
  void for_each_pair(BitView a, BitView b, const PairVisitor& f) const override;
  // The prefixes of x in sorted order: every interval is the difference of
  // two of them.
  SetSystem coloring_system(BitView x) const override;
  std::uint64_t id_of(std::size_t a, std::size_t b) const;

 private:
  std::vector<std::uint32_t> order_;
};

struct RelativeApproxCheck {
  bool pass = true;
  std::uint64_t worst_set = 0;
  double worst_margin = 0;  // min over sets of (allowed - actual) error, negative on failure
  std::uint64_t checked = 0;
};

// Exact rational check of the relative (eps, delta) definition over every
// member set; X is the full ground set. An empty Z has measure 0.
RelativeApproxCheck verify_relative_approx(const RangeFamily& fam, BitView z, Rational eps, Rational delta);

struct NuAlphaCheck {
  bool pass = true;
  std::uint64_t worst_set = 0;
  double worst = 0;  // max d_nu
};

NuAlphaCheck verify_nu_alpha(const RangeFamily& fam, BitView z, double nu, double alpha);

struct NetCheck {
  bool pass = true;
  std::optional<std::uint64_t> uncovered;
  std::uint64_t heavy = 0;
};

// Every set with |S| >= eps n meets `net`.
NetCheck epsilon_net_check(const RangeFamily& fam, BitView net, double eps);

// ceil(c (d ln(1/eps) + ln(1/q)) / (delta^2 eps))
std::size_t relative_sample_size(double eps, double delta, double q, int d, double c = 1.0);
// ceil((c / eps) (ln(d / eps) + ln(1/q)))
std::size_t net_sample_size(double eps, double q, int d, double c = 1.0);

// Uniform sample without replacement of relative_sample_size elements.
BitVec random_sample_approx(std::size_t n, double eps, double delta, double q, int d, std::uint64_t seed,
                            double c = 1.0);
BitVec random_sample(std::size_t n, std::size_t size, std::uint64_t seed);

struct HalvingStepResult {
  BitVec next;
  Rational drift;  // 2 |X_i| / |X_{i-1}| - 1
};

// Keeps the larger color class of x (ties go to +1). `chi` is indexed by
// the elements of x in increasing order.
HalvingStepResult halving_step(BitView x, const Coloring& chi);

struct HalvingParams {
  Rational eps{1, 16};
  Rational delta{1, 4};
  int d = 2;
  int d1 = 1;
  double nu_scale = 1.0;      // nu = nu_scale * eps
  double alpha_scale = 0.25;  // alpha = alpha_scale * delta
  // Constant in front of the target-size lower bound; 0 disables it.
  double target_constant = 0.0;
  bool use_i_star = true;
};

struct HalvingStepTrace {
  int i = 0;
  std::size_t n_prev = 0;
  std::size_t n_i = 0;
  Rational drift;
  double drift_constant = 0;  // drift * n^(1/2+1/(2d)) / log^(3/2+1/(2d)) n
  std::uint64_t disc = 0;     // discrepancy of the coloring on its system
  double dnu_step_max = 0;
  double dnu_total = 0;
};

enum class HalvingStop { reached_target_size, i_star_cap, budget };
std::string_view halving_stop_name(HalvingStop s);

struct HalvingTrace {
  std::vector<HalvingStepTrace> steps;
  HalvingStop stop = HalvingStop::budget;
  double nu = 0;
  double alpha = 0;
  double target_size = 0;
  double K = 0;
  double i_star = 0;
  bool x0_injected = true;
};

struct HalvingResult {
  BitVec z;
  HalvingTrace trace;
};

// Halves the ground set with full colorings until the accumulated d_nu
// drift would reach alpha, the size target is reached, or i* steps ran.
HalvingResult relative_approx_by_halving(const RangeFamily& fam, const HalvingParams& hp, const PipelineParams& pp,
                                         std::uint64_t seed);

std::string halving_trace_json(const HalvingResult& r, const RelativeApproxCheck* check = nullptr);

}  // namespace lowdisc
