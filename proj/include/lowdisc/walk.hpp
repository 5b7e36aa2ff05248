#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lowdisc/rng.hpp"
#include "lowdisc/set_system.hpp"

namespace lowdisc {

// Rows over walk coordinates 0..N-1 with a discrepancy target per row.
struct ConstraintSystem {
  std::size_t N = 0;
  std::vector<std::uint32_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> target;

  std::size_t rows() const { return target.size(); }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {cols.data() + row_ptr[r], cols.data() + row_ptr[r + 1]};
  }
  std::size_t row_size(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }

  void add_row(std::span<const std::uint32_t> idx, double delta);
  void add_row(BitView set, double delta);
  void validate() const;
};

struct WalkParams {
  // Zero selects the default for each of these.
  double gamma = 0;        // default 0.1
  double freeze_tol = 0;   // default 0.5 / N^(c+1)
  std::uint64_t max_steps = 0;  // default 64 N / gamma^2
  double row_tol_rel = 1e-6;
  double row_tol_abs = 1e-9;
  double c = 1.0;
  int retry_limit = 8;
  int reorth_every = 64;
  // The walk stops once this fraction of the coordinates is frozen; values
  // below 1/2 are raised to 1/2.
  double stop_fraction = 0.5;

  WalkParams resolved(std::size_t N) const;
};

struct WalkResult {
  std::vector<double> x;
  // +1 / -1 for frozen coordinates, 0 elsewhere.
  std::vector<std::int8_t> partial;
  std::size_t frozen = 0;
  std::uint64_t steps = 0;
  int retries = 0;
  std::uint64_t seed_used = 0;
  // max over rows of |<x - x0, row>| - target
  double max_violation = 0;
};

// One run of the constrained Gaussian walk. Each step draws a Gaussian
// vector, projects it orthogonally to the frozen coordinates and the tight
// rows, and moves along it until the step size gamma is used up or a row or
// a coordinate reaches its bound.
class Walker {
 public:
  Walker(const ConstraintSystem& cs, const WalkParams& params, std::uint64_t seed, std::span<const double> x0 = {});

  enum class Status { moved, stuck, done };
  Status step();
  // Steps until target_frozen() coordinates are frozen, the walk is stuck,
  // or the step budget runs out.
  Status run();

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& x0() const { return x0_; }
  const std::vector<char>& frozen() const { return frozen_; }
  std::size_t frozen_count() const { return frozen_count_; }
  std::size_t target_frozen() const;
  std::size_t required_frozen() const { return (cs_.N + 1) / 2; }
  bool tight(std::size_t r) const { return tight_[r] != 0; }
  std::size_t tight_count() const { return tight_rows_.size(); }
  std::size_t rank() const { return basis_.size(); }
  std::uint64_t steps() const { return steps_; }
  // The projected direction of the last step.
  const std::vector<double>& last_direction() const { return u_; }
  double displacement(std::size_t r) const;
  double row_tol(std::size_t r) const;

 private:
  void project(std::vector<double>& v) const;
  void add_tight(std::size_t r);
  void freeze(std::uint32_t i, double sign);
  void rebuild_basis();
  void reorthonormalize();
  void compact_rows();
  std::vector<double> restricted_row(std::size_t r) const;

  const ConstraintSystem& cs_;
  WalkParams p_;
  Rng rng_;
  GaussianSource gauss_;
  std::vector<double> x_, x0_, disp_, u_, g_;
  std::vector<char> frozen_;
  std::size_t frozen_count_ = 0;
  std::uint64_t steps_ = 0;

  // Rows restricted to free coordinates; base_ holds the frozen part of
  // each row's displacement.
  std::vector<std::uint32_t> live_ptr_, live_cols_;
  std::vector<double> base_;
  std::vector<std::uint32_t> active_rows_;  // not tight, not vacuous, some free coordinate
  std::vector<char> tight_;
  std::vector<std::uint32_t> tight_rows_;
  std::size_t frozen_at_compaction_ = 0;

  // Column -> rows (full rows).
  std::vector<std::uint32_t> col_ptr_, col_rows_;
  std::vector<std::uint32_t> tight_cover_;
  // Free coordinates covered by some tight row, and their slots.
  std::vector<std::uint32_t> support_;
  std::vector<std::uint32_t> support_pos_;

  // Orthonormal basis of the tight rows restricted to free coordinates,
  // stored over the support slots.
  std::vector<std::vector<double>> basis_;
  int updates_since_reorth_ = 0;
};

// Repeats Walker::run with derived seeds until a run freezes at least half
// the coordinates and keeps every row within target + 1/N^c. Throws
// PreconditionError when the rows fail the entropy condition and
// WalkFailure when the retry budget is spent.
WalkResult lm_partial_coloring(const ConstraintSystem& cs, const WalkParams& params, std::uint64_t seed,
                               std::span<const double> x0 = {});

}  // namespace lowdisc
