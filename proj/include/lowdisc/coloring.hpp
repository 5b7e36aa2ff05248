#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lowdisc/bitvec.hpp"
#include "lowdisc/chaining.hpp"
#include "lowdisc/schedule.hpp"
#include "lowdisc/set_system.hpp"
#include "lowdisc/walk.hpp"

namespace lowdisc {

// Distinct nonempty canonical sets of a chaining: anchors F_{i-1}^i and the
// differences A_j^i, B_j^i along every link used by class i.
struct CanonicalRows {
  std::size_t n = 0;
  std::vector<BitVec> sets;
  // Every (i, j) at which a set occurs.
  std::vector<std::vector<std::pair<int, int>>> occurrences;
  // Occurrence counts per (i, j), before deduplication.
  LayerCounts counts;
};

CanonicalRows canonical_rows(const Chaining& ch);

// One row per distinct canonical set with the smallest target among its
// occurrences.
ConstraintSystem constraint_system(const CanonicalRows& rows, const ScheduleParams& p);

struct PipelineParams {
  ScheduleMode mode = ScheduleMode::calibrated;
  int d = 2;
  int d1 = 1;
  double B = 6.0;  // calibrated mode only
  double C = 1.0;
  double c = 1.0;
  double K = 4.0;
  double safety = 0.9;
  ChainingOptions chaining;
  WalkParams walk;
  std::size_t n0 = 8;
  bool reuse_hierarchy = false;
  // Check every set's per-round movement against its chain bound.
  bool verify_rounds = true;
};

struct RoundTrace {
  int round = 0;
  std::size_t live_n = 0;
  std::size_t n_pad = 0;
  int k = 0;
  std::vector<std::size_t> classes;  // sets per class 0..k
  LayerCounts layer_counts;
  double A = 0;
  double budget_total = 0;
  double lm_total = 0;
  std::size_t rows = 0;
  std::uint64_t walk_steps = 0;
  int retries = 0;
  std::size_t colored = 0;
  double max_row_violation = 0;
  // chain_bound per layer class, 0 for absent classes.
  std::vector<double> chain_bound;
  std::vector<std::uint32_t> live;  // ground ids
  std::vector<double> movement;     // x_after - x_before on `live`
};

struct FullColoringResult {
  Coloring chi;
  std::vector<RoundTrace> rounds;
  std::vector<std::uint32_t> leftovers;
  std::vector<double> x;  // fractional state before the leftovers were signed
};

FullColoringResult full_coloring(const SetSystem& sys, const PipelineParams& params, std::uint64_t seed);

struct RoundBoundCheck {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_excess = 0;  // max of |movement| - bound
};

// |<movement_r, S>| <= chain_bound_r(i) + (2(k-i+1)+1) / N^c for every set
// and round, with i the class of S among the live elements.
RoundBoundCheck check_round_bounds(const SetSystem& sys, const FullColoringResult& res, double c = 1.0);

// One JSON object per round.
std::string trace_jsonl(const FullColoringResult& res);

Coloring random_coloring(std::size_t n, std::uint64_t seed);

struct BruteForceResult {
  std::uint64_t value = 0;
  Coloring witness;
};

constexpr std::size_t kBruteForceLimit = 24;

// Exact discrepancy by enumerating 2^(n-1) colorings.
BruteForceResult brute_force_min_disc(const SetSystem& sys);

struct SensitiveRow {
  std::size_t set_id = 0;
  std::size_t size = 0;
  int class_i = 0;
  std::int64_t chi = 0;
  double envelope = 0;
  double ratio = 0;
};

struct SensitiveTable {
  std::vector<SensitiveRow> rows;
  double max_ratio = 0;
  std::vector<std::int64_t> class_max_chi;  // per class 0..k, max |chi|
  std::vector<std::size_t> class_count;
};

// envelope = |S|^(1/2 - d1/(2d)) * n^((d1-1)/(2d)); ratio = |chi| / envelope.
SensitiveTable evaluate_sensitive(const SetSystem& sys, const Coloring& chi, int d, int d1);

}  // namespace lowdisc
