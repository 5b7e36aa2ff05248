#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowdisc/coloring.hpp"
#include "lowdisc/generators.hpp"

namespace lowdisc {

// Per-size-class maximum of |chi(S)|.
struct ClassPoint {
  std::size_t n = 0;
  int class_i = 0;
  double size_mid = 0;  // midpoint of [n/2^i, n/2^(i-1))
  double max_chi = 0;
  std::size_t sets = 0;
};

// Points of every class with at least one set; max_chi is divided by
// `divide_by`.
std::vector<ClassPoint> class_points(const SensitiveTable& t, std::size_t n, double divide_by = 1.0);

struct FitResult {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
  double expected = 0;
  double tolerance = 0;
  bool pass = false;
};

// log2-log2 least squares of max_chi on size_mid over points with at least
// `min_sets` sets and positive max_chi; pass iff |slope - expected| <= tolerance.
FitResult fit_size_exponent(const std::vector<ClassPoint>& pts, double expected, double tolerance,
                            std::size_t min_sets = 5);

// 1/2 - d1/(2d)
double expected_size_exponent(int d, int d1);

struct ScalingConfig {
  InstanceKind kind = InstanceKind::halfplanes;
  std::vector<std::size_t> ns;
  std::vector<std::uint64_t> seeds;
  InstanceOptions instance;
  PipelineParams pipeline;
  int d = 2;
  int d1 = 1;
  // max chi is divided by log2(n)^polylog_power before fitting.
  double polylog_power = 1.75;
  double tolerance = 0.15;
  double random_min_slope = 0.40;
  std::uint64_t stream_key = 0;  // mixed into coloring seeds
};

struct ScalingRun {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t m = 0;
  SensitiveTable pipeline;
  SensitiveTable random;
  std::uint64_t disc_pipeline = 0;
  std::uint64_t disc_random = 0;
  std::size_t rounds = 0;
  int retries = 0;
  double wall_seconds = 0;
};

struct ScalingReport {
  std::vector<ScalingRun> runs;
  std::vector<ClassPoint> pipeline_points;
  std::vector<ClassPoint> random_points;
  FitResult pipeline_fit;
  FitResult random_fit;  // expected 1/2, pass iff slope >= random_min_slope
};

// Runs (n, seed) instances in parallel.
ScalingReport run_scaling(const ScalingConfig& cfg);

struct BaselineRow {
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t max_disc = 0;
  double max_ratio = 0;
  double wall_seconds = 0;
};

// Full pipeline and random coloring on one system for every seed.
std::vector<BaselineRow> compare_baselines(const SetSystem& sys, const std::vector<std::uint64_t>& seeds,
                                           const PipelineParams& pp, int d, int d1, std::uint64_t stream_key = 0);

}  // namespace lowdisc
