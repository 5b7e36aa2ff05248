#include "lowdisc/bench.hpp"

#include <chrono>
#include <cmath>

#include "lowdisc/errors.hpp"
#include "lowdisc/fit.hpp"
#include "lowdisc/parallel.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {

std::vector<ClassPoint> class_points(const SensitiveTable& t, std::size_t n, double divide_by) {
  std::vector<ClassPoint> out;
  const double np = static_cast<double>(padded_size(n));
  for (std::size_t i = 0; i < t.class_count.size(); ++i) {
    if (t.class_count[i] == 0) continue;
    ClassPoint p;
    p.n = n;
    p.class_i = static_cast<int>(i);
    p.size_mid = i == 0 ? np : 0.75 * np / std::ldexp(1.0, static_cast<int>(i) - 1);
    p.max_chi = static_cast<double>(t.class_max_chi[i]) / divide_by;
    p.sets = t.class_count[i];
    out.push_back(p);
  }
  return out;
}

FitResult fit_size_exponent(const std::vector<ClassPoint>& pts, double expected, double tolerance,
                            std::size_t min_sets) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    if (p.sets < min_sets || !(p.max_chi > 0)) continue;
    x.push_back(p.size_mid);
    y.push_back(p.max_chi);
  }
  FitResult f;
  f.expected = expected;
  f.tolerance = tolerance;
  f.points = x.size();
  if (x.size() < 2) return f;
  const LinearFit lf = log2_fit(x, y);
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.r2 = lf.r2;
  f.pass = std::fabs(f.slope - expected) <= tolerance;
  return f;
}

double expected_size_exponent(int d, int d1) { return 0.5 - static_cast<double>(d1) / (2.0 * d); }

ScalingReport run_scaling(const ScalingConfig& cfg) {
  if (cfg.ns.empty() || cfg.seeds.empty()) throw DomainError("run_scaling: need at least one n and one seed");
  ScalingReport rep;
  rep.runs.resize(cfg.ns.size() * cfg.seeds.size());
  parallel_for(rep.runs.size(), [&](std::size_t t) {
    ScalingRun& run = rep.runs[t];
    run.n = cfg.ns[t / cfg.seeds.size()];
    run.seed = cfg.seeds[t % cfg.seeds.size()];
    const auto start = std::chrono::steady_clock::now();
    const Instance inst = make_instance(cfg.kind, run.n, run.seed, cfg.instance);
    run.m = inst.sys.size();
    const std::uint64_t stream = derive_seed(cfg.stream_key, run.seed, run.n);
    const FullColoringResult fc = full_coloring(inst.sys, cfg.pipeline, stream);
    run.rounds = fc.rounds.size();
    for (const auto& r : fc.rounds) run.retries += r.retries;
    const Coloring rnd = random_coloring(run.n, derive_seed(stream, 0x7a));
    run.pipeline = evaluate_sensitive(inst.sys, fc.chi, cfg.d, cfg.d1);
    run.random = evaluate_sensitive(inst.sys, rnd, cfg.d, cfg.d1);
    run.disc_pipeline = discrepancy(inst.sys, fc.chi).max;
    run.disc_random = discrepancy(inst.sys, rnd).max;
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  // Pool the per-class maxima of every run.
  for (const auto& run : rep.runs) {
    const double div = std::pow(std::log2(static_cast<double>(run.n)), cfg.polylog_power);
    for (const auto& p : class_points(run.pipeline, run.n, div)) rep.pipeline_points.push_back(p);
    for (const auto& p : class_points(run.random, run.n, div)) rep.random_points.push_back(p);
  }
  rep.pipeline_fit = fit_size_exponent(rep.pipeline_points, expected_size_exponent(cfg.d, cfg.d1), cfg.tolerance);
  rep.random_fit = fit_size_exponent(rep.random_points, 0.5, 0.5 - cfg.random_min_slope);
  rep.random_fit.pass = rep.random_fit.points >= 2 && rep.random_fit.slope >= cfg.random_min_slope;
  return rep;
}

std::vector<BaselineRow> compare_baselines(const SetSystem& sys, const std::vector<std::uint64_t>& seeds,
                                           const PipelineParams& pp, int d, int d1, std::uint64_t stream_key) {
  std::vector<BaselineRow> rows(2 * seeds.size());
  parallel_for(seeds.size(), [&](std::size_t t) {
    const std::uint64_t stream = derive_seed(stream_key, seeds[t]);
    auto start = std::chrono::steady_clock::now();
    const Coloring rnd = random_coloring(sys.n(), derive_seed(stream, 0x7a));
    BaselineRow& r = rows[2 * t];
    r.method = "random";
    r.seed = seeds[t];
    r.max_disc = discrepancy(sys, rnd).max;
    r.max_ratio = evaluate_sensitive(sys, rnd, d, d1).max_ratio;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    start = std::chrono::steady_clock::now();
    const FullColoringResult fc = full_coloring(sys, pp, stream);
    BaselineRow& q = rows[2 * t + 1];
    q.method = "pipeline";
    q.seed = seeds[t];
    q.max_disc = discrepancy(sys, fc.chi).max;
    q.max_ratio = evaluate_sensitive(sys, fc.chi, d, d1).max_ratio;
    q.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return rows;
}

}  // namespace lowdisc
