#include <charconv>
#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "lowdisc/bench.hpp"
#include "lowdisc/errors.hpp"
#include "lowdisc/fit.hpp"
#include "lowdisc/report.hpp"
#include "oracles.hpp"

using namespace lowdisc;

namespace {

std::vector<ClassPoint> synthetic(double (*chi)(double)) {
  std::vector<ClassPoint> pts;
  for (int i = 1; i <= 10; ++i) {
    ClassPoint p;
    p.n = 1024;
    p.class_i = i;
    p.size_mid = 0.75 * 1024 / std::ldexp(1.0, i - 1);
    p.max_chi = chi(p.size_mid);
    p.sets = 10;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("fit_size_exponent on exact power laws") {
  auto quarter = fit_size_exponent(synthetic([](double s) { return std::pow(s, 0.25); }), 0.25, 0.15);
  CHECK(std::fabs(quarter.slope - 0.25) <= 1e-9);
  CHECK(quarter.r2 == doctest::Approx(1.0));
  CHECK(quarter.pass);
  CHECK(quarter.points == 10);

  auto flat = fit_size_exponent(synthetic([](double) { return 3.0; }), 0.25, 0.15);
  CHECK(std::fabs(flat.slope) <= 1e-12);
  CHECK_FALSE(flat.pass);

  auto half = fit_size_exponent(synthetic([](double s) { return 2 * std::sqrt(s); }), 0.25, 0.15);
  CHECK(half.slope == doctest::Approx(0.5));
  CHECK_FALSE(half.pass);
}

TEST_CASE("fit filters thin and zero classes") {
  auto pts = synthetic([](double s) { return std::pow(s, 0.25); });
  pts[0].sets = 2;
  pts[0].max_chi = 1e6;
  pts[1].max_chi = 0;
  auto f = fit_size_exponent(pts, 0.25, 0.15);
  CHECK(f.points == 8);
  CHECK(f.slope == doctest::Approx(0.25));
  CHECK(fit_size_exponent({}, 0.25, 0.15).points == 0);
}

TEST_CASE("least squares agrees with the oracle") {
  std::vector<double> x{1, 2, 4, 7, 9}, y{2.1, 2.9, 5.2, 8.1, 9.7};
  auto f = least_squares(x, y);
  CHECK(f.slope == doctest::Approx(oracle::slope(x, y)));
  CHECK(log2_fit({2, 4, 8}, {3, 6, 12}).slope == doctest::Approx(1.0));
  CHECK_THROWS_AS(least_squares({1, 1}, {2, 3}), Error);
}

TEST_CASE("class points") {
  SensitiveTable t;
  t.class_count = {1, 0, 7};
  t.class_max_chi = {4, 0, 6};
  auto pts = class_points(t, 1000, 2.0);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].size_mid == 1024);
  CHECK(pts[1].size_mid == 384);
  CHECK(pts[1].max_chi == 3.0);
  CHECK(expected_size_exponent(2, 1) == 0.25);
  CHECK(expected_size_exponent(3, 3) == 0.0);
}

TEST_CASE("csv tables validate their shape") {
  CsvTable t({"a", "b"});
  t.add({"1", "x"});
  CHECK(t.str() == "a,b\n1,x\n");
  CHECK_THROWS_AS(t.add({"1"}), Error);
  CHECK_THROWS_AS(t.add({"1", "x,y"}), Error);
  CHECK_THROWS_AS(t.add({"1", "\"q\""}), Error);

  CsvTable r(kResultsColumns);
  SensitiveTable s;
  s.rows.push_back({0, 3, 2, -1, 1.3, 0.7});
  add_result_rows(r, "intervals", 16, 1, s);
  CHECK(r.str().rfind("kind,n,seed,set_id,set_size,class_i,chi,envelope,ratio\n", 0) == 0);
  CHECK(r.rows() == 1);
}

TEST_CASE("report helpers") {
  nlohmann::json a = {{"n", 5}, {"kind", "intervals"}};
  nlohmann::json b = {{"kind", "intervals"}, {"n", 5}};
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash({{"n", 6}, {"kind", "intervals"}}));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  for (double v : {0.1, 1.0 / 3, 1e-300, 12345.678, -2.5}) {
    const auto s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  auto meta = meta_block("abc");
  CHECK(meta["config_hash"] == "abc");
  CHECK(meta.contains("version"));
  auto svg = svg_plot("t", "x", "y", {{"s", {{1, 2}, {2, 4}, {0, 1}}}}, true, true);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg_bars("b", {{"random", 3.0}, {"pipeline", 2.0}}).find("pipeline") != std::string::npos);
}

TEST_CASE("scaling and baselines on a small instance") {
  ScalingConfig cfg;
  cfg.kind = InstanceKind::intervals;
  cfg.ns = {64, 128};
  cfg.seeds = {1, 2};
  auto a = run_scaling(cfg);
  auto b = run_scaling(cfg);
  CHECK(a.runs.size() == 4);
  CHECK(a.pipeline_points.size() == b.pipeline_points.size());
  for (std::size_t t = 0; t < a.runs.size(); ++t) {
    CHECK(a.runs[t].disc_pipeline == b.runs[t].disc_pipeline);
    CHECK(a.runs[t].disc_random == b.runs[t].disc_random);
  }
  CHECK(a.pipeline_fit.slope == b.pipeline_fit.slope);
  cfg.ns.clear();
  CHECK_THROWS_AS(run_scaling(cfg), DomainError);

  auto sys = make_instance(InstanceKind::intervals, 64, 1).sys;
  auto rows = compare_baselines(sys, {1, 2, 3}, {}, 2, 1);
  CHECK(rows.size() == 6);
  int random_rows = 0, pipeline_rows = 0;
  for (const auto& r : rows) {
    random_rows += r.method == "random";
    pipeline_rows += r.method == "pipeline";
    CHECK(r.wall_seconds > 0);
  }
  CHECK(random_rows == 3);
  CHECK(pipeline_rows == 3);
}
