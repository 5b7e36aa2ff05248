// lowdisc command-line driver.
//
// Exit codes: 0 ok, 1 a hard check failed, 2 usage or invalid input,
// 3 I/O error, 4 pipeline error (generation, precondition, walk failure,
// unsupported request), 5 internal consistency error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lowdisc/approx.hpp"
#include "lowdisc/bench.hpp"
#include "lowdisc/chaining.hpp"
#include "lowdisc/coloring.hpp"
#include "lowdisc/errors.hpp"
#include "lowdisc/generators.hpp"
#include "lowdisc/io.hpp"
#include "lowdisc/packing.hpp"
#include "lowdisc/report.hpp"
#include "lowdisc/rng.hpp"
#include "lowdisc/version.hpp"

using namespace lowdisc;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kPipeline = 4, kConsistency = 5;

struct InstanceArgs {
  std::string input;
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string dist;

  void add(CLI::App* app, bool need_seed_flag = true) {
    app->add_option("--input", input, "Set system file (JSON or binary)");
    app->add_option("--kind", kind, "Instance kind: intervals, halfplanes, halfspaces3d, abstract");
    app->add_option("--n", n, "Ground set size");
    if (need_seed_flag) app->add_option("--seed", seed, "Seed");
    app->add_option("--dist", dist, "Point distribution: uniform-cube, uniform-sphere, gaussian, convex-position");
  }

  json config() const { return {{"input", input}, {"kind", kind}, {"n", n}, {"seed", seed}, {"dist", dist}}; }

  InstanceOptions options() const {
    InstanceOptions o;
    if (!dist.empty()) {
      auto d = parse_point_dist(dist);
      if (!d) throw DomainError("unknown --dist " + dist);
      o.dist = *d;
    }
    return o;
  }

  InstanceKind parsed_kind() const {
    auto k = parse_instance_kind(kind);
    if (!k) throw DomainError("unknown --kind " + kind);
    return *k;
  }

  Instance load() const {
    if (!input.empty()) {
      Instance inst;
      inst.sys = load_set_system(input);
      inst.seed = seed;
      return inst;
    }
    if (kind.empty() || n == 0) throw DomainError("need --input or both --kind and --n");
    return make_instance(parsed_kind(), n, seed, options());
  }
};

struct PipelineArgs {
  std::string mode = "calibrated";
  int d = 0, d1 = 0;
  double B = 6, K = 4, c = 1, gamma = 0;
  std::size_t n0 = 8;
  bool reuse = false;
  std::string order = "input";

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "Schedule mode: theory or calibrated");
    app->add_option("--d", d, "Primal shatter dimension (default from --kind, else 2)");
    app->add_option("--d1", d1, "Size-sensitive exponent (default from --kind, else 1)");
    app->add_option("--B", B, "Center offset of the target schedule (calibrated mode)");
    app->add_option("--K", K, "Anchor size constant");
    app->add_option("--c", c, "Slack exponent of the partial coloring contract");
    app->add_option("--gamma", gamma, "Walk step size (0 = default)");
    app->add_option("--n0", n0, "Leftover threshold");
    app->add_option("--order", order, "Packing scan order: input, by-size, seeded-shuffle");
    app->add_flag("--reuse-hierarchy", reuse, "Reuse the first round's rows (experimental)");
  }

  void resolve_dims(const std::string& kind) {
    if (auto k = parse_instance_kind(kind)) {
      auto [dd, dd1] = shatter_exponents(*k);
      if (d == 0) d = dd;
      if (d1 == 0) d1 = dd1;
    }
    if (d == 0) d = 2;
    if (d1 == 0) d1 = 1;
  }

  json config() const {
    return {{"mode", mode}, {"d", d},   {"d1", d1}, {"B", B},         {"K", K},
            {"c", c},       {"gamma", gamma}, {"n0", n0}, {"reuse", reuse}, {"order", order}};
  }

  PipelineParams params() const {
    PipelineParams pp;
    auto m = parse_schedule_mode(mode);
    if (!m) throw DomainError("unknown --mode " + mode);
    auto o = parse_pack_order(order);
    if (!o) throw DomainError("unknown --order " + order);
    pp.mode = *m;
    pp.d = d;
    pp.d1 = d1;
    pp.B = B;
    pp.K = K;
    pp.c = c;
    pp.walk.gamma = gamma;
    pp.n0 = n0;
    pp.reuse_hierarchy = reuse;
    pp.chaining.order = *o;
    return pp;
  }
};

std::string path_join(const std::string& dir, const std::string& name) {
  return dir.empty() || dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v == 0) throw DomainError("bad list entry '" + tok + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw DomainError("empty list");
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void write_log(const std::string& path, const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  write_file(path, s);
}

// ---- gen ----

int cmd_gen(const InstanceArgs& ia, const std::string& out, const std::string& points_out) {
  if (ia.kind.empty() || ia.n == 0) throw DomainError("gen needs --kind and --n");
  const Instance inst = make_instance(ia.parsed_kind(), ia.n, ia.seed, ia.options());
  json cfg = {{"command", "gen"}, {"instance", ia.config()}};
  const std::string hash = config_hash(cfg);
  if (out.size() > 4 && out.substr(out.size() - 4) == ".bin") {
    write_file(out, to_binary(inst.sys));
  } else {
    json j = json::parse(to_json(inst.sys));
    j["meta"] = meta_block(hash);
    j["meta"]["kind"] = ia.kind;
    j["meta"]["seed"] = ia.seed;
    j["meta"]["sampled"] = inst.sampled;
    write_file(out, j.dump() + "\n");
  }
  if (!points_out.empty()) {
    if (!inst.points) throw DomainError("--points-out: this kind has no point set");
    write_file(points_out, to_json(*inst.points));
  }
  std::cout << "wrote " << inst.sys.size() << " sets over " << inst.sys.n() << " elements to " << out << "\n";
  return kOk;
}

// ---- pack ----

int cmd_pack(const InstanceArgs& ia, std::uint64_t delta, const std::string& order_s, bool sweep, int d,
             const std::string& out) {
  const Instance inst = ia.load();
  auto order = parse_pack_order(order_s);
  if (!order) throw DomainError("unknown --order " + order_s);
  json cfg = {{"command", "pack"}, {"instance", ia.config()}, {"delta", delta}, {"order", order_s}, {"sweep", sweep},
              {"d", d}};
  const std::string hash = config_hash(cfg);
  json j = {{"meta", meta_block(hash)}};
  bool ok = true;
  auto one = [&](std::uint64_t dl) {
    const Packing p = greedy_packing(inst.sys, dl, *order, ia.seed);
    const bool sep = verify_separated(p, inst.sys), max = verify_maximal(p, inst.sys);
    ok = ok && sep && max;
    return json{{"delta", dl}, {"size", p.members.size()}, {"members", p.members}, {"separated", sep},
                {"maximal", max}};
  };
  if (sweep) {
    const auto deltas = halving_deltas(inst.sys.n(), 1);
    json packs = json::array();
    for (auto dl : deltas) packs.push_back(one(dl));
    j["packings"] = packs;
    const auto rep = packing_bound_report(inst.sys, deltas, d, *order, ia.seed);
    j["fit"] = {{"slope", rep.fit.slope}, {"intercept", rep.fit.intercept}, {"r2", rep.fit.r2},
                {"points", rep.fit.points}};
  } else {
    if (delta == 0) throw DomainError("pack needs --delta or --sweep");
    j["packing"] = one(delta);
  }
  j["pass"] = ok;
  write_file(out, j.dump(2) + "\n");
  std::cout << (ok ? "packing checks passed" : "packing checks FAILED") << "\n";
  return ok ? kOk : kCheckFailed;
}

// ---- color ----

int cmd_color(InstanceArgs ia, PipelineArgs pa, const std::string& out) {
  pa.resolve_dims(ia.kind);
  const Instance inst = ia.load();
  const PipelineParams pp = pa.params();
  json cfg = {{"command", "color"}, {"instance", ia.config()}, {"pipeline", pa.config()}};
  const std::string hash = config_hash(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const FullColoringResult res = full_coloring(inst.sys, pp, ia.seed);
  const double wall = seconds_since(t0);

  const bool total = res.chi.kind() == ColoringKind::full;
  const auto disc = discrepancy(inst.sys, res.chi);
  const auto table = evaluate_sensitive(inst.sys, res.chi, pa.d, pa.d1);
  write_file(path_join(out, "coloring.txt"),
             coloring_to_text(res.chi, {"lowdisc " + std::string(kVersion), "config_hash " + hash,
                                        "seed " + std::to_string(ia.seed)}));
  write_file(path_join(out, "trace.jsonl"), trace_jsonl(res));
  CsvTable csv(kResultsColumns);
  add_result_rows(csv, ia.kind.empty() ? "input" : ia.kind, inst.sys.n(), ia.seed, table);
  write_file(path_join(out, "results.csv"), csv.str());
  json summary = {{"meta", meta_block(hash)},
                  {"n", inst.sys.n()},
                  {"m", inst.sys.size()},
                  {"rounds", res.rounds.size()},
                  {"leftovers", res.leftovers.size()},
                  {"total", total},
                  {"discrepancy", disc.max},
                  {"argmax", disc.argmax},
                  {"max_ratio", table.max_ratio}};
  write_file(path_join(out, "summary.json"), summary.dump(2) + "\n");
  write_log(path_join(out, "color.log"), {"wall_seconds " + format_double(wall)});
  std::cout << "discrepancy " << disc.max << " after " << res.rounds.size() << " rounds\n";
  return total ? kOk : kCheckFailed;
}

// ---- approx ----

int cmd_approx(InstanceArgs ia, PipelineArgs pa, const std::string& eps_s, const std::string& delta_s, double q,
               std::size_t samples, double sample_c, const std::string& out) {
  pa.resolve_dims(ia.kind);
  auto eps = parse_rational(eps_s), delta = parse_rational(delta_s);
  if (!eps || !delta) throw DomainError("--eps and --delta must be numbers or p/q fractions");
  const PipelineParams pp = pa.params();
  json cfg = {{"command", "approx"}, {"instance", ia.config()}, {"pipeline", pa.config()}, {"eps", eps_s},
              {"delta", delta_s}, {"q", q}, {"samples", samples}, {"sample_c", sample_c}};
  const std::string hash = config_hash(cfg);

  std::unique_ptr<RangeFamily> fam;
  Instance inst;
  if (ia.input.empty() && ia.kind == "intervals") {
    if (ia.n == 0) throw DomainError("approx needs --n");
    inst.points = gen_points(ia.n, 1, ia.options().dist, ia.seed);
    fam = std::make_unique<IntervalFamily>(*inst.points);
  } else {
    inst = ia.load();
    fam = std::make_unique<ExplicitFamily>(inst.sys);
  }
  HalvingParams hp;
  hp.eps = *eps;
  hp.delta = *delta;
  hp.d = pa.d;
  hp.d1 = pa.d1;
  const auto t0 = std::chrono::steady_clock::now();
  const HalvingResult hr = relative_approx_by_halving(*fam, hp, pp, ia.seed);
  const RelativeApproxCheck chk = verify_relative_approx(*fam, hr.z, *eps, *delta);
  const double wall = seconds_since(t0);
  json j = json::parse(halving_trace_json(hr, &chk));
  j["meta"] = meta_block(hash);
  j["sets_checked"] = chk.checked;

  CsvTable csv({"seed", "size", "pass", "worst_margin"});
  std::size_t passed = 0;
  for (std::size_t s = 1; s <= samples; ++s) {
    const BitVec z = random_sample_approx(fam->n(), eps->value(), delta->value(), q, pa.d,
                                          derive_seed(ia.seed, 0x5e, s), sample_c);
    const auto c = verify_relative_approx(*fam, z, *eps, *delta);
    passed += c.pass;
    csv.add({std::to_string(s), std::to_string(z.count()), c.pass ? "1" : "0", format_double(c.worst_margin)});
  }
  if (samples) {
    j["sampling"] = {{"runs", samples}, {"passed", passed},
                     {"size", relative_sample_size(eps->value(), delta->value(), q, pa.d, sample_c)}};
    write_file(path_join(out, "sampling.csv"), csv.str());
  }
  write_file(path_join(out, "halving.json"), j.dump(2) + "\n");
  std::string z;
  for (auto e : hr.z.indices()) z += std::to_string(e) + "\n";
  write_file(path_join(out, "z.txt"), z);
  write_log(path_join(out, "approx.log"), {"wall_seconds " + format_double(wall)});
  std::cout << "|Z| = " << hr.z.count() << ", relative approximation " << (chk.pass ? "verified" : "FAILED") << "\n";
  return chk.pass ? kOk : kCheckFailed;
}

// ---- bench ----

int cmd_bench_scaling(InstanceArgs ia, PipelineArgs pa, const std::string& ns, std::size_t seeds, bool require_pass,
                      const std::string& out) {
  pa.resolve_dims(ia.kind);
  ScalingConfig cfg;
  cfg.kind = ia.parsed_kind();
  cfg.ns = parse_list(ns);
  for (std::size_t s = 1; s <= seeds; ++s) cfg.seeds.push_back(s);
  cfg.instance = ia.options();
  cfg.pipeline = pa.params();
  cfg.d = pa.d;
  cfg.d1 = pa.d1;
  cfg.polylog_power = 1.5 + 1.0 / (2.0 * pa.d);
  json jc = {{"command", "bench scaling"}, {"kind", ia.kind}, {"dist", ia.dist}, {"pipeline", pa.config()}, {"ns", ns},
             {"seeds", seeds}};
  const std::string hash = config_hash(jc);
  cfg.stream_key = fnv1a64(hash);
  const auto t0 = std::chrono::steady_clock::now();
  const ScalingReport rep = run_scaling(cfg);
  const double wall = seconds_since(t0);

  CsvTable pipe(kResultsColumns), rnd(kResultsColumns);
  std::vector<std::string> log = {"wall_seconds " + format_double(wall)};
  json runs = json::array();
  for (const auto& r : rep.runs) {
    add_result_rows(pipe, ia.kind, r.n, r.seed, r.pipeline);
    add_result_rows(rnd, ia.kind, r.n, r.seed, r.random);
    runs.push_back({{"n", r.n}, {"seed", r.seed}, {"m", r.m}, {"rounds", r.rounds}, {"retries", r.retries},
                    {"disc_pipeline", r.disc_pipeline}, {"disc_random", r.disc_random}});
    log.push_back("n " + std::to_string(r.n) + " seed " + std::to_string(r.seed) + " wall_seconds " +
                  format_double(r.wall_seconds));
  }
  auto fit_json = [](const FitResult& f) {
    return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points", f.points},
                {"expected", f.expected}, {"tolerance", f.tolerance}, {"pass", f.pass}};
  };
  json j = {{"meta", meta_block(hash)},        {"runs", runs},
            {"polylog_power", cfg.polylog_power}, {"pipeline_fit", fit_json(rep.pipeline_fit)},
            {"random_fit", fit_json(rep.random_fit)}, {"random_min_slope", cfg.random_min_slope}};
  write_file(path_join(out, "results.csv"), pipe.str());
  write_file(path_join(out, "results_random.csv"), rnd.str());
  write_file(path_join(out, "fit.json"), j.dump(2) + "\n");
  SvgSeries sp{"pipeline", {}, "#1f77b4", false}, sr{"random", {}, "#d62728", false};
  for (const auto& p : rep.pipeline_points) sp.points.push_back({p.size_mid, p.max_chi});
  for (const auto& p : rep.random_points) sr.points.push_back({p.size_mid, p.max_chi});
  write_file(path_join(out, "scaling.svg"),
             svg_plot("max |chi| per size class", "class size", "max |chi| / log^p n", {sp, sr}, true, true));
  write_log(path_join(out, "scaling.log"), log);
  std::cout << "pipeline slope " << rep.pipeline_fit.slope << " (expected " << rep.pipeline_fit.expected << " +- "
            << rep.pipeline_fit.tolerance << "), random slope " << rep.random_fit.slope << "\n";
  const bool pass = rep.pipeline_fit.pass && rep.random_fit.pass;
  return require_pass && !pass ? kCheckFailed : kOk;
}

int cmd_bench_baselines(InstanceArgs ia, PipelineArgs pa, std::size_t seeds, const std::string& out) {
  pa.resolve_dims(ia.kind);
  const Instance inst = ia.load();
  std::vector<std::uint64_t> sv;
  for (std::size_t s = 1; s <= seeds; ++s) sv.push_back(s);
  json jc = {{"command", "bench baselines"}, {"instance", ia.config()}, {"pipeline", pa.config()}, {"seeds", seeds}};
  const std::string hash = config_hash(jc);
  const auto rows = compare_baselines(inst.sys, sv, pa.params(), pa.d, pa.d1, fnv1a64(hash));
  CsvTable csv({"method", "seed", "max_disc", "max_ratio"});
  std::vector<std::string> log;
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& r : rows) {
    csv.add({r.method, std::to_string(r.seed), std::to_string(r.max_disc), format_double(r.max_ratio)});
    log.push_back(r.method + " seed " + std::to_string(r.seed) + " wall_seconds " + format_double(r.wall_seconds));
    bars.push_back({r.method + " " + std::to_string(r.seed), r.max_ratio});
  }
  write_file(path_join(out, "baselines.csv"), "# config_hash " + hash + " version " + kVersion + "\n" + csv.str());
  write_file(path_join(out, "baselines.svg"), svg_bars("max sensitive ratio", bars));
  write_log(path_join(out, "baselines.log"), log);
  std::cout << "wrote " << rows.size() << " baseline rows\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lowdisc: size-sensitive discrepancy toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string out, points_out;
  InstanceArgs ia;
  PipelineArgs pa;

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  ia.add(gen);
  gen->add_option("--out", out, "Output file (.json or .bin)");
  gen->add_option("--points-out", points_out, "Also write the point set");

  auto* pack = app.add_subcommand("pack", "Greedy delta-packing with checks");
  std::uint64_t delta = 0;
  std::string order = "input";
  bool sweep = false;
  int pack_d = 2;
  ia.add(pack);
  pack->add_option("--delta", delta, "Separation (distance must exceed it)");
  pack->add_option("--order", order, "Scan order: input, by-size, seeded-shuffle");
  pack->add_flag("--sweep", sweep, "Pack at n/2, n/4, ..., 1 and fit the size exponent");
  pack->add_option("--d", pack_d, "Dimension for the bound report");
  pack->add_option("--out", out, "Output JSON file");

  auto* color = app.add_subcommand("color", "Full low-discrepancy coloring");
  ia.add(color);
  pa.add(color);
  color->add_option("--out", out, "Output directory");

  auto* approx = app.add_subcommand("approx", "Relative approximation by halving");
  std::string eps_s = "1/16", delta_s = "1/4";
  double q = 0.1, sample_c = 1.0;
  std::size_t samples = 0;
  ia.add(approx);
  pa.add(approx);
  approx->add_option("--eps", eps_s, "epsilon (decimal or p/q)");
  approx->add_option("--delta", delta_s, "relative error (decimal or p/q)");
  approx->add_option("--q", q, "Failure probability for the sampling baseline");
  approx->add_option("--samples", samples, "Number of random-sample baselines to verify");
  approx->add_option("--sample-c", sample_c, "Constant of the random-sample size");
  approx->add_option("--out", out, "Output directory");

  auto* bench = app.add_subcommand("bench", "Experiments");
  bench->require_subcommand(1);
  auto* scaling = bench->add_subcommand("scaling", "Size-exponent fit against a random baseline");
  std::string ns;
  std::size_t seeds = 5;
  bool require_pass = false;
  scaling->add_option("--kind", ia.kind, "Instance kind")->required();
  scaling->add_option("--n", ns, "Comma separated ground sizes")->required();
  scaling->add_option("--dist", ia.dist, "Point distribution");
  pa.add(scaling);
  scaling->add_option("--seeds", seeds, "Seeds 1..S");
  scaling->add_flag("--require-pass", require_pass, "Exit 1 when a fit misses its tolerance");
  scaling->add_option("--out", out, "Output directory");
  auto* baselines = bench->add_subcommand("baselines", "Pipeline against random coloring");
  ia.add(baselines, false);
  baselines->add_option("--seed", ia.seed, "Instance seed");
  pa.add(baselines);
  baselines->add_option("--seeds", seeds, "Seeds 1..S");
  baselines->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (out.empty()) out = *gen ? "instance.json" : *pack ? "packing.json" : "out";
  try {
    if (*gen) return cmd_gen(ia, out, points_out);
    if (*pack) return cmd_pack(ia, delta, order, sweep, pack_d, out);
    if (*color) return cmd_color(ia, pa, out);
    if (*approx) return cmd_approx(ia, pa, eps_s, delta_s, q, samples, sample_c, out);
    if (*scaling) return cmd_bench_scaling(ia, pa, ns, seeds, require_pass, out);
    if (*baselines) return cmd_bench_baselines(ia, pa, seeds, out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal consistency error: " << e.what() << "\n";
    return kConsistency;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipeline;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipeline;
  } catch (const WalkFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipeline;
  } catch (const UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipeline;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kConsistency;
  }
  return kUsage;
}
