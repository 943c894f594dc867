// Command line front end: sweep execution, schedule prediction, the capture
// lower-bound experiment, the acceptance gate, and single-run replay.
//
// Exit codes: 0 everything executed, 1 hard error (bad input, failed run,
// unwritable output), 2 acceptance failure under verify.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rgossip/acceptance.hpp"
#include "rgossip/analysis.hpp"
#include "rgossip/harness.hpp"

namespace {

using nlohmann::json;
using namespace rgossip;

double need_num(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number())
    throw std::invalid_argument(std::string("query: missing numeric field '") + field + "'");
  return j.at(field).get<double>();
}

uint64_t need_u64(const json& j, const char* field) {
  double v = need_num(j, field);
  if (v < 0 || v != std::floor(v))
    throw std::invalid_argument(std::string("query: field '") + field +
                                "' must be a non-negative integer");
  return uint64_t(v);
}

int cmd_predict(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "predict: cannot open " << path << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  json q = json::parse(ss.str());
  const std::string op = q.contains("op") ? q.at("op").get<std::string>() : "";
  if (op == "median_schedule") {
    auto s = median_schedule(need_u64(q, "n"), need_num(q, "epsilon"), need_num(q, "beta"),
                             need_num(q, "gamma"));
    std::cout << median_schedule_to_json(s) << "\n";
  } else if (op == "quantile_schedule") {
    auto s = quantile_schedule(need_u64(q, "n"), need_num(q, "phi"), need_num(q, "epsilon"),
                               need_num(q, "beta"));
    std::cout << quantile_schedule_to_json(s) << "\n";
  } else if (op == "mean_schedule") {
    auto s = mean_schedule(need_u64(q, "n"), need_num(q, "epsilon"), need_num(q, "beta"),
                           need_num(q, "gamma"));
    std::cout << mean_schedule_to_json(s) << "\n";
  } else if (op == "lower_bound_direct") {
    json out{{"op", op}, {"value", lower_bound_direct(need_num(q, "beta"), need_num(q, "gamma"))}};
    std::cout << out.dump() << "\n";
  } else if (op == "lower_bound_spread") {
    json out{{"op", op},
             {"value", lower_bound_spread(need_num(q, "epsilon"), need_num(q, "gamma"))}};
    std::cout << out.dump() << "\n";
  } else if (op == "binom_tail") {
    json out{{"op", op},
             {"value", binom_tail(int(need_u64(q, "n")), int(need_u64(q, "k")), need_num(q, "p"))}};
    std::cout << out.dump() << "\n";
  } else if (op == "l_sequence") {
    auto values = l_sequence(need_num(q, "epsilon"), need_num(q, "beta"), int(need_u64(q, "t")));
    json out{{"op", op}, {"values", values}};
    std::cout << out.dump() << "\n";
  } else {
    std::cerr << "predict: unknown op '" << op
              << "' (median_schedule, quantile_schedule, mean_schedule, lower_bound_direct, "
                 "lower_bound_spread, binom_tail, l_sequence)\n";
    return 1;
  }
  return 0;
}

void apply_output_flags(ExperimentPlan& plan, const std::string& out_dir,
                        const std::string& format) {
  if (!out_dir.empty()) plan.output.dir = out_dir;
  if (format == "csv") {
    plan.output.csv = true;
    plan.output.jsonl = false;
  } else if (format == "jsonl") {
    plan.output.csv = false;
    plan.output.jsonl = true;
  } else if (format == "both") {
    plan.output.csv = true;
    plan.output.jsonl = true;
  }
}

TraceOptions::Level parse_trace_level(const std::string& level) {
  return level == "edges" ? TraceOptions::Level::edges : TraceOptions::Level::summary;
}

int cmd_run(const std::string& plan_path, const std::string& out_dir, const std::string& format,
            int parallel, const std::string& trace_level) {
  ExperimentPlan plan = load_plan(plan_path);
  apply_output_flags(plan, out_dir, format);

  RunPlanOptions opts;
  opts.parallel = parallel;
  opts.trace.level = parse_trace_level(trace_level);
  opts.on_row = [](const ResultRow& row) {
    std::cerr << row.key << ' ' << row.status;
    if (row.status == "ok")
      std::cerr << " fraction=" << row.fraction_incorrect << " ("
                << row.wall_seconds << " s)";
    else if (!row.reason.empty())
      std::cerr << " " << row.reason;
    std::cerr << "\n";
  };

  PlanResult result = run_plan(plan, opts);
  auto written = emit_results(result, plan.output);

  for (const auto& agg : result.aggregates) {
    std::cout << "point " << agg.point << ": ok " << agg.seeds_ok << "/" << agg.seeds_total;
    if (agg.seeds_ok > 0)
      std::cout << ", fraction max " << agg.fraction_max << " mean " << agg.fraction_mean
                << ", pass rate " << agg.pass_rate;
    if (agg.seeds_skipped > 0) std::cout << ", skipped (" << agg.skip_reason << ")";
    if (agg.seeds_error > 0) std::cout << ", errors " << agg.seeds_error;
    std::cout << "\n";
  }
  for (const auto& path : written) std::cout << "wrote " << path << "\n";

  for (const auto& row : result.rows)
    if (row.status == "error") {
      std::cerr << "run: " << row.key << " failed: " << row.reason << "\n";
      return 1;
    }
  return 0;
}

int cmd_lowerbound(uint64_t n, double beta, double gamma, int rounds, int seed_count,
                   bool fresh) {
  std::vector<uint64_t> seeds;
  for (int s = 1; s <= seed_count; ++s) seeds.push_back(uint64_t(s));
  LowerBoundResult r = lowerbound_experiment(n, beta, gamma, rounds, seeds, !fresh);
  std::cout << lowerbound_to_json(r) << "\n";
  if (r.trivial)
    std::cerr << "lowerbound: threshold " << r.threshold_rounds
              << " rounds is below 1, experiment skipped as trivial\n";
  if (r.vacuous)
    std::cerr << "lowerbound: rounds=0 captures every node vacuously; excluded from claims\n";
  return 0;
}

int cmd_verify(std::vector<int> ids, bool quiet) {
  if (ids.empty()) ids = acceptance_ids();
  std::ostream* progress = quiet ? nullptr : &std::cerr;
  int failures = 0;
  for (int id : ids) {
    CriterionResult r = run_acceptance_criterion(id, progress);
    std::cout << format_criterion_result(r) << std::endl;
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 2;
}

int cmd_replay(const std::string& key, const std::string& plan_path, const std::string& out_dir,
               const std::string& trace_level) {
  ExperimentPlan plan = load_plan(plan_path);
  size_t us = key.find("_s");
  if (key.empty() || key[0] != 'p' || us == std::string::npos)
    throw std::invalid_argument("replay: row key must look like p<point>_s<seed>");
  int point = std::stoi(key.substr(1, us - 1));
  uint64_t seed = std::stoull(key.substr(us + 2));

  auto points = expand_sweep(plan);
  if (point < 0 || size_t(point) >= points.size())
    throw std::invalid_argument("replay: plan has " + std::to_string(points.size()) +
                                " sweep points, no point " + std::to_string(point));
  const SweepPoint& pt = points[size_t(point)];
  if (pt.skipped) {
    std::cerr << "replay: point " << point << " is skipped: " << pt.skip_reason << "\n";
    return 1;
  }

  SimConfig cfg = pt.config;
  cfg.seed = seed;
  auto adv = make_adversary(pt.strategy, cfg);
  RunOptions opts;
  opts.trace.level = parse_trace_level(trace_level);
  AlgorithmRun run = run_algorithm(cfg, *adv, opts);
  std::cout << algorithm_run_to_json(run) << "\n";

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    auto path = std::filesystem::path(out_dir) / ("trace_" + key + ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("replay: cannot write " + path.string());
    write_trace_csv(out, run);
    std::cerr << "wrote " << path.string() << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic gossip aggregation simulator"};
  app.require_subcommand(1);

  std::string plan_path, out_dir, format = "both", trace_level = "summary", query_path, row_key;
  int parallel = 1;

  auto* run = app.add_subcommand("run", "Execute an experiment plan");
  run->add_option("plan", plan_path, "plan JSON file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the plan)");
  run->add_option("--format", format, "csv|jsonl|both")
      ->check(CLI::IsMember({"csv", "jsonl", "both"}));
  run->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--trace-level", trace_level, "summary|edges")
      ->check(CLI::IsMember({"summary", "edges"}));

  auto* predict = app.add_subcommand("predict", "Evaluate a schedule or bound query");
  predict->add_option("query", query_path, "query JSON file")->required();

  uint64_t lb_n = 100000;
  double lb_beta = 0.0, lb_gamma = 0.0;
  int lb_rounds = 0, lb_seeds = 20;
  bool lb_fresh = false;
  auto* lowerbound = app.add_subcommand("lowerbound", "Run the capture lower-bound experiment");
  lowerbound->add_option("--n", lb_n, "node count")->required();
  lowerbound->add_option("--beta", lb_beta, "adversary strength")->required();
  lowerbound->add_option("--gamma", lb_gamma, "failure fraction")->required();
  lowerbound->add_option("--rounds", lb_rounds, "pull rounds")->required();
  lowerbound->add_option("--seeds", lb_seeds, "seed count, expands to 1..N");
  lowerbound->add_flag("--fresh", lb_fresh, "sample a fresh corrupted set each round");

  std::vector<int> verify_ids;
  bool verify_quiet = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance gate");
  verify->add_option("--criterion", verify_ids, "criterion number (repeatable; default all)");
  verify->add_flag("--quiet", verify_quiet, "suppress per-seed progress");

  auto* replay = app.add_subcommand("replay", "Re-run one result row by its key");
  replay->add_option("key", row_key, "row key, e.g. p0_s1")->required();
  replay->add_option("--plan", plan_path, "plan JSON file")->required();
  replay->add_option("--out", out_dir, "directory for the trace CSV");
  replay->add_option("--trace-level", trace_level, "summary|edges")
      ->check(CLI::IsMember({"summary", "edges"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(plan_path, out_dir, format, parallel, trace_level);
    if (predict->parsed()) return cmd_predict(query_path);
    if (lowerbound->parsed())
      return cmd_lowerbound(lb_n, lb_beta, lb_gamma, lb_rounds, lb_seeds, lb_fresh);
    if (verify->parsed()) return cmd_verify(verify_ids, verify_quiet);
    if (replay->parsed()) return cmd_replay(row_key, plan_path, out_dir, trace_level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
