// Experiment plans: a base config swept over parameter axes and seeds, run to
// result rows with per-point aggregates, persisted as CSV/JSONL. Also the
// direct lower-bound contact experiment and the per-round trace exporter.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rgossip/adversary.hpp"
#include "rgossip/algorithms.hpp"
#include "rgossip/core.hpp"

namespace rgossip {

// Swept axes. An empty axis keeps the base value; a non-empty one overrides
// it point by point. Points enumerate in nested order n, epsilon, beta,
// gamma, phi, strategy (strategy varies fastest).
struct SweepAxes {
  std::vector<uint64_t> n;
  std::vector<double> epsilon;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> phi;
  std::vector<StrategyDescriptor> strategies;
};

struct OutputSpec {
  std::string dir = "results";
  bool csv = true;
  bool jsonl = true;
};

struct ExperimentPlan {
  SimConfig base;
  StrategyDescriptor strategy;  // used when sweep.strategies is empty
  SweepAxes sweep;
  std::vector<uint64_t> seeds = {1};
  OutputSpec output;
};

// Plan JSON shape:
//   {"base": {config...},
//    "strategy": {descriptor...},              optional, default none
//    "sweep": {"n": [...], "epsilon": [...], "beta": [...], "gamma": [...],
//              "phi": [...], "strategies": [{...}, ...]},   all optional
//    "seeds": [1, 2, 3] | "seed_count": 20,    optional, default [1]
//    "output": {"dir": "results", "formats": ["csv", "jsonl"]}}  optional
// Unknown fields anywhere are errors naming the JSON path. "seeds" and
// "seed_count" are mutually exclusive; seed_count N expands to 1..N.
ExperimentPlan plan_from_json(const std::string& text);
ExperimentPlan load_plan(const std::string& path);
std::string plan_to_json(const ExperimentPlan& plan);

// One sweep point: the base config with axis values substituted. Points that
// fail hard validation are marked skipped and still appear in results, one
// row per seed, so a sweep never silently drops a corner.
struct SweepPoint {
  int index = 0;
  SimConfig config;  // seed left as base's; rows set their own
  StrategyDescriptor strategy;
  bool skipped = false;
  std::string skip_reason;
};

std::vector<SweepPoint> expand_sweep(const ExperimentPlan& plan);

// One (point, seed) outcome. wall_seconds is console-side information only;
// emit_results never writes it, so output files are byte-stable across runs.
// phi_end and psi_drift read the round the guarantee speaks about: for the
// mean algorithm that is the end of the averaging phase, for everything else
// the final values. theory_pass means every evaluator check passed.
struct ResultRow {
  int point = 0;
  uint64_t seed = 0;
  std::string key;     // "p<point>_s<seed>"
  std::string status;  // "ok" | "skipped" | "error"
  std::string reason;  // skip or error text, empty when ok
  SimConfig config;
  StrategyDescriptor strategy;
  double fraction_incorrect = 0.0;
  uint64_t incorrect_count = 0;
  int algorithm_rounds = 0;
  int engine_rounds = 0;
  uint64_t pull_rounds = 0;
  double phi_end = 0.0;
  double psi_drift = 0.0;
  bool theory_pass = false;
  std::vector<NamedCheck> checks;
  double wall_seconds = 0.0;
};

std::string row_key(int point, uint64_t seed);

// Per-point rollup over ok rows. Quantiles are nearest-rank on the sorted
// fraction_incorrect values; pass_rate counts theory_pass among ok rows.
struct PointAggregate {
  int point = 0;
  uint64_t seeds_total = 0;
  uint64_t seeds_ok = 0;
  uint64_t seeds_skipped = 0;
  uint64_t seeds_error = 0;
  double fraction_max = 0.0;
  double fraction_mean = 0.0;
  double fraction_p50 = 0.0;
  double fraction_p90 = 0.0;
  double pass_rate = 0.0;
  std::string skip_reason;  // set when the whole point was skipped
};

struct PlanResult {
  std::vector<SweepPoint> points;
  std::vector<ResultRow> rows;  // point-major, seed-minor order
  std::vector<PointAggregate> aggregates;
};

struct RunPlanOptions {
  int parallel = 1;
  TraceOptions trace;
  bool collect_rank_stats = true;
  // Called once per finished row, serialized by a mutex; for progress output.
  std::function<void(const ResultRow&)> on_row;
};

// Runs every (point, seed) pair. A row whose run throws is recorded with
// status "error" and the exception text; the sweep always completes. Rows
// come back in deterministic order regardless of parallelism.
PlanResult run_plan(const ExperimentPlan& plan, const RunPlanOptions& opts = {});

// Writes results.csv and/or results.jsonl plus summary.json under spec.dir,
// creating directories as needed. Returns the paths written. The CSV header:
//   point,seed,key,status,algorithm,strategy,n,epsilon,beta,gamma,phi,
//   m_bound,fraction_incorrect,incorrect_count,algorithm_rounds,
//   engine_rounds,pull_rounds,phi_end,psi_drift,theory_pass,reason
std::vector<std::string> emit_results(const PlanResult& result, const OutputSpec& spec);

std::string result_row_to_json(const ResultRow& row);
ResultRow result_row_from_json(const std::string& text);

// Round-by-round trace table for one run. Columns:
//   round,corrupted,phi,psi,l,m,h,min,median,max
// l/m/h/median are blank on rounds without rank summaries.
std::string trace_csv(const AlgorithmRun& run);
void write_trace_csv(std::ostream& out, const AlgorithmRun& run);

// Direct lower-bound contact experiment: each node pulls one uniform partner
// per round while an adversary corrupts a budget-sized set (fixed prefix when
// sticky, fresh sampled set otherwise); a node counts as captured when every
// pull it ever made landed in the corrupted set. fractions holds the captured
// share per seed.
//
// threshold_rounds is the analytic round count below which capture is
// expected to exceed gamma. When it is under 1 the experiment is trivial and
// skipped. rounds = 0 makes every node vacuously captured; the result is
// reported but flagged vacuous so no claim rests on it. beta = 0 is an error.
struct LowerBoundResult {
  uint64_t n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  int rounds = 0;
  bool sticky = true;
  double threshold_rounds = 0.0;
  bool trivial = false;
  bool vacuous = false;
  std::vector<uint64_t> seeds;
  std::vector<double> fractions;
  std::vector<uint8_t> exceeds_gamma;
  uint64_t exceed_count = 0;
  double fraction_mean = 0.0;
  double fraction_stderr = 0.0;
};

LowerBoundResult lowerbound_experiment(uint64_t n, double beta, double gamma, int rounds,
                                       const std::vector<uint64_t>& seeds, bool sticky = true);
std::string lowerbound_to_json(const LowerBoundResult& r);

} // namespace rgossip
