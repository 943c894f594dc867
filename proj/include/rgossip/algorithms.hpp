#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rgossip/adversary.hpp"
#include "rgossip/analysis.hpp"
#include "rgossip/core.hpp"
#include "rgossip/engine.hpp"
#include "rgossip/metrics.hpp"

namespace rgossip {

// Median-of-three over the delivered values; the puller's own value does not
// participate.
struct Median3Rule {
  static constexpr int max_pulls = 3;
  int pulls(int, int, NodeId) const { return 3; }
  double combine(double, const double* d, int, int, NodeId) const {
    const double a = d[0], b = d[1], c = d[2];
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
};

// Iteration i: with probability delta_seq[i] pull two and keep the min (or
// max), otherwise pull one and copy it. Coins are per node per iteration.
struct QuantileShiftRule {
  static constexpr int max_pulls = 2;
  uint64_t seed = 0;
  const std::vector<double>* delta_seq = nullptr;
  bool take_min = true;

  int pulls(int round_global, int round_local, NodeId v) const {
    const double delta = (*delta_seq)[size_t(round_local)];
    if (delta >= 1.0) return 2;
    const double u = u01(derive_stream(seed, StreamDomain::coin, uint64_t(round_global), v, 0));
    return u < delta ? 2 : 1;
  }

  double combine(double, const double* d, int k, int, NodeId) const {
    if (k == 1) return d[0];
    return take_min ? std::min(d[0], d[1]) : std::max(d[0], d[1]);
  }
};

// Pull two, clip each to [0,M], average them; own value does not participate.
struct MeanPullRule {
  static constexpr int max_pulls = 2;
  double m_bound = 1.0;
  int pulls(int, int, NodeId) const { return 2; }
  double combine(double, const double* d, int, int, NodeId) const {
    return (std::clamp(d[0], 0.0, m_bound) + std::clamp(d[1], 0.0, m_bound)) * 0.5;
  }
};

struct PhaseInfo {
  std::string name;
  int engine_rounds = 0;
  bool operator==(const PhaseInfo&) const = default;
};

struct AlgorithmRun {
  SimConfig config;
  std::optional<MedianSchedule> median_sched;      // run_median, and the composed stage
  std::optional<QuantileSchedule> quantile_sched;  // shift stage
  std::optional<MeanSchedule> mean_sched;
  std::vector<PhaseInfo> phases;
  int algorithm_rounds = 0;   // protocol counting: iterations plus samples
  int engine_rounds = 0;      // simulator rounds actually executed
  uint64_t pull_rounds = 0;   // worst-case per-node pull total
  std::vector<double> initial;
  std::vector<double> output;
  std::vector<RoundTrace> traces;
  std::vector<int> phase_boundaries;
  uint64_t budget = 0;
  bool off_spec = false;
  bool phase2_skipped_infeasible = false;
  EvalMode mode = EvalMode::median;
  int phase1_end = 0;
  double eta = 0.0;
  bool direction_min = true;
  EvalReport eval;
};

struct RunOptions {
  TraceOptions trace;
  // Build per-round rank summaries (median, L/M/H sizes) when n is under the
  // trace threshold. Costs an n log n pass per round.
  bool collect_rank_stats = true;
  // Test seam, forwarded to the engine.
  std::function<NodeId(int round, NodeId node, int draw)> partner_override;
};

AlgorithmRun run_median(const SimConfig& cfg, Adversary& adv, const RunOptions& opts = {});
AlgorithmRun run_quantile_shift(const SimConfig& cfg, Adversary& adv, const RunOptions& opts = {});
AlgorithmRun run_quantile_full(const SimConfig& cfg, Adversary& adv, const RunOptions& opts = {});
AlgorithmRun run_mean(const SimConfig& cfg, Adversary& adv, const RunOptions& opts = {});

// Dispatch on cfg.algorithm; quantile runs the full composition.
AlgorithmRun run_algorithm(const SimConfig& cfg, Adversary& adv, const RunOptions& opts = {});

EvalReport evaluate_run(const AlgorithmRun& run);

std::string algorithm_run_to_json(const AlgorithmRun& run);

} // namespace rgossip
