#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgossip/core.hpp"
#include "rgossip/trace.hpp"

namespace rgossip {

struct RankBounds {
  int64_t below = 0;        // #{ x : x < v }
  int64_t at_or_below = 0;  // #{ x : x <= v }
  bool operator==(const RankBounds&) const = default;
};

// Counts of v against a sorted reference multiset.
RankBounds rank_bounds(double v, const std::vector<double>& sorted_reference);

// 1-based order-statistic window [lo, hi] for the quantile target:
// lo = ceil((phi-eps)*n), hi = floor((phi+eps)*n), with the products snapped
// to the nearest integer when within representation noise of one.
struct QuantileWindow {
  int64_t lo = 0;
  int64_t hi = 0;
  bool operator==(const QuantileWindow&) const = default;
};
QuantileWindow quantile_window(uint64_t n, double phi, double epsilon);

// v counts as a correct quantile answer when it lies weakly between the lo-th
// and hi-th order statistics of the reference multiset: at least lo reference
// values are <= v, and fewer than hi are strictly below it.
bool is_correct_quantile(double v, double phi, double epsilon,
                         const std::vector<double>& sorted_reference);

// Inclusive additive tolerance: |v - true_mean| <= epsilon * m_bound (with a
// one-part-in-1e9 relative allowance so exact-boundary values never fail on
// rounding).
bool is_correct_mean(double v, double true_mean, double epsilon, double m_bound);

struct LmhCounts {
  uint64_t l = 0;
  uint64_t m = 0;
  uint64_t h = 0;
  bool operator==(const LmhCounts&) const = default;
};

// Classifies every value by the quantile window against the reference
// multiset: L below the window, H above it, M inside. Sizes sum to values.size().
LmhCounts partition_lmh(const std::vector<double>& values,
                        const std::vector<double>& sorted_reference, double phi, double epsilon);

// Pair potential over unordered pairs, Phi = sum_{u<v} (x_u - x_v)^2, computed
// in O(n) via n*sum(x^2) - (sum x)^2 with compensated sums.
double phi_potential(const std::vector<double>& values);

// Compensated sum of all values.
double psi_sum(const std::vector<double>& values);

struct NamedCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool operator==(const NamedCheck&) const = default;
};

enum class EvalMode { median, quantile_shift, quantile_full, mean };
std::string eval_mode_name(EvalMode m);

struct EvalReport {
  Algorithm criterion = Algorithm::median;
  EvalMode mode = EvalMode::median;
  std::vector<uint8_t> correct;  // per-node flags, 1 = correct
  uint64_t incorrect_count = 0;
  double fraction_incorrect = 0.0;
  std::vector<double> phi_series;  // one entry per engine round, from traces
  std::vector<double> psi_series;
  std::vector<LmhCounts> lmh_series;  // present only when traces carry rank stats
  std::vector<NamedCheck> checks;
  // Context echoed for readers: the judged window (quantile modes) or target
  // mean and tolerance (mean mode).
  QuantileWindow window;
  double true_mean = 0.0;
  double tolerance = 0.0;
};

std::string eval_report_to_json(const EvalReport& report);

// A completed run as the evaluator needs it. `phase1_end` is the engine round
// count when Phase 1 finished (mean-mode checks read Phi/psi there); `eta`
// feeds the mean potential bound; `direction_min` tells the shift checks which
// side the mass moved toward.
struct RunView {
  const SimConfig* config = nullptr;
  const std::vector<double>* initial = nullptr;
  const std::vector<double>* final_values = nullptr;
  const std::vector<RoundTrace>* traces = nullptr;
  EvalMode mode = EvalMode::median;
  int phase1_end = 0;
  double eta = 0.0;
  bool direction_min = true;
};

EvalReport evaluate_run(const RunView& view);

} // namespace rgossip
