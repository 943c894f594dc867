#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgossip/adversary.hpp"
#include "rgossip/core.hpp"
#include "rgossip/rng.hpp"
#include "rgossip/trace.hpp"

namespace rgossip {

// An update rule drives one class of synchronous rounds: it decides how many
// pulls each node makes and how the delivered values fold into the node's next
// value. Rules are compile-time plugins so combine() inlines into the kernel.
//
// Requirements:
//   static constexpr int max_pulls;                                // upper bound on pulls()
//   int pulls(int round_global, int round_local, NodeId v) const;  // in [1, max_pulls]
//   double combine(double own, const double* delivered, int k,
//                  int round_local, NodeId v) const;
template <class R>
concept UpdateRule = requires(const R& r, int rg, int rl, NodeId v, const double* d) {
  { R::max_pulls } -> std::convertible_to<int>;
  { r.pulls(rg, rl, v) } -> std::convertible_to<int>;
  { r.combine(0.0, d, 1, rl, v) } -> std::convertible_to<double>;
};

// Order-statistic context for per-round rank summaries: `sorted_initial` is the
// sorted copy of the run's initial values and [lo, hi] the 1-based order
// statistic window counted against it.
struct RankContext {
  std::vector<double> sorted_initial;
  int64_t lo = 0;
  int64_t hi = 0;
};

struct EngineOptions {
  TraceOptions trace;
  std::optional<RankContext> rank;
  // Test seam: when set, partner draws come from here instead of the counter
  // stream. Must return ids in [0, n).
  std::function<NodeId(int round, NodeId node, int draw)> partner_override;
};

struct RunResult {
  std::vector<double> final_values;
  std::vector<RoundTrace> traces;
  std::vector<int> phase_boundaries; // cumulative engine round count at each phase end
  uint64_t budget = 0;
};

// Synchronous pull-gossip engine over the complete graph (self-pulls allowed).
// Each round: the adversary commits a corrupted set before any partner is
// sampled, every node draws its partners uniformly, delivered values from
// corrupted targets pass through Adversary::corrupt, and all nodes update
// simultaneously from the same pre-round snapshot.
class Engine {
 public:
  Engine(const SimConfig& cfg, EngineOptions opts, std::vector<double> initial, Adversary& adv);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // One synchronous round under `rule`. `round_local` is the index the rule
  // sees (0-based within its phase); the trace uses the global round index.
  template <UpdateRule R>
  void step(const R& rule, int round_local);

  template <UpdateRule R>
  void run_update_phase(const R& rule, int rounds) {
    for (int i = 0; i < rounds; ++i) step(rule, i);
    phase_boundaries_.push_back(rounds_done_);
  }

  // K rounds of one pull per node, folded at the end: each node's next value
  // is the lower-middle median of its K delivered samples (clamped to
  // [0, *clip] first when clip is set). Working values stay frozen while the
  // samples accumulate, so the per-round summaries repeat the frozen state;
  // the last round's summary is recomputed after the fold.
  void run_sample_phase(int k_rounds, std::optional<double> clip);

  const std::vector<double>& values() const { return cur_; }
  const std::vector<RoundTrace>& traces() const { return traces_; }
  int rounds_done() const { return rounds_done_; }
  uint64_t budget() const { return budget_; }

  RunResult finish();

 private:
  // Asks the adversary for this round's set, validates it, rebuilds the
  // membership bitmask, and opens the round's trace entry.
  void begin_round_common(int round_global);
  std::vector<NodeId> checked_corrupted_set(int round_global);
  void finish_round_summary();
  RoundSummary summarize(const std::vector<double>& xs) const;
  bool record_edges() const {
    return opts_.trace.level == TraceOptions::Level::edges && n_ <= opts_.trace.edge_threshold;
  }

  double corrupted_delivery(NodeId puller, uint64_t target, int round_global) const {
    double v = adv_->corrupt(EdgeContext{puller, NodeId(target), round_global}, cur_[target]);
    if (!std::isfinite(v))
      throw std::runtime_error("adversary returned a non-finite value at round " +
                               std::to_string(round_global) + " on edge " +
                               std::to_string(puller) + " <- " + std::to_string(target));
    return v;
  }

  uint64_t n_;
  double beta_;
  uint64_t seed_;
  uint64_t budget_;
  EngineOptions opts_;
  Adversary* adv_;
  std::vector<double> cur_, next_;
  std::vector<double> initial_;
  std::vector<uint64_t> mask_;
  std::vector<NodeId> round_set_;
  std::vector<RoundTrace> traces_;
  std::vector<int> phase_boundaries_;
  int rounds_done_ = 0;
  mutable std::vector<double> rank_scratch_;
};

template <UpdateRule R>
void Engine::step(const R& rule, int round_local) {
  const int rg = rounds_done_;
  begin_round_common(rg);

  const uint64_t n = n_;
  const double* x = cur_.data();
  double* y = next_.data();
  const uint64_t* mask = mask_.data();
  const bool any_bad = !round_set_.empty();
  const bool rec = record_edges();
  RoundTrace& tr = traces_.back();
  if (rec) {
    tr.edges_recorded = true;
    tr.edges.reserve(size_t(n) * size_t(R::max_pulls));
  }

  constexpr int MP = R::max_pulls;
  static_assert(MP >= 1 && MP <= 8);
  constexpr uint64_t B = 1024;
  uint32_t targets[B * MP];
  int8_t counts[B];
  const bool use_override = bool(opts_.partner_override);

  for (uint64_t base = 0; base < n; base += B) {
    const uint64_t cnt = std::min(n - base, B);

    // Pass 1: draw partners and prefetch their values so the gather pass
    // mostly hits cache at large n.
    for (uint64_t i = 0; i < cnt; ++i) {
      const NodeId v = NodeId(base + i);
      const int k = std::clamp(rule.pulls(rg, round_local, v), 1, MP);
      counts[i] = int8_t(k);
      for (int d = 0; d < k; ++d) {
        uint64_t t;
        if (use_override)
          t = opts_.partner_override(rg, v, d);
        else
          t = bounded(derive_stream(seed_, StreamDomain::partner, uint64_t(rg), v, uint64_t(d)),
                      n);
        targets[i * MP + d] = uint32_t(t);
        __builtin_prefetch(x + t, 0, 1);
      }
    }

    // Pass 2: gather, corrupt where masked, combine.
    for (uint64_t i = 0; i < cnt; ++i) {
      const NodeId v = NodeId(base + i);
      const int k = std::clamp(int(counts[i]), 1, MP);
      double delivered[MP];
      for (int d = 0; d < k; ++d) {
        const uint64_t t = targets[i * MP + d];
        const bool bad = any_bad && ((mask[t >> 6] >> (t & 63)) & 1);
        const double val = bad ? corrupted_delivery(v, t, rg) : x[t];
        delivered[d] = val;
        if (rec) tr.edges.push_back(PullEdge{v, NodeId(t), val, bad});
      }
      y[v] = rule.combine(x[v], delivered, k, round_local, v);
    }
  }

  cur_.swap(next_);
  finish_round_summary();
  ++rounds_done_;
}

} // namespace rgossip
