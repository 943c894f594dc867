// Adversary strategies. Each round the engine asks the strategy for a
// corrupted set (before any partner is sampled), then queries corrupt() for
// every edge whose target is in that set. corrupt() must be pure: the engine
// may evaluate edges in any order.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgossip/core.hpp"
#include "rgossip/trace.hpp"

namespace rgossip {

// floor(beta * n) with a snap-up for products a few ulps below an integer
// (0.001 * 2e6 and friends must budget exactly).
uint64_t adversary_budget(double beta, uint64_t n);

struct AdversaryContext {
  int round_index = 0;
  const std::vector<RoundTrace>* history = nullptr;  // rounds < round_index
  const std::vector<double>* snapshot = nullptr;     // values entering the round
  const std::vector<double>* initial = nullptr;
  double beta = 0.0;
  uint64_t n = 0;
  uint64_t budget = 0;
};

struct EdgeContext {
  NodeId puller = 0;
  NodeId target = 0;
  int round_index = 0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;

  // Called exactly once per round, serially, before partner sampling. The
  // returned ids must be valid and number at most ctx.budget.
  virtual std::vector<NodeId> begin_round(const AdversaryContext& ctx) = 0;

  // Value delivered on one corrupted edge. Must be finite. Thread-safe and
  // pure given (edge, true_value) and the state fixed in begin_round.
  virtual double corrupt(const EdgeContext& edge, double true_value) const = 0;

  virtual std::string name() const = 0;
};

struct StrategyDescriptor {
  enum class Kind {
    none,
    static_extreme,       // constant extreme value, fresh random set per round
    sticky_extreme,       // constant extreme value, fixed id prefix every round
    alternating_extreme,  // value alternates high/low with round parity
    mean_inflator,        // always delivers the value ceiling M
    median_pusher,        // delivers current snapshot median +/- offset
    random_noise,         // per-edge uniform value in [noise_lo, noise_hi]
  };

  Kind kind = Kind::none;
  double value = 1e9;        // extreme value (high); use a negative for low
  double value2 = -1e9;      // alternating_extreme: the opposite phase
  double offset = 1.0;       // median_pusher displacement
  bool push_up = true;       // median_pusher direction
  double noise_lo = 0.0;
  double noise_hi = 1.0;
  // Set behavior override: true = fixed id prefix, false = fresh random set.
  // Default is sticky only for sticky_extreme.
  std::optional<bool> sticky;
};

std::string strategy_kind_name(StrategyDescriptor::Kind k);
StrategyDescriptor::Kind strategy_kind_from_name(const std::string& name);

std::string strategy_to_json(const StrategyDescriptor& d);
StrategyDescriptor strategy_from_json(const std::string& text);

// Builds the adversary for a run. The descriptor's randomness (fresh sets,
// noise values) comes from dedicated streams of cfg.seed, so a run is fully
// determined by its config plus descriptor.
std::unique_ptr<Adversary> make_adversary(const StrategyDescriptor& d, const SimConfig& cfg);

// Uniform random subset of {0..n-1} of the given size, deterministic in
// (seed, round). Floyd sampling; result sorted.
std::vector<NodeId> sample_corrupted_set(uint64_t seed, int round, uint64_t n, uint64_t size);

// The fixed prefix {0..size-1}.
std::vector<NodeId> prefix_corrupted_set(uint64_t size);

} // namespace rgossip
