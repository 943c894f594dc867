#include "rgossip/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "rgossip/rng.hpp"

namespace rgossip {

uint64_t adversary_budget(double beta, uint64_t n) {
  if (beta <= 0.0) return 0;
  return uint64_t(std::floor(beta * double(n) + 1e-9));
}

std::vector<NodeId> prefix_corrupted_set(uint64_t size) {
  std::vector<NodeId> out(size);
  for (uint64_t i = 0; i < size; ++i) out[i] = NodeId(i);
  return out;
}

std::vector<NodeId> sample_corrupted_set(uint64_t seed, int round, uint64_t n, uint64_t size) {
  if (size > n)
    throw std::invalid_argument("sample_corrupted_set: size exceeds node count");
  // Floyd sampling: uniform subset in `size` draws, no rejection loop.
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(size_t(size) * 2);
  for (uint64_t j = n - size; j < n; ++j) {
    uint64_t t = bounded(derive_stream(seed, StreamDomain::adversary_set, uint64_t(round), j, 0),
                         j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<NodeId> out;
  out.reserve(size_t(size));
  for (uint64_t id : chosen) out.push_back(NodeId(id));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Set selection shared by the value strategies: fixed prefix when sticky,
// fresh uniform subset otherwise.
struct SetPolicy {
  bool sticky = false;
  uint64_t seed = 0;

  std::vector<NodeId> pick(const AdversaryContext& ctx) const {
    if (ctx.budget == 0) return {};
    return sticky ? prefix_corrupted_set(ctx.budget)
                  : sample_corrupted_set(seed, ctx.round_index, ctx.n, ctx.budget);
  }
};

class NoneAdversary final : public Adversary {
 public:
  std::vector<NodeId> begin_round(const AdversaryContext&) override { return {}; }
  double corrupt(const EdgeContext&, double true_value) const override { return true_value; }
  std::string name() const override { return "none"; }
};

class ExtremeAdversary final : public Adversary {
 public:
  ExtremeAdversary(StrategyDescriptor::Kind kind, double hi, double lo, SetPolicy policy)
      : kind_(kind), hi_(hi), lo_(lo), policy_(policy) {}

  std::vector<NodeId> begin_round(const AdversaryContext& ctx) override {
    return policy_.pick(ctx);
  }

  double corrupt(const EdgeContext& edge, double) const override {
    if (kind_ == StrategyDescriptor::Kind::alternating_extreme)
      return edge.round_index % 2 == 0 ? hi_ : lo_;
    return hi_;
  }

  std::string name() const override { return strategy_kind_name(kind_); }

 private:
  StrategyDescriptor::Kind kind_;
  double hi_, lo_;
  SetPolicy policy_;
};

class MeanInflator final : public Adversary {
 public:
  MeanInflator(double ceiling, SetPolicy policy) : ceiling_(ceiling), policy_(policy) {}

  std::vector<NodeId> begin_round(const AdversaryContext& ctx) override {
    return policy_.pick(ctx);
  }
  double corrupt(const EdgeContext&, double) const override { return ceiling_; }
  std::string name() const override { return "mean_inflator"; }

 private:
  double ceiling_;
  SetPolicy policy_;
};

class MedianPusher final : public Adversary {
 public:
  MedianPusher(double offset, bool push_up, SetPolicy policy)
      : offset_(offset), push_up_(push_up), policy_(policy) {}

  std::vector<NodeId> begin_round(const AdversaryContext& ctx) override {
    // Estimate the current median from the snapshot, then aim just past it.
    scratch_ = *ctx.snapshot;
    auto mid = scratch_.begin() + (scratch_.size() - 1) / 2;
    std::nth_element(scratch_.begin(), mid, scratch_.end());
    target_ = push_up_ ? *mid + offset_ : *mid - offset_;
    return policy_.pick(ctx);
  }

  double corrupt(const EdgeContext&, double) const override { return target_; }
  std::string name() const override { return "median_pusher"; }

 private:
  double offset_;
  bool push_up_;
  SetPolicy policy_;
  std::vector<double> scratch_;
  double target_ = 0.0;
};

class RandomNoise final : public Adversary {
 public:
  RandomNoise(double lo, double hi, uint64_t seed, SetPolicy policy)
      : lo_(lo), hi_(hi), seed_(seed), policy_(policy) {}

  std::vector<NodeId> begin_round(const AdversaryContext& ctx) override {
    return policy_.pick(ctx);
  }

  double corrupt(const EdgeContext& edge, double) const override {
    uint64_t key = (uint64_t(edge.puller) << 32) | edge.target;
    double u = u01(derive_stream(seed_, StreamDomain::adversary_value,
                                 uint64_t(edge.round_index), key, 0));
    return lo_ + u * (hi_ - lo_);
  }

  std::string name() const override { return "random_noise"; }

 private:
  double lo_, hi_;
  uint64_t seed_;
  SetPolicy policy_;
};

} // namespace

std::string strategy_kind_name(StrategyDescriptor::Kind k) {
  switch (k) {
    case StrategyDescriptor::Kind::none: return "none";
    case StrategyDescriptor::Kind::static_extreme: return "static_extreme";
    case StrategyDescriptor::Kind::sticky_extreme: return "sticky_extreme";
    case StrategyDescriptor::Kind::alternating_extreme: return "alternating_extreme";
    case StrategyDescriptor::Kind::mean_inflator: return "mean_inflator";
    case StrategyDescriptor::Kind::median_pusher: return "median_pusher";
    case StrategyDescriptor::Kind::random_noise: return "random_noise";
  }
  throw std::logic_error("strategy_kind_name: unhandled enum value");
}

StrategyDescriptor::Kind strategy_kind_from_name(const std::string& name) {
  for (auto k : {StrategyDescriptor::Kind::none, StrategyDescriptor::Kind::static_extreme,
                 StrategyDescriptor::Kind::sticky_extreme,
                 StrategyDescriptor::Kind::alternating_extreme,
                 StrategyDescriptor::Kind::mean_inflator, StrategyDescriptor::Kind::median_pusher,
                 StrategyDescriptor::Kind::random_noise}) {
    if (strategy_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown strategy kind: '" + name + "'");
}

std::unique_ptr<Adversary> make_adversary(const StrategyDescriptor& d, const SimConfig& cfg) {
  const bool default_sticky = d.kind == StrategyDescriptor::Kind::sticky_extreme;
  SetPolicy policy{d.sticky.value_or(default_sticky), cfg.seed};

  switch (d.kind) {
    case StrategyDescriptor::Kind::none:
      return std::make_unique<NoneAdversary>();
    case StrategyDescriptor::Kind::static_extreme:
    case StrategyDescriptor::Kind::sticky_extreme:
    case StrategyDescriptor::Kind::alternating_extreme:
      return std::make_unique<ExtremeAdversary>(d.kind, d.value, d.value2, policy);
    case StrategyDescriptor::Kind::mean_inflator:
      return std::make_unique<MeanInflator>(cfg.m_bound > 0.0 ? cfg.m_bound : d.value, policy);
    case StrategyDescriptor::Kind::median_pusher:
      return std::make_unique<MedianPusher>(d.offset, d.push_up, policy);
    case StrategyDescriptor::Kind::random_noise:
      if (!(d.noise_lo <= d.noise_hi))
        throw std::invalid_argument("random_noise needs noise_lo <= noise_hi");
      return std::make_unique<RandomNoise>(d.noise_lo, d.noise_hi, cfg.seed, policy);
  }
  throw std::logic_error("make_adversary: unhandled strategy kind");
}

} // namespace rgossip
