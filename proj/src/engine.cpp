#include "rgossip/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace rgossip {

Engine::Engine(const SimConfig& cfg, EngineOptions opts, std::vector<double> initial,
               Adversary& adv)
    : n_(cfg.n),
      beta_(cfg.beta),
      seed_(cfg.seed),
      budget_(adversary_budget(cfg.beta, cfg.n)),
      opts_(std::move(opts)),
      adv_(&adv),
      cur_(std::move(initial)) {
  if (cur_.size() != n_)
    throw std::invalid_argument("engine: initial values size " + std::to_string(cur_.size()) +
                                " != n " + std::to_string(n_));
  for (double v : cur_)
    if (!std::isfinite(v)) throw std::invalid_argument("engine: initial values must be finite");
  next_.assign(n_, 0.0);
  initial_ = cur_;
  mask_.assign(size_t((n_ + 63) / 64), 0);
}

std::vector<NodeId> Engine::checked_corrupted_set(int round_global) {
  AdversaryContext ctx{round_global, &traces_, &cur_, &initial_, beta_, n_, budget_};
  std::vector<NodeId> set = adv_->begin_round(ctx);
  const std::string at = " at round " + std::to_string(round_global);
  if (set.size() > budget_)
    throw std::runtime_error("adversary corrupted " + std::to_string(set.size()) +
                             " nodes, budget is " + std::to_string(budget_) + at);
  std::sort(set.begin(), set.end());
  for (size_t i = 0; i < set.size(); ++i) {
    if (set[i] >= n_)
      throw std::runtime_error("adversary returned node id " + std::to_string(set[i]) +
                               " out of range" + at);
    if (i > 0 && set[i] == set[i - 1])
      throw std::runtime_error("adversary returned duplicate node id " + std::to_string(set[i]) +
                               at);
  }
  return set;
}

void Engine::begin_round_common(int round_global) {
  for (NodeId id : round_set_) mask_[id >> 6] &= ~(uint64_t(1) << (id & 63));
  round_set_ = checked_corrupted_set(round_global);
  for (NodeId id : round_set_) mask_[id >> 6] |= uint64_t(1) << (id & 63);

  RoundTrace tr;
  tr.round_index = round_global;
  tr.corrupted_set = round_set_;
  traces_.push_back(std::move(tr));
}

RoundSummary Engine::summarize(const std::vector<double>& xs) const {
  RoundSummary s;
  double sum = 0.0, sum_c = 0.0;   // compensated running sums: Kahan keeps the
  double sum2 = 0.0, sum2_c = 0.0; // n*sum(x^2) - sum(x)^2 identity stable
  double mn = xs[0], mx = xs[0];
  for (double v : xs) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    double t = sum + (v - sum_c);
    sum_c = (t - sum) - (v - sum_c);
    sum = t;
    const double v2 = v * v;
    double t2 = sum2 + (v2 - sum2_c);
    sum2_c = (t2 - sum2) - (v2 - sum2_c);
    sum2 = t2;
  }
  s.min = mn;
  s.max = mx;
  s.psi = sum;
  s.phi = double(n_) * sum2 - sum * sum;

  if (opts_.rank && n_ <= opts_.trace.rank_stat_threshold) {
    s.has_rank_stats = true;
    rank_scratch_ = xs;
    auto mid = rank_scratch_.begin() + (rank_scratch_.size() - 1) / 2;
    std::nth_element(rank_scratch_.begin(), mid, rank_scratch_.end());
    s.median = *mid;
    const auto& sorted = opts_.rank->sorted_initial;
    uint64_t l = 0, m = 0, h = 0;
    for (double v : xs) {
      const int64_t below = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
      const int64_t at_or_below = std::upper_bound(sorted.begin(), sorted.end(), v) -
                                  sorted.begin();
      if (at_or_below < opts_.rank->lo)
        ++l;
      else if (below >= opts_.rank->hi)
        ++h;
      else
        ++m;
    }
    s.l_size = l;
    s.m_size = m;
    s.h_size = h;
  }
  return s;
}

void Engine::finish_round_summary() { traces_.back().summary = summarize(cur_); }

void Engine::run_sample_phase(int k_rounds, std::optional<double> clip) {
  if (k_rounds <= 0) {
    phase_boundaries_.push_back(rounds_done_);
    return;
  }
  const int rg0 = rounds_done_;
  const int K = k_rounds;

  // The adversary still commits one set per round, in round order, before that
  // round's partner draws exist. Working values never change while samples
  // accumulate, so every round sees the same snapshot.
  const RoundSummary frozen = summarize(cur_);
  auto sets = std::vector<std::vector<NodeId>>(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    sets[size_t(k)] = checked_corrupted_set(rg0 + k);
    RoundTrace tr;
    tr.round_index = rg0 + k;
    tr.corrupted_set = sets[size_t(k)];
    tr.summary = frozen;
    traces_.push_back(std::move(tr));
  }

  // Membership checks run n*K times; use a per-round bitmask matrix when it
  // fits in 64 MiB, binary search over the sorted sets otherwise.
  const uint64_t words = (n_ + 63) / 64;
  const bool use_masks = words * uint64_t(K) <= (uint64_t(8) << 20);
  std::vector<uint64_t> masks;
  if (use_masks) {
    masks.assign(size_t(words) * size_t(K), 0);
    for (int k = 0; k < K; ++k)
      for (NodeId id : sets[size_t(k)])
        masks[size_t(k) * words + (id >> 6)] |= uint64_t(1) << (id & 63);
  }

  const bool rec = record_edges();
  if (rec) {
    for (int k = 0; k < K; ++k) {
      traces_[size_t(rg0 + k)].edges_recorded = true;
      traces_[size_t(rg0 + k)].edges.resize(n_);
    }
  }

  const bool use_override = bool(opts_.partner_override);
  const double* x = cur_.data();
  double* out = next_.data();
  auto targets = std::vector<uint32_t>(static_cast<size_t>(K));
  auto samples = std::vector<double>(static_cast<size_t>(K));

  for (uint64_t v = 0; v < n_; ++v) {
    for (int k = 0; k < K; ++k) {
      uint64_t t;
      if (use_override)
        t = opts_.partner_override(rg0 + k, NodeId(v), 0);
      else
        t = bounded(derive_stream(seed_, StreamDomain::partner, uint64_t(rg0 + k), v, 0), n_);
      targets[size_t(k)] = uint32_t(t);
      __builtin_prefetch(x + t, 0, 1);
    }
    for (int k = 0; k < K; ++k) {
      const uint64_t t = targets[size_t(k)];
      bool bad;
      if (use_masks)
        bad = (masks[size_t(k) * words + (t >> 6)] >> (t & 63)) & 1;
      else {
        const auto& s = sets[size_t(k)];
        bad = std::binary_search(s.begin(), s.end(), NodeId(t));
      }
      double val = bad ? corrupted_delivery(NodeId(v), t, rg0 + k) : x[t];
      if (clip) val = std::clamp(val, 0.0, *clip);
      samples[size_t(k)] = val;
      if (rec) traces_[size_t(rg0 + k)].edges[v] = PullEdge{NodeId(v), NodeId(t), val, bad};
    }
    auto mid = samples.begin() + (K - 1) / 2;
    std::nth_element(samples.begin(), mid, samples.end());
    out[v] = *mid;
  }

  cur_.swap(next_);
  rounds_done_ += K;
  traces_.back().summary = summarize(cur_);
  phase_boundaries_.push_back(rounds_done_);
}

RunResult Engine::finish() {
  RunResult r;
  r.final_values = std::move(cur_);
  r.traces = std::move(traces_);
  r.phase_boundaries = std::move(phase_boundaries_);
  r.budget = budget_;
  return r;
}

} // namespace rgossip
