#include "doctest.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "rgossip/adversary.hpp"

using namespace rgossip;

namespace {

SimConfig adv_cfg(uint64_t n, double beta, uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.beta = beta;
  cfg.seed = seed;
  return cfg;
}

AdversaryContext ctx_for(const SimConfig& cfg, int round, const std::vector<double>& snapshot,
                         const std::vector<RoundTrace>& history) {
  return AdversaryContext{round,    &history, &snapshot,
                          &snapshot, cfg.beta, cfg.n,
                          adversary_budget(cfg.beta, cfg.n)};
}

} // namespace

TEST_SUITE("adversary") {

TEST_CASE("budget is floor(beta*n), robust to representation noise") {
  CHECK(adversary_budget(0.0, 1000) == 0);
  CHECK(adversary_budget(0.1, 50) == 5);
  CHECK(adversary_budget(0.15, 10) == 1);
  CHECK(adversary_budget(0.13, 97) == 12);      // floor(12.61)
  CHECK(adversary_budget(1.9e-4, 1000000) == 190); // product lands one ulp under 190
  CHECK(adversary_budget(0.3, 10) == 3);        // 0.3*10 = 2.999... in binary
}

TEST_CASE("none returns an empty set and passes values through") {
  auto cfg = adv_cfg(50, 0.1, 1);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);
  std::vector<double> snap(50, 1.0);
  std::vector<RoundTrace> hist;
  CHECK(adv->begin_round(ctx_for(cfg, 0, snap, hist)).empty());
  CHECK(adv->corrupt(EdgeContext{0, 1, 0}, 7.5) == 7.5);
  CHECK(adv->name() == "none");
}

TEST_CASE("sticky_extreme holds the same prefix set every round") {
  auto cfg = adv_cfg(50, 0.1, 1);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::sticky_extreme;
  d.value = 1e9;
  auto adv = make_adversary(d, cfg);
  std::vector<double> snap(50, 1.0);
  std::vector<RoundTrace> hist;

  const std::vector<NodeId> expect{0, 1, 2, 3, 4};
  for (int r = 0; r < 6; ++r) CHECK(adv->begin_round(ctx_for(cfg, r, snap, hist)) == expect);
  CHECK(adv->corrupt(EdgeContext{9, 2, 3}, -5.0) == 1e9);
}

TEST_CASE("static_extreme draws a fresh uniform set per round, deterministically") {
  auto cfg = adv_cfg(200, 0.1, 31);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::static_extreme;
  auto adv = make_adversary(d, cfg);
  std::vector<double> snap(200, 0.0);
  std::vector<RoundTrace> hist;

  auto s0 = adv->begin_round(ctx_for(cfg, 0, snap, hist));
  auto s1 = adv->begin_round(ctx_for(cfg, 1, snap, hist));
  CHECK(s0.size() == 20);
  CHECK(s1.size() == 20);
  CHECK(std::is_sorted(s0.begin(), s0.end()));
  CHECK(s0 != s1); // 20-of-200 repeat has probability ~1e-28

  auto adv2 = make_adversary(d, cfg);
  CHECK(adv2->begin_round(ctx_for(cfg, 0, snap, hist)) == s0);

  std::set<NodeId> uniq(s0.begin(), s0.end());
  CHECK(uniq.size() == s0.size());
  for (NodeId id : s0) CHECK(id < 200);
}

TEST_CASE("the sticky flag overrides the default set behavior") {
  auto cfg = adv_cfg(100, 0.05, 7);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::static_extreme;
  d.sticky = true;
  auto adv = make_adversary(d, cfg);
  std::vector<double> snap(100, 0.0);
  std::vector<RoundTrace> hist;
  const std::vector<NodeId> expect{0, 1, 2, 3, 4};
  CHECK(adv->begin_round(ctx_for(cfg, 0, snap, hist)) == expect);
  CHECK(adv->begin_round(ctx_for(cfg, 5, snap, hist)) == expect);
}

TEST_CASE("alternating_extreme flips between its two values by round parity") {
  auto cfg = adv_cfg(20, 0.1, 3);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::alternating_extreme;
  d.value = 100.0;
  d.value2 = -100.0;
  auto adv = make_adversary(d, cfg);
  CHECK(adv->corrupt(EdgeContext{0, 1, 0}, 0.0) == 100.0);
  CHECK(adv->corrupt(EdgeContext{0, 1, 1}, 0.0) == -100.0);
  CHECK(adv->corrupt(EdgeContext{0, 1, 2}, 0.0) == 100.0);
}

TEST_CASE("mean_inflator reports the value ceiling") {
  auto cfg = adv_cfg(20, 0.1, 3);
  cfg.m_bound = 1.0;
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::mean_inflator;
  auto adv = make_adversary(d, cfg);
  CHECK(adv->corrupt(EdgeContext{4, 7, 2}, 0.25) == 1.0);

  cfg.m_bound = 0.0; // falls back to the descriptor value
  d.value = 42.0;
  auto adv2 = make_adversary(d, cfg);
  CHECK(adv2->corrupt(EdgeContext{4, 7, 2}, 0.25) == 42.0);
}

TEST_CASE("median_pusher aims just past the snapshot median") {
  auto cfg = adv_cfg(100, 0.05, 3);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::median_pusher;
  d.offset = 1.0;
  auto adv = make_adversary(d, cfg);

  std::vector<double> snap(100);
  for (size_t i = 0; i < 100; ++i) snap[i] = double(i + 1); // median (lower mid) = 50
  std::vector<RoundTrace> hist;
  adv->begin_round(ctx_for(cfg, 0, snap, hist));
  CHECK(adv->corrupt(EdgeContext{0, 1, 0}, 0.0) == 51.0);

  d.push_up = false;
  auto down = make_adversary(d, cfg);
  down->begin_round(ctx_for(cfg, 0, snap, hist));
  CHECK(down->corrupt(EdgeContext{0, 1, 0}, 0.0) == 49.0);
}

TEST_CASE("random_noise is a pure per-edge function inside the configured range") {
  auto cfg = adv_cfg(50, 0.2, 5);
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::random_noise;
  d.noise_lo = -2.0;
  d.noise_hi = 3.0;
  auto adv = make_adversary(d, cfg);

  const double v1 = adv->corrupt(EdgeContext{3, 9, 4}, 0.0);
  const double v2 = adv->corrupt(EdgeContext{3, 9, 4}, 123.0);
  CHECK(v1 == v2); // true value and call order are irrelevant
  CHECK(v1 >= -2.0);
  CHECK(v1 <= 3.0);
  CHECK(adv->corrupt(EdgeContext{4, 9, 4}, 0.0) != v1); // different puller, different draw

  StrategyDescriptor bad = d;
  bad.noise_lo = 5.0;
  bad.noise_hi = 1.0;
  CHECK_THROWS_AS(make_adversary(bad, cfg), std::invalid_argument);
}

TEST_CASE("zero budget silences every strategy") {
  auto cfg = adv_cfg(50, 0.0, 5);
  std::vector<double> snap(50, 1.0);
  std::vector<RoundTrace> hist;
  for (auto kind : {StrategyDescriptor::Kind::static_extreme,
                    StrategyDescriptor::Kind::sticky_extreme,
                    StrategyDescriptor::Kind::median_pusher,
                    StrategyDescriptor::Kind::random_noise}) {
    StrategyDescriptor d;
    d.kind = kind;
    auto adv = make_adversary(d, cfg);
    CHECK(adv->begin_round(ctx_for(cfg, 0, snap, hist)).empty());
  }
}

TEST_CASE("floyd sampling covers the id space uniformly") {
  // 400 rounds of 10-of-100: each id should appear ~40 times.
  std::vector<uint64_t> hits(100, 0);
  for (int r = 0; r < 400; ++r)
    for (NodeId id : sample_corrupted_set(99, r, 100, 10)) ++hits[id];
  double chi2 = 0.0;
  for (uint64_t h : hits) chi2 += (double(h) - 40.0) * (double(h) - 40.0) / 40.0;
  // 99 degrees of freedom: mean 99, sd ~14.1; 170 is past +5 sd.
  CHECK(chi2 < 170.0);
}

TEST_CASE("strategy kinds round-trip through their names") {
  for (auto kind : {StrategyDescriptor::Kind::none, StrategyDescriptor::Kind::static_extreme,
                    StrategyDescriptor::Kind::sticky_extreme,
                    StrategyDescriptor::Kind::alternating_extreme,
                    StrategyDescriptor::Kind::mean_inflator,
                    StrategyDescriptor::Kind::median_pusher,
                    StrategyDescriptor::Kind::random_noise})
    CHECK(strategy_kind_from_name(strategy_kind_name(kind)) == kind);
  CHECK_THROWS_AS(strategy_kind_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("strategy descriptors round-trip through JSON") {
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::median_pusher;
  d.offset = 2.5;
  d.push_up = false;
  d.sticky = true;
  const StrategyDescriptor back = strategy_from_json(strategy_to_json(d));
  CHECK(back.kind == d.kind);
  CHECK(back.offset == 2.5);
  CHECK(back.push_up == false);
  REQUIRE(back.sticky.has_value());
  CHECK(*back.sticky == true);

  CHECK_THROWS_AS(strategy_from_json("{\"kind\":\"none\",\"surprise\":1}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(strategy_from_json("not json"), std::invalid_argument);
}

} // TEST_SUITE
