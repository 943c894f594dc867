#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rgossip/algorithms.hpp"
#include "rgossip/engine.hpp"

using namespace rgossip;

namespace {

struct CopyRule {
  static constexpr int max_pulls = 1;
  int pulls(int, int, NodeId) const { return 1; }
  double combine(double, const double* d, int, int, NodeId) const { return d[0]; }
};

struct AvgRule {
  static constexpr int max_pulls = 2;
  int pulls(int, int, NodeId) const { return 2; }
  double combine(double, const double* d, int, int, NodeId) const {
    return (d[0] + d[1]) / 2.0;
  }
};

class FixedSetAdversary : public Adversary {
 public:
  FixedSetAdversary(std::vector<NodeId> set, double value) : set_(std::move(set)), value_(value) {}
  std::vector<NodeId> begin_round(const AdversaryContext&) override { return set_; }
  double corrupt(const EdgeContext&, double) const override { return value_; }
  std::string name() const override { return "fixed_set_test"; }

 private:
  std::vector<NodeId> set_;
  double value_;
};

SimConfig engine_cfg(uint64_t n, double beta, uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.beta = beta;
  cfg.seed = seed;
  return cfg;
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("median-of-3 with every pull hitting node 1 makes everyone 2") {
  EngineOptions eo;
  eo.partner_override = [](int, NodeId, int) { return NodeId(1); };
  auto adv = make_adversary(StrategyDescriptor{}, engine_cfg(3, 0.0, 1));
  Engine eng(engine_cfg(3, 0.0, 1), std::move(eo), {1.0, 2.0, 3.0}, *adv);
  eng.run_update_phase(Median3Rule{}, 1);
  for (double v : eng.values()) CHECK(v == 2.0);
}

TEST_CASE("corrupted constant target overrides the honest value") {
  EngineOptions eo;
  eo.partner_override = [](int, NodeId, int) { return NodeId(1); };
  FixedSetAdversary adv({1}, 99.0);
  Engine eng(engine_cfg(3, 0.5, 1), std::move(eo), {1.0, 2.0, 3.0}, adv);
  eng.run_update_phase(Median3Rule{}, 1);
  for (double v : eng.values()) CHECK(v == 99.0);
  CHECK(eng.traces().at(0).corrupted_set == std::vector<NodeId>{1});
}

TEST_CASE("average of both nodes lands on the midpoint") {
  EngineOptions eo;
  eo.partner_override = [](int, NodeId, int draw) { return NodeId(draw); };
  auto adv = make_adversary(StrategyDescriptor{}, engine_cfg(2, 0.0, 1));
  Engine eng(engine_cfg(2, 0.0, 1), std::move(eo), {0.0, 4.0}, *adv);
  eng.run_update_phase(AvgRule{}, 1);
  CHECK(eng.values()[0] == 2.0);
  CHECK(eng.values()[1] == 2.0);
}

TEST_CASE("zero rounds leave the snapshot untouched") {
  auto adv = make_adversary(StrategyDescriptor{}, engine_cfg(4, 0.0, 9));
  Engine eng(engine_cfg(4, 0.0, 9), {}, {5.0, 6.0, 7.0, 8.0}, *adv);
  eng.run_update_phase(Median3Rule{}, 0);
  CHECK(eng.values() == std::vector<double>{5.0, 6.0, 7.0, 8.0});
  auto rr = eng.finish();
  CHECK(rr.traces.empty());
  CHECK(rr.phase_boundaries == std::vector<int>{0});
}

TEST_CASE("a constant field is a fixed point for all three update rules") {
  const std::vector<double> constant(40, 5.0);
  auto cfg = engine_cfg(40, 0.0, 3);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);

  Engine med(cfg, {}, constant, *adv);
  med.run_update_phase(Median3Rule{}, 4);
  CHECK(med.values() == constant);

  Engine mean(cfg, {}, constant, *adv);
  mean.run_update_phase(MeanPullRule{10.0}, 4);
  CHECK(mean.values() == constant);

  const std::vector<double> deltas{1.0, 0.5, 0.25, 0.125};
  Engine shift(cfg, {}, constant, *adv);
  shift.run_update_phase(QuantileShiftRule{cfg.seed, &deltas, true}, 4);
  CHECK(shift.values() == constant);
}

TEST_CASE("replaying a seed reproduces values and traces exactly") {
  auto cfg = engine_cfg(200, 0.05, 42);
  StrategyDescriptor noise;
  noise.kind = StrategyDescriptor::Kind::random_noise;
  noise.noise_lo = -3.0;
  noise.noise_hi = 3.0;

  auto one_run = [&]() {
    std::vector<double> init(200);
    std::iota(init.begin(), init.end(), 0.0);
    auto adv = make_adversary(noise, cfg);
    EngineOptions eo;
    eo.trace.level = TraceOptions::Level::edges;
    Engine eng(cfg, std::move(eo), std::move(init), *adv);
    eng.run_update_phase(Median3Rule{}, 5);
    eng.run_sample_phase(6, std::nullopt);
    return eng.finish();
  };

  const RunResult a = one_run();
  const RunResult b = one_run();
  CHECK(a.final_values == b.final_values);
  CHECK(a.traces == b.traces);
  CHECK(a.traces.size() == 11);
  CHECK(a.traces.at(3).edges_recorded);
}

TEST_CASE("non-finite corrupted deliveries abort the round") {
  struct NanAdversary : Adversary {
    std::vector<NodeId> begin_round(const AdversaryContext&) override { return {0}; }
    double corrupt(const EdgeContext&, double) const override {
      return std::numeric_limits<double>::quiet_NaN();
    }
    std::string name() const override { return "nan_test"; }
  } adv;
  EngineOptions eo;
  eo.partner_override = [](int, NodeId, int) { return NodeId(0); };
  Engine eng(engine_cfg(3, 0.4, 1), std::move(eo), {1.0, 2.0, 3.0}, adv);
  CHECK_THROWS_WITH_AS(eng.run_update_phase(Median3Rule{}, 1),
                       doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("oversized, duplicate, and out-of-range corrupted sets abort") {
  auto cfg = engine_cfg(10, 0.15, 1); // budget floor(1.5) = 1

  FixedSetAdversary oversized({0, 1}, 9.0);
  Engine e1(cfg, {}, std::vector<double>(10, 1.0), oversized);
  CHECK_THROWS_WITH_AS(e1.run_update_phase(Median3Rule{}, 1), doctest::Contains("budget"),
                       std::runtime_error);

  auto cfg2 = engine_cfg(10, 0.3, 1); // budget 3
  FixedSetAdversary dup({2, 2}, 9.0);
  Engine e2(cfg2, {}, std::vector<double>(10, 1.0), dup);
  CHECK_THROWS_WITH_AS(e2.run_update_phase(Median3Rule{}, 1), doctest::Contains("duplicate"),
                       std::runtime_error);

  FixedSetAdversary oob({10}, 9.0);
  Engine e3(cfg2, {}, std::vector<double>(10, 1.0), oob);
  CHECK_THROWS_WITH_AS(e3.run_update_phase(Median3Rule{}, 1), doctest::Contains("out of range"),
                       std::runtime_error);
}

TEST_CASE("every recorded corrupted set respects the budget") {
  auto cfg = engine_cfg(97, 0.13, 11); // budget floor(12.61) = 12
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::static_extreme;
  auto adv = make_adversary(d, cfg);
  std::vector<double> init(97);
  std::iota(init.begin(), init.end(), 1.0);
  Engine eng(cfg, {}, std::move(init), *adv);
  eng.run_update_phase(Median3Rule{}, 8);
  CHECK(eng.budget() == 12);
  for (const RoundTrace& tr : eng.traces()) {
    CHECK(tr.corrupted_set.size() <= 12);
    CHECK(std::is_sorted(tr.corrupted_set.begin(), tr.corrupted_set.end()));
    for (NodeId id : tr.corrupted_set) CHECK(id < 97);
  }
}

TEST_CASE("a none adversary with beta > 0 matches the beta = 0 run bit for bit") {
  std::vector<double> init(500);
  std::iota(init.begin(), init.end(), 0.0);

  auto run_with = [&init](double beta) {
    auto cfg = engine_cfg(500, beta, 77);
    auto adv = make_adversary(StrategyDescriptor{}, cfg);
    Engine eng(cfg, {}, init, *adv);
    eng.run_update_phase(Median3Rule{}, 6);
    return eng.finish();
  };

  const RunResult with_budget = run_with(0.1);
  const RunResult no_budget = run_with(0.0);
  CHECK(with_budget.final_values == no_budget.final_values);
  CHECK(with_budget.traces == no_budget.traces);
}

TEST_CASE("pull targets are uniform across nodes") {
  const uint64_t n = 50;
  const int rounds = 2000;
  auto cfg = engine_cfg(n, 0.0, 2026);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);
  EngineOptions eo;
  eo.trace.level = TraceOptions::Level::edges;
  Engine eng(cfg, std::move(eo), std::vector<double>(n, 1.0), *adv);
  eng.run_update_phase(CopyRule{}, rounds);

  std::vector<uint64_t> hits(n, 0);
  for (const RoundTrace& tr : eng.traces())
    for (const PullEdge& e : tr.edges) ++hits[e.target];

  const double expected = double(rounds); // n draws per round, n targets
  double chi2 = 0.0;
  for (uint64_t h : hits) chi2 += (double(h) - expected) * (double(h) - expected) / expected;
  // chi^2 with 49 degrees of freedom: mean 49, sd ~9.9; 100 is past +5 sd.
  CHECK(chi2 < 100.0);
}

TEST_CASE("sample phase folds the lower-middle order statistic per node") {
  const std::vector<double> init{10.0, 20.0, 30.0, 40.0, 50.0};
  auto cfg = engine_cfg(5, 0.0, 1);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);

  EngineOptions eo;
  // Sample round r delivers the value of node r (same for every puller).
  eo.partner_override = [](int round, NodeId, int) { return NodeId(round); };

  SUBCASE("unclipped") {
    Engine eng(cfg, eo, init, *adv);
    eng.run_sample_phase(4, std::nullopt);
    // Samples {10,20,30,40}: even count, lower middle = 20.
    for (double v : eng.values()) CHECK(v == 20.0);
  }
  SUBCASE("clipped") {
    Engine eng(cfg, eo, init, *adv);
    eng.run_sample_phase(4, 15.0);
    // Clipped samples {10,15,15,15}: lower middle = 15.
    for (double v : eng.values()) CHECK(v == 15.0);
  }
}

TEST_CASE("sample phase traces freeze the snapshot until the fold") {
  std::vector<double> init{3.0, 1.0, 4.0, 1.0, 5.0, 9.0};
  auto cfg = engine_cfg(6, 0.0, 5);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);
  Engine eng(cfg, {}, init, *adv);
  eng.run_sample_phase(5, std::nullopt);

  const auto& traces = eng.traces();
  REQUIRE(traces.size() == 5);
  for (size_t i = 0; i + 1 < traces.size(); ++i) {
    CHECK(traces[i].summary.psi == traces[0].summary.psi);
    CHECK(traces[i].summary.min == 1.0);
    CHECK(traces[i].summary.max == 9.0);
  }
  // The last round's summary reflects the folded outputs instead.
  const double folded_psi = std::accumulate(eng.values().begin(), eng.values().end(), 0.0);
  CHECK(traces.back().summary.psi == doctest::Approx(folded_psi).epsilon(1e-12));
  auto rr = eng.finish();
  CHECK(rr.phase_boundaries == std::vector<int>{5});
}

TEST_CASE("round summaries carry window counts and medians when rank context is set") {
  std::vector<double> init(10);
  std::iota(init.begin(), init.end(), 1.0);

  EngineOptions eo;
  eo.rank = RankContext{init, 4, 6}; // already sorted; window = 4th..6th order stats
  eo.partner_override = [](int, NodeId v, int) { return v; }; // self-pull keeps values fixed
  auto cfg = engine_cfg(10, 0.0, 1);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);
  Engine eng(cfg, std::move(eo), init, *adv);
  eng.run_update_phase(Median3Rule{}, 1);

  const RoundSummary& s = eng.traces().at(0).summary;
  CHECK(s.has_rank_stats);
  CHECK(s.l_size == 3);
  CHECK(s.m_size == 3);
  CHECK(s.h_size == 4);
  CHECK(s.median == 5.0); // lower middle of 1..10
  CHECK(s.psi == 55.0);
  CHECK(s.phi == doctest::Approx(10.0 * 385.0 - 55.0 * 55.0).epsilon(1e-12));
  CHECK(s.min == 1.0);
  CHECK(s.max == 10.0);
}

TEST_CASE("initial values must match n and be finite") {
  auto cfg = engine_cfg(3, 0.0, 1);
  auto adv = make_adversary(StrategyDescriptor{}, cfg);
  CHECK_THROWS_AS(Engine(cfg, {}, {1.0, 2.0}, *adv), std::invalid_argument);
  CHECK_THROWS_AS(Engine(cfg, {}, {1.0, 2.0, std::numeric_limits<double>::infinity()}, *adv),
                  std::invalid_argument);
}

} // TEST_SUITE
