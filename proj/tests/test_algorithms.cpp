#include "doctest.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "rgossip/algorithms.hpp"

using namespace rgossip;

namespace {

SimConfig median_cfg(uint64_t n, uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.epsilon = 0.14;
  cfg.beta = 0.0;
  cfg.gamma = 0.25;
  cfg.algorithm = Algorithm::median;
  cfg.seed = seed;
  cfg.distribution = ValueDistribution::distinct_permutation();
  // Honest delta at unit-test n is far above gamma/4 and the sampling stage
  // has no valid length there; pin a small mixing target instead (off_spec).
  cfg.overrides.delta = 0.01;
  return cfg;
}

SimConfig quantile_cfg(uint64_t n, double phi, uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.epsilon = 0.1;
  cfg.beta = 0.0;
  cfg.gamma = 0.25;
  cfg.phi = phi;
  cfg.algorithm = Algorithm::quantile;
  cfg.seed = seed;
  cfg.distribution = ValueDistribution::distinct_permutation();
  return cfg;
}

SimConfig mean_cfg(uint64_t n, uint64_t seed) {
  SimConfig cfg;
  cfg.n = n;
  cfg.epsilon = 0.2;
  cfg.beta = 0.0;
  cfg.gamma = 0.1;
  cfg.m_bound = 1.0;
  cfg.algorithm = Algorithm::mean;
  cfg.seed = seed;
  cfg.distribution = ValueDistribution::uniform_real(0.0, 1.0);
  return cfg;
}

StrategyDescriptor none_strategy() { return StrategyDescriptor{}; }

bool check_passed(const EvalReport& rep, const std::string& name) {
  for (const NamedCheck& c : rep.checks)
    if (c.name == name) return c.pass;
  FAIL("missing check: ", name);
  return false;
}

} // namespace

TEST_SUITE("algorithms") {

TEST_CASE("median with constant inputs returns the constant everywhere") {
  auto cfg = median_cfg(400, 3);
  cfg.distribution = ValueDistribution::constant(5.0);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_median(cfg, *adv);
  for (double v : run.output) CHECK(v == 5.0);
  CHECK(run.eval.fraction_incorrect == 0.0);
}

TEST_CASE("median run structure follows the schedule") {
  auto cfg = median_cfg(1000, 11);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_median(cfg, *adv);

  REQUIRE(run.median_sched.has_value());
  const MedianSchedule& s = *run.median_sched;
  CHECK(s.phase2.status == MedianPhase2::Status::absent);
  CHECK(run.off_spec); // delta override
  CHECK(run.engine_rounds == s.t);
  CHECK(int(run.traces.size()) == s.t);
  CHECK(run.phases == std::vector<PhaseInfo>{{"median_mix", s.t}});
  CHECK(run.phase_boundaries == std::vector<int>{s.t});
  CHECK(run.algorithm_rounds == s.t);
  CHECK(run.pull_rounds == 3 * uint64_t(s.t));
  CHECK(run.budget == 0);
}

TEST_CASE("median on a permutation converges to the rank window") {
  auto cfg = median_cfg(2000, 17);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_median(cfg, *adv);
  CHECK(check_passed(run.eval, "fraction_incorrect<=gamma"));
  // The mixing phase contracts the pair potential by orders of magnitude.
  REQUIRE(!run.eval.phi_series.empty());
  CHECK(run.eval.phi_series.back() < run.eval.phi_series.front() / 100.0);
}

TEST_CASE("median under a small sticky attack still lands in the window") {
  auto cfg = median_cfg(2000, 23);
  cfg.beta = 0.001; // budget 2
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::sticky_extreme;
  d.value = 1e9;
  auto adv = make_adversary(d, cfg);
  const AlgorithmRun run = run_median(cfg, *adv);
  CHECK(run.budget == 2);
  CHECK(check_passed(run.eval, "fraction_incorrect<=gamma"));
}

TEST_CASE("run_median refuses an infeasible sampling stage") {
  SimConfig cfg;
  cfg.n = 10000; // honest gamma' = delta(1e4) = 0.302; 20*gamma' >= 1
  cfg.epsilon = 0.14;
  cfg.beta = 0.0;
  cfg.gamma = 0.25;
  cfg.algorithm = Algorithm::median;
  cfg.seed = 1;
  cfg.distribution = ValueDistribution::distinct_permutation();
  auto adv = make_adversary(none_strategy(), cfg);
  CHECK_THROWS_WITH_AS(run_median(cfg, *adv), doctest::Contains("no valid length"),
                       std::runtime_error);
}

TEST_CASE("run_median rejects configs that fail validation") {
  auto cfg = median_cfg(1000, 1);
  cfg.beta = 0.05; // above epsilon/14
  auto adv = make_adversary(none_strategy(), cfg);
  CHECK_THROWS_AS(run_median(cfg, *adv), std::invalid_argument);

  auto wrong = mean_cfg(1000, 1);
  CHECK_THROWS_WITH_AS(run_median(wrong, *adv), doctest::Contains("expected median"),
                       std::invalid_argument);
}

TEST_CASE("quantile shift at phi = 1/2 performs no rounds") {
  auto cfg = quantile_cfg(500, 0.5, 2);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_shift(cfg, *adv);
  CHECK(run.engine_rounds == 0);
  CHECK(run.traces.empty());
  std::vector<double> sorted_out = run.output;
  std::sort(sorted_out.begin(), sorted_out.end());
  std::vector<double> sorted_in = run.initial;
  std::sort(sorted_in.begin(), sorted_in.end());
  CHECK(sorted_out == sorted_in);
}

TEST_CASE("quantile shift without corruption never invents values") {
  auto cfg = quantile_cfg(3000, 0.3, 5);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_shift(cfg, *adv);
  const std::set<double> allowed(run.initial.begin(), run.initial.end());
  for (double v : run.output) CHECK(allowed.count(v) == 1);
}

TEST_CASE("quantile shift moves the mass into the guaranteed rank windows") {
  auto cfg = quantile_cfg(30000, 0.3, 7);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_shift(cfg, *adv);
  CHECK(run.direction_min);
  CHECK(check_passed(run.eval, "far_share>=1/2-15eps/8"));
  CHECK(check_passed(run.eval, "far_share<=1/2-eps/8"));
  CHECK(check_passed(run.eval, "mid_share>=2eps"));
}

TEST_CASE("quantile shift mirrors for phi above 1/2") {
  auto cfg = quantile_cfg(30000, 0.7, 7);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_shift(cfg, *adv);
  CHECK_FALSE(run.direction_min);
  CHECK(check_passed(run.eval, "far_share>=1/2-15eps/8"));
  CHECK(check_passed(run.eval, "far_share<=1/2-eps/8"));
  CHECK(check_passed(run.eval, "mid_share>=2eps"));
}

TEST_CASE("quantile composition reaches the original rank window") {
  auto cfg = quantile_cfg(5000, 0.3, 9);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_full(cfg, *adv);

  // At this n the composed sampling stage is infeasible (20*gamma' >= 1); the
  // run must say so and still deliver the mixing-phase guarantee.
  CHECK(run.phase2_skipped_infeasible);
  REQUIRE(run.median_sched.has_value());
  CHECK(run.median_sched->phase2.status == MedianPhase2::Status::infeasible);
  REQUIRE(run.quantile_sched.has_value());
  CHECK(run.phases.size() == 2);
  CHECK(run.phases[0].name == "quantile_shift");
  CHECK(run.phases[1].name == "median_mix");
  CHECK(run.engine_rounds == run.quantile_sched->t + run.median_sched->t);
  CHECK(check_passed(run.eval, "fraction_incorrect<=gamma"));
  CHECK(run.mode == EvalMode::quantile_full);
}

TEST_CASE("quantile composition at phi = 1/2 degenerates to the median stage") {
  auto cfg = quantile_cfg(800, 0.5, 4);
  cfg.overrides.delta = 0.01; // keep the composed stage feasible at showcase n
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_quantile_full(cfg, *adv);
  REQUIRE(run.quantile_sched.has_value());
  CHECK(run.quantile_sched->t == 0);
  CHECK(run.phases[0] == PhaseInfo{"quantile_shift", 0});
  CHECK(run.phases[1].name == "median_mix");
  CHECK_FALSE(run.phase2_skipped_infeasible);
  CHECK(check_passed(run.eval, "fraction_incorrect<=gamma"));
}

TEST_CASE("mean with constant inputs returns the constant") {
  auto cfg = mean_cfg(600, 6);
  cfg.distribution = ValueDistribution::constant(0.75);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_mean(cfg, *adv);
  for (double v : run.output) CHECK(v == 0.75);
}

TEST_CASE("mean run satisfies the potential and drift bounds") {
  auto cfg = mean_cfg(30000, 8);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_mean(cfg, *adv);

  REQUIRE(run.mean_sched.has_value());
  CHECK(run.mean_sched->k.has_value());
  CHECK(*run.mean_sched->k == 100);
  CHECK(run.engine_rounds == run.mean_sched->t_rounds + 100);
  CHECK(check_passed(run.eval, "fraction_incorrect<=gamma"));
  CHECK(check_passed(run.eval, "phi_at_phase1_end<=5*eta*n^2*M^2"));
  CHECK(check_passed(run.eval, "psi_drift<=3eps/8*n*M"));
  for (double v : run.output) {
    CHECK(v >= 0.0);
    CHECK(v <= cfg.m_bound);
  }
}

TEST_CASE("mean sampling stage outputs the lower-middle of each node's samples") {
  auto cfg = mean_cfg(500, 12);
  auto adv = make_adversary(none_strategy(), cfg);
  RunOptions opts;
  opts.trace.level = TraceOptions::Level::edges;
  const AlgorithmRun run = run_mean(cfg, *adv, opts);

  REQUIRE(run.mean_sched->k.has_value());
  const int k = *run.mean_sched->k;
  const int t = run.mean_sched->t_rounds;
  REQUIRE(int(run.traces.size()) == t + k);

  for (NodeId v : {NodeId(0), NodeId(137), NodeId(499)}) {
    std::vector<double> samples;
    for (int r = t; r < t + k; ++r) {
      const RoundTrace& tr = run.traces[size_t(r)];
      REQUIRE(tr.edges_recorded);
      const PullEdge& e = tr.edges.at(v);
      CHECK(e.puller == v);
      samples.push_back(std::clamp(e.delivered_value, 0.0, cfg.m_bound));
    }
    auto mid = samples.begin() + (k - 1) / 2;
    std::nth_element(samples.begin(), mid, samples.end());
    CHECK(run.output[v] == *mid);
  }
}

TEST_CASE("runs are deterministic given the seed") {
  auto cfg = median_cfg(900, 31);
  cfg.beta = 0.002;
  StrategyDescriptor d;
  d.kind = StrategyDescriptor::Kind::random_noise;
  d.noise_lo = -100.0;
  d.noise_hi = 100.0;
  auto adv1 = make_adversary(d, cfg);
  auto adv2 = make_adversary(d, cfg);
  const AlgorithmRun a = run_median(cfg, *adv1);
  const AlgorithmRun b = run_median(cfg, *adv2);
  CHECK(a.output == b.output);
  CHECK(a.traces == b.traces);

  auto cfg2 = cfg;
  cfg2.seed = 32;
  auto adv3 = make_adversary(d, cfg2);
  CHECK(run_median(cfg2, *adv3).output != a.output);
}

TEST_CASE("run_algorithm dispatches on the config") {
  auto m = median_cfg(600, 2);
  auto adv = make_adversary(none_strategy(), m);
  CHECK(run_algorithm(m, *adv).mode == EvalMode::median);

  auto q = quantile_cfg(600, 0.5, 2);
  q.overrides.delta = 0.01;
  CHECK(run_algorithm(q, *adv).mode == EvalMode::quantile_full);

  auto mn = mean_cfg(600, 2);
  CHECK(run_algorithm(mn, *adv).mode == EvalMode::mean);
}

TEST_CASE("algorithm_run_to_json carries the run summary") {
  auto cfg = median_cfg(600, 13);
  auto adv = make_adversary(none_strategy(), cfg);
  const AlgorithmRun run = run_median(cfg, *adv);
  const nlohmann::json j = nlohmann::json::parse(algorithm_run_to_json(run));

  CHECK(j.at("config").at("n") == 600);
  CHECK(j.at("schedule").contains("median"));
  CHECK_FALSE(j.at("schedule").contains("mean"));
  CHECK(j.at("phases").size() == 1);
  CHECK(j.at("phases")[0].at("name") == "median_mix");
  CHECK(j.at("engine_rounds") == run.engine_rounds);
  CHECK(j.at("pull_rounds") == run.pull_rounds);
  CHECK(j.at("off_spec") == true);
  const auto& hist = j.at("output_histogram");
  uint64_t total = 0;
  for (const auto& b : hist.at("bins")) total += b.get<uint64_t>();
  CHECK(total == 600);
  CHECK(j.at("eval").at("mode") == "median");
  CHECK(j.at("eval").at("checks").size() == 1);
}

} // TEST_SUITE
