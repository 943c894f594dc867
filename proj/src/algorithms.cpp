#include "rgossip/algorithms.hpp"

#include <stdexcept>
#include <utility>

namespace rgossip {

namespace {

void require_valid(const SimConfig& cfg, Algorithm expected) {
  if (cfg.algorithm != expected)
    throw std::invalid_argument("config.algorithm is " + algorithm_name(cfg.algorithm) +
                                ", expected " + algorithm_name(expected));
  const ValidationReport rep = validate_config(cfg);
  if (!rep.ok()) {
    std::string msg = "invalid config:";
    for (const ConfigIssue& issue : rep.hard()) msg += " [" + issue.field + "] " + issue.message;
    throw std::invalid_argument(msg);
  }
}

EngineOptions engine_options(const RunOptions& opts, const SimConfig& cfg, double phi,
                             const std::vector<double>& initial, bool rank_eligible) {
  EngineOptions eo;
  eo.trace = opts.trace;
  eo.partner_override = opts.partner_override;
  if (rank_eligible && opts.collect_rank_stats && cfg.n <= opts.trace.rank_stat_threshold) {
    RankContext rc;
    rc.sorted_initial = initial;
    std::sort(rc.sorted_initial.begin(), rc.sorted_initial.end());
    const QuantileWindow w = quantile_window(cfg.n, phi, cfg.epsilon);
    rc.lo = w.lo;
    rc.hi = w.hi;
    eo.rank = std::move(rc);
  }
  return eo;
}

void finalize(AlgorithmRun& run, RunResult&& rr) {
  run.output = std::move(rr.final_values);
  run.traces = std::move(rr.traces);
  run.phase_boundaries = std::move(rr.phase_boundaries);
  run.budget = rr.budget;
  run.engine_rounds = int(run.traces.size());
  run.eval = evaluate_run(run);
}

} // namespace

AlgorithmRun run_median(const SimConfig& cfg, Adversary& adv, const RunOptions& opts) {
  require_valid(cfg, Algorithm::median);
  const MedianSchedule sched =
      median_schedule(cfg.n, cfg.epsilon, cfg.beta, cfg.gamma, cfg.overrides);
  if (sched.phase2.status == MedianPhase2::Status::infeasible)
    throw std::runtime_error("median sampling phase has no valid length: " +
                             sched.phase2.reason);

  AlgorithmRun run;
  run.config = cfg;
  run.median_sched = sched;
  run.off_spec = sched.off_spec;
  run.mode = EvalMode::median;
  run.initial = generate_initial_values(cfg);

  EngineOptions eo = engine_options(opts, cfg, 0.5, run.initial, true);
  Engine eng(cfg, std::move(eo), run.initial, adv);
  eng.run_update_phase(Median3Rule{}, sched.t);
  run.phases.push_back({"median_mix", sched.t});
  run.phase1_end = sched.t;
  run.algorithm_rounds = sched.t;
  run.pull_rounds = 3 * uint64_t(sched.t);
  if (sched.phase2.status == MedianPhase2::Status::present) {
    eng.run_sample_phase(sched.phase2.k, std::nullopt);
    run.phases.push_back({"median_sample", sched.phase2.k});
    run.algorithm_rounds += sched.phase2.k;
    run.pull_rounds += uint64_t(sched.phase2.k);
  }
  finalize(run, eng.finish());
  return run;
}

AlgorithmRun run_quantile_shift(const SimConfig& cfg, Adversary& adv, const RunOptions& opts) {
  require_valid(cfg, Algorithm::quantile);
  const QuantileSchedule sched = quantile_schedule(cfg.n, cfg.phi, cfg.epsilon, cfg.beta);

  AlgorithmRun run;
  run.config = cfg;
  run.quantile_sched = sched;
  run.mode = EvalMode::quantile_shift;
  run.direction_min = sched.direction == QuantileSchedule::Direction::min;
  run.initial = generate_initial_values(cfg);

  EngineOptions eo = engine_options(opts, cfg, cfg.phi, run.initial, true);
  Engine eng(cfg, std::move(eo), run.initial, adv);
  QuantileShiftRule rule{cfg.seed, &sched.delta_seq, run.direction_min};
  eng.run_update_phase(rule, sched.t);
  run.phases.push_back({"quantile_shift", sched.t});
  run.phase1_end = sched.t;
  run.algorithm_rounds = sched.t;
  run.pull_rounds = 2 * uint64_t(sched.t);
  finalize(run, eng.finish());
  return run;
}

AlgorithmRun run_quantile_full(const SimConfig& cfg, Adversary& adv, const RunOptions& opts) {
  require_valid(cfg, Algorithm::quantile);
  const QuantileSchedule shift = quantile_schedule(cfg.n, cfg.phi, cfg.epsilon, cfg.beta);
  const double eps_med = cfg.epsilon / 8.0;
  const MedianSchedule med = median_schedule(cfg.n, eps_med, cfg.beta, cfg.gamma, cfg.overrides);

  AlgorithmRun run;
  run.config = cfg;
  run.quantile_sched = shift;
  run.median_sched = med;
  run.off_spec = med.off_spec;
  run.mode = EvalMode::quantile_full;
  run.direction_min = shift.direction == QuantileSchedule::Direction::min;
  run.initial = generate_initial_values(cfg);

  EngineOptions eo = engine_options(opts, cfg, cfg.phi, run.initial, true);
  Engine eng(cfg, std::move(eo), run.initial, adv);
  QuantileShiftRule rule{cfg.seed, &shift.delta_seq, run.direction_min};
  eng.run_update_phase(rule, shift.t);
  run.phases.push_back({"quantile_shift", shift.t});
  eng.run_update_phase(Median3Rule{}, med.t);
  run.phases.push_back({"median_mix", med.t});
  run.phase1_end = shift.t + med.t;
  run.algorithm_rounds = shift.t + med.t;
  run.pull_rounds = 2 * uint64_t(shift.t) + 3 * uint64_t(med.t);
  if (med.phase2.status == MedianPhase2::Status::present) {
    eng.run_sample_phase(med.phase2.k, std::nullopt);
    run.phases.push_back({"median_sample", med.phase2.k});
    run.algorithm_rounds += med.phase2.k;
    run.pull_rounds += uint64_t(med.phase2.k);
  } else if (med.phase2.status == MedianPhase2::Status::infeasible) {
    // The sampling stage has no valid length at these parameters; run the
    // mixing stage alone and say so, rather than inventing a sample count.
    run.phase2_skipped_infeasible = true;
  }
  finalize(run, eng.finish());
  return run;
}

AlgorithmRun run_mean(const SimConfig& cfg, Adversary& adv, const RunOptions& opts) {
  require_valid(cfg, Algorithm::mean);
  const MeanSchedule sched = mean_schedule(cfg.n, cfg.epsilon, cfg.beta, cfg.gamma, cfg.overrides);

  AlgorithmRun run;
  run.config = cfg;
  run.mean_sched = sched;
  run.off_spec = sched.off_spec;
  run.mode = EvalMode::mean;
  run.eta = sched.eta;
  run.initial = generate_initial_values(cfg);

  EngineOptions eo = engine_options(opts, cfg, cfg.phi, run.initial, false);
  Engine eng(cfg, std::move(eo), run.initial, adv);
  eng.run_update_phase(MeanPullRule{cfg.m_bound}, sched.t_rounds);
  run.phases.push_back({"mean_mix", sched.t_rounds});
  run.phase1_end = sched.t_rounds;
  run.algorithm_rounds = sched.t_rounds;
  run.pull_rounds = 2 * uint64_t(sched.t_rounds);
  if (sched.k) {
    eng.run_sample_phase(*sched.k, cfg.m_bound);
    run.phases.push_back({"mean_sample", *sched.k});
    run.algorithm_rounds += *sched.k;
    run.pull_rounds += uint64_t(*sched.k);
  }
  finalize(run, eng.finish());
  return run;
}

AlgorithmRun run_algorithm(const SimConfig& cfg, Adversary& adv, const RunOptions& opts) {
  switch (cfg.algorithm) {
    case Algorithm::median: return run_median(cfg, adv, opts);
    case Algorithm::quantile: return run_quantile_full(cfg, adv, opts);
    case Algorithm::mean: return run_mean(cfg, adv, opts);
  }
  throw std::logic_error("run_algorithm: unhandled algorithm");
}

EvalReport evaluate_run(const AlgorithmRun& run) {
  RunView view;
  view.config = &run.config;
  view.initial = &run.initial;
  view.final_values = &run.output;
  view.traces = &run.traces;
  view.mode = run.mode;
  view.phase1_end = run.phase1_end;
  view.eta = run.eta;
  view.direction_min = run.direction_min;
  return evaluate_run(view);
}

} // namespace rgossip
