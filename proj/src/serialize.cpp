#include "src/json_util.hpp"

#include <algorithm>
#include <stdexcept>

namespace rgossip::jsonio {

void check_fields(const json& obj, const std::string& ctx,
                  const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required) {
  if (!obj.is_object())
    throw std::invalid_argument(ctx + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw std::invalid_argument(ctx + ": unknown field '" + item.key() + "'");
  }
  for (const auto& req : required) {
    if (!obj.contains(req))
      throw std::invalid_argument(ctx + ": missing required field '" + req + "'");
  }
}

namespace {

double as_double(const json& j, const std::string& ctx, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number())
    throw std::invalid_argument(ctx + ": field '" + key + "' must be a number");
  return v.get<double>();
}

uint64_t as_uint(const json& j, const std::string& ctx, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
    throw std::invalid_argument(ctx + ": field '" + key + "' must be a non-negative integer");
  return v.get<uint64_t>();
}

} // namespace

json dist_to_json(const ValueDistribution& d) {
  json j;
  switch (d.kind) {
    case ValueDistribution::Kind::distinct_permutation:
      j["kind"] = "distinct_permutation";
      break;
    case ValueDistribution::Kind::uniform_real:
      j["kind"] = "uniform_real";
      j["lo"] = d.lo;
      j["hi"] = d.hi;
      break;
    case ValueDistribution::Kind::constant:
      j["kind"] = "constant";
      j["c"] = d.c;
      break;
    case ValueDistribution::Kind::two_point:
      j["kind"] = "two_point";
      j["a"] = d.a;
      j["b"] = d.b;
      j["fraction"] = d.fraction;
      break;
    case ValueDistribution::Kind::explicit_list:
      j["kind"] = "explicit";
      j["values"] = d.values;
      break;
  }
  return j;
}

ValueDistribution dist_from_json(const json& j, const std::string& ctx) {
  check_fields(j, ctx, {"kind", "lo", "hi", "c", "a", "b", "fraction", "values"}, {"kind"});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "distinct_permutation") {
    check_fields(j, ctx, {"kind"}, {"kind"});
    return ValueDistribution::distinct_permutation();
  }
  if (kind == "uniform_real") {
    check_fields(j, ctx, {"kind", "lo", "hi"}, {"kind", "lo", "hi"});
    return ValueDistribution::uniform_real(as_double(j, ctx, "lo"), as_double(j, ctx, "hi"));
  }
  if (kind == "constant") {
    check_fields(j, ctx, {"kind", "c"}, {"kind", "c"});
    return ValueDistribution::constant(as_double(j, ctx, "c"));
  }
  if (kind == "two_point") {
    check_fields(j, ctx, {"kind", "a", "b", "fraction"}, {"kind", "a", "b", "fraction"});
    return ValueDistribution::two_point(as_double(j, ctx, "a"), as_double(j, ctx, "b"),
                                        as_double(j, ctx, "fraction"));
  }
  if (kind == "explicit") {
    check_fields(j, ctx, {"kind", "values"}, {"kind", "values"});
    if (!j.at("values").is_array())
      throw std::invalid_argument(ctx + ": 'values' must be an array");
    return ValueDistribution::explicit_list(j.at("values").get<std::vector<double>>());
  }
  throw std::invalid_argument(ctx + ": unknown distribution kind '" + kind + "'");
}

json overrides_to_json(const ScheduleOverrides& ov) {
  json j = json::object();
  if (ov.delta) j["delta"] = *ov.delta;
  if (ov.gamma_prime) j["gamma_prime"] = *ov.gamma_prime;
  if (ov.eta) j["eta"] = *ov.eta;
  if (ov.k) j["k"] = *ov.k;
  return j;
}

ScheduleOverrides overrides_from_json(const json& j, const std::string& ctx) {
  check_fields(j, ctx, {"delta", "gamma_prime", "eta", "k"}, {});
  ScheduleOverrides ov;
  if (j.contains("delta")) ov.delta = as_double(j, ctx, "delta");
  if (j.contains("gamma_prime")) ov.gamma_prime = as_double(j, ctx, "gamma_prime");
  if (j.contains("eta")) ov.eta = as_double(j, ctx, "eta");
  if (j.contains("k")) ov.k = int(as_uint(j, ctx, "k"));
  return ov;
}

json cfg_to_json(const SimConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["epsilon"] = cfg.epsilon;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["phi"] = cfg.phi;
  j["m_bound"] = cfg.m_bound;
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j["seed"] = cfg.seed;
  j["distribution"] = dist_to_json(cfg.distribution);
  j["overrides"] = overrides_to_json(cfg.overrides);
  return j;
}

SimConfig cfg_from_json(const json& j, const std::string& ctx) {
  check_fields(j, ctx,
               {"n", "epsilon", "beta", "gamma", "phi", "m_bound", "algorithm", "seed",
                "distribution", "overrides"},
               {"n", "epsilon", "beta", "gamma", "algorithm", "seed", "distribution"});
  SimConfig cfg;
  cfg.n = as_uint(j, ctx, "n");
  cfg.epsilon = as_double(j, ctx, "epsilon");
  cfg.beta = as_double(j, ctx, "beta");
  cfg.gamma = as_double(j, ctx, "gamma");
  if (j.contains("phi")) cfg.phi = as_double(j, ctx, "phi");
  if (j.contains("m_bound")) cfg.m_bound = as_double(j, ctx, "m_bound");
  cfg.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  cfg.seed = as_uint(j, ctx, "seed");
  cfg.distribution = dist_from_json(j.at("distribution"), ctx + ".distribution");
  if (j.contains("overrides"))
    cfg.overrides = overrides_from_json(j.at("overrides"), ctx + ".overrides");
  return cfg;
}

json median_schedule_json(const MedianSchedule& s) {
  json j;
  j["delta"] = s.delta;
  j["gamma_prime"] = s.gamma_prime;
  j["t"] = s.t;
  switch (s.phase2.status) {
    case MedianPhase2::Status::absent:
      break;
    case MedianPhase2::Status::present:
      j["k"] = s.phase2.k;
      break;
    case MedianPhase2::Status::infeasible:
      j["k"] = nullptr;
      j["phase2_infeasible_reason"] = s.phase2.reason;
      break;
  }
  j["off_spec"] = s.off_spec;
  return j;
}

json quantile_schedule_json(const QuantileSchedule& s) {
  json j;
  j["threshold_T"] = s.threshold_t;
  j["hprime_seq"] = s.hprime_seq;
  j["h_seq"] = s.h_seq;
  j["delta_seq"] = s.delta_seq;
  j["t"] = s.t;
  j["direction"] = s.direction == QuantileSchedule::Direction::min ? "min" : "max";
  return j;
}

json mean_schedule_json(const MeanSchedule& s) {
  json j;
  j["delta"] = s.delta;
  j["eta"] = s.eta;
  j["t_rounds"] = s.t_rounds;
  if (s.k) j["k"] = *s.k;
  j["off_spec"] = s.off_spec;
  return j;
}

json strategy_json(const StrategyDescriptor& d) {
  json j;
  j["kind"] = strategy_kind_name(d.kind);
  switch (d.kind) {
    case StrategyDescriptor::Kind::none:
      break;
    case StrategyDescriptor::Kind::static_extreme:
    case StrategyDescriptor::Kind::sticky_extreme:
    case StrategyDescriptor::Kind::mean_inflator:
      j["value"] = d.value;
      break;
    case StrategyDescriptor::Kind::alternating_extreme:
      j["value"] = d.value;
      j["value2"] = d.value2;
      break;
    case StrategyDescriptor::Kind::median_pusher:
      j["offset"] = d.offset;
      j["push_up"] = d.push_up;
      break;
    case StrategyDescriptor::Kind::random_noise:
      j["noise_lo"] = d.noise_lo;
      j["noise_hi"] = d.noise_hi;
      break;
  }
  if (d.sticky) j["sticky"] = *d.sticky;
  return j;
}

StrategyDescriptor strategy_from_json_obj(const json& j, const std::string& ctx) {
  check_fields(j, ctx,
               {"kind", "value", "value2", "offset", "push_up", "noise_lo", "noise_hi", "sticky"},
               {"kind"});
  StrategyDescriptor d;
  d.kind = strategy_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("value")) d.value = as_double(j, ctx, "value");
  if (j.contains("value2")) d.value2 = as_double(j, ctx, "value2");
  if (j.contains("offset")) d.offset = as_double(j, ctx, "offset");
  if (j.contains("push_up")) {
    if (!j.at("push_up").is_boolean())
      throw std::invalid_argument(ctx + ": field 'push_up' must be a boolean");
    d.push_up = j.at("push_up").get<bool>();
  }
  if (j.contains("noise_lo")) d.noise_lo = as_double(j, ctx, "noise_lo");
  if (j.contains("noise_hi")) d.noise_hi = as_double(j, ctx, "noise_hi");
  if (j.contains("sticky")) {
    if (!j.at("sticky").is_boolean())
      throw std::invalid_argument(ctx + ": field 'sticky' must be a boolean");
    d.sticky = j.at("sticky").get<bool>();
  }
  return d;
}

json eval_report_json(const EvalReport& r) {
  json j;
  j["criterion"] = algorithm_name(r.criterion);
  j["mode"] = eval_mode_name(r.mode);
  j["incorrect_count"] = r.incorrect_count;
  j["fraction_incorrect"] = r.fraction_incorrect;
  if (r.mode == EvalMode::mean) {
    j["true_mean"] = r.true_mean;
    j["tolerance"] = r.tolerance;
  } else {
    j["window"] = {{"lo", r.window.lo}, {"hi", r.window.hi}};
  }
  json checks = json::array();
  for (const NamedCheck& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
  j["checks"] = checks;
  j["phi_series"] = r.phi_series;
  j["psi_series"] = r.psi_series;
  json lmh = json::array();
  for (const LmhCounts& c : r.lmh_series) lmh.push_back({c.l, c.m, c.h});
  j["lmh_series"] = lmh;
  return j;
}

namespace {

json output_histogram(const std::vector<double>& out) {
  json j;
  if (out.empty()) {
    j["lo"] = 0.0;
    j["hi"] = 0.0;
    j["bins"] = json::array();
    return j;
  }
  const auto [mn, mx] = std::minmax_element(out.begin(), out.end());
  const double lo = *mn, hi = *mx;
  j["lo"] = lo;
  j["hi"] = hi;
  constexpr int kBins = 32;
  std::vector<uint64_t> bins(kBins, 0);
  const double width = hi - lo;
  for (double v : out) {
    int b = width > 0.0 ? int((v - lo) / width * kBins) : 0;
    bins[size_t(std::clamp(b, 0, kBins - 1))]++;
  }
  j["bins"] = bins;
  return j;
}

} // namespace

json algorithm_run_json(const AlgorithmRun& run) {
  json j;
  j["config"] = cfg_to_json(run.config);
  json sched = json::object();
  if (run.median_sched) sched["median"] = median_schedule_json(*run.median_sched);
  if (run.quantile_sched) sched["quantile"] = quantile_schedule_json(*run.quantile_sched);
  if (run.mean_sched) sched["mean"] = mean_schedule_json(*run.mean_sched);
  j["schedule"] = sched;
  json phases = json::array();
  for (const PhaseInfo& p : run.phases)
    phases.push_back({{"name", p.name}, {"engine_rounds", p.engine_rounds}});
  j["phases"] = phases;
  j["algorithm_rounds"] = run.algorithm_rounds;
  j["engine_rounds"] = run.engine_rounds;
  j["pull_rounds"] = run.pull_rounds;
  j["budget"] = run.budget;
  j["off_spec"] = run.off_spec;
  j["phase2_skipped_infeasible"] = run.phase2_skipped_infeasible;
  j["output_histogram"] = output_histogram(run.output);
  j["eval"] = eval_report_json(run.eval);
  return j;
}

} // namespace rgossip::jsonio

namespace rgossip {

std::string sim_config_to_json(const SimConfig& cfg) {
  return jsonio::cfg_to_json(cfg).dump();
}

SimConfig sim_config_from_json(const std::string& text) {
  jsonio::json j;
  try {
    j = jsonio::json::parse(text);
  } catch (const jsonio::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return jsonio::cfg_from_json(j, "config");
}

std::string median_schedule_to_json(const MedianSchedule& s) {
  return jsonio::median_schedule_json(s).dump();
}

std::string quantile_schedule_to_json(const QuantileSchedule& s) {
  return jsonio::quantile_schedule_json(s).dump();
}

std::string mean_schedule_to_json(const MeanSchedule& s) {
  return jsonio::mean_schedule_json(s).dump();
}

std::string strategy_to_json(const StrategyDescriptor& d) {
  return jsonio::strategy_json(d).dump();
}

StrategyDescriptor strategy_from_json(const std::string& text) {
  jsonio::json j;
  try {
    j = jsonio::json::parse(text);
  } catch (const jsonio::json::parse_error& e) {
    throw std::invalid_argument(std::string("strategy: ") + e.what());
  }
  return jsonio::strategy_from_json_obj(j, "strategy");
}

std::string eval_report_to_json(const EvalReport& r) {
  return jsonio::eval_report_json(r).dump();
}

std::string algorithm_run_to_json(const AlgorithmRun& run) {
  return jsonio::algorithm_run_json(run).dump();
}

} // namespace rgossip
