// Internal JSON helpers shared by serialize.cpp and harness.cpp. Not installed;
// public headers stay free of the vendored json dependency.
#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "rgossip/algorithms.hpp"
#include "rgossip/analysis.hpp"
#include "rgossip/adversary.hpp"
#include "rgossip/core.hpp"
#include "rgossip/metrics.hpp"

namespace rgossip::jsonio {

using nlohmann::json;

// Strict object shape check: every present key must be allowed, every required
// key must be present. ctx names the object in error messages.
void check_fields(const json& obj, const std::string& ctx,
                  const std::vector<std::string>& allowed,
                  const std::vector<std::string>& required);

json dist_to_json(const ValueDistribution& d);
ValueDistribution dist_from_json(const json& j, const std::string& ctx);

json overrides_to_json(const ScheduleOverrides& ov);
ScheduleOverrides overrides_from_json(const json& j, const std::string& ctx);

json cfg_to_json(const SimConfig& cfg);
SimConfig cfg_from_json(const json& j, const std::string& ctx);

json median_schedule_json(const MedianSchedule& s);
json quantile_schedule_json(const QuantileSchedule& s);
json mean_schedule_json(const MeanSchedule& s);

json strategy_json(const StrategyDescriptor& d);
StrategyDescriptor strategy_from_json_obj(const json& j, const std::string& ctx);

json eval_report_json(const EvalReport& r);
json algorithm_run_json(const AlgorithmRun& run);

} // namespace rgossip::jsonio
