#include "rgossip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rgossip/analysis.hpp"
#include "rgossip/metrics.hpp"
#include "rgossip/rng.hpp"
#include "json_util.hpp"

namespace rgossip {

using jsonio::json;

namespace {

std::vector<double> axis_doubles(const json& arr, const std::string& ctx) {
  if (!arr.is_array() || arr.empty())
    throw std::invalid_argument(ctx + ": expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw std::invalid_argument(ctx + ": expected a number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<uint64_t> axis_u64(const json& arr, const std::string& ctx) {
  if (!arr.is_array() || arr.empty())
    throw std::invalid_argument(ctx + ": expected a non-empty array of integers");
  std::vector<uint64_t> out;
  for (const auto& v : arr) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw std::invalid_argument(ctx + ": expected an integer");
    if (v.is_number_integer() && v.get<int64_t>() < 0)
      throw std::invalid_argument(ctx + ": expected a non-negative integer");
    out.push_back(v.get<uint64_t>());
  }
  return out;
}

SweepAxes sweep_from_json(const json& j) {
  jsonio::check_fields(j, "plan.sweep", {"n", "epsilon", "beta", "gamma", "phi", "strategies"},
                       {});
  SweepAxes a;
  if (j.contains("n")) a.n = axis_u64(j.at("n"), "plan.sweep.n");
  if (j.contains("epsilon")) a.epsilon = axis_doubles(j.at("epsilon"), "plan.sweep.epsilon");
  if (j.contains("beta")) a.beta = axis_doubles(j.at("beta"), "plan.sweep.beta");
  if (j.contains("gamma")) a.gamma = axis_doubles(j.at("gamma"), "plan.sweep.gamma");
  if (j.contains("phi")) a.phi = axis_doubles(j.at("phi"), "plan.sweep.phi");
  if (j.contains("strategies")) {
    const auto& arr = j.at("strategies");
    if (!arr.is_array() || arr.empty())
      throw std::invalid_argument("plan.sweep.strategies: expected a non-empty array");
    for (size_t i = 0; i < arr.size(); ++i)
      a.strategies.push_back(jsonio::strategy_from_json_obj(
          arr[i], "plan.sweep.strategies[" + std::to_string(i) + "]"));
  }
  return a;
}

OutputSpec output_from_json(const json& j) {
  jsonio::check_fields(j, "plan.output", {"dir", "formats"}, {});
  OutputSpec spec;
  if (j.contains("dir")) {
    if (!j.at("dir").is_string())
      throw std::invalid_argument("plan.output.dir: expected a string");
    spec.dir = j.at("dir").get<std::string>();
  }
  if (j.contains("formats")) {
    const auto& arr = j.at("formats");
    if (!arr.is_array() || arr.empty())
      throw std::invalid_argument("plan.output.formats: expected a non-empty array");
    spec.csv = spec.jsonl = false;
    for (const auto& f : arr) {
      std::string s = f.is_string() ? f.get<std::string>() : std::string();
      if (s == "csv") spec.csv = true;
      else if (s == "jsonl") spec.jsonl = true;
      else
        throw std::invalid_argument("plan.output.formats: unknown format '" + s +
                                    "', expected csv or jsonl");
    }
  }
  return spec;
}

// Shortest round-trip decimal form; what the JSON writer uses, so CSV and
// JSONL agree digit for digit.
std::string num(double v) { return json(v).dump(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

json row_json(const ResultRow& row) {
  json j;
  j["key"] = row.key;
  j["point"] = row.point;
  j["seed"] = row.seed;
  j["status"] = row.status;
  if (!row.reason.empty()) j["reason"] = row.reason;
  j["config"] = jsonio::cfg_to_json(row.config);
  j["strategy"] = jsonio::strategy_json(row.strategy);
  j["fraction_incorrect"] = row.fraction_incorrect;
  j["incorrect_count"] = row.incorrect_count;
  j["algorithm_rounds"] = row.algorithm_rounds;
  j["engine_rounds"] = row.engine_rounds;
  j["pull_rounds"] = row.pull_rounds;
  j["phi_end"] = row.phi_end;
  j["psi_drift"] = row.psi_drift;
  j["theory_pass"] = row.theory_pass;
  if (!row.checks.empty()) {
    json arr = json::array();
    for (const auto& c : row.checks)
      arr.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
    j["checks"] = arr;
  }
  return j;
}

ResultRow row_from_json_obj(const json& j, const std::string& ctx) {
  jsonio::check_fields(j, ctx,
                       {"key", "point", "seed", "status", "reason", "config", "strategy",
                        "fraction_incorrect", "incorrect_count", "algorithm_rounds",
                        "engine_rounds", "pull_rounds", "phi_end", "psi_drift", "theory_pass",
                        "checks"},
                       {"key", "point", "seed", "status", "config", "strategy",
                        "fraction_incorrect", "incorrect_count", "algorithm_rounds",
                        "engine_rounds", "pull_rounds", "phi_end", "psi_drift", "theory_pass"});
  ResultRow row;
  row.key = j.at("key").get<std::string>();
  row.point = j.at("point").get<int>();
  row.seed = j.at("seed").get<uint64_t>();
  row.status = j.at("status").get<std::string>();
  if (j.contains("reason")) row.reason = j.at("reason").get<std::string>();
  row.config = jsonio::cfg_from_json(j.at("config"), ctx + ".config");
  row.strategy = jsonio::strategy_from_json_obj(j.at("strategy"), ctx + ".strategy");
  row.fraction_incorrect = j.at("fraction_incorrect").get<double>();
  row.incorrect_count = j.at("incorrect_count").get<uint64_t>();
  row.algorithm_rounds = j.at("algorithm_rounds").get<int>();
  row.engine_rounds = j.at("engine_rounds").get<int>();
  row.pull_rounds = j.at("pull_rounds").get<uint64_t>();
  row.phi_end = j.at("phi_end").get<double>();
  row.psi_drift = j.at("psi_drift").get<double>();
  row.theory_pass = j.at("theory_pass").get<bool>();
  if (j.contains("checks")) {
    for (const auto& c : j.at("checks")) {
      jsonio::check_fields(c, ctx + ".checks", {"name", "value", "bound", "pass"},
                           {"name", "value", "bound", "pass"});
      row.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                            c.at("bound").get<double>(), c.at("pass").get<bool>()});
    }
  }
  return row;
}

const NamedCheck* find_check(const std::vector<NamedCheck>& checks, const std::string& prefix) {
  for (const auto& c : checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

ResultRow run_row(const SweepPoint& pt, uint64_t seed, const RunPlanOptions& opts) {
  ResultRow row;
  row.point = pt.index;
  row.seed = seed;
  row.key = row_key(pt.index, seed);
  row.config = pt.config;
  row.config.seed = seed;
  row.strategy = pt.strategy;
  if (pt.skipped) {
    row.status = "skipped";
    row.reason = pt.skip_reason;
    return row;
  }
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto adv = make_adversary(pt.strategy, row.config);
    RunOptions ro;
    ro.trace = opts.trace;
    ro.collect_rank_stats = opts.collect_rank_stats;
    AlgorithmRun run = run_algorithm(row.config, *adv, ro);
    row.status = "ok";
    row.fraction_incorrect = run.eval.fraction_incorrect;
    row.incorrect_count = run.eval.incorrect_count;
    row.algorithm_rounds = run.algorithm_rounds;
    row.engine_rounds = run.engine_rounds;
    row.pull_rounds = run.pull_rounds;
    row.checks = run.eval.checks;
    if (run.mode == EvalMode::mean) {
      // The averaging guarantee is stated at the end of the mixing phase;
      // the evaluator already read those rounds out of the trace.
      if (const auto* c = find_check(row.checks, "phi_at_phase1_end")) row.phi_end = c->value;
      if (const auto* c = find_check(row.checks, "psi_drift")) row.psi_drift = c->value;
    } else {
      row.phi_end = phi_potential(run.output);
      row.psi_drift = psi_sum(run.output) - psi_sum(run.initial);
    }
    row.theory_pass = std::all_of(row.checks.begin(), row.checks.end(),
                                  [](const NamedCheck& c) { return c.pass; });
  } catch (const std::exception& e) {
    row.status = "error";
    row.reason = e.what();
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  size_t idx = size_t(std::ceil(q * double(sorted.size())));
  if (idx > 0) --idx;
  if (idx >= sorted.size()) idx = sorted.size() - 1;
  return sorted[idx];
}

} // namespace

std::string row_key(int point, uint64_t seed) {
  return "p" + std::to_string(point) + "_s" + std::to_string(seed);
}

ExperimentPlan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("plan: ") + e.what());
  }
  jsonio::check_fields(j, "plan", {"base", "strategy", "sweep", "seeds", "seed_count", "output"},
                       {"base"});
  ExperimentPlan plan;
  plan.base = jsonio::cfg_from_json(j.at("base"), "plan.base");
  if (j.contains("strategy"))
    plan.strategy = jsonio::strategy_from_json_obj(j.at("strategy"), "plan.strategy");
  if (j.contains("sweep")) plan.sweep = sweep_from_json(j.at("sweep"));
  if (j.contains("seeds") && j.contains("seed_count"))
    throw std::invalid_argument("plan: seeds and seed_count are mutually exclusive");
  if (j.contains("seeds")) {
    plan.seeds = axis_u64(j.at("seeds"), "plan.seeds");
  } else if (j.contains("seed_count")) {
    const auto& sc = j.at("seed_count");
    if (!sc.is_number_integer() && !sc.is_number_unsigned())
      throw std::invalid_argument("plan.seed_count: expected an integer");
    int64_t count = sc.get<int64_t>();
    if (count < 1) throw std::invalid_argument("plan.seed_count: expected a positive integer");
    plan.seeds.clear();
    for (int64_t s = 1; s <= count; ++s) plan.seeds.push_back(uint64_t(s));
  }
  if (j.contains("output")) plan.output = output_from_json(j.at("output"));
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("plan: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return plan_from_json(ss.str());
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["base"] = jsonio::cfg_to_json(plan.base);
  j["strategy"] = jsonio::strategy_json(plan.strategy);
  json sweep = json::object();
  if (!plan.sweep.n.empty()) sweep["n"] = plan.sweep.n;
  if (!plan.sweep.epsilon.empty()) sweep["epsilon"] = plan.sweep.epsilon;
  if (!plan.sweep.beta.empty()) sweep["beta"] = plan.sweep.beta;
  if (!plan.sweep.gamma.empty()) sweep["gamma"] = plan.sweep.gamma;
  if (!plan.sweep.phi.empty()) sweep["phi"] = plan.sweep.phi;
  if (!plan.sweep.strategies.empty()) {
    json arr = json::array();
    for (const auto& s : plan.sweep.strategies) arr.push_back(jsonio::strategy_json(s));
    sweep["strategies"] = arr;
  }
  if (!sweep.empty()) j["sweep"] = sweep;
  j["seeds"] = plan.seeds;
  j["output"] = {{"dir", plan.output.dir}};
  json formats = json::array();
  if (plan.output.csv) formats.push_back("csv");
  if (plan.output.jsonl) formats.push_back("jsonl");
  j["output"]["formats"] = formats;
  return j.dump();
}

std::vector<SweepPoint> expand_sweep(const ExperimentPlan& plan) {
  auto one_or = [](auto axis, auto base) {
    if (axis.empty()) axis.push_back(base);
    return axis;
  };
  auto ns = one_or(plan.sweep.n, plan.base.n);
  auto epsilons = one_or(plan.sweep.epsilon, plan.base.epsilon);
  auto betas = one_or(plan.sweep.beta, plan.base.beta);
  auto gammas = one_or(plan.sweep.gamma, plan.base.gamma);
  auto phis = one_or(plan.sweep.phi, plan.base.phi);
  auto strategies = plan.sweep.strategies;
  if (strategies.empty()) strategies.push_back(plan.strategy);

  std::vector<SweepPoint> points;
  int index = 0;
  for (uint64_t n : ns)
    for (double epsilon : epsilons)
      for (double beta : betas)
        for (double gamma : gammas)
          for (double phi : phis)
            for (const auto& strategy : strategies) {
              SweepPoint pt;
              pt.index = index++;
              pt.config = plan.base;
              pt.config.n = n;
              pt.config.epsilon = epsilon;
              pt.config.beta = beta;
              pt.config.gamma = gamma;
              pt.config.phi = phi;
              pt.strategy = strategy;
              auto report = validate_config(pt.config);
              if (!report.ok()) {
                pt.skipped = true;
                const auto hard = report.hard();
                std::string reason;
                for (const auto& issue : hard) {
                  if (!reason.empty()) reason += "; ";
                  reason += "[" + issue.field + "] " + issue.message;
                }
                pt.skip_reason = reason;
              }
              points.push_back(std::move(pt));
            }
  return points;
}

PlanResult run_plan(const ExperimentPlan& plan, const RunPlanOptions& opts) {
  PlanResult result;
  result.points = expand_sweep(plan);
  if (plan.seeds.empty()) throw std::invalid_argument("plan: seeds must not be empty");

  struct Job {
    size_t point;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (size_t p = 0; p < result.points.size(); ++p)
    for (uint64_t seed : plan.seeds) jobs.push_back({p, seed});
  result.rows.resize(jobs.size());

  std::atomic<size_t> next{0};
  std::mutex cb_mutex;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      result.rows[i] = run_row(result.points[jobs[i].point], jobs[i].seed, opts);
      if (opts.on_row) {
        std::lock_guard<std::mutex> lock(cb_mutex);
        opts.on_row(result.rows[i]);
      }
    }
  };
  int parallel = std::max(1, opts.parallel);
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < parallel; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  size_t seeds_per_point = plan.seeds.size();
  for (size_t p = 0; p < result.points.size(); ++p) {
    PointAggregate agg;
    agg.point = result.points[p].index;
    agg.seeds_total = seeds_per_point;
    agg.skip_reason = result.points[p].skip_reason;
    std::vector<double> fractions;
    double sum = 0.0;
    uint64_t passed = 0;
    for (size_t s = 0; s < seeds_per_point; ++s) {
      const ResultRow& row = result.rows[p * seeds_per_point + s];
      if (row.status == "ok") {
        ++agg.seeds_ok;
        fractions.push_back(row.fraction_incorrect);
        sum += row.fraction_incorrect;
        if (row.theory_pass) ++passed;
      } else if (row.status == "skipped") {
        ++agg.seeds_skipped;
      } else {
        ++agg.seeds_error;
      }
    }
    if (!fractions.empty()) {
      std::sort(fractions.begin(), fractions.end());
      agg.fraction_max = fractions.back();
      agg.fraction_mean = sum / double(fractions.size());
      agg.fraction_p50 = nearest_rank(fractions, 0.5);
      agg.fraction_p90 = nearest_rank(fractions, 0.9);
      agg.pass_rate = double(passed) / double(fractions.size());
    }
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

std::vector<std::string> emit_results(const PlanResult& result, const OutputSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.dir);
  std::vector<std::string> written;

  auto open = [&](const std::string& name) {
    std::string path = (fs::path(spec.dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
    return out;
  };

  if (spec.csv) {
    auto out = open("results.csv");
    out << "point,seed,key,status,algorithm,strategy,n,epsilon,beta,gamma,phi,m_bound,"
           "fraction_incorrect,incorrect_count,algorithm_rounds,engine_rounds,pull_rounds,"
           "phi_end,psi_drift,theory_pass,reason\n";
    for (const auto& row : result.rows) {
      out << row.point << ',' << row.seed << ',' << row.key << ',' << row.status << ','
          << algorithm_name(row.config.algorithm) << ',' << strategy_kind_name(row.strategy.kind)
          << ',' << row.config.n << ',' << num(row.config.epsilon) << ','
          << num(row.config.beta) << ',' << num(row.config.gamma) << ','
          << num(row.config.phi) << ',' << num(row.config.m_bound) << ',';
      if (row.status == "ok") {
        out << num(row.fraction_incorrect) << ',' << row.incorrect_count << ','
            << row.algorithm_rounds << ',' << row.engine_rounds << ',' << row.pull_rounds << ','
            << num(row.phi_end) << ',' << num(row.psi_drift) << ','
            << (row.theory_pass ? "true" : "false") << ',';
      } else {
        out << ",,,,,,,,";
      }
      out << csv_escape(row.reason) << '\n';
    }
  }

  if (spec.jsonl) {
    auto out = open("results.jsonl");
    for (const auto& row : result.rows) out << row_json(row).dump() << '\n';
  }

  {
    auto out = open("summary.json");
    json points = json::array();
    for (const auto& agg : result.aggregates) {
      json j;
      j["point"] = agg.point;
      j["seeds_total"] = agg.seeds_total;
      j["seeds_ok"] = agg.seeds_ok;
      j["seeds_skipped"] = agg.seeds_skipped;
      j["seeds_error"] = agg.seeds_error;
      j["fraction_max"] = agg.fraction_max;
      j["fraction_mean"] = agg.fraction_mean;
      j["fraction_p50"] = agg.fraction_p50;
      j["fraction_p90"] = agg.fraction_p90;
      j["pass_rate"] = agg.pass_rate;
      if (!agg.skip_reason.empty()) j["skip_reason"] = agg.skip_reason;
      points.push_back(j);
    }
    out << json{{"points", points}}.dump(1) << '\n';
  }
  return written;
}

std::string result_row_to_json(const ResultRow& row) { return row_json(row).dump(); }

ResultRow result_row_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("row: ") + e.what());
  }
  return row_from_json_obj(j, "row");
}

void write_trace_csv(std::ostream& out, const AlgorithmRun& run) {
  out << "round,corrupted,phi,psi,l,m,h,min,median,max\n";
  for (const auto& tr : run.traces) {
    const auto& s = tr.summary;
    out << tr.round_index << ',' << tr.corrupted_set.size() << ',' << num(s.phi) << ','
        << num(s.psi) << ',';
    if (s.has_rank_stats)
      out << s.l_size << ',' << s.m_size << ',' << s.h_size;
    else
      out << ",,";
    out << ',' << num(s.min) << ',';
    if (s.has_rank_stats) out << num(s.median);
    out << ',' << num(s.max) << '\n';
  }
}

std::string trace_csv(const AlgorithmRun& run) {
  std::ostringstream ss;
  write_trace_csv(ss, run);
  return ss.str();
}

LowerBoundResult lowerbound_experiment(uint64_t n, double beta, double gamma, int rounds,
                                       const std::vector<uint64_t>& seeds, bool sticky) {
  if (n == 0) throw std::invalid_argument("lowerbound: n must be positive");
  if (rounds < 0) throw std::invalid_argument("lowerbound: rounds must be non-negative");
  if (seeds.empty()) throw std::invalid_argument("lowerbound: seeds must not be empty");

  LowerBoundResult r;
  r.n = n;
  r.beta = beta;
  r.gamma = gamma;
  r.rounds = rounds;
  r.sticky = sticky;
  r.seeds = seeds;
  r.threshold_rounds = lower_bound_direct(beta, gamma);
  if (r.threshold_rounds < 1.0) {
    // Fewer than one round of corruption already suffices; nothing to measure.
    r.trivial = true;
    return r;
  }

  uint64_t budget = uint64_t(std::floor(beta * double(n) + 1e-9));
  size_t words = size_t((n + 63) / 64);

  if (rounds == 0) {
    r.vacuous = true;
    for (size_t i = 0; i < seeds.size(); ++i) {
      r.fractions.push_back(1.0);
      r.exceeds_gamma.push_back(1.0 > gamma ? 1 : 0);
    }
  } else {
    std::vector<uint64_t> mask(words), alive(words);
    for (uint64_t seed : seeds) {
      std::fill(alive.begin(), alive.end(), ~uint64_t(0));
      if (n % 64) alive[words - 1] = (uint64_t(1) << (n % 64)) - 1;
      for (int round = 0; round < rounds; ++round) {
        std::fill(mask.begin(), mask.end(), 0);
        if (sticky) {
          for (uint64_t v = 0; v < budget; ++v) mask[v >> 6] |= uint64_t(1) << (v & 63);
        } else {
          for (NodeId v : sample_corrupted_set(seed, round, n, budget))
            mask[v >> 6] |= uint64_t(1) << (v & 63);
        }
        for (uint64_t v = 0; v < n; ++v) {
          if (!(alive[v >> 6] >> (v & 63) & 1)) continue;
          uint64_t t = bounded(derive_stream(seed, StreamDomain::partner, uint64_t(round), v, 0), n);
          if (!(mask[t >> 6] >> (t & 63) & 1)) alive[v >> 6] &= ~(uint64_t(1) << (v & 63));
        }
      }
      uint64_t captured = 0;
      for (uint64_t w : alive) captured += uint64_t(std::popcount(w));
      double fraction = double(captured) / double(n);
      r.fractions.push_back(fraction);
      r.exceeds_gamma.push_back(fraction > gamma ? 1 : 0);
    }
  }

  for (uint8_t e : r.exceeds_gamma) r.exceed_count += e;
  double sum = 0.0;
  for (double f : r.fractions) sum += f;
  r.fraction_mean = sum / double(r.fractions.size());
  if (r.fractions.size() > 1) {
    double ss = 0.0;
    for (double f : r.fractions) ss += (f - r.fraction_mean) * (f - r.fraction_mean);
    r.fraction_stderr =
        std::sqrt(ss / double(r.fractions.size() - 1)) / std::sqrt(double(r.fractions.size()));
  }
  return r;
}

std::string lowerbound_to_json(const LowerBoundResult& r) {
  json j;
  j["n"] = r.n;
  j["beta"] = r.beta;
  j["gamma"] = r.gamma;
  j["rounds"] = r.rounds;
  j["sticky"] = r.sticky;
  j["threshold_rounds"] = r.threshold_rounds;
  j["trivial"] = r.trivial;
  j["vacuous"] = r.vacuous;
  j["seeds"] = r.seeds;
  j["fractions"] = r.fractions;
  json ex = json::array();
  for (uint8_t e : r.exceeds_gamma) ex.push_back(bool(e));
  j["exceeds_gamma"] = ex;
  j["exceed_count"] = r.exceed_count;
  j["fraction_mean"] = r.fraction_mean;
  j["fraction_stderr"] = r.fraction_stderr;
  return j.dump();
}

} // namespace rgossip
