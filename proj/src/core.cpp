#include "rgossip/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rgossip/rng.hpp"

namespace rgossip {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::median: return "median";
    case Algorithm::quantile: return "quantile";
    case Algorithm::mean: return "mean";
  }
  throw std::logic_error("algorithm_name: unhandled enum value");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "median") return Algorithm::median;
  if (name == "quantile") return Algorithm::quantile;
  if (name == "mean") return Algorithm::mean;
  throw std::invalid_argument("unknown algorithm: '" + name + "'");
}

ValueDistribution ValueDistribution::distinct_permutation() {
  ValueDistribution d;
  d.kind = Kind::distinct_permutation;
  return d;
}

ValueDistribution ValueDistribution::uniform_real(double lo, double hi) {
  ValueDistribution d;
  d.kind = Kind::uniform_real;
  d.lo = lo;
  d.hi = hi;
  return d;
}

ValueDistribution ValueDistribution::constant(double c) {
  ValueDistribution d;
  d.kind = Kind::constant;
  d.c = c;
  return d;
}

ValueDistribution ValueDistribution::two_point(double a, double b, double fraction) {
  ValueDistribution d;
  d.kind = Kind::two_point;
  d.a = a;
  d.b = b;
  d.fraction = fraction;
  return d;
}

ValueDistribution ValueDistribution::explicit_list(std::vector<double> values) {
  ValueDistribution d;
  d.kind = Kind::explicit_list;
  d.values = std::move(values);
  return d;
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ConfigIssue& i) { return i.severity == Severity::hard; });
}

std::vector<ConfigIssue> ValidationReport::hard() const {
  std::vector<ConfigIssue> out;
  for (const auto& i : issues)
    if (i.severity == Severity::hard) out.push_back(i);
  return out;
}

std::vector<ConfigIssue> ValidationReport::soft() const {
  std::vector<ConfigIssue> out;
  for (const auto& i : issues)
    if (i.severity == Severity::soft) out.push_back(i);
  return out;
}

namespace {

void hard(ValidationReport& r, const std::string& field, const std::string& msg) {
  r.issues.push_back({field, msg, Severity::hard});
}

void soft(ValidationReport& r, const std::string& field, const std::string& msg) {
  r.issues.push_back({field, msg, Severity::soft});
}

} // namespace

ValidationReport validate_config(const SimConfig& cfg) {
  ValidationReport r;

  if (cfg.n < 2) hard(r, "n", "n must be at least 2");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    hard(r, "epsilon", "epsilon must lie in (0, 1)");
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) hard(r, "beta", "beta must lie in [0, 1)");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) hard(r, "gamma", "gamma must lie in (0, 1)");
  if (cfg.n >= 2 && cfg.gamma > 0.0 && cfg.gamma < 1.0 / (2.0 * double(cfg.n)))
    hard(r, "gamma", "gamma must be at least 1/(2n); a failure set smaller than half "
                     "a node is not meaningful");

  bool params_in_range = cfg.epsilon > 0.0 && cfg.epsilon < 1.0 && cfg.beta >= 0.0 &&
                         cfg.beta < 1.0 && cfg.n >= 2;

  switch (cfg.algorithm) {
    case Algorithm::median:
      if (params_in_range && cfg.beta > cfg.epsilon / 14.0)
        hard(r, "beta", "median guarantee requires beta <= epsilon/14");
      if (params_in_range && cfg.epsilon < std::pow(double(cfg.n), -0.0019))
        soft(r, "epsilon", "epsilon is below n^-0.0019 (asymptotic validity scale, "
                           "constant taken as 1; informational)");
      break;
    case Algorithm::quantile:
      if (!(cfg.phi > 0.0 && cfg.phi < 1.0)) hard(r, "phi", "phi must lie in (0, 1)");
      if (cfg.epsilon > 1.0 / 6.0)
        hard(r, "epsilon", "quantile guarantee requires epsilon <= 1/6");
      if (params_in_range && cfg.beta > std::pow(cfg.epsilon, 2.5) / 16.0)
        hard(r, "beta", "quantile guarantee requires beta <= epsilon^2.5/16");
      if (params_in_range &&
          cfg.epsilon < std::pow(std::log(double(cfg.n)) / double(cfg.n), 0.2))
        soft(r, "epsilon", "epsilon is below (ln n / n)^(1/5) (asymptotic validity "
                           "scale, constant taken as 1; informational)");
      break;
    case Algorithm::mean:
      if (!(cfg.m_bound > 0.0)) hard(r, "m_bound", "mean runs need a positive value ceiling M");
      if (params_in_range && cfg.beta > std::pow(cfg.epsilon / 100.0, 2.5))
        hard(r, "beta", "mean guarantee requires beta <= (epsilon/100)^2.5");
      if (params_in_range &&
          cfg.epsilon < std::pow(std::log(double(cfg.n)), 1.2) / std::pow(double(cfg.n), 0.2))
        soft(r, "epsilon", "epsilon is below (ln n)^1.2 / n^0.2 (asymptotic validity "
                           "scale, constant taken as 1; informational)");
      break;
  }

  switch (cfg.distribution.kind) {
    case ValueDistribution::Kind::uniform_real:
      if (!(cfg.distribution.lo <= cfg.distribution.hi))
        hard(r, "distribution", "uniform_real needs lo <= hi");
      break;
    case ValueDistribution::Kind::two_point:
      if (!(cfg.distribution.fraction >= 0.0 && cfg.distribution.fraction <= 1.0))
        hard(r, "distribution", "two_point fraction must lie in [0, 1]");
      break;
    case ValueDistribution::Kind::explicit_list:
      if (cfg.distribution.values.size() != cfg.n)
        hard(r, "distribution", "explicit value list length must equal n");
      break;
    default:
      break;
  }

  return r;
}

namespace {

// floor(fraction * n) with a snap-up for products that sit a hair below an
// integer due to binary representation (e.g. 0.3 * 10 = 2.999...96).
uint64_t floor_share(double fraction, uint64_t n) {
  double prod = fraction * double(n);
  return uint64_t(std::floor(prod + 1e-9));
}

// Deterministic Fisher-Yates over idx, one counter-stream word per step.
template <class T>
void shuffle_indices(std::vector<T>& idx, uint64_t seed, uint64_t stream_round) {
  for (uint64_t i = idx.size(); i-- > 1;) {
    uint64_t w = derive_stream(seed, StreamDomain::init, stream_round, i, 0);
    uint64_t j = bounded(w, i + 1);
    std::swap(idx[i], idx[j]);
  }
}

} // namespace

std::vector<double> generate_initial_values(const SimConfig& cfg) {
  const uint64_t n = cfg.n;
  std::vector<double> vals;

  switch (cfg.distribution.kind) {
    case ValueDistribution::Kind::distinct_permutation: {
      vals.resize(n);
      std::iota(vals.begin(), vals.end(), 1.0);
      shuffle_indices(vals, cfg.seed, 0);
      break;
    }
    case ValueDistribution::Kind::uniform_real: {
      vals.resize(n);
      const double lo = cfg.distribution.lo, span = cfg.distribution.hi - cfg.distribution.lo;
      for (uint64_t v = 0; v < n; ++v)
        vals[v] = lo + span * u01(derive_stream(cfg.seed, StreamDomain::init, 0, v, 0));
      break;
    }
    case ValueDistribution::Kind::constant: {
      vals.assign(n, cfg.distribution.c);
      break;
    }
    case ValueDistribution::Kind::two_point: {
      vals.assign(n, cfg.distribution.a);
      std::vector<uint32_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0u);
      shuffle_indices(idx, cfg.seed, 1);
      const uint64_t share = floor_share(cfg.distribution.fraction, n);
      for (uint64_t p = 0; p < share; ++p) vals[idx[p]] = cfg.distribution.b;
      break;
    }
    case ValueDistribution::Kind::explicit_list: {
      if (cfg.distribution.values.size() != n)
        throw std::invalid_argument("explicit value list has length " +
                                    std::to_string(cfg.distribution.values.size()) +
                                    ", expected n = " + std::to_string(n));
      vals = cfg.distribution.values;
      break;
    }
  }

  if (cfg.algorithm == Algorithm::mean) {
    for (uint64_t v = 0; v < n; ++v) {
      if (!(vals[v] >= 0.0 && vals[v] <= cfg.m_bound))
        throw std::invalid_argument("mean run requires values in [0, M]; node " +
                                    std::to_string(v) + " has " + std::to_string(vals[v]));
    }
  }

  return vals;
}

} // namespace rgossip
