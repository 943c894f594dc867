// Run configuration, validation, and deterministic initial-value generation.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rgossip {

enum class Algorithm { median, quantile, mean };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct ValueDistribution {
  enum class Kind { distinct_permutation, uniform_real, constant, two_point, explicit_list };
  Kind kind = Kind::distinct_permutation;
  double lo = 0.0, hi = 1.0;    // uniform_real bounds
  double c = 0.0;               // constant value
  double a = 0.0, b = 1.0;      // two_point values; floor(fraction*n) nodes get b
  double fraction = 0.0;
  std::vector<double> values;   // explicit list, must have length n

  static ValueDistribution distinct_permutation();
  static ValueDistribution uniform_real(double lo, double hi);
  static ValueDistribution constant(double c);
  static ValueDistribution two_point(double a, double b, double fraction);
  static ValueDistribution explicit_list(std::vector<double> values);

  bool operator==(const ValueDistribution&) const = default;
};

// Force schedule constants past their derived values. Any set field marks the
// run off-spec in every emitted summary.
struct ScheduleOverrides {
  std::optional<double> delta;
  std::optional<double> gamma_prime;
  std::optional<double> eta;
  std::optional<int> k;

  bool any() const { return delta || gamma_prime || eta || k; }
  bool operator==(const ScheduleOverrides&) const = default;
};

struct SimConfig {
  uint64_t n = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double phi = 0.5;       // quantile algorithm only
  double m_bound = 0.0;   // mean algorithm only: value ceiling M
  Algorithm algorithm = Algorithm::median;
  uint64_t seed = 1;
  ValueDistribution distribution;
  ScheduleOverrides overrides;

  bool operator==(const SimConfig&) const = default;
};

// JSON round trip. Field names are contract: n, epsilon, beta, gamma, phi,
// m_bound, algorithm, seed, distribution, overrides. Unknown fields reject.
std::string sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const std::string& text);

enum class Severity { hard, soft };

struct ConfigIssue {
  std::string field;
  std::string message;
  Severity severity = Severity::hard;
};

// Hard issues are range and theorem-precondition violations; soft issues are
// asymptotic conditions whose constants the guarantees leave unspecified
// (evaluated with constant 1, informational only).
struct ValidationReport {
  std::vector<ConfigIssue> issues;

  bool ok() const;
  std::vector<ConfigIssue> hard() const;
  std::vector<ConfigIssue> soft() const;
};

ValidationReport validate_config(const SimConfig& cfg);

// Deterministic in cfg.seed. Throws std::invalid_argument when an explicit
// list has the wrong length or a mean-run value falls outside [0, m_bound].
std::vector<double> generate_initial_values(const SimConfig& cfg);

} // namespace rgossip
