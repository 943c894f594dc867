// Closed-form schedule derivations and tail bounds. Everything here is pure
// math on the run parameters; nothing touches the simulator.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgossip/core.hpp"

namespace rgossip {

// Phase 2 of the median schedule is either not needed (gamma' <= gamma/4),
// present with a concrete sample count, or required but infeasible at this n:
// the sample-count bound log_{20 gamma'}(gamma/4) is only defined when
// 20*gamma' < 1, and rather than emit a nonsense K the schedule reports why.
struct MedianPhase2 {
  enum class Status { absent, present, infeasible };
  Status status = Status::absent;
  int k = 0;            // meaningful only when status == present
  std::string reason;   // set when status == infeasible

  bool operator==(const MedianPhase2&) const = default;
};

struct MedianSchedule {
  double delta = 0.0;        // (30 ln n / n)^(1/3) unless overridden
  double gamma_prime = 0.0;  // max(delta, beta, min(gamma/4, epsilon/14))
  int t = 0;                 // Phase-1 iteration count, always >= 2
  MedianPhase2 phase2;
  bool off_spec = false;

  bool operator==(const MedianSchedule&) const = default;
};

struct QuantileSchedule {
  enum class Direction { min, max };

  double threshold_t = 0.0;        // 1/2 - 21 epsilon / 16
  std::vector<double> hprime_seq;  // h'_0 .. h'_t, shrinking recursion
  std::vector<double> h_seq;       // companion h_0 .. h_t with +beta drift
  std::vector<double> delta_seq;   // per-iteration mixing probability
  int t = 0;
  Direction direction = Direction::min;  // min for phi < 1/2, max for phi > 1/2
};

struct MeanSchedule {
  double delta = 0.0;   // sqrt(ln n / n) unless overridden
  double eta = 0.0;     // max(beta, delta, min(gamma^5, (epsilon/100)^2.5))
  int t_rounds = 0;     // ceil(log_{9/5}(1/eta))
  std::optional<int> k; // absent when eta equals the min(...) floor term
  bool off_spec = false;

  bool operator==(const MeanSchedule&) const = default;
};

// P[Binomial(n, p) > k], exact summation. Requires n <= 200.
double binom_tail(int n, int k, double p);

// l_0 = 1/2 - epsilon, l_{i+1} = B(l_i + beta) with B(p) = 3p^2 - 2p^3.
// Returns l_0 .. l_t.
std::vector<double> l_sequence(double epsilon, double beta, int t);

MedianSchedule median_schedule(uint64_t n, double epsilon, double beta, double gamma,
                               const ScheduleOverrides& ov = {});

QuantileSchedule quantile_schedule(uint64_t n, double phi, double epsilon, double beta);

MeanSchedule mean_schedule(uint64_t n, double epsilon, double beta, double gamma,
                           const ScheduleOverrides& ov = {});

// Rounds below which a beta-strong adversary can keep some nodes fully
// isolated: log(1/(2 gamma)) / log(1/beta). Requires beta in (0,1).
double lower_bound_direct(double beta, double gamma);

// Round threshold from value-spread counting: log2(log_{4e}(1/gamma)) + log_4(1/(6 epsilon)).
double lower_bound_spread(double epsilon, double gamma);

std::string median_schedule_to_json(const MedianSchedule& s);
std::string quantile_schedule_to_json(const QuantileSchedule& s);
std::string mean_schedule_to_json(const MeanSchedule& s);

} // namespace rgossip
