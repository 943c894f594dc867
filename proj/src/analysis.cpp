#include "rgossip/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace rgossip {

double binom_tail(int n, int k, double p) {
  if (n < 0 || n > 200)
    throw std::invalid_argument("binom_tail: n must lie in [0, 200] (exact summation)");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binom_tail: p must lie in [0, 1]");
  if (k < 0) return 1.0;
  if (k >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;

  const long double lp = p, lq = 1.0L - lp;
  // C(n, k+1), then walk i upward keeping coefficient and powers incremental.
  long double coeff = 1.0L;
  for (int j = 1; j <= k + 1; ++j) coeff *= (long double)(n - j + 1) / (long double)j;
  long double term = coeff * std::pow(lp, (long double)(k + 1)) *
                     std::pow(lq, (long double)(n - k - 1));
  long double sum = 0.0L, comp = 0.0L;
  for (int i = k + 1; i <= n; ++i) {
    long double y = term - comp;
    long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    term *= ((long double)(n - i) / (long double)(i + 1)) * (lp / lq);
  }
  if (sum < 0.0L) sum = 0.0L;
  if (sum > 1.0L) sum = 1.0L;
  return double(sum);
}

std::vector<double> l_sequence(double epsilon, double beta, int t) {
  if (t < 0) throw std::invalid_argument("l_sequence: t must be non-negative");
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::invalid_argument("l_sequence: epsilon must lie in (0, 1/2]");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("l_sequence: beta must lie in [0, 1)");

  std::vector<double> out;
  out.reserve(size_t(t) + 1);
  double l = 0.5 - epsilon;
  out.push_back(l);
  for (int i = 0; i < t; ++i) {
    double x = l + beta;
    if (x > 1.0) throw std::domain_error("l_sequence: l_i + beta exceeded 1");
    l = x * x * (3.0 - 2.0 * x);
    out.push_back(l);
  }
  return out;
}

namespace {

// ceil of a log ratio, clamped at 0 so an already-satisfied target contributes
// no iterations (the recursions only improve with extra rounds, so clamping
// is safe for every downstream bound).
int ceil_term(double value) {
  double c = std::ceil(value);
  return c <= 0.0 ? 0 : int(c);
}

} // namespace

MedianSchedule median_schedule(uint64_t n, double epsilon, double beta, double gamma,
                               const ScheduleOverrides& ov) {
  if (n < 2) throw std::invalid_argument("median_schedule: n must be at least 2");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("median_schedule: epsilon must lie in (0, 1)");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("median_schedule: beta must lie in [0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("median_schedule: gamma must lie in (0, 1)");
  if (epsilon <= beta)
    throw std::invalid_argument("median_schedule: epsilon must exceed beta, otherwise "
                                "the Phase-1 iteration count is undefined");

  MedianSchedule s;
  s.delta = ov.delta ? *ov.delta : std::cbrt(30.0 * std::log(double(n)) / double(n));
  s.gamma_prime = ov.gamma_prime
                      ? *ov.gamma_prime
                      : std::max({s.delta, beta, std::min(gamma / 4.0, epsilon / 14.0)});
  if (!(s.gamma_prime > 0.0))
    throw std::invalid_argument("median_schedule: gamma_prime must be positive");
  if (s.gamma_prime >= 1.0)
    throw std::invalid_argument("median_schedule: gamma_prime >= 1 (n too small for the "
                                "contraction bound); schedule undefined");

  int term1 = ceil_term(std::log(1.0 / (3.0 * (epsilon - beta))) / std::log(157.0 / 156.0));
  double inner = std::log(1.0 / s.gamma_prime) / std::log(9.0 / 8.0);
  int term2 = ceil_term(std::log2(inner));
  s.t = term1 + term2 + 2;

  const bool phase2_needed = s.gamma_prime > gamma / 4.0;
  if (ov.k) {
    if (20.0 * s.gamma_prime >= 1.0)
      throw std::invalid_argument("median_schedule: K requested while 20*gamma_prime >= 1; "
                                  "the sample-count bound log_{20 gamma'}(gamma/4) is undefined");
    s.phase2.status = MedianPhase2::Status::present;
    s.phase2.k = *ov.k;
  } else if (!phase2_needed) {
    s.phase2.status = MedianPhase2::Status::absent;
  } else if (20.0 * s.gamma_prime >= 1.0) {
    s.phase2.status = MedianPhase2::Status::infeasible;
    s.phase2.reason = "Phase 2 required (gamma_prime = " + std::to_string(s.gamma_prime) +
                      " > gamma/4 = " + std::to_string(gamma / 4.0) + ") but 20*gamma_prime = " +
                      std::to_string(20.0 * s.gamma_prime) +
                      " >= 1, so the sample-count bound log_{20 gamma'}(gamma/4) is undefined "
                      "at this n; reporting instead of producing a nonsense K";
  } else {
    double kraw = 8.0 * std::log(gamma / 4.0) / std::log(20.0 * s.gamma_prime);
    s.phase2.status = MedianPhase2::Status::present;
    s.phase2.k = int(std::ceil(kraw));
  }

  s.off_spec = bool(ov.delta) || bool(ov.gamma_prime) || bool(ov.k);
  return s;
}

QuantileSchedule quantile_schedule(uint64_t n, double phi, double epsilon, double beta) {
  if (n < 2) throw std::invalid_argument("quantile_schedule: n must be at least 2");
  if (!(phi > 0.0 && phi < 1.0))
    throw std::invalid_argument("quantile_schedule: phi must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0 / 6.0))
    throw std::invalid_argument("quantile_schedule: epsilon must lie in (0, 1/6]");
  if (!(beta >= 0.0 && beta <= std::pow(epsilon, 2.5) / 16.0))
    throw std::invalid_argument("quantile_schedule: beta must lie in [0, epsilon^2.5/16]");

  QuantileSchedule q;
  q.threshold_t = 0.5 - 21.0 * epsilon / 16.0;

  if (phi == 0.5) {
    // Already the median: empty shift schedule.
    q.hprime_seq = {0.5 - epsilon};
    q.h_seq = {0.5 - epsilon};
    q.t = 0;
    return q;
  }

  q.direction = phi < 0.5 ? QuantileSchedule::Direction::min : QuantileSchedule::Direction::max;
  double h0 = phi < 0.5 ? 1.0 - (phi + epsilon) : phi - epsilon;
  q.hprime_seq.push_back(h0);
  q.h_seq.push_back(h0);

  while (q.hprime_seq.back() > q.threshold_t) {
    if (q.delta_seq.size() > 200)
      throw std::logic_error("quantile_schedule: recursion failed to reach the threshold");
    double hp = q.hprime_seq.back();
    double hn = (hp - beta) * (hp - beta);
    q.delta_seq.push_back(std::min(1.0, (hp - q.threshold_t) / (hp - hn)));
    q.hprime_seq.push_back(hn);
    double h = q.h_seq.back();
    q.h_seq.push_back((h + beta) * (h + beta));
  }
  q.t = int(q.delta_seq.size());
  return q;
}

MeanSchedule mean_schedule(uint64_t n, double epsilon, double beta, double gamma,
                           const ScheduleOverrides& ov) {
  if (n < 2) throw std::invalid_argument("mean_schedule: n must be at least 2");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("mean_schedule: epsilon must lie in (0, 1)");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("mean_schedule: beta must lie in [0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("mean_schedule: gamma must lie in (0, 1)");

  MeanSchedule m;
  m.delta = ov.delta ? *ov.delta : std::sqrt(std::log(double(n)) / double(n));
  const double floor_term = std::min(std::pow(gamma, 5.0), std::pow(epsilon / 100.0, 2.5));
  m.eta = ov.eta ? *ov.eta : std::max({beta, m.delta, floor_term});
  if (!(m.eta > 0.0 && m.eta < 1.0))
    throw std::invalid_argument("mean_schedule: eta must lie in (0, 1)");
  m.t_rounds = int(std::ceil(std::log(1.0 / m.eta) / std::log(9.0 / 5.0)));
  if (m.t_rounds < 1) m.t_rounds = 1;

  if (ov.k) {
    m.k = *ov.k;
  } else if (m.eta > floor_term) {
    if (beta == 0.0) {
      // The beta-dependent term vanishes; only the fixed floor remains.
      m.k = 100;
    } else {
      if (32.0 * beta >= 1.0)
        throw std::invalid_argument("mean_schedule: 32*beta >= 1 with Phase 2 required; "
                                    "the sample-count bound log_{32 beta}(gamma/2) is undefined");
      int kk = int(std::ceil(40.0 * std::log(gamma / 2.0) / std::log(32.0 * beta)));
      m.k = std::max(100, kk);
    }
  }

  m.off_spec = bool(ov.delta) || bool(ov.eta) || bool(ov.k);
  return m;
}

double lower_bound_direct(double beta, double gamma) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("lower_bound_direct: beta must lie in (0, 1); beta = 0 "
                                "leaves nothing for the adversary to corrupt");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("lower_bound_direct: gamma must lie in (0, 1)");
  return std::log(1.0 / (2.0 * gamma)) / std::log(1.0 / beta);
}

double lower_bound_spread(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("lower_bound_spread: epsilon must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("lower_bound_spread: gamma must lie in (0, 1)");
  double inner = std::log(1.0 / gamma) / std::log(4.0 * std::exp(1.0));
  return std::log2(inner) + std::log(1.0 / (6.0 * epsilon)) / std::log(4.0);
}

} // namespace rgossip
