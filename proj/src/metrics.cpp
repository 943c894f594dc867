#include "rgossip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rgossip {

RankBounds rank_bounds(double v, const std::vector<double>& sorted_reference) {
  RankBounds rb;
  rb.below = std::lower_bound(sorted_reference.begin(), sorted_reference.end(), v) -
             sorted_reference.begin();
  rb.at_or_below = std::upper_bound(sorted_reference.begin(), sorted_reference.end(), v) -
                   sorted_reference.begin();
  return rb;
}

QuantileWindow quantile_window(uint64_t n, double phi, double epsilon) {
  // Products like 0.4*10 land one ulp under the integer; snap before rounding.
  const double lo_raw = (phi - epsilon) * double(n);
  const double hi_raw = (phi + epsilon) * double(n);
  QuantileWindow w;
  w.lo = int64_t(std::ceil(lo_raw - 1e-9));
  w.hi = int64_t(std::floor(hi_raw + 1e-9));
  return w;
}

bool is_correct_quantile(double v, double phi, double epsilon,
                         const std::vector<double>& sorted_reference) {
  const QuantileWindow w = quantile_window(sorted_reference.size(), phi, epsilon);
  const RankBounds rb = rank_bounds(v, sorted_reference);
  return rb.at_or_below >= w.lo && rb.below < w.hi;
}

bool is_correct_mean(double v, double true_mean, double epsilon, double m_bound) {
  const double bound = epsilon * m_bound;
  return std::abs(v - true_mean) <= bound * (1.0 + 1e-9);
}

LmhCounts partition_lmh(const std::vector<double>& values,
                        const std::vector<double>& sorted_reference, double phi, double epsilon) {
  const QuantileWindow w = quantile_window(sorted_reference.size(), phi, epsilon);
  LmhCounts c;
  for (double v : values) {
    const RankBounds rb = rank_bounds(v, sorted_reference);
    if (rb.at_or_below < w.lo)
      ++c.l;
    else if (rb.below >= w.hi)
      ++c.h;
    else
      ++c.m;
  }
  return c;
}

namespace {

struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double t = sum + (v - c);
    c = (t - sum) - (v - c);
    sum = t;
  }
};

} // namespace

double phi_potential(const std::vector<double>& values) {
  Kahan s, s2;
  for (double v : values) {
    s.add(v);
    s2.add(v * v);
  }
  const double phi = double(values.size()) * s2.sum - s.sum * s.sum;
  return std::max(0.0, phi);
}

double psi_sum(const std::vector<double>& values) {
  Kahan s;
  for (double v : values) s.add(v);
  return s.sum;
}

std::string eval_mode_name(EvalMode m) {
  switch (m) {
    case EvalMode::median: return "median";
    case EvalMode::quantile_shift: return "quantile_shift";
    case EvalMode::quantile_full: return "quantile_full";
    case EvalMode::mean: return "mean";
  }
  throw std::logic_error("eval_mode_name: unhandled enum value");
}

EvalReport evaluate_run(const RunView& view) {
  if (!view.config || !view.initial || !view.final_values || !view.traces)
    throw std::invalid_argument("evaluate_run: incomplete run view");
  const SimConfig& cfg = *view.config;
  const std::vector<double>& out = *view.final_values;
  const uint64_t n = cfg.n;
  if (view.initial->size() != n || out.size() != n)
    throw std::invalid_argument("evaluate_run: value vectors do not match n");

  EvalReport rep;
  rep.criterion = cfg.algorithm;
  rep.mode = view.mode;

  std::vector<double> sorted = *view.initial;
  std::sort(sorted.begin(), sorted.end());

  const bool quantile_like = view.mode != EvalMode::mean;
  const double phi_target = view.mode == EvalMode::median ? 0.5 : cfg.phi;
  if (quantile_like) {
    rep.window = quantile_window(n, phi_target, cfg.epsilon);
  } else {
    rep.true_mean = psi_sum(*view.initial) / double(n);
    rep.tolerance = cfg.epsilon * cfg.m_bound;
  }

  rep.correct.assign(n, 0);
  for (uint64_t i = 0; i < n; ++i) {
    bool ok;
    if (quantile_like)
      ok = is_correct_quantile(out[i], phi_target, cfg.epsilon, sorted);
    else
      ok = is_correct_mean(out[i], rep.true_mean, cfg.epsilon, cfg.m_bound);
    rep.correct[i] = ok ? 1 : 0;
    if (!ok) ++rep.incorrect_count;
  }
  rep.fraction_incorrect = double(rep.incorrect_count) / double(n);

  for (const RoundTrace& tr : *view.traces) {
    rep.phi_series.push_back(tr.summary.phi);
    rep.psi_series.push_back(tr.summary.psi);
    if (tr.summary.has_rank_stats)
      rep.lmh_series.push_back(
          LmhCounts{tr.summary.l_size, tr.summary.m_size, tr.summary.h_size});
  }

  auto push_check = [&rep](std::string name, double value, double bound, bool pass) {
    rep.checks.push_back(NamedCheck{std::move(name), value, bound, pass});
  };

  switch (view.mode) {
    case EvalMode::median:
    case EvalMode::quantile_full:
      push_check("fraction_incorrect<=gamma", rep.fraction_incorrect, cfg.gamma,
                 rep.fraction_incorrect <= cfg.gamma);
      break;
    case EvalMode::quantile_shift: {
      // After the shift, the mass beyond the window's far side must sit in
      // [1/2 - 15eps/8, 1/2 - eps/8] and the window itself keep share >= 2eps,
      // both measured against the original values.
      const LmhCounts c = partition_lmh(out, sorted, phi_target, cfg.epsilon);
      const double far_share =
          double(view.direction_min ? c.h : c.l) / double(n);
      const double mid_share = double(c.m) / double(n);
      const double far_lo = 0.5 - 15.0 * cfg.epsilon / 8.0;
      const double far_hi = 0.5 - cfg.epsilon / 8.0;
      push_check("far_share>=1/2-15eps/8", far_share, far_lo, far_share >= far_lo);
      push_check("far_share<=1/2-eps/8", far_share, far_hi, far_share <= far_hi);
      push_check("mid_share>=2eps", mid_share, 2.0 * cfg.epsilon, mid_share >= 2.0 * cfg.epsilon);
      break;
    }
    case EvalMode::mean: {
      push_check("fraction_incorrect<=gamma", rep.fraction_incorrect, cfg.gamma,
                 rep.fraction_incorrect <= cfg.gamma);
      double phi_t, psi_t;
      if (view.phase1_end >= 1 && size_t(view.phase1_end) <= view.traces->size()) {
        const RoundSummary& s = (*view.traces)[size_t(view.phase1_end) - 1].summary;
        phi_t = s.phi;
        psi_t = s.psi;
      } else {
        phi_t = phi_potential(*view.initial);
        psi_t = psi_sum(*view.initial);
      }
      const double phi_bound = 5.0 * view.eta * double(n) * double(n) * cfg.m_bound * cfg.m_bound;
      push_check("phi_at_phase1_end<=5*eta*n^2*M^2", phi_t, phi_bound, phi_t <= phi_bound);
      const double drift = std::abs(psi_t - psi_sum(*view.initial));
      const double drift_bound = (3.0 * cfg.epsilon / 8.0) * double(n) * cfg.m_bound;
      push_check("psi_drift<=3eps/8*n*M", drift, drift_bound, drift <= drift_bound);
      break;
    }
  }
  return rep;
}

} // namespace rgossip
