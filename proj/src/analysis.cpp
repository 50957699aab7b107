#include "hierobs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hierobs {

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                      const TimeWindow& window) {
  if (t.size() != value.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (!(window.t1 > window.t0)) throw std::invalid_argument("fit_decay_rate: empty window");

  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t0 || t[i] > window.t1) continue;
    if (!(value[i] > 0.0)) {
      throw std::invalid_argument("fit_decay_rate: nonpositive value at t = " +
                                  std::to_string(t[i]));
    }
    const double y = std::log(value[i]);
    n += 1.0;
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
  }
  if (n < 2.0) throw std::invalid_argument("fit_decay_rate: fewer than two samples in window");
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw std::invalid_argument("fit_decay_rate: degenerate time samples");
  return -(n * sxy - sx * sy) / denom;
}

EnvelopeReport corollary_envelope_check(const RunRecord& record, double c1, double b_bar,
                                        double tolerance) {
  if (record.empty()) throw std::invalid_argument("corollary_envelope_check: empty record");
  EnvelopeReport rep;
  rep.threshold = b_bar / (2.0 * c1);
  rep.max_violation = -std::numeric_limits<double>::infinity();
  const double q0 = record.samples.front().qe_norm;
  const double t_start = record.samples.front().t;
  for (const RunSample& s : record.samples) {
    const double decay = std::exp(-c1 * (s.t - t_start));
    const double bound = q0 * decay + rep.threshold * (1.0 - decay);
    const double excess = s.qe_norm - bound;
    if (excess > rep.max_violation) {
      rep.max_violation = excess;
      rep.violation_time = s.t;
    }
    if (std::isnan(rep.first_crossing) && s.qe_norm <= rep.threshold) rep.first_crossing = s.t;
  }
  rep.holds = rep.max_violation <= tolerance;
  return rep;
}

double measured_gyro_bias_error_sup(const RunRecord& record) {
  double sup = 0.0;
  for (const RunSample& s : record.samples) sup = std::max(sup, s.bge_norm);
  return sup;
}

TimeWindow truncate_at_relative_floor(const std::vector<double>& t,
                                      const std::vector<double>& value, TimeWindow window,
                                      double relative_floor) {
  double reference = std::numeric_limits<double>::quiet_NaN();
  double last_kept = window.t0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t0 || t[i] > window.t1) continue;
    if (std::isnan(reference)) reference = value[i];
    if (value[i] < relative_floor * reference) {
      window.t1 = last_kept;
      return window;
    }
    last_kept = t[i];
  }
  return window;
}

double max_step_increase(const std::vector<double>& t, const std::vector<double>& value,
                         double t0) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < value.size(); ++i) {
    if (t[i] < t0) continue;
    worst = std::max(worst, value[i + 1] - value[i]);
  }
  return worst;
}

namespace {

template <typename F>
std::vector<double> column(const RunRecord& record, F f) {
  std::vector<double> out;
  out.reserve(record.size());
  for (const RunSample& s : record.samples) out.push_back(f(s));
  return out;
}

}  // namespace

std::vector<double> times(const RunRecord& r) {
  return column(r, [](const RunSample& s) { return s.t; });
}
std::vector<double> qe_norms(const RunRecord& r) {
  return column(r, [](const RunSample& s) { return s.qe_norm; });
}
std::vector<double> lyapunov_values(const RunRecord& r) {
  return column(r, [](const RunSample& s) { return s.lyapunov; });
}
std::vector<double> metric_errors(const RunRecord& r) {
  return column(r, [](const RunSample& s) { return s.metric_error; });
}
std::vector<double> metric_error_norms(const RunRecord& r) {
  return column(r, [](const RunSample& s) { return std::sqrt(std::max(0.0, s.metric_error)); });
}

}  // namespace hierobs
