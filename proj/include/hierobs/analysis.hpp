#pragma once

#include <limits>
#include <vector>

#include "hierobs/simulation.hpp"

namespace hierobs {

struct TimeWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

/// Least-squares slope of log(value) against t over samples with
/// t0 <= t <= t1, negated so that a decaying series gives a positive rate.
/// Throws std::invalid_argument when t1 <= t0, the sizes differ, fewer than
/// two samples fall in the window, or a value in the window is not positive.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                      const TimeWindow& window);

struct EnvelopeReport {
  bool holds = true;
  double max_violation = 0.0;  // max of ||q_e|| - envelope; <= tolerance when holds
  double violation_time = 0.0;
  double threshold = 0.0;      // b_bar / (2 c1)
  double first_crossing = std::numeric_limits<double>::quiet_NaN();
};

/// Checks ||q_e(t)|| <= ||q_e(0)|| e^{-c1 t} + (b_bar / 2c1)(1 - e^{-c1 t}) + tolerance
/// at every sample and locates the first sample at or below b_bar / (2 c1).
EnvelopeReport corollary_envelope_check(const RunRecord& record, double c1, double b_bar,
                                        double tolerance = 1e-3);

/// sup over the run of ||b_g - b_g_hat||.
double measured_gyro_bias_error_sup(const RunRecord& record);

/// Shrinks window.t1 to the last sample before the series first falls below
/// relative_floor times its value at window.t0.
TimeWindow truncate_at_relative_floor(const std::vector<double>& t,
                                      const std::vector<double>& value, TimeWindow window,
                                      double relative_floor = 1e-5);

/// Largest increase value[k+1] - value[k] among steps with t[k] >= t0.
double max_step_increase(const std::vector<double>& t, const std::vector<double>& value,
                         double t0 = 0.0);

// Column extraction helpers.
std::vector<double> times(const RunRecord& record);
std::vector<double> qe_norms(const RunRecord& record);
std::vector<double> lyapunov_values(const RunRecord& record);
std::vector<double> metric_errors(const RunRecord& record);
/// sqrt(x_e^T M x_e).
std::vector<double> metric_error_norms(const RunRecord& record);

}  // namespace hierobs
