#pragma once

#include <vector>

#include "hierobs/attitude_observer.hpp"
#include "hierobs/run_config.hpp"
#include "hierobs/sim_truth.hpp"
#include "hierobs/translation_observer.hpp"

namespace hierobs {

/// One integration step of a co-simulated run.
struct RunSample {
  double t = 0.0;
  TruthState truth;
  AttitudeState attitude;
  TranslationState translation;
  double qe_norm = 0.0;      // ||vec(q_e)||
  double bge_norm = 0.0;     // ||b_g - b_g_hat||
  double lyapunov = 0.0;     // attitude V
  Vec9 x_error = Vec9::Zero();  // (p - p_hat, v - v_hat, b_a - b_a_hat)
  double metric_error = 0.0;    // x_e^T M(t) x_e
};

struct RunRecord {
  std::vector<RunSample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

/// Certificate matrix P behind the metric column: closed-loop Lyapunov
/// solution with Q = C_o^T C_o for the configured gains and lambda.
Mat9 metric_certificate(const RunConfig& cfg);

/// Co-simulates truth, attitude observer and translation observer at a fixed
/// step from t = 0 to the last step not exceeding cfg.duration. Returns one
/// sample per step including t = 0. Throws std::invalid_argument for an
/// invalid config.
RunRecord run_simulation(const RunConfig& cfg);

/// Truth and measurement streams only, one entry per step.
struct TruthStreamSample {
  TruthState truth;
  ImuSample imu;
  PoseMeasurement pose;
};

std::vector<TruthStreamSample> generate_truth_stream(const RunConfig& cfg);

}  // namespace hierobs
