#include "hierobs/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>

namespace hierobs {

namespace {

std::size_t step_count(const RunConfig& cfg) {
  return static_cast<std::size_t>(std::floor(cfg.duration / cfg.dt + 1e-9));
}

TruthState initial_truth(const RunConfig& cfg) {
  TruthState s;
  s.p = cfg.p0;
  s.v = cfg.v0;
  s.q = normalized(cfg.q0);
  s.accel_bias = cfg.accel_bias;
  s.gyro_bias = cfg.gyro_bias;
  return s;
}

struct Measurements {
  ImuSample imu;
  PoseMeasurement pose;
};

class MeasurementSource {
 public:
  explicit MeasurementSource(const RunConfig& cfg) : cfg_(cfg) {}

  Measurements sample(const TruthState& s, double t, std::size_t k) {
    auto [imu, pose] = corrupt(s, t, profile_);
    if (k % static_cast<std::size_t>(cfg_.pose_decimation) == 0 || !have_pose_) {
      held_ = pose;
      have_pose_ = true;
    }
    PoseMeasurement out = held_;
    if (cfg_.sign_flip_time >= 0.0 && t >= cfg_.sign_flip_time) out.q = -out.q;
    return {imu, out};
  }

  const MotionProfile& profile() const { return profile_; }

 private:
  const RunConfig& cfg_;
  MotionProfile profile_ = MotionProfile::reference();
  PoseMeasurement held_;
  bool have_pose_ = false;
};

OmegaDotMode resolved_mode(const RunConfig& cfg) {
  if (cfg.omega_dot != OmegaDotMode::kAuto) return cfg.omega_dot;
  return cfg.feed == FeedMode::kTrue ? OmegaDotMode::kAnalytic : OmegaDotMode::kFiniteDifference;
}

class FeedBuilder {
 public:
  explicit FeedBuilder(const RunConfig& cfg)
      : cfg_(cfg), mode_(resolved_mode(cfg)), filter_(cfg.omega_dot_tau) {}

  FeedSample build(const TruthState& truth, const MotionSignals& sig, const Measurements& m,
                   const AttitudeState& est) {
    FeedSample f;
    Vec3 fd_source;
    if (cfg_.feed == FeedMode::kTrue) {
      f.q = truth.q;
      f.omega = sig.angular_rate;
      fd_source = sig.angular_rate;
    } else {
      f.q = est.q;
      f.omega = m.imu.omega_m - est.gyro_bias;
      fd_source = m.imu.omega_m;
    }
    const Vec3 filtered = filter_.update(fd_source, cfg_.dt);
    if (mode_ == OmegaDotMode::kAnalytic) {
      f.omega_dot = sig.angular_accel;
    } else {
      f.omega_dot = filtered;
      if (cfg_.feed == FeedMode::kEstimated && cfg_.omega_dot_bias_rate) {
        f.omega_dot -= attitude_derivative(est, m.imu.omega_m, m.pose.q, cfg_.attitude_gains)
                           .gyro_bias_dot;
      }
    }
    return f;
  }

 private:
  const RunConfig& cfg_;
  OmegaDotMode mode_;
  OmegaDotFilter filter_;
};

// Cubic Hermite value at the midpoint of a unit-quaternion path with body
// rates w0, w1 at the ends.
Quaternion hermite_midpoint(const Quaternion& q0, const Quaternion& q1_in, const Vec3& w0,
                            const Vec3& w1, double dt) {
  const Quaternion q1 = q0.w * q1_in.w + q0.v.dot(q1_in.v) < 0.0 ? -q1_in : q1_in;
  const Quaternion d0 = q0 * Quaternion::pure(w0) * 0.5;
  const Quaternion d1 = q1 * Quaternion::pure(w1) * 0.5;
  return normalized((q0 + q1) * 0.5 + (d0 - d1) * (dt / 8.0));
}

class History {
 public:
  void push(const Measurements& m, std::optional<FeedSample> f) {
    if (size_ == kDepth) {
      std::shift_left(meas_.begin(), meas_.end(), 1);
      std::shift_left(feed_.begin(), feed_.end(), 1);
    } else {
      ++size_;
    }
    meas_[size_ - 1] = m;
    if (f) feed_[size_ - 1] = *f;
  }

  void set_latest_feed(const FeedSample& f) { feed_[size_ - 1] = f; }

  // age 0 is the newest sample
  AttitudeInput attitude_input(std::size_t age) const {
    const Measurements& m = meas_[size_ - 1 - age];
    return {m.imu.omega_m, m.pose.q};
  }

  TranslationInput translation_input(std::size_t age) const {
    const std::size_t i = size_ - 1 - age;
    return {meas_[i].imu.a_m, meas_[i].pose.p, feed_[i]};
  }

  // With only two samples the polynomial midpoint is linear. When every sample
  // carries a fresh pose, the first interval instead uses end-point derivatives
  // implied by the rate and accelerometer readings and the current bias estimates.
  AttitudeInput attitude_midpoint(const AttitudeState& est, bool fresh_pose, double dt) const {
    AttitudeInput mid{midpoint<Vec3>([](const Measurements& m) { return m.imu.omega_m; }),
                      midpoint<Quaternion>([](const Measurements& m) { return m.pose.q; })};
    if (size_ == 2 && fresh_pose) {
      mid.q_meas = hermite_midpoint(meas_[0].pose.q, meas_[1].pose.q,
                                    meas_[0].imu.omega_m - est.gyro_bias,
                                    meas_[1].imu.omega_m - est.gyro_bias, dt);
    }
    return mid;
  }

  TranslationInput translation_midpoint(const TranslationState& est, const GravityVector& g,
                                        bool fresh_pose, double dt) const {
    FeedSample f;
    f.q = feed_midpoint<Quaternion>([](const FeedSample& s) { return s.q; });
    f.omega = feed_midpoint<Vec3>([](const FeedSample& s) { return s.omega; });
    f.omega_dot = feed_midpoint<Vec3>([](const FeedSample& s) { return s.omega_dot; });
    TranslationInput mid{midpoint<Vec3>([](const Measurements& m) { return m.imu.a_m; }),
                         midpoint<Vec3>([](const Measurements& m) { return m.pose.p; }), f};
    if (size_ == 2) {
      mid.feed.q = hermite_midpoint(feed_[0].q, feed_[1].q, feed_[0].omega, feed_[1].omega, dt);
      if (fresh_pose) {
        const Vec3 acc0 = to_rotation(meas_[0].pose.q) * (meas_[0].imu.a_m - est.accel_bias) - g.g;
        const Vec3 acc1 = to_rotation(meas_[1].pose.q) * (meas_[1].imu.a_m - est.accel_bias) - g.g;
        mid.p_meas -= (dt * dt / 16.0) * (acc0 + acc1);
      }
    }
    return mid;
  }

 private:
  static constexpr std::size_t kDepth = 4;

  template <class T, class Get>
  T midpoint(Get get) const {
    std::array<T, kDepth> v;
    for (std::size_t i = 0; i < size_; ++i) v[i] = get(meas_[i]);
    return polynomial_midpoint(std::span<const T>(v.data(), size_));
  }

  template <class T, class Get>
  T feed_midpoint(Get get) const {
    std::array<T, kDepth> v;
    for (std::size_t i = 0; i < size_; ++i) v[i] = get(feed_[i]);
    return polynomial_midpoint(std::span<const T>(v.data(), size_));
  }

  std::array<Measurements, kDepth> meas_{};
  std::array<FeedSample, kDepth> feed_{};
  std::size_t size_ = 0;
};

RunSample make_sample(double t, const TruthState& truth, const AttitudeState& att,
                      const TranslationState& tr, const MotionSignals& sig, const Mat9& p,
                      const RunConfig& cfg) {
  RunSample out;
  out.t = t;
  out.truth = truth;
  out.attitude = att;
  out.translation = tr;
  const AttitudeDiagnostics d =
      attitude_diagnostics(att, truth.q, truth.gyro_bias, cfg.attitude_gains);
  out.qe_norm = d.q_e.v.norm();
  out.bge_norm = d.gyro_bias_error.norm();
  out.lyapunov = d.lyapunov;
  out.x_error << truth.p - tr.p, truth.v - tr.v, truth.accel_bias - tr.accel_bias;
  out.metric_error = metric_norm_squared(out.x_error, to_rotation(truth.q),
                                         skew(sig.angular_rate), skew(sig.angular_accel), p);
  return out;
}

}  // namespace

Mat9 metric_certificate(const RunConfig& cfg) {
  const Mat39 c = canonical_output_matrix();
  const Mat9 q = c.transpose() * c;
  return lyapunov_certificate(cfg.translation_gains, cfg.lambda, q).P;
}

RunRecord run_simulation(const RunConfig& input) {
  input.validate();
  const RunConfig cfg = input.randomize_init ? randomized_initial_state(input) : input;
  const Mat9 p_cert = metric_certificate(cfg);
  const std::size_t steps = step_count(cfg);

  MeasurementSource source(cfg);
  FeedBuilder feeds(cfg);

  TruthState truth = initial_truth(cfg);
  AttitudeState att{normalized(cfg.q_hat0), cfg.gyro_bias_hat0};
  TranslationState tr{cfg.p_hat0, cfg.v_hat0, cfg.accel_bias_hat0};

  double t = 0.0;
  MotionSignals sig = source.profile()(t);
  Measurements meas = source.sample(truth, t, 0);
  FeedSample feed = feeds.build(truth, sig, meas, att);
  const bool fresh_pose = cfg.pose_decimation == 1;
  History history;
  history.push(meas, feed);
  RunRecord record;
  record.samples.reserve(steps + 1);
  record.samples.push_back(make_sample(t, truth, att, tr, sig, p_cert, cfg));

  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    const TruthState truth_next = truth_step(truth, t, cfg.dt, cfg.gravity, source.profile());
    const MotionSignals sig_next = source.profile()(t_next);
    const Measurements meas_next = source.sample(truth_next, t_next, k + 1);

    history.push(meas_next, std::nullopt);
    const AttitudeState att_next =
        attitude_step(att, history.attitude_input(1), history.attitude_midpoint(att, fresh_pose, cfg.dt),
                      history.attitude_input(0), cfg.attitude_gains, cfg.dt);
    const FeedSample feed_next = feeds.build(truth_next, sig_next, meas_next, att_next);
    history.set_latest_feed(feed_next);
    const TranslationState tr_next =
        translation_step(tr, history.translation_input(1), history.translation_midpoint(tr, cfg.gravity, fresh_pose, cfg.dt),
                         history.translation_input(0), cfg.translation_gains, cfg.gravity, cfg.dt);

    truth = truth_next;
    att = att_next;
    tr = tr_next;
    sig = sig_next;
    meas = meas_next;
    feed = feed_next;
    t = t_next;
    record.samples.push_back(make_sample(t, truth, att, tr, sig, p_cert, cfg));
  }
  return record;
}

std::vector<TruthStreamSample> generate_truth_stream(const RunConfig& cfg) {
  cfg.validate();
  const std::size_t steps = step_count(cfg);
  MeasurementSource source(cfg);
  TruthState truth = initial_truth(cfg);
  std::vector<TruthStreamSample> out;
  out.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (k > 0) truth = truth_step(truth, static_cast<double>(k - 1) * cfg.dt, cfg.dt, cfg.gravity);
    const Measurements m = source.sample(truth, t, k);
    out.push_back({truth, m.imu, m.pose});
  }
  return out;
}

}  // namespace hierobs
