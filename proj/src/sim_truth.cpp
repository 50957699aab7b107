#include "hierobs/sim_truth.hpp"

#include <cmath>
#include <stdexcept>

namespace hierobs {

namespace {

struct TruthRate {
  Vec3 p_dot;
  Vec3 v_dot;
  Quaternion q_dot;
};

TruthRate truth_derivative(const TruthState& s, const MotionSignals& sig, const GravityVector& g) {
  // Intermediate RK4 stages are slightly off the unit sphere; R is built from
  // the normalized direction.
  const Quaternion q = normalized(s.q);
  return {s.v, to_rotation(q) * sig.specific_force - g.g,
          multiply(s.q, Quaternion::pure(sig.angular_rate)) * 0.5};
}

TruthState advance(const TruthState& s, const TruthRate& r, double h) {
  TruthState out = s;
  out.p += h * r.p_dot;
  out.v += h * r.v_dot;
  out.q = s.q + r.q_dot * h;
  return out;
}

}  // namespace

MotionProfile MotionProfile::reference() {
  return MotionProfile([](double t) { return truth_signals(t); });
}

MotionProfile MotionProfile::constant(const Vec3& specific_force, const Vec3& angular_rate) {
  return MotionProfile([specific_force, angular_rate](double) {
    return MotionSignals{specific_force, angular_rate, Vec3::Zero()};
  });
}

MotionSignals truth_signals(double t) {
  MotionSignals s;
  s.specific_force = Vec3(std::sin(t), 2.0 * std::sin(0.1 * t), 0.3);
  s.angular_rate = Vec3(std::sin(2.0 * t), -std::sin(4.0 * t), 2.0 * std::sin(t));
  s.angular_accel = Vec3(2.0 * std::cos(2.0 * t), -4.0 * std::cos(4.0 * t), 2.0 * std::cos(t));
  return s;
}

TruthState truth_step(const TruthState& s, double t, double dt, const GravityVector& g,
                      const MotionProfile& profile) {
  if (!(dt > 0.0)) throw std::invalid_argument("truth_step: dt must be positive");
  const MotionSignals sig0 = profile(t);
  const MotionSignals sig_mid = profile(t + 0.5 * dt);
  const MotionSignals sig1 = profile(t + dt);

  const TruthRate k1 = truth_derivative(s, sig0, g);
  const TruthRate k2 = truth_derivative(advance(s, k1, 0.5 * dt), sig_mid, g);
  const TruthRate k3 = truth_derivative(advance(s, k2, 0.5 * dt), sig_mid, g);
  const TruthRate k4 = truth_derivative(advance(s, k3, dt), sig1, g);

  const double w = dt / 6.0;
  TruthState next = s;
  next.p += w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  next.v += w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  next.q = normalized(s.q + (k1.q_dot + k2.q_dot * 2.0 + k3.q_dot * 2.0 + k4.q_dot) * w);
  return next;
}

std::pair<ImuSample, PoseMeasurement> corrupt(const TruthState& s, double t,
                                              const MotionProfile& profile) {
  const MotionSignals sig = profile(t);
  ImuSample imu{t, sig.specific_force + s.accel_bias, sig.angular_rate + s.gyro_bias};
  PoseMeasurement pose{t, s.p, s.q};
  return {imu, pose};
}

}  // namespace hierobs
