#pragma once

#include <functional>
#include <utility>

#include "hierobs/quaternion.hpp"
#include "hierobs/translation_observer.hpp"

namespace hierobs {

/// Ground-truth rigid-body state. Biases are constant over a run.
struct TruthState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Quaternion q;
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();
};

/// True inertial signals at one instant, body frame.
struct MotionSignals {
  Vec3 specific_force = Vec3::Zero();  // m/s^2
  Vec3 angular_rate = Vec3::Zero();    // rad/s
  Vec3 angular_accel = Vec3::Zero();   // rad/s^2, analytic derivative of angular_rate
};

/// Time-parameterized true IMU signals driving the truth integration.
class MotionProfile {
 public:
  using Fn = std::function<MotionSignals(double)>;

  explicit MotionProfile(Fn fn) : fn_(std::move(fn)) {}

  /// a(t) = (sin t, 2 sin 0.1t, 0.3), w(t) = (sin 2t, -sin 4t, 2 sin t).
  static MotionProfile reference();
  static MotionProfile constant(const Vec3& specific_force, const Vec3& angular_rate);

  MotionSignals operator()(double t) const { return fn_(t); }

 private:
  Fn fn_;
};

/// The reference profile evaluated at t >= 0.
MotionSignals truth_signals(double t);

/// RK4 step of
///   p_dot = v, v_dot = R(q) a(t) - g, q_dot = 1/2 q (x) (0, w(t)), biases constant
/// followed by quaternion renormalization.
TruthState truth_step(const TruthState& s, double t, double dt, const GravityVector& g,
                      const MotionProfile& profile = MotionProfile::reference());

struct ImuSample {
  double t = 0.0;
  Vec3 a_m = Vec3::Zero();
  Vec3 omega_m = Vec3::Zero();
};

struct PoseMeasurement {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Quaternion q;
};

/// Biased IMU sample (a + b_a, w + b_g) and the exact pose.
std::pair<ImuSample, PoseMeasurement> corrupt(
    const TruthState& s, double t, const MotionProfile& profile = MotionProfile::reference());

}  // namespace hierobs
