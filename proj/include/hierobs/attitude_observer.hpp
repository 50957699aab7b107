#pragma once

#include "hierobs/quaternion.hpp"

namespace hierobs {

/// Correction gain c1 (1/s) and gyro-bias adaptation gain c2; both > 0.
struct AttitudeGains {
  double c1 = 20.0;
  double c2 = 60.0;

  /// Throws std::invalid_argument unless both gains are strictly positive.
  void validate() const;
};

struct AttitudeState {
  Quaternion q;                      // estimate q_hat
  Vec3 gyro_bias = Vec3::Zero();     // rad/s
};

/// Time derivative of an AttitudeState. q_dot is generally not tangent to the
/// unit sphere (the correction has a scalar part), which is why steps
/// renormalize.
struct AttitudeRate {
  Quaternion q_dot{0.0, Vec3::Zero()};
  Vec3 gyro_bias_dot = Vec3::Zero();
};

/// One synchronous sample of the observer inputs.
struct AttitudeInput {
  Vec3 omega_m = Vec3::Zero();  // gyro reading, rad/s
  Quaternion q_meas;            // upstream orientation
};

/// Error quantities of an estimate against a known truth.
struct AttitudeDiagnostics {
  Quaternion q_e;                        // q_hat* (x) q
  Vec3 gyro_bias_error = Vec3::Zero();   // b - b_hat, rad/s
  double lyapunov = 0.0;
};

/// Measured quaternions further than this from unit norm are rejected.
inline constexpr double kMeasurementNormTolerance = 1e-3;

/// sgn with sgn(0) = +1.
inline double sign_nonneg(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Observer vector field:
///   q_hat_dot = 1/2 q_hat (x) ((0, w_m - b_hat) + 2 c1 (1 - |qe0|, sgn(qe0) qe))
///   b_hat_dot = -c2 qe0 qe
/// with q_e = error_quaternion(q_hat, q_meas). The field is invariant under
/// q_meas -> -q_meas.
AttitudeRate attitude_derivative(const AttitudeState& s, const Vec3& omega_m,
                                 const Quaternion& q_meas, const AttitudeGains& g);

/// RK4 step holding (omega_m, q_meas) constant over dt, then renormalization.
AttitudeState attitude_step(const AttitudeState& s, const Vec3& omega_m, const Quaternion& q_meas,
                            const AttitudeGains& g, double dt);

/// RK4 step over [t, t + dt] with inputs linearly interpolated between the
/// samples at both ends (nlerp for the quaternion), then renormalization.
AttitudeState attitude_step(const AttitudeState& s, const AttitudeInput& begin,
                            const AttitudeInput& end, const AttitudeGains& g, double dt);

/// RK4 step with caller-supplied inputs at t + dt/2, e.g. from
/// polynomial_midpoint() over a longer sample history.
AttitudeState attitude_step(const AttitudeState& s, const AttitudeInput& begin,
                            const AttitudeInput& mid, const AttitudeInput& end,
                            const AttitudeGains& g, double dt);

/// Vector-part error kinematics in the printed form
///   qe x w_m - 1/2 qe0 b_e - qe x (b + b_hat) - c1 qe.
/// Matches the simulated error rate only when b + b_hat = 0 and |qe0| = 1; see
/// error_vec_derivative_projected() for the exact rate of the implemented
/// (unit-norm) observer.
Vec3 error_vec_derivative_oracle(const Quaternion& q_e, const Vec3& gyro_bias_error,
                                 const Vec3& omega_m, const Vec3& gyro_bias,
                                 const Vec3& gyro_bias_estimate, double c1);

/// Exact vector-part error kinematics of the renormalized observer:
///   qe x w_m - 1/2 qe0 b_e - 1/2 qe x (b + b_hat) - c1 |qe0| qe.
/// The radial part of the correction is removed by renormalization, so the
/// contraction term is scaled by |qe0|.
Vec3 error_vec_derivative_projected(const Quaternion& q_e, const Vec3& gyro_bias_error,
                                    const Vec3& omega_m, const Vec3& gyro_bias,
                                    const Vec3& gyro_bias_estimate, double c1);

/// Builds J = [w_m + b + b_hat]x - c1 I and returns max |eig(J + J^T + 2 c1 I)|.
double contraction_jacobian_check(const Vec3& omega_m, const Vec3& gyro_bias,
                                  const Vec3& gyro_bias_estimate, double c1);

/// V = ||qe||^2 + ||b_e||^2 / (2 c2). Throws std::invalid_argument for c2 <= 0.
double lyapunov_value(const AttitudeDiagnostics& d, double c2);

AttitudeDiagnostics attitude_diagnostics(const AttitudeState& estimate, const Quaternion& q_true,
                                         const Vec3& gyro_bias_true, const AttitudeGains& g);

}  // namespace hierobs
