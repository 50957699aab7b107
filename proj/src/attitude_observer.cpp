#include "hierobs/attitude_observer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hierobs {

namespace {

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("attitude_step: dt must be positive and finite");
  }
}

void require_unit_measurement(const Quaternion& q_meas) {
  const double n = q_meas.norm();
  if (!(std::abs(n - 1.0) <= kMeasurementNormTolerance)) {
    std::ostringstream msg;
    msg << "attitude observer: measured quaternion norm " << n
        << " is not unit (corrupted upstream pose?)";
    throw std::invalid_argument(msg.str());
  }
}

AttitudeState advance(const AttitudeState& s, const AttitudeRate& r, double h) {
  return {s.q + r.q_dot * h, s.gyro_bias + r.gyro_bias_dot * h};
}

}  // namespace

void AttitudeGains::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw std::invalid_argument("attitude gains c1 and c2 must be strictly positive");
  }
}

AttitudeRate attitude_derivative(const AttitudeState& s, const Vec3& omega_m,
                                 const Quaternion& q_meas, const AttitudeGains& g) {
  require_unit_measurement(q_meas);
  if (!omega_m.allFinite()) {
    throw std::invalid_argument("attitude observer: non-finite gyro measurement");
  }
  const Quaternion q_e = error_quaternion(s.q, q_meas);
  const double sgn = sign_nonneg(q_e.w);

  const Quaternion correction{1.0 - std::abs(q_e.w), sgn * q_e.v};
  const Quaternion body_rate = Quaternion::pure(omega_m - s.gyro_bias) + correction * (2.0 * g.c1);

  AttitudeRate rate;
  rate.q_dot = multiply(s.q, body_rate) * 0.5;
  rate.gyro_bias_dot = -g.c2 * q_e.w * q_e.v;
  return rate;
}

AttitudeState attitude_step(const AttitudeState& s, const Vec3& omega_m, const Quaternion& q_meas,
                            const AttitudeGains& g, double dt) {
  const AttitudeInput held{omega_m, q_meas};
  return attitude_step(s, held, held, g, dt);
}

AttitudeState attitude_step(const AttitudeState& s, const AttitudeInput& begin,
                            const AttitudeInput& end, const AttitudeGains& g, double dt) {
  const AttitudeInput mid{0.5 * (begin.omega_m + end.omega_m), nlerp(begin.q_meas, end.q_meas, 0.5)};
  return attitude_step(s, begin, mid, end, g, dt);
}

AttitudeState attitude_step(const AttitudeState& s, const AttitudeInput& begin,
                            const AttitudeInput& mid, const AttitudeInput& end,
                            const AttitudeGains& g, double dt) {
  require_positive_dt(dt);
  const AttitudeRate k1 = attitude_derivative(s, begin.omega_m, begin.q_meas, g);
  const AttitudeRate k2 = attitude_derivative(advance(s, k1, 0.5 * dt), mid.omega_m, mid.q_meas, g);
  const AttitudeRate k3 = attitude_derivative(advance(s, k2, 0.5 * dt), mid.omega_m, mid.q_meas, g);
  const AttitudeRate k4 = attitude_derivative(advance(s, k3, dt), end.omega_m, end.q_meas, g);

  AttitudeState next;
  next.q = s.q + (k1.q_dot + k2.q_dot * 2.0 + k3.q_dot * 2.0 + k4.q_dot) * (dt / 6.0);
  next.gyro_bias = s.gyro_bias + (k1.gyro_bias_dot + 2.0 * k2.gyro_bias_dot +
                                  2.0 * k3.gyro_bias_dot + k4.gyro_bias_dot) *
                                     (dt / 6.0);
  next.q = normalized(next.q);
  return next;
}

Vec3 error_vec_derivative_oracle(const Quaternion& q_e, const Vec3& gyro_bias_error,
                                 const Vec3& omega_m, const Vec3& gyro_bias,
                                 const Vec3& gyro_bias_estimate, double c1) {
  return q_e.v.cross(omega_m) - 0.5 * q_e.w * gyro_bias_error -
         q_e.v.cross(gyro_bias + gyro_bias_estimate) - c1 * q_e.v;
}

Vec3 error_vec_derivative_projected(const Quaternion& q_e, const Vec3& gyro_bias_error,
                                    const Vec3& omega_m, const Vec3& gyro_bias,
                                    const Vec3& gyro_bias_estimate, double c1) {
  return q_e.v.cross(omega_m) - 0.5 * q_e.w * gyro_bias_error -
         0.5 * q_e.v.cross(gyro_bias + gyro_bias_estimate) - c1 * std::abs(q_e.w) * q_e.v;
}

double contraction_jacobian_check(const Vec3& omega_m, const Vec3& gyro_bias,
                                  const Vec3& gyro_bias_estimate, double c1) {
  const Mat3 jac = skew(omega_m + gyro_bias + gyro_bias_estimate) - c1 * Mat3::Identity();
  const Mat3 residual = jac + jac.transpose() + 2.0 * c1 * Mat3::Identity();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(residual, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double lyapunov_value(const AttitudeDiagnostics& d, double c2) {
  if (!(c2 > 0.0)) throw std::invalid_argument("lyapunov_value: c2 must be positive");
  return d.q_e.v.squaredNorm() + d.gyro_bias_error.squaredNorm() / (2.0 * c2);
}

AttitudeDiagnostics attitude_diagnostics(const AttitudeState& estimate, const Quaternion& q_true,
                                         const Vec3& gyro_bias_true, const AttitudeGains& g) {
  AttitudeDiagnostics d;
  d.q_e = error_quaternion(estimate.q, q_true);
  d.gyro_bias_error = gyro_bias_true - estimate.gyro_bias;
  d.lyapunov = lyapunov_value(d, g.c2);
  return d;
}

}  // namespace hierobs
