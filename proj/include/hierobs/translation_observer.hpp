#pragma once

#include "hierobs/gain_synthesis.hpp"
#include "hierobs/quaternion.hpp"

namespace hierobs {

struct TranslationState {
  Vec3 p = Vec3::Zero();           // m
  Vec3 v = Vec3::Zero();           // m/s
  Vec3 accel_bias = Vec3::Zero();  // m/s^2
};

struct TranslationRate {
  Vec3 p_dot = Vec3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 accel_bias_dot = Vec3::Zero();
};

/// World gravity; velocity obeys v_dot = R f - g for body specific force f.
struct GravityVector {
  Vec3 g = Vec3(0.0, 0.0, 9.80665);

  static GravityVector standard() { return {}; }
  static GravityVector none() { return {Vec3::Zero()}; }
};

/// Orientation signal consumed by the translation observer: R plus the body
/// rate W = [w]x and its derivative. Comes either from the truth or from the
/// attitude observer.
struct AttitudeFeed {
  RotationMatrix R = RotationMatrix::Identity();
  Mat3 Omega = Mat3::Zero();
  Mat3 Omega_dot = Mat3::Zero();

  /// Throws std::invalid_argument when Omega or Omega_dot is not skew within 1e-9.
  void validate() const;
};

/// Orientation, body rate and body angular acceleration at one instant; the
/// interpolatable form of an AttitudeFeed.
struct FeedSample {
  Quaternion q;
  Vec3 omega = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();

  AttitudeFeed feed() const { return {to_rotation(q), skew(omega), skew(omega_dot)}; }
};

/// One synchronous sample of the translation observer inputs.
struct TranslationInput {
  Vec3 a_m = Vec3::Zero();     // accelerometer reading, m/s^2
  Vec3 p_meas = Vec3::Zero();  // upstream position, m
  FeedSample feed;
};

/// With p_e = p_meas - p_hat:
///   p_hat_dot = v_hat + K3 p_e
///   v_hat_dot = R (a_m - b_hat) - g + (K2 + K3 R W R^T) p_e
///   b_hat_dot = -(K1 + K2 W + K3 (W^2 - W_dot)) R^T p_e
/// The same field serves the true-attitude and the estimated-attitude
/// observer; only the feed differs.
TranslationRate translation_derivative(const TranslationState& s, const Vec3& a_m,
                                       const Vec3& p_meas, const AttitudeFeed& feed,
                                       const TranslationGains& k, const GravityVector& g);

/// RK4 step with all inputs held over dt.
TranslationState translation_step(const TranslationState& s, const Vec3& a_m, const Vec3& p_meas,
                                  const AttitudeFeed& feed, const TranslationGains& k,
                                  const GravityVector& g, double dt);

/// RK4 step over [t, t + dt] with inputs linearly interpolated between the two
/// samples (nlerp for the feed orientation).
TranslationState translation_step(const TranslationState& s, const TranslationInput& begin,
                                  const TranslationInput& end, const TranslationGains& k,
                                  const GravityVector& g, double dt);

/// RK4 step with caller-supplied inputs at t + dt/2.
TranslationState translation_step(const TranslationState& s, const TranslationInput& begin,
                                  const TranslationInput& mid, const TranslationInput& end,
                                  const TranslationGains& k, const GravityVector& g, double dt);

/// Backward difference (curr - prev) / dt through a first-order low-pass with
/// time constant tau (backward-Euler gain dt / (tau + dt)); tau = 0
/// passes the raw difference through. Returns the new filter output.
Vec3 omega_dot_estimate(const Vec3& omega_prev, const Vec3& omega_curr, double dt,
                        const Vec3& filtered_prev, double tau);

/// Stateful wrapper around omega_dot_estimate(). The first update has no
/// previous sample and returns the (zero) filter state.
class OmegaDotFilter {
 public:
  explicit OmegaDotFilter(double tau);

  const Vec3& update(const Vec3& omega, double dt);
  const Vec3& value() const { return filtered_; }

 private:
  double tau_;
  bool primed_ = false;
  Vec3 previous_ = Vec3::Zero();
  Vec3 filtered_ = Vec3::Zero();
};

}  // namespace hierobs
