#include "hierobs/translation_observer.hpp"

#include <cmath>
#include <stdexcept>

namespace hierobs {

namespace {

TranslationState advance(const TranslationState& s, const TranslationRate& r, double h) {
  return {s.p + h * r.p_dot, s.v + h * r.v_dot, s.accel_bias + h * r.accel_bias_dot};
}

void require_positive_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("translation_step: dt must be positive and finite");
  }
}

FeedSample midpoint(const FeedSample& a, const FeedSample& b) {
  return {nlerp(a.q, b.q, 0.5), 0.5 * (a.omega + b.omega), 0.5 * (a.omega_dot + b.omega_dot)};
}

TranslationState rk4(const TranslationState& s, const TranslationInput& begin,
                     const TranslationInput& mid, const TranslationInput& end,
                     const TranslationGains& k, const GravityVector& g, double dt) {
  require_positive_dt(dt);
  const AttitudeFeed feed0 = begin.feed.feed();
  const AttitudeFeed feed_mid = mid.feed.feed();
  const AttitudeFeed feed1 = end.feed.feed();

  const TranslationRate k1 = translation_derivative(s, begin.a_m, begin.p_meas, feed0, k, g);
  const TranslationRate k2 =
      translation_derivative(advance(s, k1, 0.5 * dt), mid.a_m, mid.p_meas, feed_mid, k, g);
  const TranslationRate k3 =
      translation_derivative(advance(s, k2, 0.5 * dt), mid.a_m, mid.p_meas, feed_mid, k, g);
  const TranslationRate k4 =
      translation_derivative(advance(s, k3, dt), end.a_m, end.p_meas, feed1, k, g);
  const double w = dt / 6.0;
  return {s.p + w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot),
          s.v + w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot),
          s.accel_bias + w * (k1.accel_bias_dot + 2.0 * k2.accel_bias_dot +
                              2.0 * k3.accel_bias_dot + k4.accel_bias_dot)};
}

}  // namespace

void AttitudeFeed::validate() const {
  if (!is_skew(Omega) || !is_skew(Omega_dot)) {
    throw std::invalid_argument("attitude feed: Omega and Omega_dot must be skew-symmetric");
  }
}

TranslationRate translation_derivative(const TranslationState& s, const Vec3& a_m,
                                       const Vec3& p_meas, const AttitudeFeed& feed,
                                       const TranslationGains& k, const GravityVector& g) {
  feed.validate();
  const Mat3& r = feed.R;
  const Mat3& w = feed.Omega;
  const Vec3 p_e = p_meas - s.p;

  TranslationRate rate;
  rate.p_dot = s.v + k.K3() * p_e;
  rate.v_dot = r * (a_m - s.accel_bias) - g.g + (k.K2() + k.K3() * r * w * r.transpose()) * p_e;
  rate.accel_bias_dot =
      -(k.K1() + k.K2() * w + k.K3() * (w * w - feed.Omega_dot)) * r.transpose() * p_e;
  return rate;
}

TranslationState translation_step(const TranslationState& s, const Vec3& a_m, const Vec3& p_meas,
                                  const AttitudeFeed& feed, const TranslationGains& k,
                                  const GravityVector& g, double dt) {
  require_positive_dt(dt);
  const TranslationRate k1 = translation_derivative(s, a_m, p_meas, feed, k, g);
  const TranslationRate k2 = translation_derivative(advance(s, k1, 0.5 * dt), a_m, p_meas, feed, k, g);
  const TranslationRate k3 = translation_derivative(advance(s, k2, 0.5 * dt), a_m, p_meas, feed, k, g);
  const TranslationRate k4 = translation_derivative(advance(s, k3, dt), a_m, p_meas, feed, k, g);
  const double w = dt / 6.0;
  return {s.p + w * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot),
          s.v + w * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot),
          s.accel_bias + w * (k1.accel_bias_dot + 2.0 * k2.accel_bias_dot +
                              2.0 * k3.accel_bias_dot + k4.accel_bias_dot)};
}

TranslationState translation_step(const TranslationState& s, const TranslationInput& begin,
                                  const TranslationInput& end, const TranslationGains& k,
                                  const GravityVector& g, double dt) {
  const TranslationInput mid{0.5 * (begin.a_m + end.a_m), 0.5 * (begin.p_meas + end.p_meas),
                             midpoint(begin.feed, end.feed)};
  return rk4(s, begin, mid, end, k, g, dt);
}

TranslationState translation_step(const TranslationState& s, const TranslationInput& begin,
                                  const TranslationInput& mid, const TranslationInput& end,
                                  const TranslationGains& k, const GravityVector& g, double dt) {
  return rk4(s, begin, mid, end, k, g, dt);
}

Vec3 omega_dot_estimate(const Vec3& omega_prev, const Vec3& omega_curr, double dt,
                        const Vec3& filtered_prev, double tau) {
  if (!(dt > 0.0)) throw std::invalid_argument("omega_dot_estimate: dt must be positive");
  if (!(tau >= 0.0)) throw std::invalid_argument("omega_dot_estimate: tau must be >= 0");
  const Vec3 raw = (omega_curr - omega_prev) / dt;
  const double alpha = dt / (tau + dt);
  return filtered_prev + alpha * (raw - filtered_prev);
}

OmegaDotFilter::OmegaDotFilter(double tau) : tau_(tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("OmegaDotFilter: tau must be >= 0");
}

const Vec3& OmegaDotFilter::update(const Vec3& omega, double dt) {
  if (primed_) filtered_ = omega_dot_estimate(previous_, omega, dt, filtered_, tau_);
  previous_ = omega;
  primed_ = true;
  return filtered_;
}

}  // namespace hierobs
