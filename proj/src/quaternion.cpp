#include "hierobs/quaternion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hierobs {

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Quaternion multiply(const Quaternion& p, const Quaternion& q) {
  return {p.w * q.w - p.v.dot(q.v), p.w * q.v + q.w * p.v + p.v.cross(q.v)};
}

Quaternion conjugate(const Quaternion& q) { return {q.w, -q.v}; }

Quaternion normalized(const Quaternion& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::domain_error("cannot normalize a zero or non-finite quaternion");
  }
  return q * (1.0 / n);
}

RotationMatrix to_rotation(const Quaternion& q) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= kUnitNormTolerance)) {
    std::ostringstream msg;
    msg << "to_rotation: quaternion norm " << n << " deviates from 1 by more than "
        << kUnitNormTolerance;
    throw std::invalid_argument(msg.str());
  }
  // R = (w^2 - |v|^2) I + 2 v v^T + 2 w [v]x
  return (q.w * q.w - q.v.squaredNorm()) * Mat3::Identity() + 2.0 * q.v * q.v.transpose() +
         2.0 * q.w * skew(q.v);
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Quaternion error_quaternion(const Quaternion& estimate, const Quaternion& truth) {
  return normalized(multiply(conjugate(estimate), truth));
}

Quaternion nlerp(const Quaternion& a, const Quaternion& b, double s) {
  const double dot = a.w * b.w + a.v.dot(b.v);
  const Quaternion b_aligned = dot < 0.0 ? -b : b;
  return normalized(a * (1.0 - s) + b_aligned * s);
}

namespace {

std::span<const double> midpoint_weights(std::size_t n) {
  static constexpr double kLinear[] = {0.5, 0.5};
  static constexpr double kQuadratic[] = {-0.125, 0.75, 0.375};
  static constexpr double kCubic[] = {0.0625, -0.3125, 0.9375, 0.3125};
  switch (n) {
    case 2: return kLinear;
    case 3: return kQuadratic;
    case 4: return kCubic;
    default: throw std::invalid_argument("polynomial_midpoint: expected 2, 3 or 4 samples");
  }
}

}  // namespace

Quaternion polynomial_midpoint(std::span<const Quaternion> samples) {
  const std::span<const double> w = midpoint_weights(samples.size());
  const Quaternion& anchor = samples[samples.size() - 2];
  Quaternion sum{0.0, Vec3::Zero()};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Quaternion& q = samples[i];
    const bool flip = anchor.w * q.w + anchor.v.dot(q.v) < 0.0;
    sum = sum + (flip ? -q : q) * w[i];
  }
  return normalized(sum);
}

Vec3 polynomial_midpoint(std::span<const Vec3> samples) {
  const std::span<const double> w = midpoint_weights(samples.size());
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < samples.size(); ++i) sum += w[i] * samples[i];
  return sum;
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

bool is_skew(const Mat3& m, double tol) {
  return m.allFinite() && (m + m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace hierobs
