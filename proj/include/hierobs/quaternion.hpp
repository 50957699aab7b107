#pragma once

#include <span>

#include <Eigen/Dense>

namespace hierobs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// 3x3 rotation matrix; R^T R = I and det R = 1.
using RotationMatrix = Eigen::Matrix3d;

/// Quaternion stored scalar-first as (w, v).
///
/// Products with non-unit quaternions are allowed (pure quaternions show up in
/// the kinematics), so unit norm is a property of particular values, not of
/// the type. No sign canonicalization is ever applied: q and -q are distinct
/// values that encode the same rotation.
struct Quaternion {
  double w = 1.0;
  Vec3 v = Vec3::Zero();

  Quaternion() = default;
  Quaternion(double w_, const Vec3& v_) : w(w_), v(v_) {}
  Quaternion(double w_, double x, double y, double z) : w(w_), v(x, y, z) {}

  static Quaternion identity() { return {}; }
  static Quaternion pure(const Vec3& u) { return {0.0, u}; }

  double squared_norm() const { return w * w + v.squaredNorm(); }
  double norm() const;

  Eigen::Vector4d coeffs() const { return {w, v.x(), v.y(), v.z()}; }

  Quaternion operator-() const { return {-w, -v}; }
  Quaternion operator+(const Quaternion& o) const { return {w + o.w, v + o.v}; }
  Quaternion operator-(const Quaternion& o) const { return {w - o.w, v - o.v}; }
  Quaternion operator*(double s) const { return {w * s, v * s}; }
  friend Quaternion operator*(double s, const Quaternion& q) { return q * s; }

  bool operator==(const Quaternion& o) const { return w == o.w && v == o.v; }
};

/// Hamilton product (p0 q0 - pv.qv, p0 qv + q0 pv + pv x qv).
Quaternion multiply(const Quaternion& p, const Quaternion& q);

inline Quaternion operator*(const Quaternion& p, const Quaternion& q) { return multiply(p, q); }

Quaternion conjugate(const Quaternion& q);

/// Throws std::domain_error on a zero or non-finite quaternion.
Quaternion normalized(const Quaternion& q);

/// Tolerance used by to_rotation() when checking unit norm.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Rotation matrix with R(q) u = vec(q (0,u) q*). Throws std::invalid_argument
/// when | ||q|| - 1 | > kUnitNormTolerance.
RotationMatrix to_rotation(const Quaternion& q);

/// [v]x, so that skew(v) * u == v.cross(u).
Mat3 skew(const Vec3& v);

/// Attitude error q_hat* (x) q, renormalized.
Quaternion error_quaternion(const Quaternion& estimate, const Quaternion& truth);

/// Normalized linear interpolation from a to b (s in [0, 1]). b is first
/// flipped into a's hemisphere, so the result is invariant to a joint sign
/// flip of both endpoints and to a sign flip of b alone.
Quaternion nlerp(const Quaternion& a, const Quaternion& b, double s);

/// Value halfway between the last two of n = 2, 3 or 4 equally spaced
/// samples, on the polynomial of degree n - 1 through all of them. Quaternion
/// samples are first flipped into the hemisphere of the second-to-last one and
/// the result is normalized, so negating every sample negates the result
/// exactly. Throws std::invalid_argument for other n.
Quaternion polynomial_midpoint(std::span<const Quaternion> samples);
Vec3 polynomial_midpoint(std::span<const Vec3> samples);

bool is_rotation(const Mat3& r, double tol = 1e-9);
bool is_skew(const Mat3& m, double tol = 1e-9);

}  // namespace hierobs
