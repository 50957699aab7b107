#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "hierobs/quaternion.hpp"

namespace hierobs {

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat39 = Eigen::Matrix<double, 3, 9>;
using Mat93 = Eigen::Matrix<double, 9, 3>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

// ---------------------------------------------------------------------------
// Translation kinematics as an LTV system, state x = (p, v, b_a), output y = p.
// ---------------------------------------------------------------------------

/// A(t) = [[0, I, 0], [0, 0, -R], [0, 0, 0]].
Mat9 translation_system_matrix(const Mat3& r);

/// C = [I 0 0].
Mat39 position_output_matrix();

/// Stacked block observability matrix [C; L_A C; L_A^2 C] where
/// L_A C = C_dot + C A. C and L_A C are constant for this system, so their
/// time derivatives vanish and the result is diag(I, I, -R).
Mat9 observability_matrix(const Mat3& r);

struct ObservabilityReport {
  bool uniformly_observable = false;
  double determinant = 0.0;
  double condition_number = 0.0;
};

/// Full-rank test on the observability matrix: |det| > 1e-6. The condition
/// number is infinite for a singular matrix.
ObservabilityReport check_uniform_observability(const Mat3& r);

// ---------------------------------------------------------------------------
// Gains.
// ---------------------------------------------------------------------------

/// Per-axis gains, K_i = k_i I_3. The error polynomial in canonical
/// coordinates is s^3 + k3 s^2 + k2 s + k1.
struct TranslationGains {
  double k1 = 64.0;
  double k2 = 48.0;
  double k3 = 12.0;

  Mat3 K1() const { return k1 * Mat3::Identity(); }
  Mat3 K2() const { return k2 * Mat3::Identity(); }
  Mat3 K3() const { return k3 * Mat3::Identity(); }

  /// Routh-Hurwitz for a monic cubic: all k > 0 and k3 k2 > k1.
  bool hurwitz() const;
  /// Throws std::invalid_argument unless hurwitz().
  void validate() const;
};

using Pole = std::complex<double>;

/// Coefficients of (s - p1)(s - p2)(s - p3). Throws std::invalid_argument when
/// a pole has a nonnegative real part or complex poles are not a conjugate pair.
TranslationGains pole_place(const std::array<Pole, 3>& poles);

/// Roots of s^3 + k3 s^2 + k2 s + k1 (companion eigenvalues, Newton-polished),
/// sorted by real part then imaginary part.
std::array<Pole, 3> characteristic_roots(const TranslationGains& k);

// ---------------------------------------------------------------------------
// Observable canonical form and contraction certificate.
// ---------------------------------------------------------------------------

/// A_o = [[0, 0, 0], [I, 0, 0], [0, I, 0]] (3x3 blocks).
Mat9 canonical_state_matrix();
/// C_o = [0 0 I].
Mat39 canonical_output_matrix();
/// K_o = [K1; K2; K3].
Mat93 canonical_gain(const TranslationGains& k);

/// Solves A^T X + X A = -Q for X. Throws std::domain_error when A and -A share
/// an eigenvalue (no unique solution).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

struct ContractionCertificate {
  Mat9 P = Mat9::Identity();
  double rho = 1.0;
  double lambda = 1.0;  // 1/s
};

/// Symmetrized contraction LMI A_o^T P + P A_o + 2 lambda P - rho C_o^T C_o.
Mat9 contraction_lmi(const ContractionCertificate& cert);

/// P solving (A_o - K_o C_o)^T P + P (A_o - K_o C_o) = -2 lambda P - Q, with
/// rho from consistent_rho(). Requires every closed-loop pole to lie left of
/// -lambda. With Q = C_o^T C_o and the triple pole at -2 lambda this P
/// reproduces K_o = 1/2 rho P^-1 C_o^T exactly (rho = 2).
ContractionCertificate lyapunov_certificate(const TranslationGains& k, double lambda,
                                            const Mat9& q);

/// Least-squares rho so that 1/2 rho P^-1 C_o^T best matches K_o.
double consistent_rho(const Mat9& p, const TranslationGains& k);

/// Smallest rho (bisection, relative tolerance 1e-10) with
/// max eig(contraction_lmi) <= 0 for this P and lambda. Throws
/// std::domain_error if no rho up to 1e12 certifies.
double min_certifying_rho(const Mat9& p, double lambda);

/// 1/2 rho P^-1 C_o^T.
Mat93 recovered_gain(const ContractionCertificate& cert);

struct LmiReport {
  double max_eigenvalue = 0.0;  // of contraction_lmi(); <= 0 certifies
  double gain_mismatch = 0.0;   // max |recovered_gain - K_o|
  Mat93 recovered = Mat93::Zero();

  bool certified(double tol = 1e-9) const { return max_eigenvalue <= tol; }
};

/// Throws std::invalid_argument when P is not symmetric (1e-9 relative).
LmiReport verify_contraction_lmi(const ContractionCertificate& cert, const TranslationGains& k);

// ---------------------------------------------------------------------------
// Coordinate change to canonical form and the induced metric.
// ---------------------------------------------------------------------------

/// Upsilon(t)^-1, mapping canonical coordinates back to x = (p, v, b_a).
struct UpsilonInverse {
  Mat9 matrix = Mat9::Identity();
};

/// Closed form
///   [[0, 0, I], [0, I, R W R^T], [-R^T, -W R^T, -G R^T]],  G = W^2 - W_dot.
/// Throws std::invalid_argument when W or W_dot is not skew within 1e-9.
UpsilonInverse upsilon_inverse_explicit(const Mat3& r, const Mat3& omega, const Mat3& omega_dot);

/// Column-block recursion g_1 = O(t)^-1 [0; ...; I_p],
/// g_{i+1} = A(t) g_i - d/dt g_i, with d/dt by central differences of step h.
/// Nested differences amplify roundoff by ~1/h^(n/p - 1); callers wanting
/// small h should instantiate with a wider Scalar. Throws std::domain_error
/// when O(t) (at any evaluation time) is singular.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> upsilon_inverse_recursive(
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(Scalar)>& a_fn,
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(Scalar)>& o_fn,
    Scalar t, Scalar h, int output_dim);

/// M = Upsilon^T P Upsilon with Upsilon = (upsilon_inverse_explicit)^-1.
Mat9 metric(const Mat3& r, const Mat3& omega, const Mat3& omega_dot, const Mat9& p);

/// x^T M x computed as z^T P z with z solving Upsilon^-1 z = x.
double metric_norm_squared(const Vec9& x, const Mat3& r, const Mat3& omega, const Mat3& omega_dot,
                           const Mat9& p);

// ---------------------------------------------------------------------------

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> upsilon_inverse_recursive(
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(Scalar)>& a_fn,
    const std::function<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(Scalar)>& o_fn,
    Scalar t, Scalar h, int output_dim) {
  using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (!(h > Scalar(0))) throw std::invalid_argument("upsilon_inverse_recursive: h must be > 0");

  const MatX o0 = o_fn(t);
  const Eigen::Index n = o0.rows();
  if (o0.cols() != n || output_dim <= 0 || n % output_dim != 0) {
    throw std::invalid_argument("upsilon_inverse_recursive: bad dimensions");
  }
  const int blocks = static_cast<int>(n / output_dim);

  MatX selector = MatX::Zero(n, output_dim);
  selector.bottomRows(output_dim).setIdentity();

  std::function<MatX(int, Scalar)> gamma = [&](int i, Scalar at) -> MatX {
    if (i == 0) {
      const Eigen::FullPivLU<MatX> lu(o_fn(at));
      if (!lu.isInvertible()) {
        throw std::domain_error("upsilon_inverse_recursive: observability matrix is singular");
      }
      return lu.solve(selector);
    }
    const MatX rate = (gamma(i - 1, at + h) - gamma(i - 1, at - h)) / (Scalar(2) * h);
    return a_fn(at) * gamma(i - 1, at) - rate;
  };

  MatX result(n, n);
  for (int i = 0; i < blocks; ++i) {
    result.middleCols(i * output_dim, output_dim) = gamma(i, t);
  }
  return result;
}

}  // namespace hierobs
