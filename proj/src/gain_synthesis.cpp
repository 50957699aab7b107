#include "hierobs/gain_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hierobs {

namespace {

constexpr double kSkewTolerance = 1e-9;

double max_symmetric_eigenvalue(const Mat9& m) {
  const Mat9 sym = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat9> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

Pole evaluate_cubic(const TranslationGains& k, Pole s) {
  return ((s + k.k3) * s + k.k2) * s + k.k1;
}

Pole evaluate_cubic_derivative(const TranslationGains& k, Pole s) {
  return (3.0 * s + 2.0 * k.k3) * s + k.k2;
}

}  // namespace

Mat9 translation_system_matrix(const Mat3& r) {
  Mat9 a = Mat9::Zero();
  a.block<3, 3>(0, 3).setIdentity();
  a.block<3, 3>(3, 6) = -r;
  return a;
}

Mat39 position_output_matrix() {
  Mat39 c = Mat39::Zero();
  c.block<3, 3>(0, 0).setIdentity();
  return c;
}

Mat9 observability_matrix(const Mat3& r) {
  const Mat9 a = translation_system_matrix(r);
  const Mat39 c = position_output_matrix();
  // L_A C = C_dot + C A with C constant; L_A C is again constant, so
  // L_A^2 C = (L_A C) A.
  const Mat39 lie1 = c * a;
  const Mat39 lie2 = lie1 * a;
  Mat9 o;
  o << c, lie1, lie2;
  return o;
}

ObservabilityReport check_uniform_observability(const Mat3& r) {
  const Mat9 o = observability_matrix(r);
  ObservabilityReport report;
  report.determinant = o.determinant();
  report.uniformly_observable = std::abs(report.determinant) > 1e-6;
  const Eigen::JacobiSVD<Mat9> svd(o);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  report.condition_number =
      smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  return report;
}

bool TranslationGains::hurwitz() const {
  return k1 > 0.0 && k2 > 0.0 && k3 > 0.0 && k3 * k2 > k1 && std::isfinite(k1) &&
         std::isfinite(k2) && std::isfinite(k3);
}

void TranslationGains::validate() const {
  if (!hurwitz()) {
    std::ostringstream msg;
    msg << "translation gains (" << k1 << ", " << k2 << ", " << k3
        << ") do not give a Hurwitz polynomial s^3 + k3 s^2 + k2 s + k1";
    throw std::invalid_argument(msg.str());
  }
}

TranslationGains pole_place(const std::array<Pole, 3>& poles) {
  double scale = 1.0;
  for (const Pole& p : poles) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw std::invalid_argument("pole_place: non-finite pole");
    }
    if (!(p.real() < 0.0)) throw std::invalid_argument("pole_place: pole is not strictly stable");
    scale = std::max(scale, std::abs(p));
  }
  const double imag_tol = 1e-12 * scale;
  std::array<bool, 3> matched{};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(poles[i].imag()) <= imag_tol || matched[i]) continue;
    bool found = false;
    for (int j = 0; j < 3 && !found; ++j) {
      if (j == i || matched[j]) continue;
      if (std::abs(poles[j] - std::conj(poles[i])) <= imag_tol) {
        matched[i] = matched[j] = true;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument("pole_place: complex pole without its conjugate");
  }

  const Pole sum = poles[0] + poles[1] + poles[2];
  const Pole pair_sum = poles[0] * poles[1] + poles[0] * poles[2] + poles[1] * poles[2];
  const Pole product = poles[0] * poles[1] * poles[2];
  return {-product.real(), pair_sum.real(), -sum.real()};
}

std::array<Pole, 3> characteristic_roots(const TranslationGains& k) {
  Eigen::Matrix3d companion;
  // clang-format off
  companion << -k.k3, -k.k2, -k.k1,
                 1.0,   0.0,   0.0,
                 0.0,   1.0,   0.0;
  // clang-format on
  const Eigen::EigenSolver<Eigen::Matrix3d> eig(companion, false);
  std::array<Pole, 3> roots;
  for (int i = 0; i < 3; ++i) {
    Pole s = eig.eigenvalues()(i);
    for (int iter = 0; iter < 8; ++iter) {
      const Pole d = evaluate_cubic_derivative(k, s);
      if (std::abs(d) < 1e-12 * std::max(1.0, std::abs(s) * std::abs(s))) break;
      const Pole step = evaluate_cubic(k, s) / d;
      s -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(s))) break;
    }
    roots[i] = s;
  }
  std::sort(roots.begin(), roots.end(), [](const Pole& a, const Pole& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

Mat9 canonical_state_matrix() {
  Mat9 a = Mat9::Zero();
  a.block<3, 3>(3, 0).setIdentity();
  a.block<3, 3>(6, 3).setIdentity();
  return a;
}

Mat39 canonical_output_matrix() {
  Mat39 c = Mat39::Zero();
  c.block<3, 3>(0, 6).setIdentity();
  return c;
}

Mat93 canonical_gain(const TranslationGains& k) {
  Mat93 ko;
  ko << k.K1(), k.K2(), k.K3();
  return ko;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  // Column-major vec: vec(A^T X) = (I kron A^T) vec X, vec(X A) = (A^T kron I) vec X.
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) += a(j, i) * eye;
      if (i == j) op.block(i * n, j * n, n, n) += a.transpose();
    }
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
  if (!lu.isInvertible()) {
    throw std::domain_error("solve_lyapunov: A and -A share an eigenvalue");
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(sol.data(), n, n);
  return 0.5 * (x + x.transpose());
}

Mat9 contraction_lmi(const ContractionCertificate& cert) {
  const Mat9 ao = canonical_state_matrix();
  const Mat39 co = canonical_output_matrix();
  return ao.transpose() * cert.P + cert.P * ao + 2.0 * cert.lambda * cert.P -
         cert.rho * co.transpose() * co;
}

ContractionCertificate lyapunov_certificate(const TranslationGains& k, double lambda,
                                            const Mat9& q) {
  k.validate();
  if (!(lambda >= 0.0)) throw std::invalid_argument("lyapunov_certificate: lambda must be >= 0");
  const Mat9 shifted = canonical_state_matrix() - canonical_gain(k) * canonical_output_matrix() +
                       lambda * Mat9::Identity();
  const Eigen::EigenSolver<Mat9> eig(shifted, false);
  if (eig.eigenvalues().real().maxCoeff() >= 0.0) {
    throw std::domain_error(
        "lyapunov_certificate: closed-loop poles do not lie left of -lambda");
  }
  ContractionCertificate cert;
  cert.P = solve_lyapunov(shifted, q);
  cert.lambda = lambda;
  cert.rho = consistent_rho(cert.P, k);
  return cert;
}

double consistent_rho(const Mat9& p, const TranslationGains& k) {
  const Mat93 g = p.ldlt().solve(canonical_output_matrix().transpose());
  const Mat93 ko = canonical_gain(k);
  return 2.0 * (g.cwiseProduct(ko)).sum() / g.squaredNorm();
}

double min_certifying_rho(const Mat9& p, double lambda) {
  ContractionCertificate cert{p, 0.0, lambda};
  auto certifies = [&](double rho) {
    cert.rho = rho;
    return max_symmetric_eigenvalue(contraction_lmi(cert)) <= 0.0;
  };
  if (certifies(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (!certifies(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("min_certifying_rho: LMI infeasible for this P");
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (certifies(mid) ? hi : lo) = mid;
  }
  return hi;
}

Mat93 recovered_gain(const ContractionCertificate& cert) {
  return 0.5 * cert.rho * cert.P.ldlt().solve(canonical_output_matrix().transpose());
}

LmiReport verify_contraction_lmi(const ContractionCertificate& cert, const TranslationGains& k) {
  const double scale = std::max(1.0, cert.P.cwiseAbs().maxCoeff());
  if ((cert.P - cert.P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::invalid_argument("verify_contraction_lmi: P is not symmetric");
  }
  LmiReport report;
  report.max_eigenvalue = max_symmetric_eigenvalue(contraction_lmi(cert));
  report.recovered = recovered_gain(cert);
  report.gain_mismatch = (report.recovered - canonical_gain(k)).cwiseAbs().maxCoeff();
  return report;
}

UpsilonInverse upsilon_inverse_explicit(const Mat3& r, const Mat3& omega, const Mat3& omega_dot) {
  if (!is_skew(omega, kSkewTolerance) || !is_skew(omega_dot, kSkewTolerance)) {
    throw std::invalid_argument("upsilon_inverse_explicit: Omega and Omega_dot must be skew");
  }
  const Mat3 gamma = omega * omega - omega_dot;
  const Mat3 eye = Mat3::Identity();
  const Mat3 zero = Mat3::Zero();
  UpsilonInverse u;
  // clang-format off
  u.matrix << zero,                   zero,                    eye,
              zero,                   eye,                     r * omega * r.transpose(),
              -r.transpose(),         -omega * r.transpose(),  -gamma * r.transpose();
  // clang-format on
  return u;
}

Mat9 metric(const Mat3& r, const Mat3& omega, const Mat3& omega_dot, const Mat9& p) {
  const Mat9 ui = upsilon_inverse_explicit(r, omega, omega_dot).matrix;
  const Eigen::FullPivLU<Mat9> lu(ui);
  if (!lu.isInvertible()) throw std::domain_error("metric: Upsilon^-1 is singular");
  const Mat9 u = lu.inverse();
  const Mat9 m = u.transpose() * p * u;
  return 0.5 * (m + m.transpose());
}

double metric_norm_squared(const Vec9& x, const Mat3& r, const Mat3& omega, const Mat3& omega_dot,
                           const Mat9& p) {
  const Mat9 ui = upsilon_inverse_explicit(r, omega, omega_dot).matrix;
  const Vec9 z = ui.partialPivLu().solve(x);
  return z.dot(p * z);
}

}  // namespace hierobs
