#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hierobs/gain_synthesis.hpp"

using namespace hierobs;

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using Mat3L = Eigen::Matrix<long double, 3, 3>;

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return to_rotation(normalized(Quaternion{n(rng), n(rng), n(rng), n(rng)}));
}

Mat9 output_projector() {
  const Mat39 c = canonical_output_matrix();
  return c.transpose() * c;
}

// R(t) = exp(theta(t) [u]x) with theta(t) = amp sin(freq t), closed form.
struct AxisRotation {
  Eigen::Matrix<long double, 3, 1> u;
  long double amp;
  long double freq;

  Mat3L skew_u() const {
    Mat3L k;
    k << 0.0L, -u(2), u(1), u(2), 0.0L, -u(0), -u(1), u(0), 0.0L;
    return k;
  }
  long double theta(long double t) const { return amp * std::sin(freq * t); }
  Mat3L rotation(long double t) const {
    const Mat3L k = skew_u();
    const long double th = theta(t);
    return Mat3L::Identity() + std::sin(th) * k + (1.0L - std::cos(th)) * k * k;
  }
  // Body rate W = R^T R_dot = theta_dot [u]x.
  Mat3 omega(long double t) const {
    return (amp * freq * std::cos(freq * t) * skew_u()).cast<double>();
  }
  Mat3 omega_dot(long double t) const {
    return (-amp * freq * freq * std::sin(freq * t) * skew_u()).cast<double>();
  }

  std::function<MatL(long double)> a_fn() const {
    return [this](long double t) {
      MatL a = MatL::Zero(9, 9);
      a.block(0, 3, 3, 3).setIdentity();
      a.block(3, 6, 3, 3) = -rotation(t);
      return a;
    };
  }
  std::function<MatL(long double)> o_fn() const {
    return [this](long double t) {
      MatL o = MatL::Identity(9, 9);
      o.block(6, 6, 3, 3) = -rotation(t);
      return o;
    };
  }

  double mismatch(long double t, long double h) const {
    const MatL rec = upsilon_inverse_recursive<long double>(a_fn(), o_fn(), t, h, 3);
    const Mat9 expl =
        upsilon_inverse_explicit(rotation(t).cast<double>(), omega(t), omega_dot(t)).matrix;
    return static_cast<double>((rec - expl.cast<long double>()).cwiseAbs().maxCoeff());
  }
};

AxisRotation random_axis_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.5, 1.2);
  Eigen::Vector3d axis(n(rng), n(rng), n(rng));
  axis.normalize();
  return {axis.cast<long double>(), static_cast<long double>(u(rng)),
          static_cast<long double>(u(rng))};
}

}  // namespace

TEST(Observability, IdentityRotation) {
  Mat9 expected = Mat9::Identity();
  expected.block<3, 3>(6, 6) = -Mat3::Identity();
  EXPECT_EQ(observability_matrix(Mat3::Identity()), expected);
  const ObservabilityReport rep = check_uniform_observability(Mat3::Identity());
  EXPECT_TRUE(rep.uniformly_observable);
  EXPECT_NEAR(rep.determinant, -1.0, 1e-15);
  EXPECT_NEAR(rep.condition_number, 1.0, 1e-12);
}

TEST(Observability, MatchesLieDerivativeStacking) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = random_rotation(rng);
    const Mat9 a = translation_system_matrix(r);
    const Mat39 c = position_output_matrix();
    // C is constant and C A = [0 I 0] is constant, so each Lie derivative is
    // the previous row block times A.
    Mat9 stacked;
    stacked << c, c * a, c * a * a;
    EXPECT_EQ(observability_matrix(r), stacked);
    const ObservabilityReport rep = check_uniform_observability(r);
    EXPECT_TRUE(rep.uniformly_observable);
    EXPECT_NEAR(rep.determinant, -1.0, 1e-12);
    EXPECT_NEAR(rep.condition_number, 1.0, 1e-12);
  }
}

TEST(Observability, ZeroRotationIsRankDeficient) {
  const ObservabilityReport rep = check_uniform_observability(Mat3::Zero());
  EXPECT_FALSE(rep.uniformly_observable);
  EXPECT_EQ(rep.determinant, 0.0);
}

TEST(PolePlace, BinomialExpansions) {
  const TranslationGains a = pole_place({Pole(-4), Pole(-4), Pole(-4)});
  EXPECT_EQ(a.k1, 64.0);
  EXPECT_EQ(a.k2, 48.0);
  EXPECT_EQ(a.k3, 12.0);
  const TranslationGains b = pole_place({Pole(-1), Pole(-1), Pole(-1)});
  EXPECT_EQ(b.k1, 1.0);
  EXPECT_EQ(b.k2, 3.0);
  EXPECT_EQ(b.k3, 3.0);
  const TranslationGains c = pole_place({Pole(-1), Pole(-2), Pole(-3)});
  EXPECT_EQ(c.k1, 6.0);
  EXPECT_EQ(c.k2, 11.0);
  EXPECT_EQ(c.k3, 6.0);
}

TEST(PolePlace, ConjugatePair) {
  // (s^2 + 2 s + 5)(s + 3) = s^3 + 5 s^2 + 11 s + 15.
  const TranslationGains k = pole_place({Pole(-1, 2), Pole(-3), Pole(-1, -2)});
  EXPECT_NEAR(k.k1, 15.0, 1e-12);
  EXPECT_NEAR(k.k2, 11.0, 1e-12);
  EXPECT_NEAR(k.k3, 5.0, 1e-12);
}

TEST(PolePlace, RejectsInvalidPoles) {
  EXPECT_THROW(pole_place({Pole(-1), Pole(0), Pole(-3)}), std::invalid_argument);
  EXPECT_THROW(pole_place({Pole(-1), Pole(2), Pole(-3)}), std::invalid_argument);
  EXPECT_THROW(pole_place({Pole(-1, 1), Pole(-1), Pole(-3)}), std::invalid_argument);
  EXPECT_THROW(pole_place({Pole(NAN), Pole(-1), Pole(-3)}), std::invalid_argument);
}

TEST(PolePlace, RoundTripWithWellSeparatedPoles) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 10.0);
  for (int i = 0; i < 100; ++i) {
    std::array<Pole, 3> poles;
    if (i % 2 == 0) {
      const double a = u(rng), b = a + 1.0 + u(rng), c = b + 1.0 + u(rng);
      poles = {Pole(-c), Pole(-b), Pole(-a)};
    } else {
      const double re = u(rng), im = u(rng), r = u(rng);
      poles = {Pole(-re, -im), Pole(-re, im), Pole(-r)};
      std::sort(poles.begin(), poles.end(), [](const Pole& x, const Pole& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
      });
    }
    const std::array<Pole, 3> back = characteristic_roots(pole_place(poles));
    for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(back[j] - poles[j]), 1e-9) << i;
  }
}

TEST(Gains, HurwitzCheck) {
  EXPECT_TRUE((TranslationGains{64, 48, 12}.hurwitz()));
  EXPECT_FALSE((TranslationGains{64, 4, 12}.hurwitz()));
  EXPECT_FALSE((TranslationGains{-1, 48, 12}.hurwitz()));
  EXPECT_THROW((TranslationGains{64, 4, 12}.validate()), std::invalid_argument);
}

TEST(Lyapunov, SolverResidual) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(6, 6, [&]() { return n(rng); });
    a -= (a.eigenvalues().real().maxCoeff() + 1.0) * Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd x = solve_lyapunov(a, q);
    EXPECT_LT((a.transpose() * x + x * a + q).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(solve_lyapunov(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Identity(3, 3)),
               std::domain_error);
}

TEST(Certificate, IdentityWeightCertifiesWithSufficientRho) {
  const TranslationGains k;
  ContractionCertificate cert = lyapunov_certificate(k, 2.0, Mat9::Identity());
  cert.rho = min_certifying_rho(cert.P, 2.0);
  const LmiReport rep = verify_contraction_lmi(cert, k);
  EXPECT_TRUE(rep.certified());
  EXPECT_LE(rep.max_eigenvalue, 1e-9);
  EXPECT_GT(cert.P.eigenvalues().real().minCoeff(), 0.0);
}

TEST(Certificate, ZeroRateIsPlainLyapunov) {
  const TranslationGains k;
  ContractionCertificate cert = lyapunov_certificate(k, 0.0, Mat9::Identity());
  cert.rho = min_certifying_rho(cert.P, 0.0);
  EXPECT_LE(verify_contraction_lmi(cert, k).max_eigenvalue, 1e-9);
}

TEST(Certificate, OutputWeightReproducesGainsExactly) {
  const TranslationGains k;
  const ContractionCertificate cert = lyapunov_certificate(k, 2.0, output_projector());
  EXPECT_NEAR(cert.rho, 2.0, 1e-9);
  const LmiReport rep = verify_contraction_lmi(cert, k);
  EXPECT_LE(rep.max_eigenvalue, 1e-9);
  EXPECT_LT(rep.gain_mismatch, 1e-6);
  EXPECT_LT((contraction_lmi(cert) + output_projector()).cwiseAbs().maxCoeff(), 1e-9);

  // Per-axis block of P, independently computed for the triple pole at -4.
  const double p3[3][3] = {{3.0 / 512, -3.0 / 256, 1.0 / 64},
                           {-3.0 / 256, 1.0 / 32, -1.0 / 16},
                           {1.0 / 64, -1.0 / 16, 1.0 / 4}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          EXPECT_NEAR(cert.P(3 * i + a, 3 * j + b), a == b ? p3[i][j] : 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(Certificate, RateBeyondSlowestPoleFails) {
  const TranslationGains k;
  EXPECT_THROW(lyapunov_certificate(k, 5.0, Mat9::Identity()), std::domain_error);
  ContractionCertificate cert = lyapunov_certificate(k, 2.0, output_projector());
  cert.lambda = 5.0;
  EXPECT_GT(verify_contraction_lmi(cert, k).max_eigenvalue, 0.0);
}

TEST(Certificate, RejectsAsymmetricP) {
  ContractionCertificate cert;
  cert.P(0, 1) = 1.0;
  EXPECT_THROW(verify_contraction_lmi(cert, TranslationGains{}), std::invalid_argument);
}

TEST(UpsilonInverse, TrivialCase) {
  Mat9 expected = Mat9::Zero();
  expected.block<3, 3>(0, 6).setIdentity();
  expected.block<3, 3>(3, 3).setIdentity();
  expected.block<3, 3>(6, 0) = -Mat3::Identity();
  EXPECT_EQ(upsilon_inverse_explicit(Mat3::Identity(), Mat3::Zero(), Mat3::Zero()).matrix, expected);
}

TEST(UpsilonInverse, UnitDeterminantAndSkewCheck) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = random_rotation(rng);
    const Mat3 w = skew(Vec3(n(rng), n(rng), n(rng)));
    const Mat3 wd = skew(Vec3(n(rng), n(rng), n(rng)));
    EXPECT_NEAR(std::abs(upsilon_inverse_explicit(r, w, wd).matrix.determinant()), 1.0, 1e-9);
  }
  EXPECT_THROW(upsilon_inverse_explicit(Mat3::Identity(), Mat3::Identity(), Mat3::Zero()),
               std::invalid_argument);
}

TEST(UpsilonInverse, RecursionConstantRotation) {
  std::mt19937_64 rng(5);
  const Mat3L r = random_rotation(rng).cast<long double>();
  auto a_fn = [&](long double) {
    MatL a = MatL::Zero(9, 9);
    a.block(0, 3, 3, 3).setIdentity();
    a.block(3, 6, 3, 3) = -r;
    return a;
  };
  auto o_fn = [&](long double) {
    MatL o = MatL::Identity(9, 9);
    o.block(6, 6, 3, 3) = -r;
    return o;
  };
  const MatL rec = upsilon_inverse_recursive<long double>(a_fn, o_fn, 0.3L, 1e-3L, 3);
  MatL sel = MatL::Zero(9, 3);
  sel.bottomRows(3).setIdentity();
  const MatL g1 = a_fn(0).inverse() * sel;
  const MatL g1o = o_fn(0).fullPivLu().solve(sel);
  EXPECT_LT((rec.leftCols(3) - g1o).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rec.middleCols(3, 3) - a_fn(0) * g1o).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rec.rightCols(3) - a_fn(0) * a_fn(0) * g1o).cwiseAbs().maxCoeff(), 1e-15);
  (void)g1;
}

TEST(UpsilonInverse, RecursionMatchesExplicitOnSmoothRotations) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const AxisRotation rot = random_axis_rotation(rng);
    EXPECT_LT(rot.mismatch(1.0L, 1e-5L), 1e-9) << i;
  }
}

TEST(UpsilonInverse, RecursionIsSecondOrderInStep) {
  const AxisRotation rot{Eigen::Matrix<long double, 3, 1>(0.0L, 0.6L, 0.8L), 1.0L, 2.0L};
  const double coarse = rot.mismatch(1.0L, 1e-2L);
  const double fine = rot.mismatch(1.0L, 5e-3L);
  EXPECT_GT(coarse, 1e-8);
  EXPECT_NEAR(coarse / fine, 4.0, 0.2);
}

TEST(UpsilonInverse, RecursionRejectsSingularObservability) {
  auto a_fn = [](long double) { return MatL(MatL::Zero(9, 9)); };
  auto o_fn = [](long double) { return MatL(MatL::Zero(9, 9)); };
  EXPECT_THROW(upsilon_inverse_recursive<long double>(a_fn, o_fn, 0.0L, 1e-3L, 3), std::domain_error);
}

TEST(Metric, IdentityWeightTrivialCase) {
  const Mat9 ui = upsilon_inverse_explicit(Mat3::Identity(), Mat3::Zero(), Mat3::Zero()).matrix;
  const Mat9 u = ui.inverse();
  const Mat9 m = metric(Mat3::Identity(), Mat3::Zero(), Mat3::Zero(), Mat9::Identity());
  EXPECT_LT((m - u.transpose() * u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Metric, PositiveDefiniteAndConsistentQuadraticForm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  const Mat9 p = lyapunov_certificate(TranslationGains{}, 2.0, output_projector()).P;
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = random_rotation(rng);
    const Mat3 w = skew(Vec3(n(rng), n(rng), n(rng)));
    const Mat3 wd = skew(Vec3(n(rng), n(rng), n(rng)));
    const Mat9 m = metric(r, w, wd, p);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat9>(m).eigenvalues().minCoeff(), 0.0);
    const Vec9 x = Vec9::NullaryExpr([&]() { return n(rng); });
    const double direct = x.dot(m * x);
    EXPECT_NEAR(metric_norm_squared(x, r, w, wd, p), direct, 1e-9 * std::max(1.0, direct));
  }
}
