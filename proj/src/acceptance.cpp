#include "hierobs/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hierobs/analysis.hpp"
#include "hierobs/gain_synthesis.hpp"
#include "hierobs/simulation.hpp"

namespace hierobs {

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using Mat3L = Eigen::Matrix<long double, 3, 3>;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

Quaternion random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return normalized(Quaternion{n(rng), n(rng), n(rng), n(rng)});
}

Vec3 random_vec(std::mt19937_64& rng, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return {u(rng), u(rng), u(rng)};
}

CriterionResult criterion_gains() {
  CriterionResult r;
  const TranslationGains k = pole_place({Pole(-4.0), Pole(-4.0), Pole(-4.0)});
  r.passed = k.k1 == 64.0 && k.k2 == 48.0 && k.k3 == 12.0;
  r.detail = fmt("k = (%.17g, %.17g, %.17g)", k.k1, k.k2, k.k3);
  return r;
}

CriterionResult criterion_observability() {
  CriterionResult r;
  std::mt19937_64 rng(2);
  double worst = 0.0;
  bool all_observable = true;
  for (int i = 0; i < 1000; ++i) {
    const ObservabilityReport rep = check_uniform_observability(to_rotation(random_unit_quaternion(rng)));
    worst = std::max(worst, std::abs(rep.determinant + 1.0));
    all_observable = all_observable && rep.uniformly_observable;
  }
  r.passed = all_observable && worst <= 1e-9;
  r.detail = fmt("max |det + 1| = %.3g over 1000 rotations", worst);
  return r;
}

CriterionResult criterion_attitude_contraction() {
  CriterionResult r;
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 w = random_vec(rng, 10.0);
    const Vec3 b = random_vec(rng, 1.0);
    const Vec3 bh = random_vec(rng, 1.0);
    worst = std::max(worst, contraction_jacobian_check(w, b, bh, 20.0));
  }
  r.passed = worst < 1e-12;
  r.detail = fmt("max residual = %.3g over 1000 inputs", worst);
  return r;
}

CriterionResult criterion_envelope(const RunRecord& run, const RunConfig& cfg) {
  CriterionResult r;
  const double c1 = cfg.attitude_gains.c1;
  const double b_bar = measured_gyro_bias_error_sup(run);
  const EnvelopeReport env = corollary_envelope_check(run, c1, b_bar);
  double rate = std::nan("");
  bool rate_ok = false;
  if (!std::isnan(env.first_crossing) && env.first_crossing > 0.0) {
    rate = fit_decay_rate(times(run), qe_norms(run), {0.0, env.first_crossing});
    rate_ok = rate >= 0.85 * c1;
  }
  r.passed = env.holds && rate_ok;
  std::ostringstream d;
  d << fmt("b_bar = %.4f, envelope max violation = %.4g at t = %.4f s (tol 1e-3)", b_bar,
           env.max_violation, env.violation_time)
    << fmt(", first crossing %.4f s, fitted rate = %.3f (need >= %.2f)", env.first_crossing, rate,
           0.85 * c1);
  r.detail = d.str();
  return r;
}

CriterionResult criterion_lyapunov(const RunRecord& run) {
  CriterionResult r;
  const double worst = max_step_increase(times(run), lyapunov_values(run));
  r.passed = worst <= 1e-9;
  r.detail = fmt("max V increase per step = %.3g (tol 1e-9)", worst);
  return r;
}

CriterionResult criterion_true_feed(const RunConfig& cfg) {
  CriterionResult r;
  RunConfig c = cfg;
  c.feed = FeedMode::kTrue;
  const RunRecord run = run_simulation(c);
  const EnvelopeReport env =
      corollary_envelope_check(run, c.attitude_gains.c1, measured_gyro_bias_error_sup(run));
  const std::vector<double> t = times(run);
  const std::vector<double> y = metric_error_norms(run);
  const TimeWindow window =
      truncate_at_relative_floor(t, y, {2.0 * env.first_crossing, t.back()});
  const double rate = fit_decay_rate(t, y, window);
  r.passed = rate >= 0.85 * c.lambda;
  r.detail = fmt("fitted rate = %.4f over [%.3f, %.3f] s (need >= %.2f)", rate, window.t0,
                 window.t1, 0.85 * c.lambda);
  return r;
}

CriterionResult criterion_hierarchical(const RunRecord& run, const RunConfig& cfg) {
  CriterionResult r;
  const RunSample& last = run.samples.back();
  const EnvelopeReport env =
      corollary_envelope_check(run, cfg.attitude_gains.c1, measured_gyro_bias_error_sup(run));
  const double t_start = 2.0 * env.first_crossing;
  const double rise = max_step_increase(times(run), metric_errors(run), t_start);
  const double x_norm = last.x_error.norm();
  r.passed = last.qe_norm < 1e-3 && x_norm < 1e-2 && rise <= 1e-12;
  r.detail = fmt("final ||q_e|| = %.3g, final ||x_e|| = %.3g, max x^T M x rise after %.3f s = %.3g",
                 last.qe_norm, x_norm, t_start, rise);
  return r;
}

// Rotation along the reference trajectory near an anchor, in extended
// precision: R(t_a + s) = R(t_a) Phi(s), Phi_dot = Phi [w(t_a + s)]x.
class LocalRotation {
 public:
  LocalRotation(long double anchor_time, const Mat3& anchor) : t_a_(anchor_time) {
    r_a_ = anchor.cast<long double>();
  }

  Mat3L operator()(long double t) const {
    const int substeps = 8;
    const long double h = (t - t_a_) / substeps;
    Mat3L phi = Mat3L::Identity();
    long double s = t_a_;
    for (int i = 0; i < substeps; ++i) {
      const Mat3L k1 = phi * w(s);
      const Mat3L k2 = (phi + 0.5L * h * k1) * w(s + 0.5L * h);
      const Mat3L k3 = (phi + 0.5L * h * k2) * w(s + 0.5L * h);
      const Mat3L k4 = (phi + h * k3) * w(s + h);
      phi += h / 6.0L * (k1 + 2.0L * k2 + 2.0L * k3 + k4);
      s += h;
    }
    return r_a_ * phi;
  }

 private:
  static Mat3L w(long double t) {
    const long double x = std::sin(2.0L * t);
    const long double y = -std::sin(4.0L * t);
    const long double z = 2.0L * std::sin(t);
    Mat3L m;
    m << 0.0L, -z, y, z, 0.0L, -x, -y, x, 0.0L;
    return m;
  }

  long double t_a_;
  Mat3L r_a_;
};

CriterionResult criterion_upsilon(const RunConfig& cfg) {
  CriterionResult r;
  const std::vector<TruthStreamSample> stream = generate_truth_stream(cfg);
  const std::size_t stride = std::max<std::size_t>(1, stream.size() / 100);
  double worst = 0.0;
  int checked = 0;
  for (std::size_t k = 0; k < stream.size() && checked < 100; k += stride, ++checked) {
    const double t = stream[k].imu.t;
    const Mat3 R = to_rotation(stream[k].truth.q);
    const MotionSignals sig = truth_signals(t);
    const Mat9 expl = upsilon_inverse_explicit(R, skew(sig.angular_rate), skew(sig.angular_accel)).matrix;

    const LocalRotation rot(t, R);
    const std::function<MatL(long double)> a_fn = [&](long double s) {
      MatL a = MatL::Zero(9, 9);
      a.block(0, 3, 3, 3).setIdentity();
      a.block(3, 6, 3, 3) = -rot(s);
      return a;
    };
    const std::function<MatL(long double)> o_fn = [&](long double s) {
      MatL o = MatL::Identity(9, 9);
      o.block(6, 6, 3, 3) = -rot(s);
      return o;
    };
    const MatL rec = upsilon_inverse_recursive<long double>(a_fn, o_fn, t, 1e-5L, 3);
    worst = std::max(worst, static_cast<double>((rec - expl.cast<long double>()).cwiseAbs().maxCoeff()));
  }
  r.passed = checked == 100 && worst <= 1e-6;
  r.detail = fmt("max entry difference = %.3g at %.0f trajectory times (h = 1e-5)", worst, checked);
  return r;
}

CriterionResult criterion_lmi(const RunConfig& cfg) {
  CriterionResult r;
  const Mat39 c = canonical_output_matrix();
  const ContractionCertificate cert =
      lyapunov_certificate(cfg.translation_gains, cfg.lambda, c.transpose() * c);
  const LmiReport rep = verify_contraction_lmi(cert, cfg.translation_gains);
  r.passed = rep.max_eigenvalue <= 1e-9 && rep.gain_mismatch <= 1e-6;
  r.detail = fmt("rho = %.6g, max eig = %.3g, gain mismatch = %.3g", cert.rho, rep.max_eigenvalue,
                 rep.gain_mismatch);
  return r;
}

CriterionResult criterion_sign_flip(const RunRecord& run, const RunConfig& cfg) {
  CriterionResult r;
  RunConfig flipped = cfg;
  flipped.sign_flip_time = 5.0;
  const RunRecord other = run_simulation(flipped);
  double worst = 0.0;
  const bool same_length = other.size() == run.size();
  for (std::size_t i = 0; same_length && i < run.size(); ++i) {
    const Quaternion d = run.samples[i].attitude.q - other.samples[i].attitude.q;
    worst = std::max(worst, d.coeffs().cwiseAbs().maxCoeff());
  }
  r.passed = same_length && worst <= 1e-12;
  r.detail = fmt("max |q_hat difference| = %.3g with flip at t = 5 s", worst);
  return r;
}

template <typename F>
CriterionResult timed(int id, const char* name, F f, double extra_seconds = 0.0) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = id;
  r.name = name;
  r.seconds = extra_seconds +
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(const RunConfig& reference) {
  RunConfig cfg = reference;
  cfg.feed = FeedMode::kEstimated;
  cfg.randomize_init = false;
  cfg.sign_flip_time = -1.0;

  std::vector<CriterionResult> out;
  out.push_back(timed(1, "gain reproduction from poles (-4,-4,-4)", criterion_gains));
  out.push_back(timed(2, "observability determinant over random rotations", criterion_observability));
  out.push_back(timed(3, "attitude contraction Jacobian in the identity metric",
                      criterion_attitude_contraction));

  const auto start = std::chrono::steady_clock::now();
  RunRecord run;
  std::string run_error;
  try {
    run = run_simulation(cfg);
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  const double run_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto with_run = [&](int id, const char* name, auto f) {
    return timed(
        id, name,
        [&] {
          if (!run_error.empty()) throw std::runtime_error("reference run failed: " + run_error);
          return f();
        },
        run_seconds);
  };

  out.push_back(with_run(4, "attitude envelope and pre-threshold decay rate",
                         [&] { return criterion_envelope(run, cfg); }));
  out.push_back(with_run(5, "attitude Lyapunov function non-increasing",
                         [&] { return criterion_lyapunov(run); }));
  out.push_back(timed(6, "translation contraction rate with true attitude feed",
                      [&] { return criterion_true_feed(cfg); }));
  out.push_back(with_run(7, "hierarchical convergence with estimated attitude feed",
                         [&] { return criterion_hierarchical(run, cfg); }));
  out.push_back(timed(8, "explicit vs recursive inverse coordinate change",
                      [&] { return criterion_upsilon(cfg); }));
  out.push_back(timed(9, "contraction LMI certificate and gain recovery",
                      [&] { return criterion_lmi(cfg); }));
  out.push_back(with_run(10, "measurement sign flip leaves the attitude estimate unchanged",
                         [&] { return criterion_sign_flip(run, cfg); }));
  return out;
}

std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof(head), "%s %2d ", r.passed ? "PASS" : "FAIL", r.id);
  char tail[64];
  std::snprintf(tail, sizeof(tail), "; %.2f s)", r.seconds);
  return std::string(head) + r.name + "  (" + r.detail + tail;
}

}  // namespace hierobs
