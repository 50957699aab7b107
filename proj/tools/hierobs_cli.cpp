#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hierobs/acceptance.hpp"
#include "hierobs/analysis.hpp"
#include "hierobs/gain_synthesis.hpp"
#include "hierobs/plots.hpp"
#include "hierobs/record_io.hpp"
#include "hierobs/simulation.hpp"

namespace {

struct Overrides {
  std::string config = HIEROBS_DEFAULT_CONFIG;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> feed;
  std::optional<std::string> omega_dot;
  bool randomize_init = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

hierobs::RunConfig resolve(const Overrides& o) {
  hierobs::RunConfig cfg = hierobs::load_config(o.config);
  hierobs::KeyValues kv;
  if (o.feed) kv["sim.feed"] = *o.feed;
  if (o.omega_dot) kv["sim.omega_dot"] = *o.omega_dot;
  if (o.out) kv["output.dir"] = *o.out;
  hierobs::apply_key_values(cfg, kv);
  if (o.dt) cfg.dt = *o.dt;
  if (o.duration) cfg.duration = *o.duration;
  if (o.randomize_init) cfg.randomize_init = true;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

std::string in_dir(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

int cmd_run(const hierobs::RunConfig& cfg) {
  using namespace hierobs;
  const RunRecord record = run_simulation(cfg);
  const std::string csv = in_dir(cfg.out_dir, "run.csv");
  emit_csv(record, csv);

  const double b_sup = measured_gyro_bias_error_sup(record);
  const EnvelopeReport env = corollary_envelope_check(record, cfg.attitude_gains.c1, b_sup);
  const double threshold = cfg.gyro_bias_error_bound / (2.0 * cfg.attitude_gains.c1);
  const PlotFiles plots = emit_plots(record, cfg.out_dir, threshold);

  const RunSample& last = record.samples.back();
  std::printf("samples            %zu\n", record.size());
  std::printf("final ||q_e||      %.6g\n", last.qe_norm);
  std::printf("final ||x_e||      %.6g\n", last.x_error.norm());
  std::printf("sup ||b_e^g||      %.6g rad/s\n", b_sup);
  std::printf("threshold crossing %.6g s\n", env.first_crossing);
  if (!std::isnan(env.first_crossing) && env.first_crossing > 0.0) {
    const double rate = fit_decay_rate(times(record), qe_norms(record), {0.0, env.first_crossing});
    std::printf("attitude rate      %.6g 1/s\n", rate);
    const std::vector<double> t = times(record);
    const std::vector<double> y = metric_error_norms(record);
    const TimeWindow w = truncate_at_relative_floor(t, y, {2.0 * env.first_crossing, t.back()});
    if (w.t1 > w.t0) {
      std::printf("translation rate   %.6g 1/s over [%.4g, %.4g] s\n", fit_decay_rate(t, y, w), w.t0,
                  w.t1);
    }
  }
  std::printf("wrote %s\nwrote %s\nwrote %s\n", csv.c_str(), plots.attitude_error.c_str(),
              plots.translation_metric.c_str());
  return 0;
}

int cmd_synth(const hierobs::RunConfig& cfg) {
  using namespace hierobs;
  const TranslationGains& k = cfg.translation_gains;
  std::printf("gains              k1 = %.17g, k2 = %.17g, k3 = %.17g (hurwitz: %s)\n", k.k1, k.k2,
              k.k3, k.hurwitz() ? "yes" : "no");
  for (const Pole& p : characteristic_roots(k)) {
    std::printf("closed-loop pole   %.12g %+.12gi\n", p.real(), p.imag());
  }
  const Mat39 c = canonical_output_matrix();
  const ContractionCertificate cert = lyapunov_certificate(k, cfg.lambda, c.transpose() * c);
  const LmiReport rep = verify_contraction_lmi(cert, k);
  std::printf("lambda             %.6g\n", cfg.lambda);
  std::printf("rho                %.12g\n", cert.rho);
  std::printf("LMI max eigenvalue %.3g (%s)\n", rep.max_eigenvalue,
              rep.certified() ? "certified" : "not certified");
  std::printf("gain mismatch      %.3g\n", rep.gain_mismatch);
  const ObservabilityReport obs = check_uniform_observability(to_rotation(normalized(cfg.q0)));
  std::printf("observability      det = %.12g, cond = %.6g, %s\n", obs.determinant,
              obs.condition_number, obs.uniformly_observable ? "full rank" : "rank deficient");
  return rep.certified() ? 0 : 1;
}

int cmd_verify(const hierobs::RunConfig& cfg) {
  int failures = 0;
  for (const auto& r : hierobs::run_acceptance_suite(cfg)) {
    std::printf("%s\n", hierobs::format_result(r).c_str());
    if (!r.passed) ++failures;
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

int cmd_dump_truth(const hierobs::RunConfig& cfg) {
  const std::string path = in_dir(cfg.out_dir, "truth.csv");
  hierobs::emit_truth_csv(hierobs::generate_truth_stream(cfg), path);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical attitude and translation observer simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--dt", o.dt, "Integration step [s]");
  app.add_option("--duration", o.duration, "Simulated time [s]");
  app.add_option("--feed", o.feed, "Attitude feed for the translation observer")
      ->check(CLI::IsMember({"true", "estimated"}));
  app.add_option("--omega-dot", o.omega_dot, "Angular acceleration source")
      ->check(CLI::IsMember({"auto", "analytic", "fd"}));
  app.add_flag("--randomize-init", o.randomize_init, "Draw the observer initial state from the seed");
  app.add_option("--seed", o.seed, "Seed for --randomize-init");
  app.add_option("--out", o.out, "Output directory");

  auto* run = app.add_subcommand("run", "Simulate and write run.csv plus plots");
  auto* synth = app.add_subcommand("synth", "Print gains, LMI residual and observability report");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  auto* dump = app.add_subcommand("dump-truth", "Write truth and measurement streams");

  CLI11_PARSE(app, argc, argv);

  try {
    const hierobs::RunConfig cfg = resolve(o);
    if (run->parsed()) return cmd_run(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (dump->parsed()) return cmd_dump_truth(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
