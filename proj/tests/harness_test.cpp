#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hierobs/analysis.hpp"
#include "hierobs/plots.hpp"
#include "hierobs/record_io.hpp"
#include "hierobs/run_config.hpp"
#include "hierobs/simulation.hpp"

using namespace hierobs;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("HIEROBS_TMPDIR");
  std::filesystem::path dir =
      std::filesystem::path(base ? base : std::filesystem::temp_directory_path().string()) / name;
  std::filesystem::create_directories(dir);
  return dir;
}

const RunRecord& reference_run() {
  static const RunRecord rec = run_simulation(load_config(HIEROBS_DEFAULT_CONFIG));
  return rec;
}

std::string csv_text(const RunRecord& rec) {
  std::ostringstream out;
  write_csv(rec, out);
  return out.str();
}

}  // namespace

TEST(Config, ShippedFileEqualsBuiltInDefaults) {
  EXPECT_EQ(to_key_values(load_config(HIEROBS_DEFAULT_CONFIG)), to_key_values(RunConfig{}));
}

TEST(Config, ParameterTableMapsOneToOneOntoKeys) {
  const auto& rows = parameter_table();
  ASSERT_EQ(rows.size(), 18u);
  const std::vector<std::string> keys = config_keys();
  std::set<std::string> used;
  for (const ParameterRow& row : rows) {
    EXPECT_EQ(std::count(keys.begin(), keys.end(), row.key), 1) << row.parameter;
    EXPECT_TRUE(used.insert(row.key).second) << row.key << " mapped twice";
  }
  const KeyValues shipped = load_key_values(HIEROBS_DEFAULT_CONFIG);
  for (const ParameterRow& row : rows) EXPECT_EQ(shipped.count(row.key), 1u) << row.key;
}

TEST(Config, ReferenceValues) {
  const RunConfig c = load_config(HIEROBS_DEFAULT_CONFIG);
  EXPECT_EQ(c.q0, (Quaternion{0.7071, 0.0, 0.7071, 0.0}));
  EXPECT_EQ(c.q_hat0, Quaternion::identity());
  EXPECT_EQ(c.p_hat0, Vec3(1.68, -1.94, 2.01));
  EXPECT_EQ(c.v_hat0, Vec3(-4.35, 1.51, 2.44));
  EXPECT_EQ(c.gyro_bias, Vec3(0.1, -0.02, 0.05));
  EXPECT_EQ(c.accel_bias, Vec3(-0.1, 0.4, 0.2));
  EXPECT_EQ(c.gyro_bias_error_bound, 1.83);
  EXPECT_EQ(c.attitude_gains.c1, 20.0);
  EXPECT_EQ(c.attitude_gains.c2, 60.0);
  EXPECT_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.translation_gains.k1, 64.0);
  EXPECT_EQ(c.translation_gains.k2, 48.0);
  EXPECT_EQ(c.translation_gains.k3, 12.0);
  EXPECT_EQ(c.dt, 0.001);
}

TEST(Config, KeyValueRoundTrip) {
  RunConfig c;
  c.dt = 0.0025;
  c.feed = FeedMode::kTrue;
  c.omega_dot = OmegaDotMode::kFiniteDifference;
  c.p_hat0 = Vec3(0.1, 1.0 / 3.0, -7e-9);
  c.seed = 12345678901234ull;
  c.out_dir = "some/dir";
  RunConfig d;
  apply_key_values(d, parse_key_values(to_key_values(c)));
  EXPECT_EQ(to_key_values(d), to_key_values(c));
  EXPECT_EQ(d.p_hat0, c.p_hat0);
}

TEST(Config, RejectsUnknownAndMalformed) {
  RunConfig c;
  EXPECT_THROW(apply_key_values(c, {{"sim.nope", "1"}}), std::invalid_argument);
  EXPECT_THROW(apply_key_values(c, {{"sim.dt", "fast"}}), std::invalid_argument);
  EXPECT_THROW(apply_key_values(c, {{"truth.p0", "1 2"}}), std::invalid_argument);
  EXPECT_THROW(apply_key_values(c, {{"sim.feed", "maybe"}}), std::invalid_argument);
  EXPECT_THROW(parse_key_values("sim.dt 0.1"), std::invalid_argument);
  EXPECT_THROW(load_config("/nonexistent/file.cfg"), std::runtime_error);
}

TEST(Config, ValidationMessages) {
  RunConfig c;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.duration = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.attitude_gains.c2 = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.translation_gains.k2 = 1.0;
  try {
    c.validate();
    FAIL() << "expected a validation error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("Hurwitz"), std::string::npos);
  }
  EXPECT_THROW(run_simulation(c), std::invalid_argument);
}

TEST(Config, RandomizedInitialState) {
  RunConfig c;
  c.seed = 7;
  const RunConfig a = randomized_initial_state(c);
  const RunConfig b = randomized_initial_state(c);
  EXPECT_EQ(a.q_hat0, b.q_hat0);
  EXPECT_EQ(a.p_hat0, b.p_hat0);
  EXPECT_NEAR(a.q_hat0.norm(), 1.0, 1e-15);
  EXPECT_LE(a.p_hat0.cwiseAbs().maxCoeff(), 5.0);
  EXPECT_LE(a.v_hat0.cwiseAbs().maxCoeff(), 5.0);
  c.seed = 8;
  EXPECT_FALSE(randomized_initial_state(c).p_hat0 == a.p_hat0);
}

TEST(Simulation, ReferenceRunConverges) {
  const RunRecord& rec = reference_run();
  ASSERT_EQ(rec.size(), 20001u);
  EXPECT_LT(rec.samples.back().qe_norm, 1e-3);
  EXPECT_LT(rec.samples.back().x_error.norm(), 1e-2);
  for (std::size_t k = 0; k + 1 < rec.size(); ++k) ASSERT_LT(rec.samples[k].t, rec.samples[k + 1].t);
}

TEST(Simulation, ObserverAtTruthStaysAtTruth) {
  RunConfig c;
  c.gyro_bias.setZero();
  c.accel_bias.setZero();
  c.q_hat0 = c.q0;
  c.p_hat0 = c.p0;
  c.v_hat0 = c.v0;
  c.duration = 20.0;
  for (FeedMode feed : {FeedMode::kTrue, FeedMode::kEstimated}) {
    c.feed = feed;
    const RunRecord rec = run_simulation(c);
    double worst = 0.0;
    for (const RunSample& s : rec.samples) {
      worst = std::max({worst, s.qe_norm, s.bge_norm, s.lyapunov, s.x_error.norm(),
                        std::sqrt(s.metric_error)});
    }
    EXPECT_LE(worst, 1e-9);
  }
}

TEST(Simulation, RandomizedInitialStatesConverge) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RunConfig c;
    c.randomize_init = true;
    c.seed = seed;
    const RunRecord rec = run_simulation(c);
    EXPECT_LT(rec.samples.back().qe_norm, 1e-3) << seed;
    EXPECT_LT(rec.samples.back().x_error.norm(), 1e-2) << seed;
  }
}

TEST(Simulation, DecimatedPoseIsHeldBetweenUpdates) {
  RunConfig c;
  c.pose_decimation = 5;
  c.duration = 0.02;
  const auto stream = generate_truth_stream(c);
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const auto& held = stream[k - k % 5];
    EXPECT_EQ(stream[k].pose.p, held.truth.p) << k;
    EXPECT_EQ(stream[k].pose.q, held.truth.q) << k;
  }
  EXPECT_NE(stream[4].pose.p, stream[4].truth.p);
  const RunRecord rec = run_simulation(c);
  EXPECT_EQ(rec.size(), stream.size());
}

TEST(FitDecayRate, ExactExponentials) {
  std::vector<double> t, a, b;
  for (int k = 0; k <= 1000; ++k) {
    t.push_back(k * 0.001);
    a.push_back(std::exp(-2.0 * t.back()));
    b.push_back(3.0 * std::exp(-20.0 * t.back()));
  }
  EXPECT_NEAR(fit_decay_rate(t, a, {0.0, 1.0}), 2.0, 1e-9);
  EXPECT_NEAR(fit_decay_rate(t, b, {0.1, 0.9}), 20.0, 1e-9);
}

TEST(FitDecayRate, Errors) {
  const std::vector<double> t{0.0, 1.0, 2.0}, y{1.0, 0.0, 1.0};
  EXPECT_THROW(fit_decay_rate(t, y, {0.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(fit_decay_rate(t, {1.0, 1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(fit_decay_rate(t, {1.0, 1.0, 1.0}, {1.5, 1.9}), std::invalid_argument);
  EXPECT_THROW(fit_decay_rate(t, {1.0, 1.0}, {0.0, 2.0}), std::invalid_argument);
}

TEST(FitDecayRate, ReferencePreThresholdRate) {
  const RunRecord& rec = reference_run();
  const EnvelopeReport env =
      corollary_envelope_check(rec, 20.0, measured_gyro_bias_error_sup(rec));
  ASSERT_FALSE(std::isnan(env.first_crossing));
  EXPECT_GE(fit_decay_rate(times(rec), qe_norms(rec), {0.0, env.first_crossing}), 17.0);
}

TEST(Envelope, ThresholdArithmetic) {
  RunRecord rec;
  rec.samples.resize(1);
  EXPECT_NEAR(corollary_envelope_check(rec, 20.0, 1.83).threshold, 0.04575, 1e-15);
  EXPECT_THROW(corollary_envelope_check(RunRecord{}, 20.0, 1.83), std::invalid_argument);
}

TEST(Envelope, ZeroBiasRunHolds) {
  RunConfig c;
  c.gyro_bias.setZero();
  c.duration = 2.0;
  const RunRecord rec = run_simulation(c);
  const EnvelopeReport env = corollary_envelope_check(rec, 20.0, measured_gyro_bias_error_sup(rec));
  EXPECT_TRUE(env.holds) << "max violation " << env.max_violation << " at " << env.violation_time;
}

TEST(Envelope, ReferenceRunHoldsWithMeasuredBound) {
  const RunRecord& rec = reference_run();
  const double b_bar = measured_gyro_bias_error_sup(rec);
  EXPECT_NEAR(b_bar, 1.83, 0.05);
  const EnvelopeReport env = corollary_envelope_check(rec, 20.0, b_bar);
  EXPECT_TRUE(env.holds) << "max violation " << env.max_violation << " at t = " << env.violation_time;
}

TEST(Csv, EmptyRecordIsHeaderOnly) {
  const std::string text = csv_text(RunRecord{});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("t,p_x,p_y,p_z,", 0), 0u);
  std::istringstream in(text);
  EXPECT_TRUE(read_csv(in).empty());
}

TEST(Csv, ColumnLayout) {
  const auto& cols = run_csv_columns();
  EXPECT_EQ(cols.size(), 46u);
  EXPECT_EQ(cols.front(), "t");
  EXPECT_EQ(cols.back(), "xMx");
}

TEST(Csv, RoundTripIsExact) {
  RunConfig c;
  c.duration = 0.5;
  const RunRecord rec = run_simulation(c);
  std::istringstream in(csv_text(rec));
  const RunRecord back = read_csv(in);
  ASSERT_EQ(back.size(), rec.size());
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const RunSample &a = rec.samples[k], &b = back.samples[k];
    ASSERT_EQ(a.t, b.t);
    ASSERT_EQ(a.truth.p, b.truth.p);
    ASSERT_EQ(a.truth.v, b.truth.v);
    ASSERT_EQ(a.truth.q, b.truth.q);
    ASSERT_EQ(a.truth.accel_bias, b.truth.accel_bias);
    ASSERT_EQ(a.truth.gyro_bias, b.truth.gyro_bias);
    ASSERT_EQ(a.attitude.q, b.attitude.q);
    ASSERT_EQ(a.attitude.gyro_bias, b.attitude.gyro_bias);
    ASSERT_EQ(a.translation.p, b.translation.p);
    ASSERT_EQ(a.translation.v, b.translation.v);
    ASSERT_EQ(a.translation.accel_bias, b.translation.accel_bias);
    ASSERT_EQ(a.qe_norm, b.qe_norm);
    ASSERT_EQ(a.bge_norm, b.bge_norm);
    ASSERT_EQ(a.lyapunov, b.lyapunov);
    ASSERT_EQ(a.x_error, b.x_error);
    ASSERT_EQ(a.metric_error, b.metric_error);
  }
  EXPECT_EQ(csv_text(back), csv_text(rec));
}

TEST(Csv, RejectsForeignInput) {
  std::istringstream bad_header("a,b,c\n1,2,3\n");
  EXPECT_THROW(read_csv(bad_header), std::invalid_argument);
  std::string text = csv_text(RunRecord{}) + "1,2,3\n";
  std::istringstream short_row(text);
  EXPECT_THROW(read_csv(short_row), std::invalid_argument);
  EXPECT_THROW(emit_csv(RunRecord{}, "/nonexistent/dir/run.csv"), std::runtime_error);
}

TEST(Csv, IdenticalConfigsGiveIdenticalFiles) {
  RunConfig c;
  c.duration = 2.0;
  const auto dir = scratch_dir("determinism");
  emit_csv(run_simulation(c), (dir / "a.csv").string());
  emit_csv(run_simulation(c), (dir / "b.csv").string());
  std::ifstream a(dir / "a.csv", std::ios::binary), b(dir / "b.csv", std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_GT(sa.str().size(), 1000u);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(parse_csv((dir / "a.csv").string()).size(), 2001u);
}

TEST(Plots, ReferenceRunWritesTwoFiles) {
  const auto dir = scratch_dir("plots");
  const PlotFiles files = emit_plots(reference_run(), dir.string(), 1.83 / 40.0);
  for (const std::string& f : {files.attitude_error, files.translation_metric}) {
    ASSERT_TRUE(std::filesystem::exists(f)) << f;
    EXPECT_GT(std::filesystem::file_size(f), 1000u) << f;
    std::ifstream in(f);
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first.rfind("<svg", 0), 0u);
  }
  EXPECT_THROW(emit_plots(RunRecord{}, dir.string(), 0.1), std::invalid_argument);
}
