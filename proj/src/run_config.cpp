#include "hierobs/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hierobs {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_numbers(const std::string& key, const std::string& value,
                                  std::size_t expected) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    double x = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), x);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(x)) {
      throw std::invalid_argument("config key '" + key + "': '" + token + "' is not a number");
    }
    out.push_back(x);
  }
  if (out.size() != expected) {
    throw std::invalid_argument("config key '" + key + "': expected " + std::to_string(expected) +
                                " value(s), got " + std::to_string(out.size()));
  }
  return out;
}

double parse_scalar(const std::string& key, const std::string& value) {
  return parse_numbers(key, value, 1)[0];
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  const auto n = parse_numbers(key, value, 3);
  return {n[0], n[1], n[2]};
}

Quaternion parse_quat(const std::string& key, const std::string& value) {
  const auto n = parse_numbers(key, value, 4);
  return {n[0], n[1], n[2], n[3]};
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true or false");
}

std::string format_vec3(const Vec3& v) {
  return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

std::string format_quat(const Quaternion& q) {
  return format_double(q.w) + " " + format_vec3(q.v);
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Member>
Field scalar_field(std::string key, Member member) {
  return {key, [member](const RunConfig& c) { return format_double(member(const_cast<RunConfig&>(c))); },
          [member, key](RunConfig& c, const std::string& v) { member(c) = parse_scalar(key, v); }};
}

template <typename Member>
Field vec3_field(std::string key, Member member) {
  return {key, [member](const RunConfig& c) { return format_vec3(member(const_cast<RunConfig&>(c))); },
          [member, key](RunConfig& c, const std::string& v) { member(c) = parse_vec3(key, v); }};
}

template <typename Member>
Field quat_field(std::string key, Member member) {
  return {key, [member](const RunConfig& c) { return format_quat(member(const_cast<RunConfig&>(c))); },
          [member, key](RunConfig& c, const std::string& v) { member(c) = parse_quat(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> registry = [] {
    std::vector<Field> f;
    f.push_back(scalar_field("sim.dt", [](RunConfig& c) -> double& { return c.dt; }));
    f.push_back(scalar_field("sim.duration", [](RunConfig& c) -> double& { return c.duration; }));
    f.push_back({"sim.feed",
                 [](const RunConfig& c) { return std::string(c.feed == FeedMode::kTrue ? "true" : "estimated"); },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "true") c.feed = FeedMode::kTrue;
                   else if (v == "estimated") c.feed = FeedMode::kEstimated;
                   else throw std::invalid_argument("config key 'sim.feed': expected true or estimated");
                 }});
    f.push_back({"sim.omega_dot",
                 [](const RunConfig& c) {
                   switch (c.omega_dot) {
                     case OmegaDotMode::kAnalytic: return std::string("analytic");
                     case OmegaDotMode::kFiniteDifference: return std::string("fd");
                     default: return std::string("auto");
                   }
                 },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "auto") c.omega_dot = OmegaDotMode::kAuto;
                   else if (v == "analytic") c.omega_dot = OmegaDotMode::kAnalytic;
                   else if (v == "fd") c.omega_dot = OmegaDotMode::kFiniteDifference;
                   else throw std::invalid_argument("config key 'sim.omega_dot': expected auto, analytic or fd");
                 }});
    f.push_back(scalar_field("sim.omega_dot_tau", [](RunConfig& c) -> double& { return c.omega_dot_tau; }));
    f.push_back({"sim.omega_dot_bias_rate",
                 [](const RunConfig& c) { return std::string(c.omega_dot_bias_rate ? "true" : "false"); },
                 [](RunConfig& c, const std::string& v) {
                   c.omega_dot_bias_rate = parse_bool("sim.omega_dot_bias_rate", v);
                 }});
    f.push_back({"sim.pose_decimation",
                 [](const RunConfig& c) { return std::to_string(c.pose_decimation); },
                 [](RunConfig& c, const std::string& v) {
                   const double x = parse_scalar("sim.pose_decimation", v);
                   if (x != std::floor(x)) {
                     throw std::invalid_argument("config key 'sim.pose_decimation': expected an integer");
                   }
                   c.pose_decimation = static_cast<int>(x);
                 }});
    f.push_back(scalar_field("sim.sign_flip_time", [](RunConfig& c) -> double& { return c.sign_flip_time; }));
    f.push_back(vec3_field("sim.gravity", [](RunConfig& c) -> Vec3& { return c.gravity.g; }));
    f.push_back({"sim.randomize_init",
                 [](const RunConfig& c) { return std::string(c.randomize_init ? "true" : "false"); },
                 [](RunConfig& c, const std::string& v) { c.randomize_init = parse_bool("sim.randomize_init", v); }});
    f.push_back({"sim.seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, const std::string& v) {
                   std::uint64_t x = 0;
                   const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
                   if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
                     throw std::invalid_argument("config key 'sim.seed': expected an unsigned integer");
                   }
                   c.seed = x;
                 }});

    f.push_back(quat_field("truth.q0", [](RunConfig& c) -> Quaternion& { return c.q0; }));
    f.push_back(vec3_field("truth.p0", [](RunConfig& c) -> Vec3& { return c.p0; }));
    f.push_back(vec3_field("truth.v0", [](RunConfig& c) -> Vec3& { return c.v0; }));
    f.push_back(vec3_field("truth.gyro_bias", [](RunConfig& c) -> Vec3& { return c.gyro_bias; }));
    f.push_back(vec3_field("truth.accel_bias", [](RunConfig& c) -> Vec3& { return c.accel_bias; }));

    f.push_back(quat_field("observer.q0", [](RunConfig& c) -> Quaternion& { return c.q_hat0; }));
    f.push_back(vec3_field("observer.p0", [](RunConfig& c) -> Vec3& { return c.p_hat0; }));
    f.push_back(vec3_field("observer.v0", [](RunConfig& c) -> Vec3& { return c.v_hat0; }));
    f.push_back(vec3_field("observer.gyro_bias0", [](RunConfig& c) -> Vec3& { return c.gyro_bias_hat0; }));
    f.push_back(vec3_field("observer.accel_bias0", [](RunConfig& c) -> Vec3& { return c.accel_bias_hat0; }));

    f.push_back(scalar_field("attitude.c1", [](RunConfig& c) -> double& { return c.attitude_gains.c1; }));
    f.push_back(scalar_field("attitude.c2", [](RunConfig& c) -> double& { return c.attitude_gains.c2; }));
    f.push_back(scalar_field("attitude.gyro_bias_error_bound",
                             [](RunConfig& c) -> double& { return c.gyro_bias_error_bound; }));

    f.push_back(scalar_field("translation.lambda", [](RunConfig& c) -> double& { return c.lambda; }));
    f.push_back(scalar_field("translation.k1", [](RunConfig& c) -> double& { return c.translation_gains.k1; }));
    f.push_back(scalar_field("translation.k2", [](RunConfig& c) -> double& { return c.translation_gains.k2; }));
    f.push_back(scalar_field("translation.k3", [](RunConfig& c) -> double& { return c.translation_gains.k3; }));

    f.push_back({"output.dir", [](const RunConfig& c) { return c.out_dir; },
                 [](RunConfig& c, const std::string& v) { c.out_dir = v; }});
    return f;
  }();
  return registry;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("invalid config: " + message);
}

}  // namespace

void RunConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "sim.dt must be > 0");
  require(std::isfinite(duration) && duration > 0.0, "sim.duration must be > 0");
  require(duration >= dt, "sim.duration must cover at least one step");
  require(std::isfinite(omega_dot_tau) && omega_dot_tau >= 0.0, "sim.omega_dot_tau must be >= 0");
  require(pose_decimation >= 1, "sim.pose_decimation must be >= 1");
  require(gravity.g.allFinite(), "sim.gravity must be finite");
  require(std::abs(q0.norm() - 1.0) < 1e-3, "truth.q0 must be a unit quaternion (within 1e-3)");
  require(std::abs(q_hat0.norm() - 1.0) < 1e-3, "observer.q0 must be a unit quaternion (within 1e-3)");
  try {
    attitude_gains.validate();
    translation_gains.validate();
  } catch (const std::invalid_argument& e) {
    require(false, e.what());
  }
  require(std::isfinite(lambda) && lambda > 0.0, "translation.lambda must be > 0");
  require(gyro_bias_error_bound > 0.0, "attitude.gyro_bias_error_bound must be > 0");
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": missing '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void apply_key_values(RunConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    bool matched = false;
    for (const Field& f : fields()) {
      if (f.key == key) {
        f.set(cfg, value);
        matched = true;
        break;
      }
    }
    if (!matched) throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  apply_key_values(cfg, load_key_values(path));
  return cfg;
}

std::string to_key_values(const RunConfig& cfg) {
  std::ostringstream out;
  for (const Field& f : fields()) out << f.key << " = " << f.get(cfg) << "\n";
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : fields()) keys.push_back(f.key);
  return keys;
}

const std::vector<ParameterRow>& parameter_table() {
  static const std::vector<ParameterRow> rows = {
      {"q(0)", "truth.q0"},
      {"q_hat(0)", "observer.q0"},
      {"p(0)", "truth.p0"},
      {"p_hat(0)", "observer.p0"},
      {"v(0)", "truth.v0"},
      {"v_hat(0)", "observer.v0"},
      {"b_g", "truth.gyro_bias"},
      {"b_g_hat(0)", "observer.gyro_bias0"},
      {"b_g_e bound", "attitude.gyro_bias_error_bound"},
      {"b_a", "truth.accel_bias"},
      {"b_a_hat(0)", "observer.accel_bias0"},
      {"c1", "attitude.c1"},
      {"c2", "attitude.c2"},
      {"lambda", "translation.lambda"},
      {"k1", "translation.k1"},
      {"k2", "translation.k2"},
      {"k3", "translation.k3"},
      {"dt", "sim.dt"},
  };
  return rows;
}

RunConfig randomized_initial_state(const RunConfig& cfg) {
  RunConfig out = cfg;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  Quaternion q{normal(rng), normal(rng), normal(rng), normal(rng)};
  out.q_hat0 = normalized(q);
  out.p_hat0 = Vec3(box(rng), box(rng), box(rng));
  out.v_hat0 = Vec3(box(rng), box(rng), box(rng));
  out.gyro_bias_hat0.setZero();
  out.accel_bias_hat0.setZero();
  return out;
}

}  // namespace hierobs
