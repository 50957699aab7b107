#include "hierobs/record_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hierobs {

namespace {

void append_xyz(std::vector<std::string>& cols, const std::string& prefix) {
  for (const char* axis : {"x", "y", "z"}) cols.push_back(prefix + "_" + axis);
}

void append_wxyz(std::vector<std::string>& cols, const std::string& prefix) {
  cols.push_back(prefix + "_w");
  append_xyz(cols, prefix);
}

class RowWriter {
 public:
  explicit RowWriter(std::ostream& out) : out_(out) {}

  void value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    if (!first_) out_ << ',';
    out_ << buf;
    first_ = false;
  }
  void vec(const Vec3& v) {
    for (int i = 0; i < 3; ++i) value(v[i]);
  }
  void quat(const Quaternion& q) {
    value(q.w);
    vec(q.v);
  }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  std::ostream& out_;
  bool first_ = true;
};

class RowReader {
 public:
  RowReader(const std::string& line, std::size_t row) : line_(line), row_(row) {}

  double value() {
    if (pos_ > line_.size()) fail("too few fields");
    std::size_t end = line_.find(',', pos_);
    if (end == std::string::npos) end = line_.size();
    double x = 0.0;
    const char* first = line_.data() + pos_;
    const char* last = line_.data() + end;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc() || res.ptr != last) fail("malformed number");
    pos_ = end + 1;
    return x;
  }
  Vec3 vec() {
    const double x = value();
    const double y = value();
    const double z = value();
    return {x, y, z};
  }
  Quaternion quat() {
    const double w = value();
    return {w, vec()};
  }
  void finish() const {
    if (pos_ <= line_.size()) fail("too many fields");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("csv row " + std::to_string(row_) + ": " + what);
  }

  const std::string& line_;
  std::size_t row_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

template <typename Writer>
void write_file(const std::string& path, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

const std::vector<std::string>& run_csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    append_xyz(c, "p");
    append_xyz(c, "v");
    append_wxyz(c, "q");
    append_xyz(c, "ba");
    append_xyz(c, "bg");
    append_wxyz(c, "q_hat");
    append_xyz(c, "bg_hat");
    append_xyz(c, "p_hat");
    append_xyz(c, "v_hat");
    append_xyz(c, "ba_hat");
    c.insert(c.end(), {"qe_norm", "bge_norm", "V"});
    append_xyz(c, "ep");
    append_xyz(c, "ev");
    append_xyz(c, "eba");
    c.push_back("xMx");
    return c;
  }();
  return cols;
}

void write_csv(const RunRecord& record, std::ostream& out) {
  out << join(run_csv_columns()) << '\n';
  RowWriter w(out);
  for (const RunSample& s : record.samples) {
    w.value(s.t);
    w.vec(s.truth.p);
    w.vec(s.truth.v);
    w.quat(s.truth.q);
    w.vec(s.truth.accel_bias);
    w.vec(s.truth.gyro_bias);
    w.quat(s.attitude.q);
    w.vec(s.attitude.gyro_bias);
    w.vec(s.translation.p);
    w.vec(s.translation.v);
    w.vec(s.translation.accel_bias);
    w.value(s.qe_norm);
    w.value(s.bge_norm);
    w.value(s.lyapunov);
    for (int i = 0; i < 9; ++i) w.value(s.x_error[i]);
    w.value(s.metric_error);
    w.end();
  }
}

void emit_csv(const RunRecord& record, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_csv(record, out); });
}

RunRecord read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != join(run_csv_columns())) {
    throw std::invalid_argument("csv header does not match the run column layout");
  }
  RunRecord record;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    RowReader r(line, row);
    RunSample s;
    s.t = r.value();
    s.truth.p = r.vec();
    s.truth.v = r.vec();
    s.truth.q = r.quat();
    s.truth.accel_bias = r.vec();
    s.truth.gyro_bias = r.vec();
    s.attitude.q = r.quat();
    s.attitude.gyro_bias = r.vec();
    s.translation.p = r.vec();
    s.translation.v = r.vec();
    s.translation.accel_bias = r.vec();
    s.qe_norm = r.value();
    s.bge_norm = r.value();
    s.lyapunov = r.value();
    for (int i = 0; i < 9; ++i) s.x_error[i] = r.value();
    s.metric_error = r.value();
    r.finish();
    record.samples.push_back(s);
  }
  return record;
}

RunRecord parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_csv(in);
}

const std::vector<std::string>& truth_csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    append_xyz(c, "p");
    append_xyz(c, "v");
    append_wxyz(c, "q");
    append_xyz(c, "ba");
    append_xyz(c, "bg");
    append_xyz(c, "am");
    append_xyz(c, "wm");
    return c;
  }();
  return cols;
}

void write_truth_csv(const std::vector<TruthStreamSample>& stream, std::ostream& out) {
  out << join(truth_csv_columns()) << '\n';
  RowWriter w(out);
  for (const TruthStreamSample& s : stream) {
    w.value(s.imu.t);
    w.vec(s.truth.p);
    w.vec(s.truth.v);
    w.quat(s.truth.q);
    w.vec(s.truth.accel_bias);
    w.vec(s.truth.gyro_bias);
    w.vec(s.imu.a_m);
    w.vec(s.imu.omega_m);
    w.end();
  }
}

void emit_truth_csv(const std::vector<TruthStreamSample>& stream, const std::string& path) {
  write_file(path, [&](std::ostream& out) { write_truth_csv(stream, out); });
}

}  // namespace hierobs
