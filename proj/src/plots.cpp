#include "hierobs/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hierobs {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr std::size_t kMaxPoints = 4000;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct Axes {
  double x0, x1, y0, y1;
  bool log_y;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void frame(std::ostringstream& svg, const Axes& ax, const std::string& title,
           const std::string& ylabel) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double x = ax.x0 + (ax.x1 - ax.x0) * i / 5.0;
    svg << "<text x=\"" << num(ax.px(x)) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
  }
  if (ax.log_y) {
    for (int e = static_cast<int>(std::ceil(ax.y0)); e <= static_cast<int>(std::floor(ax.y1)); ++e) {
      const double y = ax.py(std::pow(10.0, e));
      svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(y)
          << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = ax.y0 + (ax.y1 - ax.y0) * i / 5.0;
      svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(ax.py(v) + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
  }
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\">t [s]</text>\n";
  svg << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

void polyline(std::ostringstream& svg, const Axes& ax, const std::vector<double>& t,
              const std::vector<double>& y, const std::string& color) {
  const std::size_t stride = std::max<std::size_t>(1, t.size() / kMaxPoints);
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < t.size(); i += stride) {
    svg << num(ax.px(t[i])) << ',' << num(ax.py(y[i])) << ' ';
  }
  svg << num(ax.px(t.back())) << ',' << num(ax.py(y.back())) << "\"/>\n";
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

PlotFiles emit_plots(const RunRecord& record, const std::string& dir, double threshold) {
  if (record.empty()) throw std::invalid_argument("emit_plots: empty record");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());

  std::vector<double> t, qe, xmx;
  for (const RunSample& s : record.samples) {
    t.push_back(s.t);
    qe.push_back(s.qe_norm);
    xmx.push_back(s.metric_error);
  }
  const double t0 = t.front();
  const double t1 = t.size() > 1 ? t.back() : t0 + 1.0;

  PlotFiles files;
  files.attitude_error = (std::filesystem::path(dir) / "attitude_error.svg").string();
  files.translation_metric = (std::filesystem::path(dir) / "translation_metric.svg").string();

  {
    const double top = std::max(*std::max_element(qe.begin(), qe.end()), threshold) * 1.05;
    const Axes ax{t0, t1, 0.0, top > 0.0 ? top : 1.0, false};
    std::ostringstream svg;
    frame(svg, ax, "Attitude error", "||q_e||");
    polyline(svg, ax, t, qe, "#1f77b4");
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\""
        << num(ax.py(threshold)) << "\" y2=\"" << num(ax.py(threshold))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (qe[i] <= threshold) {
        svg << "<line x1=\"" << num(ax.px(t[i])) << "\" x2=\"" << num(ax.px(t[i])) << "\" y1=\""
            << kTop << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
        break;
      }
    }
    svg << "</svg>\n";
    write(files.attitude_error, svg.str());
  }

  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double v : xmx) {
      if (v > 0.0) lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > 0.0)) {
      lo = 1e-16;
      hi = 1.0;
    }
    std::vector<double> clamped(xmx.size());
    std::transform(xmx.begin(), xmx.end(), clamped.begin(),
                   [lo](double v) { return std::max(v, lo); });
    const double y0 = std::floor(std::log10(lo));
    const double y1 = std::max(std::ceil(std::log10(hi)), y0 + 1.0);
    const Axes ax{t0, t1, y0, y1, true};
    std::ostringstream svg;
    frame(svg, ax, "Translation error in the contraction metric", "x_e^T M x_e");
    polyline(svg, ax, t, clamped, "#2ca02c");
    svg << "</svg>\n";
    write(files.translation_metric, svg.str());
  }
  return files;
}

}  // namespace hierobs
