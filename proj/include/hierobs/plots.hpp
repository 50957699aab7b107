#pragma once

#include <string>
#include <vector>

#include "hierobs/simulation.hpp"

namespace hierobs {

struct PlotFiles {
  std::string attitude_error;    // ||q_e||(t), threshold line, first-crossing marker
  std::string translation_metric;  // x_e^T M x_e (t), log axis
};

/// Writes attitude_error.svg and translation_metric.svg into `dir` (created if
/// missing). `threshold` is drawn as a horizontal line; the first sample at or
/// below it gets a vertical marker. Throws std::runtime_error with the path on
/// I/O failure and std::invalid_argument for an empty record.
PlotFiles emit_plots(const RunRecord& record, const std::string& dir, double threshold);

}  // namespace hierobs
