#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hierobs/simulation.hpp"

namespace hierobs {

/// Column names of the run CSV, in order.
const std::vector<std::string>& run_csv_columns();

/// Header line plus one row per sample, values at 17 significant digits.
void write_csv(const RunRecord& record, std::ostream& out);
/// Writes write_csv() output to `path`. Throws std::runtime_error naming the
/// path when the file cannot be written.
void emit_csv(const RunRecord& record, const std::string& path);

/// Inverse of write_csv(). Throws std::invalid_argument on a header mismatch
/// or malformed row.
RunRecord read_csv(std::istream& in);
RunRecord parse_csv(const std::string& path);

/// t, p x3, v x3, q x4, ba x3, bg x3, am x3, wm x3.
const std::vector<std::string>& truth_csv_columns();
void write_truth_csv(const std::vector<TruthStreamSample>& stream, std::ostream& out);
void emit_truth_csv(const std::vector<TruthStreamSample>& stream, const std::string& path);

}  // namespace hierobs
