#pragma once

#include "ncs/predictor.hpp"
#include "ncs/runtime.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ncs {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Header: k,t,x_true,x_pred,s,i,u,J_running. A missing x_pred is an empty field.
void write_trace(std::ostream& out, const std::vector<SimulationRecord>& records);
std::vector<SimulationRecord> read_trace(std::istream& in);

/// Header: seed,<strategy>,<strategy>,... Diverged cells read "diverged".
void write_comparison(std::ostream& out, const ComparisonTable& table);

/// Rows `pair_id,predicted,measured`, grouped by pair_id in order of first appearance.
std::vector<SamplePair> read_calibration_samples(std::istream& in);
std::vector<SamplePair> read_calibration_samples(const std::string& path);

/// One 0/1 per line; blank lines are skipped.
std::vector<int> read_loss_trace(const std::string& path);

}  // namespace ncs
