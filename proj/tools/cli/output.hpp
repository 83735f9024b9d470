#pragma once

#include "cli/run_config.hpp"

#include <jkp/studies.hpp>

#include <string>
#include <vector>

namespace jkp::cli {

inline constexpr const char* kResultHeader =
    "scenario,learner,estimator,alpha,n_train,reps,test_points,coverage,avg_width,seed";
inline constexpr const char* kCurveHeader = "learner,y,pv";

/// Fixed-point with 6 decimals, "-0.000000" normalized to "0.000000".
std::string fixed6(double value);
/// Shortest text that reads back to the same double. Curve grids need it:
/// the points just left and right of a score differ by far less than 1e-6.
std::string shortest(double value);

std::string format_results(const std::vector<MonteCarloReport>& rows, Format format);
std::string format_curves(const std::vector<CurveRow>& rows, Format format);
/// One row per parameter plus an "aggregate" row summing the eight MSEs.
std::string format_param_table(const ParamMseTable& table, Format format);

/// Writes `text` to `path` (binary, so LF stays LF) or to stdout when path is
/// empty. Throws std::runtime_error on an unwritable path.
void write_output(const std::string& text, const std::string& path);

}  // namespace jkp::cli
