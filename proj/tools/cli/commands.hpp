#pragma once

#include "cli/run_config.hpp"

#include <jkp/studies.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace jkp::cli {

std::vector<MonteCarloReport> run_table1(const RunConfig& config);
ParamMseTable run_table2(const RunConfig& config);
std::vector<MonteCarloReport> run_table3(const RunConfig& config);
CurveTable run_curves(const RunConfig& config);
std::vector<CurveRow> run_toy_curves(const RunConfig& config);

/// "mean", "iid", "shift" or a comma-separated vector. Throws UsageError.
XNewSelection parse_x_new(const std::string& text);

/// Whole program: parse, run, write. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jkp::cli
