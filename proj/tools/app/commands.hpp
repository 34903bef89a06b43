#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace hipnex::app {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // check failure or failed bench cells
  kInvalid = 2,       // configuration or parameter error
  kNotConverged = 3,  // max_iter reached
  kSolverError = 4,   // subproblem failure or strict invariant breach
};

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& base, const BenchGrid& grid, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& selector, std::ostream& out, std::ostream& err);
/// Re-renders stored JSON summaries (files or directories of *.summary.json).
int cmd_table(const std::vector<std::string>& inputs, std::ostream& out, std::ostream& err);

}  // namespace hipnex::app
