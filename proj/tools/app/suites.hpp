#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hipnex::app {

/// Outcome of one property suite: a verdict, one line per detail and the
/// worst observed quantity behind the verdict.
struct SuiteReport {
  std::string name;
  bool passed = true;
  std::vector<std::string> details;
  double seconds = 0.0;

  void fail(std::string why) {
    passed = false;
    details.push_back("FAIL " + std::move(why));
  }
  void note(std::string what) { details.push_back(std::move(what)); }
};

/// Random (sigma_hat, L) packs: invariants, root of q, default identities
/// and budget ordering.
SuiteReport suite_params(int packs = 1000, std::uint64_t seed = 7);

/// Invariant monitors over cubic (n = 50, three seeds), affine (n = 20) and
/// box (n = 20) runs, plus the LARGE-subsequence recomputation.
SuiteReport suite_invariants(int cubic_n = 50, int small_n = 20);

/// Rate bounds at every LARGE-step count on known-solution instances.
SuiteReport suite_rates(int cubic_n = 50, int small_n = 20);

/// Iterations to success against the worst-case budgets at rho in {1e-3, 1e-6}.
SuiteReport suite_budgets(int cubic_n = 50, int small_n = 20);

/// Subproblem back-end contracts on `instances` random instances each.
SuiteReport suite_subproblem(int instances = 100);

/// Large-step HPE driver with the exact resolvent on affine problems.
SuiteReport suite_hpe(int steps = 200);

/// Streaming ergodic certificate against the two-pass definition.
SuiteReport suite_ergodic(int length = 10000);

/// Closed-form solution recovery on the cubic problem.
SuiteReport suite_end_to_end(int n = 50, double rho = 1e-8, double tol = 1e-4);

/// Linear-solve comparison of the Krylov variants of HIPNEX and NPE on
/// cubic problems with shared initial points.
SuiteReport suite_direction(int n = 200, int seeds = 3);

/// Runs a suite by selector; "all" expands to every property suite.
/// Throws ParameterError for an unknown selector.
std::vector<SuiteReport> run_suites(const std::string& selector);

std::vector<std::string> suite_selectors();

}  // namespace hipnex::app
