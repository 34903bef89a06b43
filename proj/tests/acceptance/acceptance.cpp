// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "suites.hpp"

using namespace hipnex::app;

namespace {

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  std::function<SuiteReport()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  const std::vector<Criterion> criteria{
      {1, "parameter pack (1000 random packs)", 1.0, [] { return suite_params(1000); }},
      {2, "invariants A, B and the lambda law", 30.0, [] { return suite_invariants(50, 20); }},
      {3, "rate bounds at every LARGE-step count", 60.0, [] { return suite_rates(50, 20); }},
      {4, "budget conformance at rho 1e-3 and 1e-6", 60.0, [] { return suite_budgets(50, 20); }},
      {5, "subproblem back-end contracts (100 instances each)", 60.0, [] { return suite_subproblem(100); }},
      {6, "HPE driver bounds with exact resolvent (k <= 200)", 10.0, [] { return suite_hpe(200); }},
      {7, "HIPNEX-krylov linear solves <= NPE-krylov on 2 of 3 seeds (n = 200)", 300.0,
       [] { return suite_direction(200, 3); }},
      {8, "end-to-end recovery of the closed-form saddle point", 30.0,
       [] { return suite_end_to_end(50, 1e-8, 1e-4); }},
      {9, "streaming ergodic identity on length-10^4 traces", 10.0, [] { return suite_ergodic(10000); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    SuiteReport r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.fail(std::string("uncaught exception: ") + e.what());
    }
    bool ok = r.passed;
    if (r.seconds > c.time_limit_s) {
      ok = false;
      r.details.push_back("FAIL runtime " + std::to_string(r.seconds) + " s over " +
                          std::to_string(c.time_limit_s) + " s");
    }
    char line[256];
    std::snprintf(line, sizeof line, "[%s] %d %s (%.2f s)", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), r.seconds);
    std::cout << line << "\n";
    if (verbose || !ok) {
      for (const std::string& d : r.details) std::cout << "      " << d << "\n";
    }
    std::cout.flush();
    if (!ok) ++failed;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
