#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "output.hpp"
#include "runner.hpp"
#include "suites.hpp"

namespace hipnex::app {

namespace fs = std::filesystem;

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kInvalid;
  }
  Outcome o;
  try {
    o = execute(cfg);
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kSolverError;
  } catch (const ParameterError& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kInvalid;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
  const std::string stem = (fs::path(cfg.out) / cfg.artifact_stem()).string();
  write_atomic(stem + ".trace.csv", trace_csv(o.result.trace));
  write_atomic(stem + ".summary.json", summary_json(o.summary));
  const MetricsSummary& m = o.summary;
  out << m.method << " (" << m.backend << ") on " << m.problem << " n=" << m.n << " seed=" << m.seed << ": "
      << m.termination << " after " << m.iterations << " iterations, residual " << m.final_residual << ", "
      << m.linear_solves << " linear solves, " << m.time_s << " s\n"
      << "wrote " << stem << ".trace.csv and " << stem << ".summary.json\n";
  if (m.invariant_breaches) err << "warning: " << m.invariant_breaches << " invariant breaches (lenient mode)\n";
  return m.termination == "max_iter" ? kNotConverged : kOk;
}

int cmd_bench(const RunConfig& base, const BenchGrid& grid, std::ostream& out, std::ostream& err) {
  struct Cell {
    std::string label;
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : grid.sizes) {
    for (std::uint64_t seed : grid.seeds) {
      for (const std::string& label : grid.methods) cells.push_back({label, n, seed});
    }
  }
  std::vector<MetricsSummary> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      RunConfig cfg = base;
      cfg.problem.n = cell.n;
      cfg.problem.seed = cell.seed;
      cfg.name.clear();
      MetricsSummary& row = rows[i];
      try {
        std::tie(cfg.method, cfg.backend) = parse_method_label(cell.label);
        const Instance inst = build_instance(cfg.problem);
        row = execute(cfg, inst).summary;
      } catch (const std::exception& e) {
        row.method = cell.label;
        row.backend = std::string(to_string(cfg.backend));
        row.problem = cfg.problem.kind;
        row.n = cell.n;
        row.seed = cell.seed;
        row.termination = "error";
        row.error = e.what();
      }
      write_atomic((fs::path(base.out) / (cfg.artifact_stem() + ".summary.json")).string(), summary_json(row));
      std::lock_guard lock(log_mutex);
      err << "[" << (i + 1) << "/" << cells.size() << "] " << cell.label << " n=" << cell.n << " seed=" << cell.seed
          << ": " << (row.error.empty() ? row.termination : "error: " + row.error) << "\n";
    }
  };
  const int threads = std::max(1, std::min<int>(grid.threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  // Cells of one (n, seed) must share their initial point and data.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (!rows[i].error.empty() || !rows[j].error.empty()) continue;
      if (rows[i].n == rows[j].n && rows[i].seed == rows[j].seed &&
          (rows[i].x0_hash != rows[j].x0_hash || rows[i].data_hash != rows[j].data_hash)) {
        err << "internal error: cells of n=" << rows[i].n << " seed=" << rows[i].seed << " differ in inputs\n";
        return kFailure;
      }
    }
  }

  const std::string table = render_table(rows);
  write_atomic((fs::path(base.out) / "bench.csv").string(), bench_csv(rows));
  write_atomic((fs::path(base.out) / "bench.txt").string(), table);
  out << table;
  const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const MetricsSummary& m) { return m.error.empty(); });
  return all_ok ? kOk : kFailure;
}

int cmd_check(const std::string& selector, std::ostream& out, std::ostream& err) {
  std::vector<SuiteReport> reports;
  try {
    reports = run_suites(selector);
  } catch (const ParameterError& e) {
    err << e.what() << "\n";
    return kInvalid;
  }
  bool ok = true;
  for (const SuiteReport& r : reports) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s)\n";
    for (const std::string& d : r.details) out << "  " << d << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kFailure;
}

int cmd_table(const std::vector<std::string>& inputs, std::ostream& out, std::ostream& err) {
  std::vector<std::string> files;
  for (const std::string& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& entry : fs::directory_iterator(in)) {
        const std::string p = entry.path().string();
        if (p.size() > 13 && p.compare(p.size() - 13, 13, ".summary.json") == 0) files.push_back(p);
      }
    } else {
      files.push_back(in);
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<MetricsSummary> rows;
  for (const std::string& f : files) {
    std::ifstream in(f);
    if (!in) {
      err << "cannot read " << f << "\n";
      return kInvalid;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      rows.push_back(parse_summary_json(ss.str()));
    } catch (const std::exception& e) {
      err << f << ": " << e.what() << "\n";
      return kInvalid;
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const MetricsSummary& a, const MetricsSummary& b) {
    return std::tie(a.n, a.seed) < std::tie(b.n, b.seed);
  });
  out << render_table(rows);
  return kOk;
}

}  // namespace hipnex::app
