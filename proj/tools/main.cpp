#include <iostream>

#include "CLI11.hpp"

#include "app/commands.hpp"
#include "app/config.hpp"

using namespace hipnex;
using namespace hipnex::app;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<std::string> method;
  std::optional<std::string> backend;
  std::optional<int> n;
  std::optional<std::string> out;
  bool strict = false;
  int inject_fault = -1;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Flat key = value config file");
  cmd->add_option("--seed", f.seed, "Problem seed");
  cmd->add_option("--rho", f.rho, "Target accuracy");
  cmd->add_option("--method", f.method, "hipnex | npe | hpe");
  cmd->add_option("--backend", f.backend, "auto | direct | krylov | tseng");
  cmd->add_option("--n", f.n, "Problem size");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--strict", f.strict, "Abort on invariant breaches");
}

RunConfig resolve(const Flags& f, BenchGrid* grid) {
  RunConfig cfg;
  if (!f.config.empty()) apply_kv(read_kv_file(f.config), cfg, grid);
  if (f.seed) cfg.problem.seed = *f.seed;
  if (f.rho) cfg.rho = *f.rho;
  if (f.method) cfg.method = *f.method;
  if (f.backend) cfg.backend = parse_backend(*f.backend);
  if (f.n) cfg.problem.n = *f.n;
  if (f.out) cfg.out = *f.out;
  if (f.strict) cfg.strict = true;
  cfg.inject_fault = f.inject_fault;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homotopy inexact proximal-Newton extragradient solver for monotone VIs"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "Solve one configured problem and write its trace and summary");
  add_common(run, run_flags);
  run->add_option("--inject-fault", run_flags.inject_fault)->group("");

  Flags bench_flags;
  std::optional<std::string> methods, sizes, seeds;
  std::optional<int> threads;
  auto* bench = app.add_subcommand("bench", "Run a methods x sizes x seeds grid on shared initial points");
  add_common(bench, bench_flags);
  bench->add_option("--methods", methods, "Comma list such as hipnex-krylov,npe-krylov (empty for none)");
  bench->add_option("--sizes", sizes, "Comma list of n");
  bench->add_option("--seeds", seeds, "Comma list of seeds");
  bench->add_option("--threads", threads, "Worker threads");

  std::string selector = "all";
  auto* check = app.add_subcommand("check", "Run property suites");
  check->add_option("suite", selector, "params | invariants | rates | budgets | subproblem | hpe | ergodic | e2e | direction | all");

  std::vector<std::string> inputs;
  auto* table = app.add_subcommand("table", "Render stored JSON summaries as a text table");
  table->add_option("inputs", inputs, "Summary files or directories")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(resolve(run_flags, nullptr), std::cout, std::cerr);
    }
    if (*bench) {
      BenchGrid grid;
      RunConfig cfg = resolve(bench_flags, &grid);
      if (methods) grid.methods = split_list(*methods);
      if (sizes) {
        grid.sizes.clear();
        for (const auto& s : split_list(*sizes)) grid.sizes.push_back(std::stoi(s));
      }
      if (seeds) {
        grid.seeds.clear();
        for (const auto& s : split_list(*seeds)) grid.seeds.push_back(std::stoull(s));
      }
      if (threads) grid.threads = *threads;
      return cmd_bench(cfg, grid, std::cout, std::cerr);
    }
    if (*check) return cmd_check(selector, std::cout, std::cerr);
    if (*table) return cmd_table(inputs, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}
