#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "doctest.h"
#include "output.hpp"
#include "runner.hpp"

using namespace hipnex;
using namespace hipnex::app;

TEST_SUITE("app") {

TEST_CASE("config round trip") {
  RunConfig c;
  c.problem.kind = "box";
  c.problem.n = 17;
  c.sigma_hat = 0.1;
  c.theta = 0.3;
  c.backend = Backend::Tseng;
  RunConfig d;
  apply_kv(parse_kv(to_kv_text(c)), d);
  CHECK(d.problem.kind == "box");
  CHECK(d.problem.n == 17);
  CHECK(d.sigma_hat == 0.1);
  CHECK(d.theta.value() == 0.3);
  CHECK(d.backend == Backend::Tseng);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_kv("no equals sign"), ParameterError);
  CHECK_THROWS_AS(parse_kv("a = 1\na = 2"), ParameterError);
  RunConfig c;
  CHECK_THROWS_AS(apply_kv(parse_kv("colour = red"), c), ParameterError);
  CHECK_THROWS_AS(apply_kv(parse_kv("n = ten"), c), ParameterError);
  c = RunConfig{};
  c.sigma_hat = 0.6;
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = RunConfig{};
  c.method = "hpe";
  CHECK_THROWS_AS(validate(c), ParameterError);
  c = RunConfig{};
  c.problem.kind = "box";
  c.backend = Backend::Krylov;
  CHECK_THROWS_AS(validate(c), ParameterError);
}

TEST_CASE("comments, lists and grid keys") {
  RunConfig c;
  BenchGrid g;
  apply_kv(parse_kv("# header\nbench.sizes = 50, 100\nbench.seeds = 1,2,3 # trailing\nrho = 1e-4\n"), c, &g);
  CHECK(g.sizes == std::vector<int>{50, 100});
  CHECK(g.seeds.size() == 3);
  CHECK(c.rho == 1e-4);
  const auto [m, b] = parse_method_label("npe-krylov");
  CHECK(m == "npe");
  CHECK(b == Backend::Krylov);
}

TEST_CASE("runs are deterministic and share x0 across methods") {
  RunConfig c;
  c.problem.n = 10;
  c.rho = 1e-6;
  const Outcome a = execute(c);
  const Outcome b = execute(c);
  CHECK(a.result.iterations == b.result.iterations);
  CHECK((a.result.y_best - b.result.y_best).norm() == 0.0);
  RunConfig n = c;
  n.method = "npe";
  const Outcome o = execute(n);
  CHECK(o.summary.x0_hash == a.summary.x0_hash);
  CHECK(o.summary.data_hash == a.summary.data_hash);
  RunConfig other = c;
  other.problem.seed = 1;
  CHECK(execute(other).summary.data_hash != a.summary.data_hash);
}

TEST_CASE("trace CSV and summary JSON") {
  RunConfig c;
  c.problem.n = 10;
  const Outcome o = execute(c);
  const std::string csv = trace_csv(o.result.trace);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,wall_time_s,lambda,residual_norm,step_class,inner_iters,cum_linear_solves,cum_F_evals,cum_J_evals");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(o.result.trace.size()));

  const MetricsSummary back = parse_summary_json(summary_json(o.summary));
  CHECK(back.iterations == o.summary.iterations);
  CHECK(back.linear_solves == o.summary.linear_solves);
  CHECK(back.data_hash == o.summary.data_hash);
  CHECK(back.final_residual == o.summary.final_residual);
  CHECK(render_table({back}).find("hipnex") != std::string::npos);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "hipnex_unit_atomic";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "a.txt").string();
  write_atomic(path, "one");
  write_atomic(path, "two");
  std::ifstream in(path);
  std::string s;
  in >> s;
  CHECK(s == "two");
  std::filesystem::remove_all(dir);
}

}
