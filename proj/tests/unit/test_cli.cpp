#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(HIPNEX_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hipnex_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run cubic n=100 with krylov") {
  const auto dir = scratch("run");
  const auto r = cli("run --n 100 --backend krylov --rho 1e-6 --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  const auto trace = dir / "cubic_n100_s0_hipnex-krylov.trace.csv";
  const auto summary = dir / "cubic_n100_s0_hipnex-krylov.summary.json";
  REQUIRE(fs::exists(trace));
  REQUIRE(fs::exists(summary));
  const auto rows = read_csv(trace);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0][0] == "k");
  double prev_t = -1.0;
  long long prev_solves = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stoi(rows[i][0]) == static_cast<int>(i));
    const double t = std::stod(rows[i][1]);
    const long long s = std::stoll(rows[i][6]);
    CHECK(t >= prev_t);
    CHECK(s >= prev_solves);
    prev_t = t;
    prev_solves = s;
  }
  const std::string js = slurp(summary);
  const auto it = js.find("\"iterations\"");
  REQUIRE(it != std::string::npos);
  const int iters = std::stoi(js.substr(js.find(':', it) + 1));
  CHECK(static_cast<int>(rows.size()) - 1 == iters);
  const auto fr = js.find("\"final_residual\"");
  CHECK(std::stod(js.substr(js.find(':', fr) + 1)) <= 1e-6);
}

TEST_CASE("invalid sigma_hat is rejected") {
  const auto dir = scratch("invalid");
  std::ofstream(dir / "bad.cfg") << "sigma_hat = 0.6\n";
  const auto r = cli("run --config " + (dir / "bad.cfg").string() + " --out " + dir.string());
  CHECK(r.code != 0);
  CHECK(r.output.find("sigma_hat") != std::string::npos);
}

TEST_CASE("strict mode aborts on an injected fault") {
  const auto dir = scratch("fault");
  const auto strict = cli("run --n 20 --strict --inject-fault 3 --out " + dir.string());
  CHECK(strict.code != 0);
  CHECK(strict.output.find("invariant") != std::string::npos);
  const auto lenient = cli("run --n 20 --inject-fault 3 --out " + dir.string());
  CHECK(lenient.output.find("warning") != std::string::npos);
}

TEST_CASE("bench grid shares inputs") {
  const auto dir = scratch("bench");
  const auto r = cli("bench --n 30 --sizes 30 --seeds 0 --threads 2 --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
  const auto rows = read_csv(dir / "bench.csv");
  REQUIRE(rows.size() == 5);
  std::size_t hash_col = 0;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    if (rows[0][c] == "data_hash") hash_col = c;
  }
  REQUIRE(hash_col > 0);
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i][hash_col] == rows[1][hash_col]);

  const auto t = cli("table " + dir.string());
  CHECK(t.code == 0);
  CHECK(t.output.find("npe") != std::string::npos);
  CHECK(t.output.find("hipnex") != std::string::npos);
}

TEST_CASE("empty grid") {
  const auto dir = scratch("empty");
  const auto r = cli("bench --methods \"\" --out " + dir.string());
  CHECK_MESSAGE(r.code == 0, r.output);
}

TEST_CASE("different seeds give different data") {
  const auto dir = scratch("seeds");
  CHECK(cli("run --n 10 --seed 1 --out " + dir.string()).code == 0);
  CHECK(cli("run --n 10 --seed 2 --out " + dir.string()).code == 0);
  const std::string a = slurp(dir / "cubic_n10_s1_hipnex-auto.summary.json");
  const std::string b = slurp(dir / "cubic_n10_s2_hipnex-auto.summary.json");
  auto hash = [](const std::string& js) {
    const auto p = js.find("\"data_hash\"");
    return js.substr(p, js.find(',', p) - p);
  };
  CHECK(hash(a) != hash(b));
}

TEST_CASE("check params") {
  const auto r = cli("check params");
  CHECK(r.code == 0);
  CHECK(r.output.find("PASS params") != std::string::npos);
  CHECK(cli("check nonsense").code != 0);
}

}
