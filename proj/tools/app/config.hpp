#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hipnex/baselines.hpp"
#include "hipnex/params.hpp"
#include "hipnex/subproblem.hpp"

namespace hipnex::app {

/// Problem family plus its generator parameters. Unused fields are ignored
/// by families that do not need them.
struct ProblemSpec {
  std::string kind = "cubic";  // cubic | affine | box
  int n = 50;
  std::uint64_t seed = 0;
  std::optional<double> L;     // family default when unset
  double cond = 20.0;
  double lo = -1.0;
  double hi = 1.0;
  double active_fraction = 0.3;
  double skew_scale = 1.0;

  double lipschitz() const;
};

struct RunConfig {
  ProblemSpec problem;
  std::string method = "hipnex";  // hipnex | npe | hpe
  Backend backend = Backend::Auto;
  double sigma_hat = 0.25;
  std::optional<double> theta;
  std::optional<double> eta;
  std::optional<double> lambda1;
  double rho = 1e-6;
  int max_iter = 10000;
  bool strict = false;
  std::string stop = "any";  // any | pointwise | ergodic
  NpeConfig npe;
  int krylov_restart = 100;
  std::int64_t krylov_max_inner = 20000;
  std::string out = ".";
  std::string name;  // artifact stem; derived when empty

  /// Test hook: corrupt lambda after this iteration.
  int inject_fault = -1;

  std::string artifact_stem() const;
};

/// Grid for `bench`: every method label (e.g. "hipnex-krylov") x size x seed.
struct BenchGrid {
  std::vector<std::string> methods{"hipnex-direct", "hipnex-krylov", "npe-direct", "npe-krylov"};
  std::vector<int> sizes{200};
  std::vector<std::uint64_t> seeds{0};
  int threads = 1;
};

/// Flat `key = value` text; `#` starts a comment. Throws ParameterError on
/// malformed lines or duplicate keys.
std::map<std::string, std::string> parse_kv(const std::string& text);
std::map<std::string, std::string> read_kv_file(const std::string& path);

/// Applies known keys to `cfg` (and `grid` when given). Unknown keys throw.
void apply_kv(const std::map<std::string, std::string>& kv, RunConfig& cfg, BenchGrid* grid = nullptr);

/// Serializes the config back to the same format.
std::string to_kv_text(const RunConfig& cfg);

/// Params for the config (overrides applied); throws ParameterError when invalid.
Params resolve_params(const RunConfig& cfg);

/// Full pre-solve validation against the params module and the problem family.
void validate(const RunConfig& cfg);

/// Splits "hipnex-krylov" into method and backend.
std::pair<std::string, Backend> parse_method_label(const std::string& label);

std::vector<std::string> split_list(const std::string& s);

}  // namespace hipnex::app
