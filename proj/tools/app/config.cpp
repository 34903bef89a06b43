#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace hipnex::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ParameterError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParameterError("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("config: '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

double ProblemSpec::lipschitz() const {
  if (L) return *L;
  return kind == "cubic" ? 1e-3 : 1.0;
}

std::string RunConfig::artifact_stem() const {
  if (!name.empty()) return name;
  std::ostringstream os;
  os << problem.kind << "_n" << problem.n << "_s" << problem.seed << "_" << method << "-" << to_string(backend);
  return os.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParameterError("config line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw ParameterError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kv(ss.str());
}

void apply_kv(const std::map<std::string, std::string>& kv, RunConfig& c, BenchGrid* grid) {
  for (const auto& [k, v] : kv) {
    if (k == "problem") c.problem.kind = v;
    else if (k == "n") c.problem.n = static_cast<int>(to_int(k, v));
    else if (k == "seed") c.problem.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "L") c.problem.L = to_double(k, v);
    else if (k == "cond") c.problem.cond = to_double(k, v);
    else if (k == "lo") c.problem.lo = to_double(k, v);
    else if (k == "hi") c.problem.hi = to_double(k, v);
    else if (k == "active_fraction") c.problem.active_fraction = to_double(k, v);
    else if (k == "skew_scale") c.problem.skew_scale = to_double(k, v);
    else if (k == "method") c.method = v;
    else if (k == "backend") c.backend = parse_backend(v);
    else if (k == "sigma_hat") c.sigma_hat = to_double(k, v);
    else if (k == "theta") c.theta = to_double(k, v);
    else if (k == "eta") c.eta = to_double(k, v);
    else if (k == "lambda1") c.lambda1 = to_double(k, v);
    else if (k == "rho") c.rho = to_double(k, v);
    else if (k == "max_iter") c.max_iter = static_cast<int>(to_int(k, v));
    else if (k == "strict") c.strict = to_bool(k, v);
    else if (k == "stop") c.stop = v;
    else if (k == "npe.sigma_l") c.npe.sigma_l = to_double(k, v);
    else if (k == "npe.sigma_u") c.npe.sigma_u = to_double(k, v);
    else if (k == "npe.max_probes") c.npe.max_probes = static_cast<int>(to_int(k, v));
    else if (k == "npe.lambda0") c.npe.lambda0 = to_double(k, v);
    else if (k == "krylov.restart") c.krylov_restart = static_cast<int>(to_int(k, v));
    else if (k == "krylov.max_inner") c.krylov_max_inner = to_int(k, v);
    else if (k == "out") c.out = v;
    else if (k == "name") c.name = v;
    else if (grid && k == "bench.methods") grid->methods = split_list(v);
    else if (grid && k == "bench.sizes") {
      grid->sizes.clear();
      for (const auto& s : split_list(v)) grid->sizes.push_back(static_cast<int>(to_int(k, s)));
    } else if (grid && k == "bench.seeds") {
      grid->seeds.clear();
      for (const auto& s : split_list(v)) grid->seeds.push_back(static_cast<std::uint64_t>(to_int(k, s)));
    } else if (grid && k == "bench.threads") {
      grid->threads = static_cast<int>(to_int(k, v));
    } else if (k.rfind("bench.", 0) == 0) {
      // grid keys are meaningful only to `bench`
    } else {
      throw ParameterError("config: unknown key '" + k + "'");
    }
  }
}

std::string to_kv_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "problem = " << c.problem.kind << "\n"
     << "n = " << c.problem.n << "\n"
     << "seed = " << c.problem.seed << "\n"
     << "L = " << c.problem.lipschitz() << "\n"
     << "cond = " << c.problem.cond << "\n"
     << "lo = " << c.problem.lo << "\n"
     << "hi = " << c.problem.hi << "\n"
     << "active_fraction = " << c.problem.active_fraction << "\n"
     << "skew_scale = " << c.problem.skew_scale << "\n"
     << "method = " << c.method << "\n"
     << "backend = " << to_string(c.backend) << "\n"
     << "sigma_hat = " << c.sigma_hat << "\n";
  if (c.theta) os << "theta = " << *c.theta << "\n";
  if (c.eta) os << "eta = " << *c.eta << "\n";
  if (c.lambda1) os << "lambda1 = " << *c.lambda1 << "\n";
  os << "rho = " << c.rho << "\n"
     << "max_iter = " << c.max_iter << "\n"
     << "strict = " << (c.strict ? "true" : "false") << "\n"
     << "stop = " << c.stop << "\n"
     << "npe.sigma_l = " << c.npe.sigma_l << "\n"
     << "npe.sigma_u = " << c.npe.sigma_u << "\n"
     << "npe.max_probes = " << c.npe.max_probes << "\n"
     << "krylov.restart = " << c.krylov_restart << "\n"
     << "krylov.max_inner = " << c.krylov_max_inner << "\n"
     << "out = " << c.out << "\n";
  if (!c.name.empty()) os << "name = " << c.name << "\n";
  return os.str();
}

Params resolve_params(const RunConfig& c) {
  Params p = derive_params(c.sigma_hat, c.problem.lipschitz(), c.theta, c.eta);
  if (c.lambda1) {
    if (!(*c.lambda1 > 0.0)) throw ParameterError("lambda1 must be positive");
    p.lambda1 = *c.lambda1;
  }
  validate_params(p);
  return p;
}

void validate(const RunConfig& c) {
  const std::vector<std::string> kinds{"cubic", "affine", "box"};
  if (std::find(kinds.begin(), kinds.end(), c.problem.kind) == kinds.end()) {
    throw ParameterError("unknown problem kind '" + c.problem.kind + "'");
  }
  if (c.problem.n < 1) throw ParameterError("n must be positive");
  if (c.method != "hipnex" && c.method != "npe" && c.method != "hpe") {
    throw ParameterError("unknown method '" + c.method + "'");
  }
  if (c.stop != "any" && c.stop != "pointwise" && c.stop != "ergodic") {
    throw ParameterError("stop must be any, pointwise or ergodic");
  }
  if (!(c.rho > 0.0)) throw ParameterError("rho must be positive");
  if (c.max_iter < 0) throw ParameterError("max_iter must be nonnegative");
  resolve_params(c);
  if (c.method == "npe") validate_npe_config(c.npe);
  if (c.method == "hpe" && c.problem.kind != "affine") {
    throw ParameterError("method hpe needs an exact resolvent and runs on affine problems only");
  }
  if (c.problem.kind == "box" && (c.backend == Backend::Direct || c.backend == Backend::Krylov)) {
    throw ParameterError("box problems are constrained; use backend tseng or auto");
  }
}

std::pair<std::string, Backend> parse_method_label(const std::string& label) {
  const auto dash = label.find('-');
  if (dash == std::string::npos) return {label, Backend::Auto};
  return {label.substr(0, dash), parse_backend(label.substr(dash + 1))};
}

}  // namespace hipnex::app
