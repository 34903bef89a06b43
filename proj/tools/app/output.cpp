#include "output.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace hipnex::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  {
    std::ofstream out(tmp_name.str(), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp_name.str());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp_name.str());
  }
  fs::rename(tmp_name.str(), target);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::ostringstream os;
  os << "k,wall_time_s,lambda,residual_norm,step_class,inner_iters,cum_linear_solves,cum_F_evals,cum_J_evals\n";
  for (const IterationRecord& r : trace) {
    os << r.k << ',' << num(r.wall_time_s) << ',' << num(r.lambda) << ',' << num(r.residual_norm) << ','
       << r.class_label() << ',' << r.inner_iterations << ',' << r.cum_linear_solves << ',' << r.cum_f_evals
       << ',' << (r.cum_jvp + r.cum_materializations) << '\n';
  }
  return os.str();
}

std::string summary_json(const MetricsSummary& m) {
  json j;
  j["method"] = m.method;
  j["backend"] = m.backend;
  j["problem"] = m.problem;
  j["n"] = m.n;
  j["seed"] = m.seed;
  j["time_s"] = m.time_s;
  j["iterations"] = m.iterations;
  j["termination"] = m.termination;
  j["final_residual"] = m.final_residual;
  j["linear_solves"] = m.linear_solves;
  j["F_evals"] = m.f_evals;
  j["J_evals"] = m.j_evals;
  j["J_evals_breakdown"] = {{"jvp", m.jvp}, {"materializations", m.materializations}};
  j["inner_iterations"] = m.inner_iterations;
  j["first_pointwise"] = m.first_pointwise ? json(*m.first_pointwise) : json(nullptr);
  j["first_ergodic"] = m.first_ergodic ? json(*m.first_ergodic) : json(nullptr);
  j["distance_to_solution"] = m.distance_to_solution ? json(*m.distance_to_solution) : json(nullptr);
  j["x0_hash"] = m.x0_hash;
  j["data_hash"] = m.data_hash;
  j["invariant_breaches"] = m.invariant_breaches;
  j["error"] = m.error;
  return j.dump(2) + "\n";
}

MetricsSummary parse_summary_json(const std::string& text) {
  const json j = json::parse(text);
  MetricsSummary m;
  m.method = j.at("method").get<std::string>();
  m.backend = j.at("backend").get<std::string>();
  m.problem = j.at("problem").get<std::string>();
  m.n = j.at("n").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.time_s = j.at("time_s").get<double>();
  m.iterations = j.at("iterations").get<int>();
  m.termination = j.at("termination").get<std::string>();
  m.final_residual = j.at("final_residual").get<double>();
  m.linear_solves = j.at("linear_solves").get<std::int64_t>();
  m.f_evals = j.at("F_evals").get<std::int64_t>();
  m.j_evals = j.at("J_evals").get<std::int64_t>();
  m.jvp = j.at("J_evals_breakdown").at("jvp").get<std::int64_t>();
  m.materializations = j.at("J_evals_breakdown").at("materializations").get<std::int64_t>();
  m.inner_iterations = j.at("inner_iterations").get<std::int64_t>();
  if (!j.at("first_pointwise").is_null()) m.first_pointwise = j["first_pointwise"].get<int>();
  if (!j.at("first_ergodic").is_null()) m.first_ergodic = j["first_ergodic"].get<int>();
  if (!j.at("distance_to_solution").is_null()) m.distance_to_solution = j["distance_to_solution"].get<double>();
  m.x0_hash = j.at("x0_hash").get<std::uint64_t>();
  m.data_hash = j.at("data_hash").get<std::uint64_t>();
  m.invariant_breaches = j.at("invariant_breaches").get<int>();
  m.error = j.at("error").get<std::string>();
  return m;
}

std::string bench_csv(const std::vector<MetricsSummary>& rows) {
  std::ostringstream os;
  os << "method,backend,problem,n,seed,time_s,iterations,termination,final_residual,linear_solves,"
        "F_evals,J_evals,jvp,materializations,inner_iterations,x0_hash,data_hash,error\n";
  for (const MetricsSummary& m : rows) {
    std::string err = m.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << m.method << ',' << m.backend << ',' << m.problem << ',' << m.n << ',' << m.seed << ','
       << num(m.time_s) << ',' << m.iterations << ',' << m.termination << ',' << num(m.final_residual) << ','
       << m.linear_solves << ',' << m.f_evals << ',' << m.j_evals << ',' << m.jvp << ','
       << m.materializations << ',' << m.inner_iterations << ',' << m.x0_hash << ',' << m.data_hash << ",\""
       << err << "\"\n";
  }
  return os.str();
}

std::string render_table(const std::vector<MetricsSummary>& rows) {
  const std::vector<std::string> header{"n",         "Method",        "Time (s)",     "Iterations",
                                        "||F||",     "Linear Solves", "F evaluations", "J evaluations",
                                        "Inner iterations"};
  std::vector<std::vector<std::string>> cells;
  for (const MetricsSummary& m : rows) {
    std::ostringstream t, r;
    t << std::fixed << std::setprecision(3) << m.time_s;
    r << std::scientific << std::setprecision(2) << m.final_residual;
    std::string label = m.method + " (" + m.backend + ")";
    if (!m.error.empty()) label += " [error]";
    else if (m.termination == "max_iter") label += " [max_iter]";
    cells.push_back({std::to_string(m.n), label, t.str(), std::to_string(m.iterations), r.str(),
                     std::to_string(m.linear_solves), std::to_string(m.f_evals), std::to_string(m.j_evals),
                     std::to_string(m.inner_iterations)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      // first two columns left-aligned, numbers right-aligned
      if (c < 2) os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : cells) line(row);
  return os.str();
}

}  // namespace hipnex::app
