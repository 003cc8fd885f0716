#include "gnep/bench.hpp"
#include "gnep/problems.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace gnep {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits CSV text into rows of fields, honouring double-quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(field);
        rows.push_back(row);
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw SchemaError("", "unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw SchemaError(where, "not a number: " + s);
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw SchemaError(where, "not an integer: " + s);
  return v;
}

}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::string out = std::string(kRecordCsvHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.problem) + ',' + csv_field(r.start) + ',' + csv_field(r.solver) + ',' +
           csv_field(r.status) + ',' + fmt_double(r.time_ms) + ',' + std::to_string(r.iters) +
           ',' + std::to_string(r.grad_evals) + ',' + std::to_string(r.hess_evals) + ',' +
           fmt_double(r.kkt_residual) + '\n';
  }
  return out;
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw SchemaError("/0", "missing header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kRecordCsvHeader) throw SchemaError("/0", "unexpected header: " + header);
  std::vector<RunRecord> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto& f = rows[k];
    const std::string where = "/" + std::to_string(k);
    if (f.size() != 9) throw SchemaError(where, "expected 9 fields");
    RunRecord r;
    r.problem = f[0];
    r.start = f[1];
    r.solver = f[2];
    r.status = f[3];
    r.time_ms = parse_double(f[4], where + "/time_ms");
    r.iters = static_cast<int>(parse_long(f[5], where + "/iters"));
    r.grad_evals = parse_long(f[6], where + "/grad_evals");
    r.hess_evals = parse_long(f[7], where + "/hess_evals");
    r.kkt_residual = parse_double(f[8], where + "/kkt_residual");
    out.push_back(std::move(r));
  }
  return out;
}

void SuiteConfig::validate() const {
  for (const auto& s : solvers)
    if (s != "slcp" && s != "smm") throw SchemaError("/solvers", "unknown solver " + s);
  if (!(time_limit_s > 0)) throw SchemaError("/time_limit_s", "must be positive");
  if (!(tol > 0)) throw SchemaError("/tol", "must be positive");
  if (max_iters < 0) throw SchemaError("/max_iters", "must be >= 0");
  if (threads < 1) throw SchemaError("/threads", "must be >= 1");
  for (double s : starts)
    if (!std::isfinite(s)) throw SchemaError("/starts", "starts must be finite");
}

SuiteConfig parse_suite_config(const std::string& text) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("/", "expected an object");
  static const std::set<std::string> keys = {"problems", "starts",    "solvers", "time_limit_s",
                                             "tol",      "max_iters", "threads"};
  for (const auto& [k, v] : doc.items())
    if (!keys.count(k)) throw SchemaError("/" + k, "unknown key");
  SuiteConfig cfg;
  auto strings = [&](const char* key) {
    std::vector<std::string> out;
    if (!doc.contains(key)) return out;
    const json& a = doc[key];
    if (!a.is_array()) throw SchemaError(std::string("/") + key, "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string())
        throw SchemaError(std::string("/") + key + "/" + std::to_string(i), "expected a string");
      out.push_back(a[i].get<std::string>());
    }
    return out;
  };
  cfg.problems = strings("problems");
  cfg.solvers = strings("solvers");
  if (doc.contains("starts")) {
    const json& a = doc["starts"];
    if (!a.is_array()) throw SchemaError("/starts", "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) throw SchemaError("/starts/" + std::to_string(i), "expected a number");
      cfg.starts.push_back(a[i].get<double>());
    }
  }
  auto num = [&](const char* key, double& dst) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw SchemaError(std::string("/") + key, "expected a number");
    dst = doc[key].get<double>();
  };
  auto integer = [&](const char* key, int& dst) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer())
      throw SchemaError(std::string("/") + key, "expected an integer");
    dst = doc[key].get<int>();
  };
  num("time_limit_s", cfg.time_limit_s);
  num("tol", cfg.tol);
  integer("max_iters", cfg.max_iters);
  integer("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

std::string start_label(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

SolveResult run_solver(const GnepProblem& problem, const std::string& solver, const Vec& x0,
                       const Vec& lambda0, double tol, int max_iters, double time_limit_s) {
  if (solver == "slcp") {
    SlcpOptions o;
    o.tol = tol;
    o.max_outer_iters = max_iters;
    o.time_limit_s = time_limit_s;
    return slcp_solve(problem, x0, lambda0, o);
  }
  if (solver == "smm") {
    SmmOptions o;
    o.tol = tol;
    o.max_iters = max_iters;
    o.time_limit_s = time_limit_s;
    return solve_smm_baseline(problem, x0, lambda0, o);
  }
  throw ContractViolation("unknown solver " + solver);
}

std::vector<RunRecord> run_suite(const SuiteConfig& config) {
  config.validate();
  struct Cell {
    std::size_t problem;
    double start;
    std::string solver;
  };
  std::vector<ProblemInstance> instances;
  for (const auto& id : config.problems) instances.push_back(resolve_problem(id));
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < config.problems.size(); ++p)
    for (double s : config.starts)
      for (const auto& solver : config.solvers) cells.push_back({p, s, solver});

  std::vector<RunRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      RunRecord& r = out[i];
      r.problem = config.problems[c.problem];
      r.start = start_label(c.start);
      r.solver = c.solver;
      const GnepProblem problem = *instances[c.problem].problem;  // own counters
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Vec x0 = Vec::Constant(problem.num_vars(), c.start);
        const Vec l0 = Vec::Zero(problem.num_constraints());
        SolveResult res = run_solver(problem, c.solver, x0, l0, config.tol, config.max_iters,
                                     config.time_limit_s);
        r.status = to_string(res.trace.status);
        r.iters = res.trace.iterations();
        r.kkt_residual = res.trace.final_residual();
      } catch (const std::exception&) {
        r.status = "Error";
        r.kkt_residual = std::numeric_limits<double>::infinity();
      }
      r.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
      r.grad_evals = problem.counters().grad_evals;
      r.hess_evals = problem.counters().hess_evals;
      if (r.status == "Converged" && r.time_ms > 1e3 * config.time_limit_s) r.status = "TimeLimit";
    }
  };
  const int nthreads = std::max(1, std::min<int>(config.threads, static_cast<int>(cells.size())));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::stable_sort(out.begin(), out.end(), [&](const RunRecord& a, const RunRecord& b) {
    if (a.problem != b.problem) return a.problem < b.problem;
    const double sa = std::strtod(a.start.c_str(), nullptr);
    const double sb = std::strtod(b.start.c_str(), nullptr);
    if (sa != sb) return sa < sb;
    return a.solver < b.solver;
  });
  return out;
}

ProfileMetric parse_metric(const std::string& s) {
  if (s == "time") return ProfileMetric::Time;
  if (s == "grad") return ProfileMetric::Grad;
  if (s == "hess") return ProfileMetric::Hess;
  throw ContractViolation("metric must be time, grad or hess");
}

const char* to_string(ProfileMetric m) {
  switch (m) {
    case ProfileMetric::Time: return "time";
    case ProfileMetric::Grad: return "grad";
    case ProfileMetric::Hess: return "hess";
  }
  return "unknown";
}

double ProfileCurve::rho(const std::string& solver, double tau) const {
  auto it = ratios.find(solver);
  if (it == ratios.end() || problems.empty()) return 0.0;
  const auto& r = it->second;
  const auto cnt = std::upper_bound(r.begin(), r.end(), tau) - r.begin();
  return static_cast<double>(cnt) / static_cast<double>(problems.size());
}

ProfileCurve performance_profile(const std::vector<RunRecord>& records, ProfileMetric metric) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ProfileCurve curve;
  curve.metric = metric;
  std::set<std::string> solvers;
  std::set<std::string> problems;
  std::map<std::pair<std::string, std::string>, double> cost;
  auto key = [](const RunRecord& r) { return r.problem + "@" + r.start; };
  for (const auto& r : records) {
    solvers.insert(r.solver);
    problems.insert(key(r));
    double s = inf;
    if (r.converged()) {
      switch (metric) {
        case ProfileMetric::Time: s = r.time_ms; break;
        case ProfileMetric::Grad: s = static_cast<double>(r.grad_evals); break;
        case ProfileMetric::Hess: s = static_cast<double>(r.hess_evals); break;
      }
    }
    cost[{key(r), r.solver}] = s;
  }
  curve.solvers.assign(solvers.begin(), solvers.end());
  for (const auto& p : problems) {
    double best = inf;
    for (const auto& a : curve.solvers) {
      auto it = cost.find({p, a});
      if (it != cost.end()) best = std::min(best, it->second);
    }
    if (!std::isfinite(best)) {
      curve.excluded.push_back(p);
      continue;
    }
    curve.problems.push_back(p);
    for (const auto& a : curve.solvers) {
      auto it = cost.find({p, a});
      const double s = it == cost.end() ? inf : it->second;
      double r;
      if (!std::isfinite(s))
        r = inf;
      else if (best == 0.0)
        r = s == 0.0 ? 1.0 : inf;
      else
        r = s / best;
      curve.ratios[a].push_back(r);
    }
  }
  std::set<double> taus;
  for (int k = 0; k <= 180; ++k) taus.insert(1.0 + 0.05 * k);
  for (auto& [a, r] : curve.ratios) {
    std::sort(r.begin(), r.end());
    for (double v : r)
      if (std::isfinite(v)) taus.insert(v);
  }
  for (const auto& a : curve.solvers) curve.ratios[a];  // solvers with no problems
  curve.taus.assign(taus.begin(), taus.end());
  for (const auto& a : curve.solvers) {
    auto& vals = curve.values[a];
    for (double t : curve.taus) vals.push_back(curve.rho(a, t));
  }
  return curve;
}

std::string profile_to_csv(const ProfileCurve& curve) {
  std::string out = "tau";
  for (const auto& a : curve.solvers) out += "," + csv_field(a);
  out += "\n";
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    out += fmt_double(curve.taus[i]);
    for (const auto& a : curve.solvers) out += "," + fmt_double(curve.values.at(a)[i]);
    out += "\n";
  }
  return out;
}

}  // namespace gnep
