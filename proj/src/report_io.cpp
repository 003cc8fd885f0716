#include "gnep/report_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gnep {

namespace {

using json = nlohmann::json;

// Non-finite values become strings so the document stays valid JSON.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json vec(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

json counters(const EvalCounters& c) {
  return {{"grad_evals", c.grad_evals}, {"hess_evals", c.hess_evals}};
}

json lcp_stats(const LcpStats& s) {
  return {{"status", to_string(s.status)},
          {"method", s.method},
          {"iterations", s.iterations},
          {"residual", num(s.residual)},
          {"condition_estimate", num(s.condition_estimate)}};
}

json regularity(const RegularityCheck& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"branches", r.branches}, {"notes", r.notes}};
  if (r.witness.size() > 0) j["witness"] = vec(r.witness);
  return j;
}

std::vector<int> as_vector(const std::vector<int>& v) { return v; }

}  // namespace

std::string trace_to_json(const SolveResult& result, const std::string& problem_id) {
  const SolveTrace& t = result.trace;
  json doc;
  doc["problem"] = problem_id;
  doc["solver"] = t.solver;
  doc["status"] = to_string(t.status);
  if (!t.message.empty()) doc["message"] = t.message;
  doc["iterations"] = t.iterations();
  doc["kkt_residual"] = num(t.final_residual());
  doc["counters"] = counters(t.counters);
  doc["elapsed_ms"] = num(t.elapsed_ms);
  doc["x"] = vec(result.point.x);
  doc["lambda"] = vec(result.point.lambda);
  json recs = json::array();
  for (const auto& r : t.records) {
    json j;
    j["iteration"] = r.iteration;
    j["merit"] = {{"total", num(r.merit.total)},
                  {"complementarity", num(r.merit.complementarity_part)},
                  {"stationarity", num(r.merit.stationarity_part)},
                  {"infeasibility", num(r.merit.infeasibility_part)}};
    j["kkt_residual"] = num(r.kkt_residual);
    j["step_length"] = num(r.step_length);
    j["halvings"] = r.halvings;
    j["rho"] = num(r.rho);
    j["counters"] = counters(r.counters);
    if (r.subproblem) {
      const auto& s = *r.subproblem;
      j["subproblem"] = {{"reduction", s.reduction},
                         {"lcp_dim", s.lcp_dim},
                         {"lcp", lcp_stats(s.lcp)},
                         {"mixed_residual", num(s.mixed_residual)},
                         {"condition_estimate", num(s.condition_estimate)},
                         {"tolerance", num(s.tolerance)}};
    }
    recs.push_back(j);
  }
  doc["records"] = recs;
  return doc.dump(2);
}

std::string diagnostics_to_json(const DiagnosticsReport& rep, const std::string& problem_id) {
  json doc;
  doc["problem"] = problem_id;
  doc["kkt_residual"] = num(rep.kkt_residual);
  if (rep.monotonicity) {
    const auto& m = *rep.monotonicity;
    doc["monotonicity"] = {{"alpha", num(m.alpha)},
                           {"beta_max", m.beta_max ? num(*m.beta_max) : json("vacuous")},
                           {"satisfied", m.satisfied},
                           {"min_eig_at_zero", num(m.min_eig_at_zero)}};
  } else {
    doc["monotonicity"] = {{"error", rep.monotonicity_error}};
  }
  const auto& c = rep.classification;
  doc["classification"] = {{"act_tol", c.act_tol},
                           {"plus", as_vector(c.plus)},
                           {"zero", as_vector(c.zero)},
                           {"minus", as_vector(c.minus)},
                           {"ambiguous", as_vector(c.ambiguous)},
                           {"notes", c.notes}};
  doc["semistable"] = regularity(rep.semistable);
  doc["strongly_regular"] = regularity(rep.strongly_regular);
  doc["consistent"] = rep.consistent;
  if (rep.error_bound)
    doc["error_bound"] = {{"c_estimate", num(rep.error_bound->c_estimate)},
                          {"used", rep.error_bound->used},
                          {"skipped", rep.error_bound->skipped},
                          {"unbounded", rep.error_bound->unbounded}};
  json hemi = json::array();
  for (const auto& s : rep.hemistability)
    hemi.push_back({{"x", vec(s.perturbation.x)},
                    {"lambda", vec(s.perturbation.lambda)},
                    {"nearby_solution", s.nearby_solution},
                    {"distance", num(s.distance)},
                    {"failed", s.failed},
                    {"note", s.note}});
  doc["hemistability"] = hemi;
  return doc.dump(2);
}

JointPoint parse_point_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("/", "expected an object");
  for (const auto& [k, v] : doc.items())
    if (k != "x" && k != "lambda") throw SchemaError("/" + k, "unknown key");
  auto read = [&](const char* key) {
    if (!doc.contains(key)) throw SchemaError(std::string("/") + key, "missing required key");
    const json& a = doc[key];
    if (!a.is_array()) throw SchemaError(std::string("/") + key, "expected an array");
    Vec v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number())
        throw SchemaError(std::string("/") + key + "/" + std::to_string(i), "expected a number");
      v[static_cast<Index>(i)] = a[i].get<double>();
    }
    return v;
  };
  return {read("x"), read("lambda")};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace gnep
