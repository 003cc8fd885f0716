#include "gnep/problems.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace gnep {

namespace {

using json = nlohmann::json;

void only_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw SchemaError(ptr + "/" + k, "unknown key");
}

const json& required(const json& obj, const std::string& ptr, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(ptr + "/" + key, "missing required key");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return j.get<int>();
}

Vec vector(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = number(j[i], ptr + "/" + std::to_string(i));
  return v;
}

Mat matrix(const json& j, const std::string& ptr, Index cols_if_empty) {
  if (!j.is_array()) throw SchemaError(ptr, "expected a matrix (array of rows)");
  if (j.empty()) return Mat(0, cols_if_empty);
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Mat M;
  for (Index r = 0; r < rows; ++r) {
    const std::string rp = ptr + "/" + std::to_string(r);
    Vec row = vector(j[static_cast<std::size_t>(r)], rp);
    if (cols < 0) {
      cols = row.size();
      M.resize(rows, cols);
    } else if (row.size() != cols) {
      throw SchemaError(rp, "rows have different lengths");
    }
    M.row(r) = row.transpose();
  }
  return M;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Mat& M) {
  json a = json::array();
  for (Index r = 0; r < M.rows(); ++r) a.push_back(to_json(Vec(M.row(r).transpose())));
  return a;
}

}  // namespace

AgnepSpec parse_agnep(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  only_keys(doc, "", {"players", "constraints", "nonneg_vars"});
  AgnepSpec spec;
  const json& players = required(doc, "", "players");
  if (!players.is_array() || players.empty())
    throw SchemaError("/players", "expected a non-empty array");
  const int N = static_cast<int>(players.size());
  for (int v = 0; v < N; ++v) {
    const std::string pp = "/players/" + std::to_string(v);
    const json& pl = players[static_cast<std::size_t>(v)];
    only_keys(pl, pp, {"n", "c", "Q"});
    const int n = integer(required(pl, pp, "n"), pp + "/n");
    if (n <= 0) throw SchemaError(pp + "/n", "must be a positive integer");
    spec.dims.push_back(n);
  }
  for (int v = 0; v < N; ++v) {
    const std::string pp = "/players/" + std::to_string(v);
    const json& pl = players[static_cast<std::size_t>(v)];
    spec.c.push_back(pl.contains("c") ? vector(pl["c"], pp + "/c") : Vec(Vec::Zero(spec.dims[v])));
    const json& Q = required(pl, pp, "Q");
    if (!Q.is_object()) throw SchemaError(pp + "/Q", "expected an object keyed by player index");
    std::map<int, Mat> blocks;
    for (const auto& [key, val] : Q.items()) {
      const std::string qp = pp + "/Q/" + key;
      if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos ||
          (key.size() > 1 && key[0] == '0'))
        throw SchemaError(qp, "key must be a player index");
      const int mu = std::stoi(key);
      if (mu >= N) throw SchemaError(qp, "no such player");
      blocks[mu] = matrix(val, qp, spec.dims[mu]);
    }
    spec.Q.push_back(std::move(blocks));
  }
  const int n = spec.num_vars();
  if (doc.contains("constraints")) {
    const json& cs = doc["constraints"];
    if (!cs.is_array()) throw SchemaError("/constraints", "expected an array");
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::string cp = "/constraints/" + std::to_string(k);
      only_keys(cs[k], cp, {"owner", "A", "b"});
      AgnepSpec::ConstraintBlock cb;
      cb.owner = integer(required(cs[k], cp, "owner"), cp + "/owner");
      cb.A = matrix(required(cs[k], cp, "A"), cp + "/A", n);
      cb.b = vector(required(cs[k], cp, "b"), cp + "/b");
      spec.constraints.push_back(std::move(cb));
    }
  }
  if (doc.contains("nonneg_vars")) {
    const json& nv = doc["nonneg_vars"];
    if (!nv.is_array()) throw SchemaError("/nonneg_vars", "expected an array of indices");
    for (std::size_t k = 0; k < nv.size(); ++k)
      spec.nonneg_vars.push_back(integer(nv[k], "/nonneg_vars/" + std::to_string(k)));
  }
  spec.validate();
  return spec;
}

std::string dump_agnep(const AgnepSpec& spec) {
  spec.validate();
  json doc;
  doc["players"] = json::array();
  for (std::size_t v = 0; v < spec.dims.size(); ++v) {
    json pl;
    pl["n"] = spec.dims[v];
    pl["c"] = to_json(spec.c[v]);
    json Q = json::object();
    for (const auto& [mu, blk] : spec.Q[v]) Q[std::to_string(mu)] = to_json(blk);
    pl["Q"] = Q;
    doc["players"].push_back(pl);
  }
  doc["constraints"] = json::array();
  for (const auto& cb : spec.constraints)
    doc["constraints"].push_back({{"owner", cb.owner}, {"A", to_json(cb.A)}, {"b", to_json(cb.b)}});
  doc["nonneg_vars"] = spec.nonneg_vars;
  return doc.dump(2);
}

AgnepSpec load_agnep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_agnep(ss.str());
}

GnepProblem load_agnep(const std::string& path) { return make_agnep(load_agnep_spec(path), path); }

void save_agnep(const AgnepSpec& spec, const std::string& path) {
  const std::string text = dump_agnep(spec);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text << '\n';
}

}  // namespace gnep
