#include <doctest.h>

#include "gnep/kkt.hpp"
#include "gnep/problems.hpp"
#include "gnep/subproblem.hpp"
#include "test_util.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

using namespace gnep;
using testutil::vec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_spec(const AgnepSpec& a, const AgnepSpec& b) {
  if (a.dims != b.dims || a.nonneg_vars != b.nonneg_vars) return false;
  if (a.c.size() != b.c.size() || a.Q.size() != b.Q.size()) return false;
  for (std::size_t v = 0; v < a.c.size(); ++v)
    if (a.c[v] != b.c[v]) return false;
  for (std::size_t v = 0; v < a.Q.size(); ++v) {
    if (a.Q[v].size() != b.Q[v].size()) return false;
    for (const auto& [mu, blk] : a.Q[v]) {
      auto it = b.Q[v].find(mu);
      if (it == b.Q[v].end() || it->second != blk) return false;
    }
  }
  if (a.constraints.size() != b.constraints.size()) return false;
  for (std::size_t k = 0; k < a.constraints.size(); ++k) {
    const auto &x = a.constraints[k], &y = b.constraints[k];
    if (x.owner != y.owner || x.A != y.A || x.b != y.b) return false;
  }
  return true;
}

std::string schema_pointer(const std::string& text) {
  try {
    parse_agnep(text);
  } catch (const SchemaError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("A1 closed form") {
  const auto prm = a1_params();
  CHECK(prm.num_players() == 10);
  const JointPoint s = internet_switching_solution(prm);
  const double xi = (1.3 + std::sqrt(18.7)) / 81.0;
  CHECK(xi == doctest::Approx(0.0694361).epsilon(1e-6));
  CHECK(s.x[0] == 0.3);
  for (int v = 1; v < 10; ++v) CHECK(std::abs(s.x[v] - xi) <= 1e-14);
  const double S = s.x.sum();
  CHECK(S == doctest::Approx(0.9249).epsilon(1e-4));
  CHECK(s.lambda[0] == doctest::Approx(0.26951).epsilon(1e-5));
  CHECK(s.lambda[0] == doctest::Approx(1.0 - (S - 0.3) / (S * S)));
  for (Index j = 1; j < s.lambda.size(); ++j) CHECK(s.lambda[j] == 0.0);
  CHECK(kkt_residual(make_internet_switching(prm), s) <= 1e-10);
}

TEST_CASE("A1 constraint layout") {
  const GnepProblem p = make_internet_switching(a1_params());
  CHECK(p.constraint_dims()[0] == 2);
  for (int v = 1; v < 10; ++v) CHECK(p.constraint_dims()[v] == 2);
  CHECK(p.num_constraints() == 20);
  CHECK(p.nonneg_variable_indices().empty());

  // with finite upper bounds informed players carry three rows
  auto prm = a1_params();
  prm.L[3] = 0.9;
  CHECK(make_internet_switching(prm).constraint_dims()[3] == 3);
}

TEST_CASE("closed form on random valid parameters") {
  testutil::Rng rng(71);
  int accepted = 0;
  for (int t = 0; t < 300 && accepted < 100; ++t) {
    InternetSwitchingParams prm;
    const int N = rng.integer(2, 8);
    const int N0 = rng.integer(0, N - 1);
    prm.B = rng.uniform(0.5, 2.0);
    for (int v = 0; v < N; ++v) {
      const bool informed = v >= N0;
      prm.informed.push_back(informed);
      prm.l.push_back(informed ? rng.uniform(0.0, 0.02) * prm.B : rng.uniform(0.05, 0.6) * prm.B / N);
      prm.L.push_back(informed ? kInf : prm.l.back() + rng.uniform(0.0, 0.5));
    }
    JointPoint s;
    try {
      s = internet_switching_solution(prm);
    } catch (const PreconditionError&) {
      continue;
    }
    ++accepted;
    CHECK(kkt_residual(make_internet_switching(prm), s) <= 1e-10);
  }
  CHECK(accepted >= 50);
}

TEST_CASE("closed form names violated hypotheses") {
  auto prm = a1_params();
  prm.L[4] = 2.0;
  try {
    internet_switching_solution(prm);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("L = +inf") != std::string::npos);
  }
  prm = a1_params();
  prm.informed.assign(10, false);
  CHECK_THROWS_AS(internet_switching_solution(prm), PreconditionError);

  prm = a1_params();
  prm.l[0] = 2.0;
  prm.L[0] = 3.0;
  CHECK_THROWS_AS(prm.validate(), ContractViolation);
}

TEST_CASE("linearizations of valid instances are solvable") {
  testutil::Rng rng(72);
  const auto prm = a1_params();
  const GnepProblem p = make_internet_switching(prm);
  for (int t = 0; t < 50; ++t) {
    Vec x(10);
    for (Index i = 0; i < 10; ++i) x[i] = rng.uniform(0.01, 0.5);
    const JointPoint z{x, rng.vec(p.num_constraints()).cwiseAbs()};
    const auto sol = solve_subproblem(p, z, 1e-8);
    CHECK(sol.stats.mixed_residual <= 1e-8);
  }
}

TEST_CASE("two-player quadratic") {
  const GnepProblem p = make_two_player_quadratic();
  const auto d = eval_kkt_data(p, {vec({1.0, -1.5}), Vec()});
  CHECK(d.F[0] == doctest::Approx(-0.5));
  CHECK(d.F[1] == doctest::Approx(0.5));
  CHECK(d.JxF(1, 0) == 2.0);
}

TEST_CASE("four-player semistable example") {
  const GnepProblem p = make_four_player_semistable();
  const JointPoint s = four_player_semistable_solution();
  CHECK(s.x == vec({0, 0, 0, 1}));
  CHECK(s.lambda == vec({0, 1}));
  CHECK(kkt_residual(p, s) == 0.0);
  CHECK(p.constraint_dims() == std::vector<int>{1, 0, 1, 0});
  for (double t : {0.0, 0.5, 2.0}) {
    const auto d = eval_kkt_data(p, {vec({t, 0, 0, 1}), vec({0, 1})});
    CHECK(d.JxF(0, 0) == doctest::Approx(t * t));
  }
}

TEST_CASE("random AGNEP generator") {
  const RandomAgnep a = random_agnep(9, {2, 3}, 2, 1);
  const RandomAgnep b = random_agnep(9, {2, 3}, 2, 1);
  CHECK(same_spec(a.spec, b.spec));
  CHECK(a.slater_point == b.slater_point);
  CHECK_FALSE(same_spec(a.spec, random_agnep(10, {2, 3}, 2, 1).spec));

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RandomAgnep r = random_agnep(seed, {2, 1, 2}, 1, 2);
    r.spec.validate();
    const Mat J = r.spec.jacobian();
    const Mat S = 0.5 * (J + J.transpose());
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().minCoeff() >= 1.0 - 1e-12);
    CHECK(Eigen::JacobiSVD<Mat>(J).singularValues().minCoeff() >= 0.5);
    for (const auto& cb : r.spec.constraints)
      CHECK((cb.A * r.slater_point - cb.b).maxCoeff() < 0);
    CHECK(r.spec.constraints[0].A.rows() == 2 * 2 + 1 + 2);
  }
}

TEST_CASE("AGNEP JSON round trip") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    AgnepSpec s = random_agnep(seed, {1, 2, 2}, 1, 1).spec;
    s.nonneg_vars = {0, 3};
    const AgnepSpec back = parse_agnep(dump_agnep(s));
    CHECK(same_spec(s, back));
  }
  const auto path = std::filesystem::temp_directory_path() / "gnep_roundtrip.json";
  const AgnepSpec s = random_agnep(3, {2, 2}, 1, 1).spec;
  save_agnep(s, path.string());
  CHECK(same_spec(s, load_agnep_spec(path.string())));
  std::filesystem::remove(path);
}

TEST_CASE("AGNEP encoding of the two-player quadratic") {
  const std::string text = R"({
    "players": [
      {"n": 1, "Q": {"0": [[1]], "1": [[1]]}},
      {"n": 1, "c": [0], "Q": {"1": [[1]], "0": [[2]]}}
    ],
    "constraints": []
  })";
  const GnepProblem p = make_agnep(parse_agnep(text));
  const GnepProblem q = make_two_player_quadratic();
  const JointPoint z{vec({1.0, -1.5}), Vec()};
  CHECK(eval_first_order(p, z).F == eval_first_order(q, z).F);
}

TEST_CASE("AGNEP schema errors carry pointers") {
  CHECK(schema_pointer(R"({"players":[{"n":1,"Q":{}}],"constraints":[]})") == "/players/0/Q/0");
  CHECK(schema_pointer(R"({"players":[{"n":2,"Q":{"0":[[1,2],[0,1]]}}],"constraints":[]})") ==
        "/players/0/Q/0");
  CHECK(schema_pointer(R"({"players":[{"n":1,"Q":{"0":[[1]]},"bogus":1}]})") ==
        "/players/0/bogus");
  CHECK(schema_pointer(R"({"players":[{"n":1,"Q":{"0":[["x"]]}}]})").rfind("/players/0/Q/0", 0) ==
        0);
  CHECK(schema_pointer(
            R"({"players":[{"n":1,"Q":{"0":[[1]]}}],"constraints":[{"owner":0,"A":[[1,2]],"b":[0]}]})") ==
        "/constraints/0/A");
  CHECK(schema_pointer("{not json") == "");
  CHECK(schema_pointer(R"({"players":[{"n":1,"Q":{"0":[[1]]}}]})") == "<accepted>");
}

TEST_CASE("problem ids") {
  CHECK(resolve_problem("A1").reference_solution.has_value());
  CHECK(resolve_problem("two-player-quadratic").problem->num_vars() == 2);
  CHECK(resolve_problem("four-player-semistable").problem->num_constraints() == 2);
  const auto r = resolve_problem("random-agnep-4");
  CHECK(r.default_start.has_value());
  CHECK(r.problem->num_vars() == 6);
  CHECK_THROWS_AS(resolve_problem("no-such-problem"), ContractViolation);
  CHECK_THROWS_AS(resolve_problem("random-agnep-x"), ContractViolation);
}
