#include <doctest.h>

#include "gnep/diagnostics.hpp"
#include "gnep/kkt.hpp"
#include "gnep/problems.hpp"
#include "gnep/subproblem.hpp"
#include "test_util.hpp"

#include <cmath>
#include <limits>

using namespace gnep;
using testutil::vec;

namespace {

// Random monotone AGNEP whose rows are x_i >= 0 plus one private row per player.
AgnepSpec nonneg_agnep(std::uint64_t seed) {
  AgnepSpec s = random_agnep(seed, {2, 1, 2}, 0, 0).spec;
  testutil::Rng rng(seed);
  s.constraints.clear();
  s.nonneg_vars.clear();
  const int n = s.num_vars();
  int off = 0;
  for (int v = 0; v < static_cast<int>(s.dims.size()); ++v) {
    AgnepSpec::ConstraintBlock cb;
    cb.owner = v;
    cb.A = Mat::Zero(s.dims[v] + 1, n);
    cb.b = Vec::Zero(s.dims[v] + 1);
    for (int i = 0; i < s.dims[v]; ++i) {
      cb.A(i, off + i) = -1.0;
      s.nonneg_vars.push_back(off + i);
    }
    cb.A.block(s.dims[v], off, 1, s.dims[v]) = rng.mat(1, s.dims[v]).cwiseAbs();
    cb.b[s.dims[v]] = 1.0 + rng.uniform();
    s.constraints.push_back(cb);
    off += s.dims[v];
  }
  return s;
}

std::pair<Vec, Vec> solve_reduced(const ReducedLcp& r) {
  LcpSolveOptions o;
  o.tol = 1e-11;
  const auto res = solve_lcp_lm(r.lcp, o);
  REQUIRE(res.converged());
  return r.recover(res.z);
}

}  // namespace

TEST_CASE("one-player example reduces to M = 1, h = -1") {
  const GnepProblem p = testutil::one_player_bound();
  const JointPoint z0{vec({0}), vec({0})};
  const MixedLcSubproblem sub = assemble(p, z0);
  const ReducedLcp r = reduce_via_inverse(sub);
  REQUIRE(r.lcp.dim() == 1);
  CHECK(r.lcp.M(0, 0) == doctest::Approx(1.0));
  CHECK(r.lcp.h[0] == doctest::Approx(-1.0));
  const auto [dp, dq] = r.recover(vec({1.0}));
  CHECK(dp[0] == doctest::Approx(1.0));
  CHECK(dq[0] == doctest::Approx(1.0));

  const auto sol = solve_subproblem(p, z0, 1e-8);
  CHECK(sol.p[0] == doctest::Approx(1.0));
  CHECK(sol.q[0] == doctest::Approx(1.0));
  CHECK(kkt_residual(p, {z0.x + sol.p, z0.lambda + sol.q}) <= 1e-10);
}

TEST_CASE("no constraints gives the Newton step") {
  const GnepProblem p = make_two_player_quadratic();
  const JointPoint z{vec({1.0, -1.5}), Vec()};
  const ReducedLcp r = reduce_via_inverse(assemble(p, z));
  CHECK(r.lcp.dim() == 0);
  const auto sol = solve_subproblem(p, z, 1e-8);
  CHECK(sol.p[0] == doctest::Approx(-1.0));
  CHECK(sol.p[1] == doctest::Approx(1.5));
  CHECK(sol.q.size() == 0);
  CHECK(sol.stats.mixed_residual <= 1e-14);
}

TEST_CASE("recovered directions satisfy the mixed system") {
  testutil::Rng rng(41);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GnepProblem p = make_random_agnep(seed, {2, 2, 2}, 0, 0);
    const JointPoint z{rng.vec(6), rng.vec(p.num_constraints()).cwiseAbs()};
    const MixedLcSubproblem sub = assemble(p, z);
    const auto [dp, dq] = solve_reduced(reduce_via_inverse(sub));
    CHECK(mixed_residual(sub, dp, dq) <= 1e-7);
    CHECK((z.lambda + dq).minCoeff() >= -1e-10);
  }
}

TEST_CASE("nonneg toy: min (x-1)^2/2 s.t. x >= 0") {
  GnepOracles o;
  o.objective_grad = [](int, const Vec& x) { return Vec(Vec::Constant(1, x[0] - 1.0)); };
  o.constraint = [](int, const Vec& x) { return Vec(-x); };
  o.constraint_jacobian = [](int, const Vec&) { return Mat(Mat::Constant(1, 1, -1.0)); };
  o.lagrangian_hessian = [](int, const Vec&, const Vec&) { return Mat(Mat::Constant(1, 1, 1.0)); };
  const GnepProblem p("toy", {1}, {1}, o, {0});
  const JointPoint z{vec({0}), vec({0})};
  const ReducedLcp r = reduce_nonneg(p, assemble(p, z));
  REQUIRE(r.lcp.dim() == 1);
  CHECK(r.lcp.M(0, 0) == doctest::Approx(1.0));
  CHECK(r.lcp.h[0] == doctest::Approx(-1.0));
  const auto [dp, dq] = solve_reduced(r);
  CHECK(dp[0] == doctest::Approx(1.0));
  CHECK(std::abs(dq[0]) <= 1e-10);

  const auto sol = solve_subproblem(p, z, 1e-8);
  CHECK(sol.stats.reduction == "nonneg");
  CHECK(z.x[0] + sol.p[0] == doctest::Approx(1.0));
}

TEST_CASE("nonneg reduction dimension on internet switching") {
  InternetSwitchingParams prm;
  prm.B = 1.0;
  prm.l = {0.0, 0.0, 0.0};
  prm.L.assign(3, std::numeric_limits<double>::infinity());
  prm.informed = {true, true, true};
  const GnepProblem p = make_internet_switching(prm);
  CHECK(p.nonneg_variable_indices().size() == 3);
  const JointPoint z{Vec::Constant(3, 0.2), Vec::Zero(p.num_constraints())};
  const ReducedLcp r = reduce_nonneg(p, assemble(p, z));
  CHECK(r.lcp.dim() == 3 + 3);
  CHECK(r.alpha_rows.size() == 3);
}

TEST_CASE("missing bound row is a structure mismatch") {
  GnepOracles o;
  o.objective_grad = [](int, const Vec& x) { return Vec(x); };
  o.constraint = [](int, const Vec& x) { return Vec(Vec::Constant(1, x[0] - 1.0)); };
  o.constraint_jacobian = [](int, const Vec&) { return Mat(Mat::Constant(1, 1, 1.0)); };
  o.lagrangian_hessian = [](int, const Vec&, const Vec&) { return Mat(Mat::Constant(1, 1, 1.0)); };
  const GnepProblem p("bad", {1}, {1}, o, {0});
  CHECK_THROWS_AS(reduce_nonneg(p, assemble(p, {vec({0.5}), vec({0})})), StructureMismatch);
}

TEST_CASE("both reductions agree") {
  testutil::Rng rng(43);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GnepProblem p = make_agnep(nonneg_agnep(seed));
    Vec x(p.num_vars());
    for (Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(0.0, 1.0);
    const JointPoint z{x, rng.vec(p.num_constraints()).cwiseAbs()};
    const MixedLcSubproblem sub = assemble(p, z);
    const auto [p1, q1] = solve_reduced(reduce_via_inverse(sub));
    const auto [p2, q2] = solve_reduced(reduce_nonneg(p, sub));
    CHECK(mixed_residual(sub, p1, q1) <= 1e-7);
    CHECK(mixed_residual(sub, p2, q2) <= 1e-7);
    CHECK((p1 - p2).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK((q1 - q2).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("monotone base points give a PSD reduced matrix") {
  testutil::Rng rng(44);
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const GnepProblem p = make_random_agnep(seed, {1, 2}, 1, 0);
    const JointPoint z{rng.vec(3), rng.vec(p.num_constraints()).cwiseAbs()};
    const KktData d = eval_kkt_data(p, z);
    const MonotonicityEstimate est = estimate_monotonicity(d);
    if (!est.satisfied) continue;
    ++checked;
    const Mat M = reduce_via_inverse(assemble(p, z)).lcp.M;
    const Mat S = 0.5 * (M + M.transpose());
    CHECK(Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().minCoeff() >= -1e-8);
  }
  CHECK(checked > 0);
}

TEST_CASE("multiplier feasibility of solved subproblems") {
  testutil::Rng rng(45);
  const GnepProblem a1 = make_internet_switching(a1_params());
  for (int t = 0; t < 20; ++t) {
    Vec x(10);
    for (Index i = 0; i < 10; ++i) x[i] = rng.uniform(0.02, 0.2);
    const JointPoint z{x, rng.vec(a1.num_constraints()).cwiseAbs()};
    const auto sol = solve_subproblem(a1, z, 1e-8);
    CHECK((z.lambda + sol.q).minCoeff() >= -1e-10);
    CHECK(sol.stats.mixed_residual <= 1e-8);
  }
}

TEST_CASE("singular JxF") {
  // min 0 s.t. x - 1 <= 0: JxF = 0
  GnepOracles o;
  o.objective_grad = [](int, const Vec&) { return Vec(Vec::Zero(1)); };
  o.constraint = [](int, const Vec& x) { return Vec(Vec::Constant(1, x[0] - 1.0)); };
  o.constraint_jacobian = [](int, const Vec&) { return Mat(Mat::Constant(1, 1, 1.0)); };
  o.lagrangian_hessian = [](int, const Vec&, const Vec&) { return Mat(Mat::Zero(1, 1)); };
  const GnepProblem p("flat", {1}, {1}, o);
  const JointPoint z{vec({3.0}), vec({0.0})};
  CHECK_THROWS_AS(reduce_via_inverse(assemble(p, z)), SingularJxF);
  // the unreduced fallback still finds a solution of the linearization
  const auto sol = solve_subproblem(p, z, 1e-8);
  CHECK(sol.stats.reduction == "augmented");
  CHECK(mixed_residual(assemble(p, z), sol.p, sol.q) <= 1e-6);
}

TEST_CASE("tolerance schedule and contract") {
  CHECK(subproblem_tolerance(1) == doctest::Approx(0.1));
  CHECK(subproblem_tolerance(3) == doctest::Approx(1e-3));
  CHECK(subproblem_tolerance(8) == doctest::Approx(1e-8));
  CHECK(subproblem_tolerance(30) == doctest::Approx(1e-8));
  for (int k = 1; k < 20; ++k) CHECK(subproblem_tolerance(k + 1) <= subproblem_tolerance(k));
  const GnepProblem p = make_two_player_quadratic();
  CHECK_THROWS_AS(solve_subproblem(p, JointPoint{Vec::Zero(2), Vec()}, 1e-13), ContractViolation);
}

TEST_CASE("large instances go through the interior point solver") {
  const GnepProblem p = make_random_agnep(7, std::vector<int>(30, 2), 0, 0);
  testutil::Rng rng(46);
  const JointPoint z{rng.vec(p.num_vars()), Vec::Zero(p.num_constraints())};
  const auto sol = solve_subproblem(p, z, 1e-6);
  CHECK(sol.stats.lcp_dim > 100);
  CHECK(sol.stats.lcp.method == "ipm");
  CHECK(sol.stats.mixed_residual <= 1e-5);
}
