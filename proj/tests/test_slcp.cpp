#include <doctest.h>

#include "gnep/problems.hpp"
#include "gnep/slcp.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace gnep;
using testutil::vec;

TEST_CASE("affine problem converges in one full step") {
  const GnepProblem p = make_two_player_quadratic();
  const SolveResult r = slcp_solve(p, vec({1.0, -1.5}), Vec());
  REQUIRE(r.converged());
  CHECK(r.trace.records.size() == 2);
  CHECK(r.trace.records[0].step_length == 1.0);
  CHECK(r.trace.records[0].halvings == 0);
  CHECK(r.point.x.norm() <= 1e-12);
  CHECK(r.trace.final_residual() <= 1e-12);
}

TEST_CASE("A1 from 0.1 reaches the closed form") {
  const auto prm = a1_params();
  const GnepProblem p = make_internet_switching(prm);
  const JointPoint ref = internet_switching_solution(prm);
  const SolveResult r = slcp_solve(p, Vec::Constant(10, 0.1), Vec::Zero(p.num_constraints()));
  REQUIRE(r.converged());
  CHECK(r.trace.final_residual() <= 1e-7);
  CHECK(r.trace.counters.hess_evals <= 10);
  CHECK((r.point.x - ref.x).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("exact KKT start returns immediately") {
  const auto prm = a1_params();
  const GnepProblem p = make_internet_switching(prm);
  const JointPoint ref = internet_switching_solution(prm);
  const SolveResult r = slcp_solve(p, ref.x, ref.lambda);
  CHECK(r.converged());
  CHECK(r.trace.iterations() == 0);
  CHECK(r.trace.counters.hess_evals == 1);
}

TEST_CASE("trace invariants") {
  const GnepProblem p = make_internet_switching(a1_params());
  for (double s : {0.1, 1.0, 10.0}) {
    SlcpOptions o;
    const SolveResult r = slcp_solve(p, Vec::Constant(10, s), Vec::Zero(p.num_constraints()), o);
    REQUIRE(r.converged());
    const auto& rec = r.trace.records;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
      CHECK(rec[k].point.lambda.minCoeff() >= 0.0);
      CHECK(rec[k].step_length > 0.0);
      CHECK(rec[k].step_length <= o.tau0);
      // sufficient decrease at the rho used for the step
      const double next = merit(p, rec[k + 1].point, rec[k].rho).total;
      CHECK(next <= (1.0 - o.eta * rec[k].step_length) * rec[k].merit.total * (1 + 1e-12));
      CHECK(rec[k + 1].counters.hess_evals >= rec[k].counters.hess_evals);
      CHECK(rec[k].subproblem.has_value());
    }
    CHECK(rec.back().counters == r.trace.counters);
  }
}

TEST_CASE("line search") {
  const GnepProblem p = make_two_player_quadratic();
  const JointPoint z{vec({1.0, -1.5}), Vec()};
  const auto full = line_search(p, z, vec({-1.0, 1.5}), Vec(), 10.0, 0.1, 1.0, 50);
  REQUIRE(full.has_value());
  CHECK(full->tau == 1.0);
  CHECK(full->halvings == 0);
  CHECK(full->merit.total <= 1e-24);

  const auto half = line_search(p, z, vec({-1.0, 1.5}), Vec(), 10.0, 0.1, 0.5, 50);
  REQUIRE(half.has_value());
  CHECK(half->tau == 0.5);

  const auto none = line_search(p, z, Vec::Zero(2), Vec(), 10.0, 0.1, 1.0, 50);
  CHECK_FALSE(none.has_value());
}

TEST_CASE("line search treats failed evaluations as infinite merit") {
  // A1 objective is undefined at S = 0; a step of length 1 lands there
  const GnepProblem p = make_internet_switching(a1_params());
  const JointPoint z{Vec::Constant(10, 0.1), Vec::Zero(p.num_constraints())};
  const auto r = line_search(p, z, Vec::Constant(10, -0.1), Vec::Zero(p.num_constraints()), 10.0,
                             0.1, 1.0, 50);
  if (r) CHECK(r->tau < 1.0);
}

TEST_CASE("step_point keeps multipliers nonnegative") {
  const JointPoint z{vec({0.0}), vec({0.5, 0.1})};
  const JointPoint t = step_point(z, vec({1.0}), vec({-1.0, -1.0}), 1.0);
  CHECK(t.lambda.minCoeff() >= 0.0);
  CHECK(t.x[0] == 1.0);
}

TEST_CASE("random AGNEPs converge from their Slater points") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RandomAgnep ra = random_agnep(seed, {2, 1, 2}, 1, 1);
    const GnepProblem p = make_agnep(ra.spec);
    SlcpOptions o;
    o.max_outer_iters = 50;
    const SolveResult r = slcp_solve(p, ra.slater_point, Vec::Zero(p.num_constraints()), o);
    CHECK(r.converged());
    CHECK(r.trace.final_residual() <= 1e-7);
  }
}

TEST_CASE("iteration and time limits") {
  const GnepProblem p = make_internet_switching(a1_params());
  SlcpOptions o;
  o.max_outer_iters = 1;
  const SolveResult r = slcp_solve(p, Vec::Constant(10, 10.0), Vec::Zero(p.num_constraints()), o);
  CHECK(r.trace.status == SolveStatus::MaxIters);
  CHECK(r.trace.iterations() == 1);
  CHECK(std::string(to_string(SolveStatus::TimeLimit)) == "TimeLimit");
}

TEST_CASE("option validation") {
  SlcpOptions o;
  o.eta = 1.0;
  CHECK_THROWS_AS(o.validate(), ContractViolation);
  o = {};
  o.tau0 = 0.0;
  CHECK_THROWS_AS(o.validate(), ContractViolation);
  o = {};
  o.rho = -1;
  CHECK_THROWS_AS(o.validate(), ContractViolation);
  const GnepProblem p = testutil::one_player_bound();
  CHECK_THROWS_AS(slcp_solve(p, vec({0}), vec({-1})), ContractViolation);
}
