// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "gnep/bench.hpp"
#include "gnep/diagnostics.hpp"
#include "gnep/problems.hpp"
#include "gnep/slcp.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

using namespace gnep;
using testutil::vec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome a1_reproduction() {
  const auto prm = a1_params();
  const GnepProblem p = make_internet_switching(prm);
  const JointPoint ref = internet_switching_solution(prm);
  SlcpOptions o;
  o.tol = 1e-7;
  o.rho_adapt = false;
  Outcome out{true, ""};
  for (double s : {0.1, 1.0, 10.0}) {
    const auto t0 = Clock::now();
    const SolveResult r = slcp_solve(p, Vec::Constant(10, s), Vec::Zero(p.num_constraints()), o);
    const double secs = seconds_since(t0);
    const double err = (r.point.x - ref.x).lpNorm<Eigen::Infinity>();
    const long hess = r.trace.counters.hess_evals;
    const bool ok = r.converged() && err <= 1e-6 && hess <= 10 && secs <= 1.0;
    out.pass = out.pass && ok;
    out.detail += "x0=" + start_label(s) + ": hess " + std::to_string(hess) + ", err " +
                  fmt("%.1e", err) + ", " + fmt("%.3fs", secs) + "; ";
  }
  return out;
}

Outcome one_step_affine() {
  const GnepProblem p = make_two_player_quadratic();
  const SolveResult r = slcp_solve(p, vec({1.0, -1.5}), Vec());
  const double res = r.trace.final_residual();
  const bool full = r.trace.iterations() == 1 && r.trace.records[0].step_length == 1.0;
  const bool ok = r.converged() && full && res <= 1e-12 && r.point.x.norm() <= 1e-12;
  return {ok, "steps " + std::to_string(r.trace.iterations()) + ", tau " +
                  fmt("%g", r.trace.records[0].step_length) + ", residual " + fmt("%.1e", res)};
}

Outcome descent_property() {
  testutil::Rng rng(303);
  int instances = 0, iterates = 0, violations = 0, ls_failures = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; instances < 50 && seed < 500; ++seed) {
    const std::vector<int> dims = {1 + static_cast<int>(seed % 3), 2, 1 + static_cast<int>(seed % 2)};
    const RandomAgnep ra = random_agnep(seed, dims, 1, 0);
    const GnepProblem p = make_agnep(ra.spec);
    const MonotonicityEstimate m =
        estimate_monotonicity(p, {ra.slater_point, Vec::Zero(p.num_constraints())});
    if (!m.beta_max || !(*m.beta_max > 0)) continue;
    ++instances;
    const double rho = 2.0 * m.alpha * m.alpha / *m.beta_max + 1.0;
    // from the Slater point and from two random primal-dual starts
    for (int start = 0; start < 3; ++start) {
      JointPoint z{ra.slater_point, Vec::Zero(p.num_constraints())};
      if (start > 0) z = {3.0 * rng.vec(p.num_vars()), rng.vec(p.num_constraints()).cwiseAbs()};
      for (int k = 0; k < 100; ++k) {
        if (kkt_residual(p, z) <= 1e-9) break;
        const SubproblemSolution d = solve_subproblem(p, z, 1e-12);
        const double phi = merit(p, z, rho).total;
        const double dphi = merit_directional(p, z, rho, d.p, d.q);
        ++iterates;
        worst = std::max(worst, dphi + phi);
        if (dphi > -phi + 1e-8) ++violations;
        const auto ls = line_search(p, z, phi, d.p, d.q, rho, 0.1, 1.0, 50);
        if (!ls) {
          ++ls_failures;
          break;
        }
        z = ls->point;
      }
    }
  }
  const bool ok = instances == 50 && violations == 0 && ls_failures == 0;
  return {ok, std::to_string(instances) + " instances, " + std::to_string(iterates) +
                  " iterates, max(dPhi + Phi) " + fmt("%.1e", worst) + ", line-search failures " +
                  std::to_string(ls_failures)};
}

Outcome superlinear_tail() {
  const GnepProblem p = make_internet_switching(a1_params());
  SlcpOptions o;
  o.rho_adapt = false;
  const SolveResult r = slcp_solve(p, Vec::Constant(10, 0.1), Vec::Zero(p.num_constraints()), o);
  const auto& rec = r.trace.records;
  if (!r.converged() || rec.size() < 3) return {false, "run did not converge or is too short"};
  bool ok = true;
  std::string tail;
  for (std::size_t k = rec.size() - 3; k < rec.size(); ++k) {
    tail += fmt("%.2e ", rec[k].kkt_residual);
    if (k + 1 < rec.size())
      ok = ok && rec[k + 1].kkt_residual <= 10.0 * std::pow(rec[k].kkt_residual, 1.5);
  }
  bool full = true;
  for (std::size_t k = 0; k + 1 < rec.size(); ++k)
    if (rec[k].kkt_residual <= 1e-3 && rec[k].step_length != 1.0) full = false;
  return {ok && full, "tail residuals " + tail + (full ? "; full steps near the solution"
                                                       : "; damped step with r <= 1e-3")};
}

Outcome regularity_verdicts() {
  const auto t0 = Clock::now();
  const GnepProblem a1 = make_internet_switching(a1_params());
  const JointPoint a1s = internet_switching_solution(a1_params());
  const GnepProblem four = make_four_player_semistable();
  const JointPoint fs = four_player_semistable_solution();
  const Verdict sr_a1 = check_strong_regularity(a1, a1s, 1e-10).verdict;
  const Verdict ss_4 = check_semistability(four, fs, 1e-10).verdict;
  const Verdict sr_4 = check_strong_regularity(four, fs, 1e-10).verdict;
  const auto h = check_hemistability_sample(four, fs, {{vec({0.5, 0, 0, 1}), vec({0, 1})}}, 0.25);
  const double secs = seconds_since(t0);
  const bool hemi = h.size() == 1 && !h[0].failed && !h[0].nearby_solution;
  const bool ok = sr_a1 == Verdict::True && ss_4 == Verdict::True && sr_4 == Verdict::False &&
                  hemi && secs <= 5.0;
  return {ok, std::string("A1 strongly regular ") + to_string(sr_a1) + ", four-player semistable " +
                  to_string(ss_4) + ", strongly regular " + to_string(sr_4) +
                  ", nearby solution " + (hemi ? "none" : "found") + ", " + fmt("%.2fs", secs)};
}

Outcome lcp_equivalence() {
  testutil::Rng rng(20240601);
  int lm_ok = 0, ipm_ok = 0, mismatches = 0, pd_total = 0, pd_solved = 0;
  for (int t = 0; t < 500; ++t) {
    const auto fam = static_cast<testutil::LcpFamily>(t % 3);
    const Index k = 1 + rng.integer(0, 5);
    const StandardLcp lcp = testutil::random_lcp(rng, fam, k);
    const std::vector<Vec> sols = solve_lcp_bruteforce(lcp);
    auto matches = [&](const Vec& z) {
      for (const auto& s : sols)
        if ((s - z).lpNorm<Eigen::Infinity>() <= 1e-6) return true;
      return false;
    };
    const LcpResult a = solve_lcp_lm(lcp);
    const LcpResult b = solve_lcp_ipm(lcp);
    if (a.converged()) {
      ++lm_ok;
      if (!matches(a.z)) ++mismatches;
    }
    if (b.converged()) {
      ++ipm_ok;
      if (!matches(b.z)) ++mismatches;
    }
    if (fam == testutil::LcpFamily::PD) {
      pd_total += 2;
      pd_solved += static_cast<int>(a.converged()) + static_cast<int>(b.converged());
    }
  }
  const bool ok = mismatches == 0 && pd_solved == pd_total;
  return {ok, "LM successes " + std::to_string(lm_ok) + ", IPM successes " +
                  std::to_string(ipm_ok) + ", mismatches " + std::to_string(mismatches) +
                  ", PD " + std::to_string(pd_solved) + "/" + std::to_string(pd_total)};
}

Outcome merit_kkt_equivalence() {
  struct Case {
    std::shared_ptr<GnepProblem> p;
    JointPoint sol;
    double x_lo, x_hi;
  };
  std::vector<Case> cases;
  cases.push_back({std::make_shared<GnepProblem>(make_internet_switching(a1_params())),
                   internet_switching_solution(a1_params()), 0.01, 0.5});
  cases.push_back({std::make_shared<GnepProblem>(make_two_player_quadratic()),
                   {Vec::Zero(2), Vec()}, -2, 2});
  cases.push_back({std::make_shared<GnepProblem>(make_four_player_semistable()),
                   four_player_semistable_solution(), -2, 2});
  cases.push_back({std::make_shared<GnepProblem>(testutil::one_player_bound()),
                   {vec({1}), vec({1})}, -2, 2});
  testutil::Rng rng(777);
  int both = 0, neither = 0, disagree = 0;
  const double tol = 1e-12, rho = 10.0;
  for (int t = 0; t < 1000; ++t) {
    const Case& c = cases[static_cast<std::size_t>(t) % cases.size()];
    const Index n = c.sol.x.size(), m = c.sol.lambda.size();
    JointPoint z = c.sol;
    switch ((t / 4) % 4) {
      case 0:
        break;  // exact pair
      case 1:
        for (Index i = 0; i < n; ++i) z.x[i] = rng.uniform(c.x_lo, c.x_hi);
        z.lambda = rng.vec(m).cwiseAbs();
        break;
      case 2:
        z.x += 1e-3 * rng.vec(n);
        break;
      case 3:
        if (m > 0) {
          const Index i = rng.integer(0, static_cast<int>(m) - 1);
          z.lambda[i] += rng.uniform() < 0.5 ? -1e-2 : 1e-2;
        } else {
          z.x += 1e-2 * rng.vec(n);
        }
        break;
    }
    const bool lhs = merit(*c.p, z, rho).total <= tol && (m == 0 || z.lambda.minCoeff() >= -tol);
    const bool rhs = kkt_residual(*c.p, z) <= tol;
    if (lhs && rhs) ++both;
    else if (!lhs && !rhs) ++neither;
    else ++disagree;
  }
  return {disagree == 0 && both > 0 && neither > 0,
          "both zero " + std::to_string(both) + ", both nonzero " + std::to_string(neither) +
              ", disagreements " + std::to_string(disagree)};
}

Outcome error_bound() {
  const GnepProblem a1 = make_internet_switching(a1_params());
  const JointPoint s = internet_switching_solution(a1_params());
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  std::string vals;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ErrorBoundProbe e = probe_error_bound(a1, s, 1e-3, 500, seed);
    if (!std::isfinite(e.c_estimate) || e.used == 0) return {false, "non-finite estimate"};
    lo = std::min(lo, e.c_estimate);
    hi = std::max(hi, e.c_estimate);
    vals += fmt("%.3f ", e.c_estimate);
  }
  return {hi <= 2.0 * lo, "c over 5 seeds: " + vals + fmt("(max/min %.3f)", hi / lo)};
}

Outcome profile_example() {
  auto rec = [](const char* prob, const char* solver, double t) {
    RunRecord r;
    r.problem = prob;
    r.start = "1";
    r.solver = solver;
    r.status = "Converged";
    r.time_ms = t;
    return r;
  };
  const ProfileCurve c = performance_profile(
      {rec("p1", "A", 1), rec("p2", "A", 4), rec("p1", "B", 2), rec("p2", "B", 2)},
      ProfileMetric::Time);
  const bool ratios = c.ratios.at("A") == std::vector<double>{1, 2} &&
                      c.ratios.at("B") == std::vector<double>{1, 2};
  const bool rhos = c.rho("A", 1) == 0.5 && c.rho("B", 1) == 0.5 && c.rho("A", 2) == 1.0 &&
                    c.rho("B", 2) == 1.0;
  return {ratios && rhos, std::string("ratios ") + (ratios ? "exact" : "wrong") + ", rho " +
                              (rhos ? "exact" : "wrong")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 A1 reproduction", a1_reproduction},
      {"2 one-step affine convergence", one_step_affine},
      {"3 descent property", descent_property},
      {"4 superlinear tail", superlinear_tail},
      {"5 regularity verdicts", regularity_verdicts},
      {"6 LCP oracle equivalence", lcp_equivalence},
      {"7 merit/KKT equivalence", merit_kkt_equivalence},
      {"8 error bound stability", error_bound},
      {"9 profile correctness", profile_example},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
