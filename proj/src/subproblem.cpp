#include "gnep/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

namespace gnep {

MixedLcSubproblem assemble(const GnepProblem& problem, const JointPoint& point) {
  KktData d = eval_kkt_data(problem, point);
  MixedLcSubproblem sub;
  sub.JxF = std::move(d.JxF);
  sub.E = std::move(d.E);
  sub.JxG = std::move(d.JxG);
  sub.F = std::move(d.F);
  sub.G = std::move(d.G);
  sub.base_point = point;
  return sub;
}

double mixed_residual(const MixedLcSubproblem& sub, const Vec& p, const Vec& q) {
  if (p.size() != sub.n() || q.size() != sub.m())
    throw ContractViolation("(p, q) dimensions do not match the subproblem");
  double r = 0.0;
  if (sub.n() > 0) r = (sub.F + sub.JxF * p + sub.E * q).cwiseAbs().maxCoeff();
  if (sub.m() > 0) {
    const Vec lt = sub.base_point.lambda + q;
    const Vec s = -sub.G - sub.JxG * p;
    r = std::max(r, lt.cwiseMin(s).cwiseAbs().maxCoeff());
  }
  return r;
}

namespace {

double norm1(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

std::vector<int> complement(const std::vector<int>& idx, Index total) {
  std::vector<char> used(static_cast<std::size_t>(total), 0);
  for (int i : idx) used[static_cast<std::size_t>(i)] = 1;
  std::vector<int> out;
  for (Index i = 0; i < total; ++i)
    if (!used[static_cast<std::size_t>(i)]) out.push_back(static_cast<int>(i));
  return out;
}

constexpr double kMaxCondition = 1e12;

ReducedLcp reduce_partition(const MixedLcSubproblem& sub, std::vector<int> bvars,
                            std::vector<int> brows) {
  const Index n = sub.n();
  const Index m = sub.m();
  if (sub.JxF.rows() != n || sub.JxF.cols() != n || sub.E.rows() != n || sub.E.cols() != m ||
      sub.JxG.rows() != m || sub.JxG.cols() != n || sub.base_point.x.size() != n ||
      sub.base_point.lambda.size() != m)
    throw ContractViolation("subproblem blocks have inconsistent dimensions");

  ReducedLcp r;
  r.n = n;
  r.bounded_vars = std::move(bvars);
  r.bound_rows = std::move(brows);
  r.free_vars = complement(r.bounded_vars, n);
  r.alpha_rows = complement(r.bound_rows, m);
  const auto& B = r.bounded_vars;
  const auto& Fr = r.free_vars;
  const auto& al = r.alpha_rows;
  const Index nb = static_cast<Index>(B.size());
  const Index nf = static_cast<Index>(Fr.size());
  const Index na = static_cast<Index>(al.size());
  const Index k = nb + na;

  const Vec& x = sub.base_point.x;
  r.lambda = sub.base_point.lambda;
  r.x_bounded = x(B);
  const Vec El = sub.E * r.lambda;

  r.c_free = sub.F(Fr) - El(Fr) - sub.JxF(Fr, B) * r.x_bounded;
  r.P.resize(nf, k);
  r.P << sub.JxF(Fr, B), sub.E(Fr, al);

  Mat KiP = Mat::Zero(nf, k);
  Vec Kic = Vec::Zero(nf);
  if (nf > 0) {
    const Mat K = sub.JxF(Fr, Fr);
    r.lu_free.compute(K);
    const double rc = r.lu_free.rcond();
    r.condition_estimate = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(r.condition_estimate <= kMaxCondition)) throw SingularJxF(r.condition_estimate);
    KiP = r.lu_free.solve(r.P);
    Kic = r.lu_free.solve(r.c_free);
    r.amplification = r.condition_estimate / std::max(norm1(K), 1e-300) * norm1(sub.E);
  } else {
    r.amplification = norm1(sub.E);
  }

  Mat M(k, k);
  Vec h(k);
  if (nb > 0) {
    Mat top(nb, k);
    top << sub.JxF(B, B), sub.E(B, al);
    M.topRows(nb) = top - sub.JxF(B, Fr) * KiP;
    const Vec cB = sub.F(B) - El(B) - sub.JxF(B, B) * r.x_bounded;
    h.head(nb) = cB - sub.JxF(B, Fr) * Kic;
  }
  if (na > 0) {
    Mat bot = Mat::Zero(na, k);
    bot.leftCols(nb) = -sub.JxG(al, B);
    M.bottomRows(na) = bot + sub.JxG(al, Fr) * KiP;
    const Vec ca = -sub.G(al) + sub.JxG(al, B) * r.x_bounded;
    h.tail(na) = ca + sub.JxG(al, Fr) * Kic;
  }
  r.lcp.M = std::move(M);
  r.lcp.h = std::move(h);
  return r;
}

}  // namespace

std::pair<Vec, Vec> ReducedLcp::recover(const Vec& z) const {
  if (z.size() != lcp.dim()) throw ContractViolation("LCP solution has wrong dimension");
  const Index nb = static_cast<Index>(bounded_vars.size());
  const Index na = static_cast<Index>(alpha_rows.size());
  const Vec w = lcp.M * z + lcp.h;
  Vec p(n);
  Vec q(lambda.size());
  for (Index i = 0; i < nb; ++i) p[bounded_vars[i]] = z[i] - x_bounded[i];
  if (!free_vars.empty()) {
    const Vec pf = -lu_free.solve(c_free + P * z);
    for (std::size_t i = 0; i < free_vars.size(); ++i) p[free_vars[i]] = pf[static_cast<Index>(i)];
  }
  for (Index i = 0; i < na; ++i) q[alpha_rows[i]] = z[nb + i] - lambda[alpha_rows[i]];
  for (Index i = 0; i < nb; ++i)
    q[bound_rows[i]] = std::max(w[i], 0.0) - lambda[bound_rows[i]];
  return {p, q};
}

ReducedLcp reduce_via_inverse(const MixedLcSubproblem& sub) { return reduce_partition(sub, {}, {}); }

ReducedLcp reduce_nonneg(const GnepProblem& problem, const MixedLcSubproblem& sub) {
  std::vector<int> vars = problem.nonneg_variable_indices();
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  const Index m = sub.m();
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::vector<int> rows;
  for (int i : vars) {
    if (i < 0 || i >= sub.n()) throw StructureMismatch("nonnegative variable index out of range");
    const int owner = problem.var_owner(i);
    const double xi = sub.base_point.x[i];
    int found = -1;
    for (Index j = 0; j < m && found < 0; ++j) {
      if (used[static_cast<std::size_t>(j)] || problem.constraint_owner(static_cast<int>(j)) != owner)
        continue;
      Vec row = sub.JxG.row(j).transpose();
      row[i] += 1.0;
      if (row.cwiseAbs().maxCoeff() > 1e-12) continue;
      if (std::abs(sub.G[j] + xi) > 1e-10 * std::max(1.0, std::abs(xi))) continue;
      found = static_cast<int>(j);
    }
    if (found < 0)
      throw StructureMismatch("variable " + std::to_string(i) +
                              " has no bound row -x_i <= 0 owned by its player");
    used[static_cast<std::size_t>(found)] = 1;
    rows.push_back(found);
  }
  return reduce_partition(sub, vars, rows);
}

double subproblem_tolerance(int k) { return std::max(1e-8, std::pow(10.0, -k)); }

namespace {

constexpr Index kLmMaxDim = 100;

LcpResult solve_reduced(const ReducedLcp& red, double tol) {
  LcpSolveOptions lm_opts;
  lm_opts.tol = std::min(tol, 1e-8);
  LcpSolveOptions ipm_opts;
  ipm_opts.tol = tol;
  const Index k = red.lcp.dim();
  if (k <= kLmMaxDim) {
    LcpResult res = solve_lcp_lm(red.lcp, lm_opts);
    if (!res.converged()) {
      LcpResult alt = solve_lcp_ipm(red.lcp, lm_opts);
      if (alt.converged()) return alt;
    }
    return res;
  }
  LcpResult res = solve_lcp_ipm(red.lcp, ipm_opts);
  if (!res.converged()) {
    LcpResult alt = solve_lcp_lm(red.lcp, ipm_opts);
    if (alt.converged()) return alt;
  }
  return res;
}

bool solve_augmented(const MixedLcSubproblem& sub, double tol, SubproblemSolution& out) {
  MixedLcp mlcp;
  mlcp.A = sub.JxF;
  mlcp.B = sub.E;
  mlcp.a = sub.F - sub.E * sub.base_point.lambda;
  mlcp.C = -sub.JxG;
  mlcp.D = Mat::Zero(sub.m(), sub.m());
  mlcp.c = -sub.G;
  LcpSolveOptions opts;
  opts.tol = std::min(tol, 1e-8);
  opts.max_iters = 2000;
  MixedLcpResult res = solve_mixed_lcp_lm(mlcp, opts, 1e-8, Vec(), sub.base_point.lambda);
  out.stats.reduction = "augmented";
  out.stats.lcp_dim = sub.n() + sub.m();
  out.stats.lcp = res.stats;
  out.p = res.u;
  out.q = res.v.cwiseMax(0.0) - sub.base_point.lambda;
  return res.converged();
}

}  // namespace

SubproblemSolution solve_subproblem(const GnepProblem& problem, const MixedLcSubproblem& sub,
                                    double tol) {
  if (!(tol >= 1e-12)) throw ContractViolation("subproblem tolerance must be >= 1e-12");
  SubproblemSolution out;
  out.stats.tolerance = tol;

  std::optional<ReducedLcp> red;
  std::optional<SingularJxF> singular;
  if (!problem.nonneg_variable_indices().empty()) {
    try {
      red = reduce_nonneg(problem, sub);
      out.stats.reduction = "nonneg";
    } catch (const StructureMismatch&) {
    } catch (const SingularJxF& e) {
      singular = e;
    }
  }
  if (!red) {
    try {
      red = reduce_via_inverse(sub);
      out.stats.reduction = "inverse";
    } catch (const SingularJxF& e) {
      singular = e;
    }
  }

  bool ok = false;
  if (red) {
    out.stats.condition_estimate = red->condition_estimate;
    out.stats.lcp_dim = red->lcp.dim();
    LcpResult res = solve_reduced(*red, tol);
    out.stats.lcp = res.stats;
    ok = res.converged();
    if (ok) std::tie(out.p, out.q) = red->recover(res.z.cwiseMax(0.0));
  } else {
    out.stats.condition_estimate = singular->condition_estimate();
  }
  if (!ok) {
    ok = solve_augmented(sub, tol, out);
    if (!ok) {
      if (!red && singular) throw *singular;
      throw SubproblemInfeasible("no subproblem method converged (last residual " +
                                 std::to_string(out.stats.lcp.residual) + ")");
    }
  }
  out.stats.converged = true;
  out.stats.mixed_residual = mixed_residual(sub, out.p, out.q);
  return out;
}

SubproblemSolution solve_subproblem(const GnepProblem& problem, const JointPoint& point,
                                    double tol) {
  return solve_subproblem(problem, assemble(problem, point), tol);
}

}  // namespace gnep
