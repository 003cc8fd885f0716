#include "gnep/slcp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace gnep {

void SlcpOptions::validate() const {
  if (!(rho > 0)) throw ContractViolation("rho must be positive");
  if (!(eta > 0 && eta < 1)) throw ContractViolation("eta must lie in (0, 1)");
  if (!(tau0 > 0 && tau0 <= 1)) throw ContractViolation("tau0 must lie in (0, 1]");
  if (!(tol > 0)) throw ContractViolation("tol must be positive");
  if (max_outer_iters < 0) throw ContractViolation("max_outer_iters must be >= 0");
  if (max_halvings < 0) throw ContractViolation("max_halvings must be >= 0");
  if (!(rho_scale > 1)) throw ContractViolation("rho_scale must exceed 1");
  if (!(rho_max >= rho)) throw ContractViolation("rho_max must be >= rho");
  if (max_rho_increases < 0) throw ContractViolation("max_rho_increases must be >= 0");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::LineSearchFailed: return "LineSearchFailed";
    case SolveStatus::SubproblemFailed: return "SubproblemFailed";
    case SolveStatus::EvaluationFailed: return "EvaluationFailed";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

JointPoint step_point(const JointPoint& point, const Vec& p, const Vec& q, double tau) {
  JointPoint out;
  out.x = point.x + tau * p;
  out.lambda = (point.lambda + tau * q).cwiseMax(0.0);
  return out;
}

std::optional<LineSearchResult> line_search(const GnepProblem& problem, const JointPoint& point,
                                            double phi0, const Vec& p, const Vec& q,
                                            double rho, double eta, double tau0,
                                            int max_halvings) {
  double tau = tau0;
  for (int j = 0; j <= max_halvings; ++j, tau *= 0.5) {
    LineSearchResult r;
    r.tau = tau;
    r.halvings = j;
    r.point = step_point(point, p, q, tau);
    try {
      r.merit = merit(problem, r.point, rho);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(r.merit.total) && r.merit.total <= (1.0 - eta * tau) * phi0) return r;
  }
  return std::nullopt;
}

std::optional<LineSearchResult> line_search(const GnepProblem& problem, const JointPoint& point,
                                            const Vec& p, const Vec& q, double rho, double eta,
                                            double tau0, int max_halvings) {
  double phi0;
  try {
    phi0 = merit(problem, point, rho).total;
  } catch (const Error&) {
    return std::nullopt;
  }
  return line_search(problem, point, phi0, p, q, rho, eta, tau0, max_halvings);
}

SolveResult slcp_solve(const GnepProblem& problem, const Vec& x0, const Vec& lambda0,
                       const SlcpOptions& opts) {
  opts.validate();
  SolveResult res;
  res.point = {x0, lambda0};
  problem.check_point(res.point);
  if (lambda0.size() > 0 && lambda0.minCoeff() < 0)
    throw ContractViolation("initial multipliers must be nonnegative");
  problem.reset_counters();
  SolveTrace& trace = res.trace;
  trace.solver = "slcp";
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  double rho = opts.rho;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.point = res.point;
    rec.rho = rho;
    MixedLcSubproblem sub;
    try {
      sub = assemble(problem, res.point);
    } catch (const Error& e) {
      rec.counters = problem.counters();
      rec.kkt_residual = std::numeric_limits<double>::infinity();
      rec.merit.total = std::numeric_limits<double>::infinity();
      trace.records.push_back(rec);
      trace.status = SolveStatus::EvaluationFailed;
      trace.message = e.what();
      break;
    }
    rec.kkt_residual = kkt_residual_from_data(sub.F, sub.G, res.point.lambda);
    rec.merit = merit_from_data(sub.F, sub.G, res.point.lambda, rho);
    auto finish = [&](SolveStatus s, std::string msg = {}) {
      rec.counters = problem.counters();
      trace.records.push_back(rec);
      trace.status = s;
      trace.message = std::move(msg);
    };
    if (rec.kkt_residual <= opts.tol) {
      finish(SolveStatus::Converged);
      break;
    }
    if (k >= opts.max_outer_iters) {
      finish(SolveStatus::MaxIters);
      break;
    }
    if (opts.time_limit_s > 0 && elapsed_s() > opts.time_limit_s) {
      finish(SolveStatus::TimeLimit);
      break;
    }
    SubproblemSolution sol;
    try {
      sol = solve_subproblem(problem, sub, subproblem_tolerance(k + 1));
    } catch (const Error& e) {
      finish(SolveStatus::SubproblemFailed, e.what());
      break;
    }
    rec.subproblem = sol.stats;

    std::optional<LineSearchResult> ls;
    for (int attempt = 0;; ++attempt) {
      ls = line_search(problem, res.point, rec.merit.total, sol.p, sol.q, rho, opts.eta,
                       opts.tau0, opts.max_halvings);
      if (ls || !opts.rho_adapt || attempt >= opts.max_rho_increases ||
          rho * opts.rho_scale > opts.rho_max)
        break;
      rho *= opts.rho_scale;
      rec.rho = rho;
      rec.merit = merit_from_data(sub.F, sub.G, res.point.lambda, rho);
    }
    if (!ls) {
      finish(SolveStatus::LineSearchFailed,
             "no step satisfied the decrease test after " + std::to_string(opts.max_halvings) +
                 " halvings");
      break;
    }
    rec.step_length = ls->tau;
    rec.halvings = ls->halvings;
    rec.counters = problem.counters();
    trace.records.push_back(rec);
    res.point = ls->point;
  }
  trace.counters = problem.counters();
  trace.elapsed_ms = 1e3 * elapsed_s();
  return res;
}

}  // namespace gnep
