#pragma once

#include "gnep/kkt.hpp"
#include "gnep/subproblem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gnep {

struct SlcpOptions {
  double rho = 10.0;
  double eta = 0.1;
  double tau0 = 1.0;
  double tol = 1e-7;
  int max_outer_iters = 200;
  int max_halvings = 50;
  bool rho_adapt = true;
  double rho_scale = 10.0;
  double rho_max = 1e8;
  /// Retries of one iterate with a larger rho before giving up.
  int max_rho_increases = 3;
  /// Wall-clock budget in seconds; <= 0 disables it.
  double time_limit_s = 0.0;

  void validate() const;
};

enum class SolveStatus {
  Converged,
  MaxIters,
  LineSearchFailed,
  SubproblemFailed,
  EvaluationFailed,
  TimeLimit,
};

const char* to_string(SolveStatus s);

struct IterationRecord {
  int iteration = 0;
  JointPoint point;
  MeritValue merit;  ///< at `rho`
  double kkt_residual = 0.0;
  /// Step accepted from this iterate; 0 on the last record.
  double step_length = 0.0;
  int halvings = 0;
  double rho = 0.0;
  std::optional<SubproblemStats> subproblem;
  EvalCounters counters;  ///< cumulative, after this iteration's work
};

struct SolveTrace {
  std::string solver;
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::MaxIters;
  std::string message;
  EvalCounters counters;
  double elapsed_ms = 0.0;

  /// Number of accepted steps.
  int iterations() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
  double final_residual() const { return records.empty() ? 0.0 : records.back().kkt_residual; }
};

struct SolveResult {
  JointPoint point;
  SolveTrace trace;
  bool converged() const { return trace.status == SolveStatus::Converged; }
};

struct LineSearchResult {
  double tau = 0.0;
  int halvings = 0;
  MeritValue merit;
  JointPoint point;
};

/// Trial point (x + tau p, max(lambda + tau q, 0)).
JointPoint step_point(const JointPoint& point, const Vec& p, const Vec& q, double tau);

/// Backtracking on Phi_rho: the largest tau0 / 2^j, j <= max_halvings, with
/// Phi(z + tau d) <= (1 - eta tau) Phi(z). Points where the oracles fail count
/// as infinite merit. Never throws for evaluation problems.
std::optional<LineSearchResult> line_search(const GnepProblem& problem, const JointPoint& point,
                                            double phi0, const Vec& p, const Vec& q,
                                            double rho, double eta, double tau0,
                                            int max_halvings);

std::optional<LineSearchResult> line_search(const GnepProblem& problem, const JointPoint& point,
                                            const Vec& p, const Vec& q, double rho, double eta,
                                            double tau0, int max_halvings);

/// Globalized sequential LCP method. Resets the problem's counters.
SolveResult slcp_solve(const GnepProblem& problem, const Vec& x0, const Vec& lambda0,
                       const SlcpOptions& opts = {});

}  // namespace gnep
