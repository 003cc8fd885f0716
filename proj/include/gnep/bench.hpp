#pragma once

#include "gnep/slcp.hpp"

#include <map>
#include <string>
#include <vector>

namespace gnep {

struct SmmOptions {
  double tol = 1e-7;
  int max_iters = 200;
  int max_halvings = 50;
  double armijo = 1e-4;
  double time_limit_s = 0.0;

  void validate() const;
};

/// Semismooth Newton on Psi = (F, phi_FB(lambda, -G)) with Armijo backtracking
/// on 1/2 |Psi|^2. Stops on the same KKT residual as the SLCP driver (plus
/// multiplier sign, since iterates may leave lambda >= 0). Resets counters.
SolveResult solve_smm_baseline(const GnepProblem& problem, const Vec& x0, const Vec& lambda0,
                               const SmmOptions& opts = {});

struct RunRecord {
  std::string problem;
  std::string start;
  std::string solver;
  std::string status;
  double time_ms = 0.0;
  int iters = 0;
  long grad_evals = 0;
  long hess_evals = 0;
  double kkt_residual = 0.0;

  bool converged() const { return status == "Converged"; }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr const char* kRecordCsvHeader =
    "problem,start,solver,status,time_ms,iters,grad_evals,hess_evals,kkt_residual";

std::string records_to_csv(const std::vector<RunRecord>& records);
/// Throws SchemaError on a bad header or malformed row.
std::vector<RunRecord> records_from_csv(const std::string& text);

struct SuiteConfig {
  std::vector<std::string> problems;
  std::vector<double> starts;
  std::vector<std::string> solvers;
  double time_limit_s = 60.0;
  double tol = 1e-7;
  int max_iters = 200;
  int threads = 1;

  void validate() const;
};

/// Keys: problems, starts, solvers, time_limit_s, tol, max_iters, threads.
SuiteConfig parse_suite_config(const std::string& text);

/// Formats a start scale as used in the "start" column.
std::string start_label(double s);

/// Runs one solver ("slcp" or "smm") on a fresh copy of the problem.
SolveResult run_solver(const GnepProblem& problem, const std::string& solver, const Vec& x0,
                       const Vec& lambda0, double tol, int max_iters, double time_limit_s);

/// Every (problem, start, solver) cell from x0 = start * 1, lambda0 = 0.
/// Output sorted by (problem, start, solver). Cell failures become records.
std::vector<RunRecord> run_suite(const SuiteConfig& config);

enum class ProfileMetric { Time, Grad, Hess };

ProfileMetric parse_metric(const std::string& s);
const char* to_string(ProfileMetric m);

struct ProfileCurve {
  ProfileMetric metric = ProfileMetric::Time;
  std::vector<std::string> solvers;
  /// Problem keys "problem@start" entering |P|.
  std::vector<std::string> problems;
  /// Problems on which every solver failed; left out of |P|.
  std::vector<std::string> excluded;
  /// Per solver, sorted ratios (inf for failures), one per problem in |P|.
  std::map<std::string, std::vector<double>> ratios;
  /// Breakpoints and grid 1, 1.05, ..., 10, sorted.
  std::vector<double> taus;
  /// Per solver, rho(tau) at each entry of taus.
  std::map<std::string, std::vector<double>> values;

  /// Fraction of problems with ratio <= tau.
  double rho(const std::string& solver, double tau) const;
};

/// Missing cells count as failures.
ProfileCurve performance_profile(const std::vector<RunRecord>& records, ProfileMetric metric);

/// Wide CSV: tau followed by one column per solver.
std::string profile_to_csv(const ProfileCurve& curve);

}  // namespace gnep
