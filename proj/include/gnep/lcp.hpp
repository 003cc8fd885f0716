#pragma once

#include "gnep/types.hpp"

#include <string>
#include <vector>

namespace gnep {

/// 0 <= z  _|_  M z + h >= 0.
struct StandardLcp {
  Mat M;
  Vec h;

  Index dim() const { return h.size(); }
  /// Throws ContractViolation unless M is square, matches h and is finite.
  void validate() const;
};

struct LcpSolveOptions {
  double tol = 1e-8;
  int max_iters = 500;
  double lm_sigma_min = 1e-5;
  double lm_sigma_max = 1e-3;
  double lm_scale = 5.0;
  double ipm_centering = 0.2;
  double ipm_step_fraction = 0.9995;

  void validate() const;
};

enum class LcpStatus { Converged, NonConvergence, SingularSystem, IllConditioned };

const char* to_string(LcpStatus s);

struct LcpStats {
  LcpStatus status = LcpStatus::NonConvergence;
  int iterations = 0;
  /// Natural residual |min(z, Mz + h)|_inf at the returned z.
  double residual = 0.0;
  /// Condition estimate of the last linear system (IPM) or 0 when unused.
  double condition_estimate = 0.0;
  std::string method;
};

struct LcpResult {
  Vec z;
  LcpStats stats;
  bool converged() const { return stats.status == LcpStatus::Converged; }
};

double fischer_burmeister(double a, double b);

double lcp_residual(const StandardLcp& lcp, const Vec& z);

/// Componentwise phi_FB(z_i, (Mz + h)_i).
Vec fb_residual(const StandardLcp& lcp, const Vec& z);

/// Levenberg-Marquardt on 1/2 |phi_FB|^2. `z0` may be empty (start at 0).
LcpResult solve_lcp_lm(const StandardLcp& lcp, const LcpSolveOptions& opts = {},
                       const Vec& z0 = Vec());

/// Infeasible primal-dual path following (Mehrotra predictor-corrector).
LcpResult solve_lcp_ipm(const StandardLcp& lcp, const LcpSolveOptions& opts = {});

/// All solutions found by enumerating complementary patterns; k <= 12.
std::vector<Vec> solve_lcp_bruteforce(const StandardLcp& lcp);

enum class PsdVerdict { SolvableCertified, ConditionViolated, NotPsd };

struct PsdSolvability {
  PsdVerdict verdict = PsdVerdict::NotPsd;
  /// Violating direction (u >= 0, Mu >= 0, u^T M u = 0, u^T h < 0) when
  /// verdict == ConditionViolated.
  Vec u;
  double min_sym_eigenvalue = 0.0;
};

/// Checks the sufficient solvability condition for PSD M: every u >= 0 with
/// Mu >= 0 and u^T M u = 0 has u^T h >= 0. k <= 12.
PsdSolvability check_psd_solvability(const StandardLcp& lcp);

/// Mixed LCP with free block u and complementarity block v:
///   A u + B v + a = 0,   0 <= v  _|_  C u + D v + c >= 0.
struct MixedLcp {
  Mat A, B, C, D;
  Vec a, c;
};

struct MixedLcpResult {
  Vec u, v;
  LcpStats stats;
  bool converged() const { return stats.status == LcpStatus::Converged; }
};

/// max(|A u + B v + a|_inf, |min(v, C u + D v + c)|_inf).
double mixed_lcp_residual(const MixedLcp& lcp, const Vec& u, const Vec& v);

/// Levenberg-Marquardt on the stacked equation / Fischer-Burmeister residual.
/// `tikhonov` is added to the A block inside the linear solves only.
MixedLcpResult solve_mixed_lcp_lm(const MixedLcp& lcp, const LcpSolveOptions& opts = {},
                                  double tikhonov = 1e-8, const Vec& u0 = Vec(),
                                  const Vec& v0 = Vec());

}  // namespace gnep
