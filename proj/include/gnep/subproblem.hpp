#pragma once

#include "gnep/lcp.hpp"
#include "gnep/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gnep {

/// Linearized KKT system at a base point:
///   F + JxF p + E q = 0,   0 <= lambda + q  _|_  -G - JxG p >= 0.
struct MixedLcSubproblem {
  Mat JxF;
  Mat E;
  Mat JxG;
  Vec F;
  Vec G;
  JointPoint base_point;

  Index n() const { return F.size(); }
  Index m() const { return G.size(); }
};

/// One eval_kkt_data call.
MixedLcSubproblem assemble(const GnepProblem& problem, const JointPoint& point);

/// max(|F + JxF p + E q|_inf, |min(lambda + q, -G - JxG p)|_inf).
double mixed_residual(const MixedLcSubproblem& sub, const Vec& p, const Vec& q);

/// Standard LCP obtained by eliminating the unbounded primal step.
///
/// Unknowns are z = (x_B + p_B, lambda_alpha + q_alpha), where B are the
/// variables with an explicit bound row x_i >= 0 and alpha are the remaining
/// constraint rows. With B empty this is the system in lambda-tilde alone.
struct ReducedLcp {
  StandardLcp lcp;
  /// Condition estimate of the eliminated block of JxF (1 when it is empty).
  double condition_estimate = 1.0;
  /// Estimate of |JxF_FF^-1| |E|, the factor by which LCP residuals can grow
  /// during recovery.
  double amplification = 0.0;
  std::vector<int> bounded_vars;
  std::vector<int> bound_rows;
  std::vector<int> alpha_rows;

  /// Maps an LCP solution back to (p, q).
  std::pair<Vec, Vec> recover(const Vec& z) const;

  // recovery data
  std::vector<int> free_vars;
  Eigen::PartialPivLU<Mat> lu_free;
  Vec c_free;
  Mat P;
  Vec x_bounded;
  Vec lambda;
  Index n = 0;
};

/// Reduction through JxF^-1. Throws SingularJxF when the condition estimate
/// exceeds 1e12.
ReducedLcp reduce_via_inverse(const MixedLcSubproblem& sub);

/// Reduction keeping declared nonnegative variables as LCP unknowns and
/// dropping their bound multipliers. Each index in
/// problem.nonneg_variable_indices() needs a row g = -x_i owned by the
/// variable's player; otherwise StructureMismatch. Free variables, if any, are
/// eliminated through the corresponding block of JxF.
ReducedLcp reduce_nonneg(const GnepProblem& problem, const MixedLcSubproblem& sub);

/// Inexactness schedule for outer iteration k: max(1e-8, 10^-k).
double subproblem_tolerance(int k);

struct SubproblemStats {
  std::string reduction;  ///< "inverse", "nonneg" or "augmented"
  Index lcp_dim = 0;
  LcpStats lcp;
  double mixed_residual = 0.0;
  double condition_estimate = 1.0;
  double tolerance = 0.0;
  bool converged = false;
};

struct SubproblemSolution {
  Vec p;
  Vec q;
  SubproblemStats stats;
};

/// Solves the subproblem assembled elsewhere. Reduced dimension <= 100 goes to
/// the LM solver at min(tol, 1e-8), larger ones to the IPM at `tol`. A singular
/// JxF falls back to LM on the unreduced system. Throws SubproblemInfeasible
/// when no method converges.
SubproblemSolution solve_subproblem(const GnepProblem& problem, const MixedLcSubproblem& sub,
                                    double tol);

SubproblemSolution solve_subproblem(const GnepProblem& problem, const JointPoint& point,
                                    double tol);

}  // namespace gnep
