#pragma once

#include "gnep/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gnep {

struct MonotonicityEstimate {
  /// |JxF^-1|_2.
  double alpha = 0.0;
  /// Largest beta with sym(JxG JxF^-1 E - beta JxG JxG^T) PSD. Empty when the
  /// condition is vacuous (m = 0 or JxG = 0).
  std::optional<double> beta_max;
  /// beta_max > 0, or vacuous.
  bool satisfied = false;
  /// Minimum eigenvalue of sym(JxG JxF^-1 E).
  double min_eig_at_zero = 0.0;
};

/// Throws SingularJxF when JxF is numerically singular.
MonotonicityEstimate estimate_monotonicity(const KktData& data);
MonotonicityEstimate estimate_monotonicity(const GnepProblem& problem, const JointPoint& point);

enum class IndexClass { Plus, Zero, Minus };

const char* to_string(IndexClass c);

struct IndexClassification {
  double act_tol = 0.0;
  std::vector<IndexClass> classes;  ///< one per constraint row
  std::vector<int> plus, zero, minus;
  /// Rows whose lambda or |g| falls in (act_tol, 10 act_tol].
  std::vector<int> ambiguous;
  /// Sign inconsistencies such as lambda > 0 on an inactive row.
  std::vector<std::string> notes;
};

/// lambda > act_tol: Plus; otherwise |g| <= act_tol: Zero; otherwise Minus.
IndexClassification classify_indices(const GnepProblem& problem, const JointPoint& point,
                                     double act_tol = 1e-6);

enum class Verdict { True, False, Inconclusive };

const char* to_string(Verdict v);

struct RegularityCheck {
  Verdict verdict = Verdict::Inconclusive;
  /// Nonzero (dx, dlambda) in some branch cone when the verdict is False.
  Vec witness;
  long branches = 0;
  std::vector<std::string> notes;
};

/// Decides whether the linearized KKT system at the pair admits only the zero
/// solution, enumerating both sides of every degenerate complementarity.
/// |I_zero| <= 12.
RegularityCheck check_semistability(const GnepProblem& problem, const JointPoint& pair,
                                    double act_tol = 1e-6);

/// Enumerates every partition of the degenerate indices into (J+, J0, J-) and
/// checks each homogeneous system has only the zero solution. |I_zero| <= 8.
RegularityCheck check_strong_regularity(const GnepProblem& problem, const JointPoint& pair,
                                        double act_tol = 1e-6);

struct ErrorBoundProbe {
  double c_estimate = 0.0;
  int used = 0;
  /// Samples whose residual fell below 1e-14 or whose evaluation failed.
  int skipped = 0;
  /// Skipped samples that were not the pair itself (|dz| > 0), which point to
  /// an unbounded ratio.
  int unbounded = 0;
};

/// Max of dist((x, lambda), pair) / (|F| + |min(lambda, -G)|) over uniform
/// samples in a ball of the given radius, multipliers projected to >= 0.
ErrorBoundProbe probe_error_bound(const GnepProblem& problem, const JointPoint& pair,
                                  double radius, int samples, std::uint64_t seed);

struct HemistabilitySample {
  JointPoint perturbation;
  bool nearby_solution = false;
  /// Distance from the closest subproblem solution found to the pair.
  double distance = 0.0;
  bool failed = false;
  std::string note;
};

/// For each perturbed point, looks for a solution of the linearized system
/// there within `delta` (Euclidean, stacked (x, lambda)) of the pair. Uses the
/// subproblem solver first and, for m <= 12, enumerates all active patterns.
std::vector<HemistabilitySample> check_hemistability_sample(
    const GnepProblem& problem, const JointPoint& pair,
    const std::vector<JointPoint>& perturbations, double delta);

struct DiagnosticsOptions {
  double act_tol = 1e-6;
  double error_bound_radius = 1e-3;
  int error_bound_samples = 500;
  std::uint64_t seed = 1;
  int hemistability_samples = 10;
  double hemistability_radius = 1e-3;
  double hemistability_delta = 1e-2;
};

struct DiagnosticsReport {
  std::optional<MonotonicityEstimate> monotonicity;
  std::string monotonicity_error;
  IndexClassification classification;
  RegularityCheck semistable;
  RegularityCheck strongly_regular;
  std::optional<ErrorBoundProbe> error_bound;
  std::vector<HemistabilitySample> hemistability;
  double kkt_residual = 0.0;
  /// strongly_regular True implies semistable True.
  bool consistent = true;
};

DiagnosticsReport diagnose(const GnepProblem& problem, const JointPoint& pair,
                           const DiagnosticsOptions& opts = {});

}  // namespace gnep
