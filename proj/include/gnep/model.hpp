#pragma once

#include "gnep/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gnep {

enum class Convexity { PlayerConvex, JointlyConvex, Unknown };

/// Evaluation counters. A "pass" is one call of an oracle family over all
/// players: an objective-gradient pass or a constraint-Jacobian pass counts one
/// grad evaluation, a full assembly of the Lagrangian Jacobian counts one hess
/// evaluation.
struct EvalCounters {
  long grad_evals = 0;
  long hess_evals = 0;

  friend bool operator==(const EvalCounters&, const EvalCounters&) = default;
};

/// A primal-dual point (x, lambda), multipliers stacked player by player.
struct JointPoint {
  Vec x;
  Vec lambda;
};

/// Per-player derivative oracles of a GNEP:
///   player nu minimizes theta^nu(x) over x^nu subject to g^nu(x) <= 0.
struct GnepOracles {
  /// theta^nu(x). Optional; only used by derivative checks.
  std::function<double(int, const Vec&)> objective;
  /// grad_{x^nu} theta^nu(x), length n_nu.
  std::function<Vec(int, const Vec&)> objective_grad;
  /// g^nu(x), length m_nu.
  std::function<Vec(int, const Vec&)> constraint;
  /// Full Jacobian J_x g^nu(x), m_nu x n.
  std::function<Mat(int, const Vec&)> constraint_jacobian;
  /// J_x grad_{x^nu} L^nu(x, lambda^nu), n_nu x n.
  std::function<Mat(int, const Vec&, const Vec&)> lagrangian_hessian;
};

class GnepProblem {
 public:
  GnepProblem(std::string name, std::vector<int> player_dims,
              std::vector<int> constraint_dims, GnepOracles oracles,
              std::vector<int> nonneg_variable_indices = {},
              Convexity convexity = Convexity::Unknown);

  const std::string& name() const { return name_; }
  int num_players() const { return static_cast<int>(player_dims_.size()); }
  int num_vars() const { return n_; }
  int num_constraints() const { return m_; }
  const std::vector<int>& player_dims() const { return player_dims_; }
  const std::vector<int>& constraint_dims() const { return constraint_dims_; }
  int var_offset(int player) const { return var_offsets_[player]; }
  int constraint_offset(int player) const { return con_offsets_[player]; }
  /// Player owning variable i.
  int var_owner(int i) const;
  /// Player owning constraint row j.
  int constraint_owner(int j) const;
  const std::vector<int>& nonneg_variable_indices() const { return nonneg_; }
  Convexity convexity() const { return convexity_; }
  const GnepOracles& oracles() const { return oracles_; }

  EvalCounters& counters() const { return counters_; }
  void reset_counters() const { counters_ = {}; }

  /// Throws ContractViolation unless the point has dimensions (n, m).
  void check_point(const JointPoint& point) const;

 private:
  std::string name_;
  std::vector<int> player_dims_;
  std::vector<int> constraint_dims_;
  std::vector<int> var_offsets_;
  std::vector<int> con_offsets_;
  int n_ = 0;
  int m_ = 0;
  GnepOracles oracles_;
  std::vector<int> nonneg_;
  Convexity convexity_;
  mutable EvalCounters counters_;
};

/// First-order data of the concatenated KKT system at a point.
struct FirstOrderData {
  Vec F;  ///< stacked grad_{x^nu} L^nu, length n
  Vec G;  ///< stacked g^nu, length m
};

struct KktData {
  Vec F;
  Vec G;
  Mat E;    ///< block diagonal, blocks (J_{x^nu} g^nu)^T, n x m
  Mat JxG;  ///< m x n
  Mat JxF;  ///< n x n
};

/// Evaluates F, G, E, J_x G and J_x F. Counts two grad passes and one hess pass.
KktData eval_kkt_data(const GnepProblem& problem, const JointPoint& point);

/// Evaluates F and G only. Counts two grad passes.
FirstOrderData eval_first_order(const GnepProblem& problem, const JointPoint& point);

/// Constraint values only; no counters touched.
Vec eval_constraints(const GnepProblem& problem, const Vec& x);

/// Extracts E from the stacked constraint Jacobian.
Mat partial_gradient_blocks(const GnepProblem& problem, const Mat& JxG);

struct DerivativeCheckReport {
  /// Per player, max relative error of objective_grad against central
  /// differences of objective. NaN when no objective oracle is supplied.
  std::vector<double> gradient_error;
  /// Per player, constraint_jacobian against differences of constraint.
  std::vector<double> jacobian_error;
  /// Per player, lagrangian_hessian against differences of F's block.
  std::vector<double> hessian_error;
  /// Human-readable notes, e.g. non-finite evaluations.
  std::vector<std::string> notes;

  double max_error() const;
  bool passed(double tol) const;
};

/// Compares analytic derivatives with central finite differences. Errors are
/// |a - fd|_inf / max(1, |fd|_inf). Non-finite evaluations are recorded as
/// infinite error, never thrown.
DerivativeCheckReport check_derivatives(const GnepProblem& problem,
                                        const JointPoint& point, double step);

}  // namespace gnep
