#pragma once

#include "gnep/model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gnep {

/// Internet switching game with one scalar decision per player. Player nu
/// minimizes -x^nu / S + x^nu / B, S = sum of all x, subject to
/// l_nu <= x^nu <= L_nu and, when informed, S <= B.
struct InternetSwitchingParams {
  double B = 1.0;
  std::vector<double> l;
  std::vector<double> L;  ///< +inf for no upper bound
  std::vector<bool> informed;

  int num_players() const { return static_cast<int>(l.size()); }
  /// Throws ContractViolation on inconsistent sizes, B <= 0, l < 0, L < l or
  /// sum(l) > B.
  void validate() const;
};

/// N = 10, B = 1; player 0 uninformed with bounds [0.3, 0.5], players 1..9
/// informed with lower bound 0.01 and no upper bound.
InternetSwitchingParams a1_params();

/// Rows per player: l - x <= 0, x - L <= 0 (finite L only), S - B <= 0
/// (informed only). Players with l = 0 are declared nonnegative.
GnepProblem make_internet_switching(const InternetSwitchingParams& params,
                                    const std::string& name = "internet-switching");

/// Closed-form KKT pair with uninformed players at their lower bounds and
/// informed players interior. Throws PreconditionError naming the violated
/// hypothesis.
JointPoint internet_switching_solution(const InternetSwitchingParams& params);

/// Two players, objectives x1^2/2 + x1 x2 and x2^2/2 + 2 x1 x2, no constraints.
GnepProblem make_two_player_quadratic();

/// Four scalar players with a degenerate but semistable equilibrium at
/// x = (0, 0, 0, 1), lambda = (0, 1).
GnepProblem make_four_player_semistable();
JointPoint four_player_semistable_solution();

/// Affine GNEP: theta^nu = 1/2 x^nu' Q_nunu x^nu + sum_{mu != nu} x^nu' Q_numu x^mu
/// + c_nu' x^nu, constraints A x <= b grouped by owner.
struct AgnepSpec {
  struct ConstraintBlock {
    int owner = 0;
    Mat A;  ///< rows x n
    Vec b;
  };
  std::vector<int> dims;
  std::vector<Vec> c;
  /// Q[nu][mu], n_nu x n_mu; absent off-diagonal blocks are zero.
  std::vector<std::map<int, Mat>> Q;
  std::vector<ConstraintBlock> constraints;
  std::vector<int> nonneg_vars;

  int num_vars() const;
  /// Throws SchemaError on inconsistent dimensions or a non-symmetric Q_nunu.
  void validate() const;
  /// Full n x n matrix of stacked Q blocks; this is JxF.
  Mat jacobian() const;
};

GnepProblem make_agnep(const AgnepSpec& spec, const std::string& name = "agnep");

struct RandomAgnep {
  AgnepSpec spec;
  /// Strictly feasible point for every constraint row.
  Vec slater_point;
};

/// JxF = D + S with D block-diagonal SPD (eigenvalues in [1, 3]) and S skew
/// with zero diagonal blocks, |S|_2 <= 0.5. Every player gets a box around a
/// random Slater point, `m_private` further rows in its own variables, and a
/// copy of each of the `m_shared` shared rows.
RandomAgnep random_agnep(std::uint64_t seed, const std::vector<int>& dims, int m_private,
                         int m_shared);

GnepProblem make_random_agnep(std::uint64_t seed, const std::vector<int>& dims, int m_private,
                              int m_shared);

/// JSON text <-> spec. Errors carry a JSON pointer to the offending value.
AgnepSpec parse_agnep(const std::string& text);
std::string dump_agnep(const AgnepSpec& spec);
AgnepSpec load_agnep_spec(const std::string& path);
GnepProblem load_agnep(const std::string& path);
void save_agnep(const AgnepSpec& spec, const std::string& path);

/// A problem resolved from an identifier, with whatever reference data is known.
struct ProblemInstance {
  std::shared_ptr<GnepProblem> problem;
  std::optional<JointPoint> reference_solution;
  /// Preferred start when the id implies one (Slater point of random instances).
  std::optional<Vec> default_start;
};

/// Accepts "A1", "two-player-quadratic", "four-player-semistable",
/// "random-agnep-<seed>" or a path to an AGNEP JSON file. Throws
/// ContractViolation for unknown ids.
ProblemInstance resolve_problem(const std::string& id);

}  // namespace gnep
