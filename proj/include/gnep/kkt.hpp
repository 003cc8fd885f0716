#pragma once

#include "gnep/model.hpp"

namespace gnep {

/// Phi_rho(x, lambda) = (-lambda^T G)_+ + rho/2 |F|^2 + sum_i (g_i)_+, itemized.
struct MeritValue {
  double total = 0.0;
  double complementarity_part = 0.0;
  double stationarity_part = 0.0;
  double infeasibility_part = 0.0;
};

/// Tie threshold for plus-parts in the directional derivative.
inline constexpr double kMeritTieTol = 1e-12;

MeritValue merit_from_data(const Vec& F, const Vec& G, const Vec& lambda, double rho);

MeritValue merit(const GnepProblem& problem, const JointPoint& point, double rho);

/// Exact one-sided directional derivative of Phi_rho at `point` along (p, q),
/// computed from already-evaluated KKT data at that point.
double merit_directional(const KktData& data, const JointPoint& point, double rho,
                         const Vec& p, const Vec& q);

double merit_directional(const GnepProblem& problem, const JointPoint& point, double rho,
                         const Vec& p, const Vec& q);

/// max{ |F|_inf, |(G)_+|_inf, max_i |lambda_i g_i| }.
double kkt_residual_from_data(const Vec& F, const Vec& G, const Vec& lambda);

double kkt_residual(const GnepProblem& problem, const JointPoint& point);

}  // namespace gnep
