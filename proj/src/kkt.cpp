#include "gnep/kkt.hpp"

#include <algorithm>
#include <cmath>

namespace gnep {

namespace {

void require_rho(double rho) {
  if (!(rho > 0.0)) throw ContractViolation("merit parameter rho must be positive");
}

// One-sided derivative of t -> (s + t s')_+ at t = 0.
double plus_part_derivative(double s, double ds) {
  if (s > kMeritTieTol) return ds;
  if (s < -kMeritTieTol) return 0.0;
  return std::max(ds, 0.0);
}

}  // namespace

MeritValue merit_from_data(const Vec& F, const Vec& G, const Vec& lambda, double rho) {
  require_rho(rho);
  MeritValue m;
  m.complementarity_part = std::max(0.0, -lambda.dot(G));
  m.stationarity_part = 0.5 * rho * F.squaredNorm();
  m.infeasibility_part = G.cwiseMax(0.0).sum();
  m.total = m.complementarity_part + m.stationarity_part + m.infeasibility_part;
  return m;
}

MeritValue merit(const GnepProblem& problem, const JointPoint& point, double rho) {
  require_rho(rho);
  FirstOrderData d = eval_first_order(problem, point);
  return merit_from_data(d.F, d.G, point.lambda, rho);
}

double merit_directional(const KktData& d, const JointPoint& point, double rho, const Vec& p,
                         const Vec& q) {
  require_rho(rho);
  if (p.size() != d.F.size() || q.size() != d.G.size())
    throw ContractViolation("direction dimensions do not match the KKT data");
  const Vec JGp = d.JxG * p;
  double out = 0.0;

  const double s0 = -point.lambda.dot(d.G);
  const double ds0 = -q.dot(d.G) - point.lambda.dot(JGp);
  out += plus_part_derivative(s0, ds0);

  out += rho * d.F.dot(d.JxF * p + d.E * q);

  for (Index i = 0; i < d.G.size(); ++i) out += plus_part_derivative(d.G[i], JGp[i]);
  return out;
}

double merit_directional(const GnepProblem& problem, const JointPoint& point, double rho,
                         const Vec& p, const Vec& q) {
  return merit_directional(eval_kkt_data(problem, point), point, rho, p, q);
}

double kkt_residual_from_data(const Vec& F, const Vec& G, const Vec& lambda) {
  double r = 0.0;
  if (F.size() > 0) r = std::max(r, F.cwiseAbs().maxCoeff());
  if (G.size() > 0) {
    r = std::max(r, G.cwiseMax(0.0).maxCoeff());
    r = std::max(r, lambda.cwiseProduct(G).cwiseAbs().maxCoeff());
  }
  return r;
}

double kkt_residual(const GnepProblem& problem, const JointPoint& point) {
  FirstOrderData d = eval_first_order(problem, point);
  return kkt_residual_from_data(d.F, d.G, point.lambda);
}

}  // namespace gnep
