#include "gnep/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gnep {

namespace {

bool all_finite(const Eigen::Ref<const Mat>& a) { return a.allFinite(); }

void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace

GnepProblem::GnepProblem(std::string name, std::vector<int> player_dims,
                         std::vector<int> constraint_dims, GnepOracles oracles,
                         std::vector<int> nonneg_variable_indices,
                         Convexity convexity)
    : name_(std::move(name)),
      player_dims_(std::move(player_dims)),
      constraint_dims_(std::move(constraint_dims)),
      oracles_(std::move(oracles)),
      nonneg_(std::move(nonneg_variable_indices)),
      convexity_(convexity) {
  require(!player_dims_.empty(), "problem needs at least one player");
  require(player_dims_.size() == constraint_dims_.size(),
          "player_dims and constraint_dims differ in length");
  for (int d : player_dims_) require(d > 0, "player dimension must be positive");
  for (int d : constraint_dims_) require(d >= 0, "constraint count must be nonnegative");
  require(static_cast<bool>(oracles_.objective_grad) &&
              static_cast<bool>(oracles_.constraint) &&
              static_cast<bool>(oracles_.constraint_jacobian) &&
              static_cast<bool>(oracles_.lagrangian_hessian),
          "all derivative oracles must be supplied");
  var_offsets_.resize(player_dims_.size());
  con_offsets_.resize(player_dims_.size());
  for (std::size_t v = 0; v < player_dims_.size(); ++v) {
    var_offsets_[v] = n_;
    con_offsets_[v] = m_;
    n_ += player_dims_[v];
    m_ += constraint_dims_[v];
  }
  for (int i : nonneg_) require(i >= 0 && i < n_, "nonneg variable index out of range");
}

int GnepProblem::var_owner(int i) const {
  auto it = std::upper_bound(var_offsets_.begin(), var_offsets_.end(), i);
  return static_cast<int>(it - var_offsets_.begin()) - 1;
}

int GnepProblem::constraint_owner(int j) const {
  for (int v = num_players() - 1; v >= 0; --v)
    if (constraint_dims_[v] > 0 && j >= con_offsets_[v]) return v;
  return -1;
}

void GnepProblem::check_point(const JointPoint& point) const {
  if (point.x.size() != n_ || point.lambda.size() != m_)
    throw ContractViolation("point dimensions (" + std::to_string(point.x.size()) + ", " +
                            std::to_string(point.lambda.size()) + ") do not match problem (" +
                            std::to_string(n_) + ", " + std::to_string(m_) + ")");
}

namespace {

Vec objective_grad_pass(const GnepProblem& p, const Vec& x) {
  Vec out(p.num_vars());
  for (int v = 0; v < p.num_players(); ++v) {
    Vec g = p.oracles().objective_grad(v, x);
    if (g.size() != p.player_dims()[v])
      throw ContractViolation("objective_grad oracle of player " + std::to_string(v) +
                              " returned wrong length");
    if (!all_finite(g)) throw EvaluationError(v, x, "non-finite objective gradient");
    out.segment(p.var_offset(v), g.size()) = g;
  }
  ++p.counters().grad_evals;
  return out;
}

Mat jacobian_pass(const GnepProblem& p, const Vec& x) {
  Mat out(p.num_constraints(), p.num_vars());
  for (int v = 0; v < p.num_players(); ++v) {
    const int mv = p.constraint_dims()[v];
    if (mv == 0) continue;
    Mat J = p.oracles().constraint_jacobian(v, x);
    if (J.rows() != mv || J.cols() != p.num_vars())
      throw ContractViolation("constraint_jacobian oracle of player " + std::to_string(v) +
                              " returned wrong shape");
    if (!all_finite(J)) throw EvaluationError(v, x, "non-finite constraint Jacobian");
    out.middleRows(p.constraint_offset(v), mv) = J;
  }
  ++p.counters().grad_evals;
  return out;
}

Vec stationarity(const GnepProblem& p, const Vec& grad, const Mat& JxG, const Vec& lambda) {
  Vec F = grad;
  for (int v = 0; v < p.num_players(); ++v) {
    const int mv = p.constraint_dims()[v];
    if (mv == 0) continue;
    const int nv = p.player_dims()[v];
    F.segment(p.var_offset(v), nv) +=
        JxG.block(p.constraint_offset(v), p.var_offset(v), mv, nv).transpose() *
        lambda.segment(p.constraint_offset(v), mv);
  }
  return F;
}

}  // namespace

Vec eval_constraints(const GnepProblem& p, const Vec& x) {
  Vec out(p.num_constraints());
  for (int v = 0; v < p.num_players(); ++v) {
    const int mv = p.constraint_dims()[v];
    if (mv == 0) continue;
    Vec g = p.oracles().constraint(v, x);
    if (g.size() != mv)
      throw ContractViolation("constraint oracle of player " + std::to_string(v) +
                              " returned wrong length");
    if (!all_finite(g)) throw EvaluationError(v, x, "non-finite constraint value");
    out.segment(p.constraint_offset(v), mv) = g;
  }
  return out;
}

Mat partial_gradient_blocks(const GnepProblem& p, const Mat& JxG) {
  Mat E = Mat::Zero(p.num_vars(), p.num_constraints());
  for (int v = 0; v < p.num_players(); ++v) {
    const int mv = p.constraint_dims()[v];
    if (mv == 0) continue;
    const int nv = p.player_dims()[v];
    E.block(p.var_offset(v), p.constraint_offset(v), nv, mv) =
        JxG.block(p.constraint_offset(v), p.var_offset(v), mv, nv).transpose();
  }
  return E;
}

FirstOrderData eval_first_order(const GnepProblem& p, const JointPoint& point) {
  p.check_point(point);
  Vec grad = objective_grad_pass(p, point.x);
  Mat JxG = jacobian_pass(p, point.x);
  return {stationarity(p, grad, JxG, point.lambda), eval_constraints(p, point.x)};
}

KktData eval_kkt_data(const GnepProblem& p, const JointPoint& point) {
  p.check_point(point);
  KktData d;
  Vec grad = objective_grad_pass(p, point.x);
  d.JxG = jacobian_pass(p, point.x);
  d.F = stationarity(p, grad, d.JxG, point.lambda);
  d.G = eval_constraints(p, point.x);
  d.E = partial_gradient_blocks(p, d.JxG);
  d.JxF.resize(p.num_vars(), p.num_vars());
  for (int v = 0; v < p.num_players(); ++v) {
    const int nv = p.player_dims()[v];
    Vec lam_v = point.lambda.segment(p.constraint_offset(v), p.constraint_dims()[v]);
    Mat H = p.oracles().lagrangian_hessian(v, lam_v, point.x);
    if (H.rows() != nv || H.cols() != p.num_vars())
      throw ContractViolation("lagrangian_hessian oracle of player " + std::to_string(v) +
                              " returned wrong shape");
    if (!all_finite(H)) throw EvaluationError(v, point.x, "non-finite Lagrangian Hessian");
    d.JxF.middleRows(p.var_offset(v), nv) = H;
  }
  ++p.counters().hess_evals;
  return d;
}

double DerivativeCheckReport::max_error() const {
  double e = 0.0;
  for (const auto* list : {&gradient_error, &jacobian_error, &hessian_error})
    for (double v : *list)
      if (!std::isnan(v)) e = std::max(e, v);
  return e;
}

bool DerivativeCheckReport::passed(double tol) const { return max_error() <= tol; }

namespace {

double rel_error(const Mat& analytic, const Mat& fd) {
  if (analytic.size() == 0) return 0.0;
  if (!analytic.allFinite() || !fd.allFinite()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

DerivativeCheckReport check_derivatives(const GnepProblem& p, const JointPoint& point,
                                        double step) {
  if (!(step > 0.0)) throw ContractViolation("finite-difference step must be positive");
  p.check_point(point);
  const int n = p.num_vars();
  const int N = p.num_players();
  const double inf = std::numeric_limits<double>::infinity();
  const auto& o = p.oracles();
  DerivativeCheckReport rep;
  rep.gradient_error.assign(N, std::numeric_limits<double>::quiet_NaN());
  rep.jacobian_error.assign(N, 0.0);
  rep.hessian_error.assign(N, 0.0);

  auto guarded = [&](int v, const char* what, auto&& fn) -> bool {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      rep.notes.push_back("player " + std::to_string(v) + " " + what + ": " + e.what());
      return false;
    }
  };

  for (int v = 0; v < N; ++v) {
    const int nv = p.player_dims()[v];
    const int off = p.var_offset(v);
    const int mv = p.constraint_dims()[v];
    Vec lam_v = point.lambda.segment(p.constraint_offset(v), mv);

    if (o.objective) {
      bool ok = guarded(v, "gradient", [&] {
        Vec g = o.objective_grad(v, point.x);
        Vec fd(nv);
        for (int i = 0; i < nv; ++i) {
          Vec xp = point.x, xm = point.x;
          xp[off + i] += step;
          xm[off + i] -= step;
          fd[i] = (o.objective(v, xp) - o.objective(v, xm)) / (2.0 * step);
        }
        rep.gradient_error[v] = rel_error(g, fd);
      });
      if (!ok) rep.gradient_error[v] = inf;
    }

    // Player nu's block of F: grad theta^nu + (J_{x^nu} g^nu)^T lambda^nu.
    auto F_block = [&](const Vec& x) {
      Vec f = o.objective_grad(v, x);
      if (mv > 0) f += o.constraint_jacobian(v, x).middleCols(off, nv).transpose() * lam_v;
      return f;
    };

    if (mv > 0) {
      bool ok = guarded(v, "jacobian", [&] {
        Mat J = o.constraint_jacobian(v, point.x);
        Mat fd(mv, n);
        for (int j = 0; j < n; ++j) {
          Vec xp = point.x, xm = point.x;
          xp[j] += step;
          xm[j] -= step;
          fd.col(j) = (o.constraint(v, xp) - o.constraint(v, xm)) / (2.0 * step);
        }
        rep.jacobian_error[v] = rel_error(J, fd);
      });
      if (!ok) rep.jacobian_error[v] = inf;
    }

    bool ok = guarded(v, "hessian", [&] {
      Mat H = o.lagrangian_hessian(v, lam_v, point.x);
      Mat fd(nv, n);
      for (int j = 0; j < n; ++j) {
        Vec xp = point.x, xm = point.x;
        xp[j] += step;
        xm[j] -= step;
        fd.col(j) = (F_block(xp) - F_block(xm)) / (2.0 * step);
      }
      rep.hessian_error[v] = rel_error(H, fd);
    });
    if (!ok) rep.hessian_error[v] = inf;
  }
  return rep;
}

}  // namespace gnep
