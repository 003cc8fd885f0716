#include "gnep/bench.hpp"
#include "gnep/kkt.hpp"
#include "gnep/lcp.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace gnep {

void SmmOptions::validate() const {
  if (!(tol > 0)) throw ContractViolation("tol must be positive");
  if (max_iters < 0) throw ContractViolation("max_iters must be >= 0");
  if (max_halvings < 0) throw ContractViolation("max_halvings must be >= 0");
  if (!(armijo > 0 && armijo < 1)) throw ContractViolation("armijo must lie in (0, 1)");
}

namespace {

Vec psi(const Vec& F, const Vec& G, const Vec& lambda) {
  Vec out(F.size() + G.size());
  out.head(F.size()) = F;
  for (Index i = 0; i < G.size(); ++i) out[F.size() + i] = fischer_burmeister(lambda[i], -G[i]);
  return out;
}

double smm_residual(const Vec& F, const Vec& G, const Vec& lambda) {
  double r = kkt_residual_from_data(F, G, lambda);
  if (lambda.size() > 0) r = std::max(r, (-lambda).cwiseMax(0.0).maxCoeff());
  return r;
}

}  // namespace

SolveResult solve_smm_baseline(const GnepProblem& problem, const Vec& x0, const Vec& lambda0,
                               const SmmOptions& opts) {
  opts.validate();
  SolveResult res;
  res.point = {x0, lambda0};
  problem.check_point(res.point);
  if (lambda0.size() > 0 && lambda0.minCoeff() < 0)
    throw ContractViolation("initial multipliers must be nonnegative");
  problem.reset_counters();
  SolveTrace& trace = res.trace;
  trace.solver = "smm";
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const Index n = problem.num_vars();
  const Index m = problem.num_constraints();

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.point = res.point;
    KktData d;
    try {
      d = eval_kkt_data(problem, res.point);
    } catch (const Error& e) {
      rec.counters = problem.counters();
      rec.kkt_residual = std::numeric_limits<double>::infinity();
      trace.records.push_back(rec);
      trace.status = SolveStatus::EvaluationFailed;
      trace.message = e.what();
      break;
    }
    const Vec& lam = res.point.lambda;
    const Vec P = psi(d.F, d.G, lam);
    const double f = 0.5 * P.squaredNorm();
    rec.merit.total = f;
    rec.kkt_residual = smm_residual(d.F, d.G, lam);
    auto finish = [&](SolveStatus s, std::string msg = {}) {
      rec.counters = problem.counters();
      trace.records.push_back(rec);
      trace.status = s;
      trace.message = std::move(msg);
    };
    if (rec.kkt_residual <= opts.tol) {
      finish(SolveStatus::Converged);
      break;
    }
    if (k >= opts.max_iters) {
      finish(SolveStatus::MaxIters);
      break;
    }
    if (opts.time_limit_s > 0 && elapsed_s() > opts.time_limit_s) {
      finish(SolveStatus::TimeLimit);
      break;
    }

    // Element of the generalized Jacobian; the kink uses direction (1, 1).
    Mat J = Mat::Zero(n + m, n + m);
    J.topLeftCorner(n, n) = d.JxF;
    J.topRightCorner(n, m) = d.E;
    for (Index i = 0; i < m; ++i) {
      const double a = lam[i];
      const double b = -d.G[i];
      const double r = std::hypot(a, b);
      const double da = r > 0 ? a / r - 1.0 : 1.0 / std::sqrt(2.0) - 1.0;
      const double db = r > 0 ? b / r - 1.0 : 1.0 / std::sqrt(2.0) - 1.0;
      J.row(n + i).head(n) = -db * d.JxG.row(i);
      J(n + i, n + i) = da;
    }
    const Vec grad = J.transpose() * P;
    Eigen::PartialPivLU<Mat> lu(J);
    Vec dir = lu.solve(-P);
    const bool newton_ok = dir.allFinite() && lu.rcond() > 1e-14 &&
                           grad.dot(dir) <= -1e-8 * std::pow(dir.norm(), 2.1);
    if (!newton_ok) dir = -grad;
    const double slope = grad.dot(dir);

    std::optional<JointPoint> next;
    double tau = 1.0;
    int j = 0;
    for (; j <= opts.max_halvings; ++j, tau *= 0.5) {
      JointPoint trial{res.point.x + tau * dir.head(n), lam + tau * dir.tail(m)};
      try {
        FirstOrderData fo = eval_first_order(problem, trial);
        const double ft = 0.5 * psi(fo.F, fo.G, trial.lambda).squaredNorm();
        if (std::isfinite(ft) && ft <= f + opts.armijo * tau * slope) {
          next = std::move(trial);
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!next) {
      finish(SolveStatus::LineSearchFailed, "Armijo search failed");
      break;
    }
    rec.step_length = tau;
    rec.halvings = j;
    rec.counters = problem.counters();
    trace.records.push_back(rec);
    res.point = std::move(*next);
  }
  trace.counters = problem.counters();
  trace.elapsed_ms = 1e3 * elapsed_s();
  return res;
}

}  // namespace gnep
