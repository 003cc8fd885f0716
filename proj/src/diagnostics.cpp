#include "gnep/diagnostics.hpp"

#include "gnep/cone.hpp"
#include "gnep/kkt.hpp"
#include "gnep/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace gnep {

namespace {

double min_sym_eig(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

MonotonicityEstimate estimate_monotonicity(const KktData& d) {
  const Index n = d.JxF.rows();
  MonotonicityEstimate out;
  if (n == 0) throw ContractViolation("monotonicity needs at least one variable");
  Eigen::JacobiSVD<Mat> svd(d.JxF);
  const Vec& s = svd.singularValues();
  const double smin = s[n - 1];
  if (!(smin > 1e-12 * std::max(1.0, s[0])))
    throw SingularJxF(smin > 0 ? s[0] / smin : std::numeric_limits<double>::infinity());
  out.alpha = 1.0 / smin;

  const Index m = d.JxG.rows();
  if (m == 0 || d.JxG.cwiseAbs().maxCoeff() == 0.0) {
    out.satisfied = true;
    return out;
  }
  const Mat H = d.JxG * Eigen::PartialPivLU<Mat>(d.JxF).solve(d.E);
  const Mat K = d.JxG * d.JxG.transpose();
  const double hnorm = H.norm();
  const double eig_tol = 1e-12 * std::max(1.0, hnorm);
  out.min_eig_at_zero = min_sym_eig(H);
  if (out.min_eig_at_zero < -eig_tol) {
    out.beta_max = 0.0;
    out.satisfied = false;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> ks(K, Eigen::EigenvaluesOnly);
  double kmin_pos = std::numeric_limits<double>::infinity();
  const double kscale = std::max(1.0, ks.eigenvalues().cwiseAbs().maxCoeff());
  for (Index i = 0; i < m; ++i)
    if (ks.eigenvalues()[i] > 1e-12 * kscale) kmin_pos = std::min(kmin_pos, ks.eigenvalues()[i]);
  double lo = 0.0;
  double hi = hnorm / kmin_pos + 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_sym_eig(H - mid * K) >= -eig_tol)
      lo = mid;
    else
      hi = mid;
  }
  out.beta_max = lo;
  out.satisfied = lo > 0.0;
  return out;
}

MonotonicityEstimate estimate_monotonicity(const GnepProblem& problem, const JointPoint& point) {
  return estimate_monotonicity(eval_kkt_data(problem, point));
}

const char* to_string(IndexClass c) {
  switch (c) {
    case IndexClass::Plus: return "plus";
    case IndexClass::Zero: return "zero";
    case IndexClass::Minus: return "minus";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

IndexClassification classify_indices(const GnepProblem& problem, const JointPoint& point,
                                     double act_tol) {
  if (!(act_tol >= 0)) throw ContractViolation("act_tol must be >= 0");
  problem.check_point(point);
  const Vec G = eval_constraints(problem, point.x);
  IndexClassification out;
  out.act_tol = act_tol;
  auto in_band = [&](double v) { return v > act_tol && v <= 10.0 * act_tol; };
  for (Index i = 0; i < G.size(); ++i) {
    const int row = static_cast<int>(i);
    const double lam = point.lambda[i];
    const double g = G[i];
    IndexClass c;
    if (lam > act_tol) {
      c = IndexClass::Plus;
      out.plus.push_back(row);
      if (std::abs(g) > act_tol)
        out.notes.push_back("row " + std::to_string(row) + ": positive multiplier on inactive constraint");
    } else if (std::abs(g) <= act_tol) {
      c = IndexClass::Zero;
      out.zero.push_back(row);
    } else {
      c = IndexClass::Minus;
      out.minus.push_back(row);
      if (g > act_tol) out.notes.push_back("row " + std::to_string(row) + ": constraint violated");
    }
    if (lam < -act_tol) out.notes.push_back("row " + std::to_string(row) + ": negative multiplier");
    out.classes.push_back(c);
    if (in_band(std::abs(lam)) || in_band(std::abs(g))) out.ambiguous.push_back(row);
  }
  return out;
}

namespace {

struct ConeRows {
  std::vector<Vec> eq;
  std::vector<Vec> ineq;

  Mat stack(const std::vector<Vec>& rows, Index dim) const {
    Mat out(static_cast<Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = rows[i].transpose();
    return out;
  }
};

Vec unit_row(Index dim, Index pos) {
  Vec v = Vec::Zero(dim);
  v[pos] = 1.0;
  return v;
}

// Row of JxG restricted to the owner's variable block, as a vector over x.
Vec own_block_row(const GnepProblem& problem, const Mat& JxG, int row) {
  const int nu = problem.constraint_owner(row);
  const int off = problem.var_offset(nu);
  const int len = problem.player_dims()[static_cast<std::size_t>(nu)];
  Vec v = Vec::Zero(JxG.cols());
  v.segment(off, len) = JxG.row(row).segment(off, len).transpose();
  return v;
}

bool prepare(const GnepProblem& problem, const JointPoint& pair, double act_tol, std::size_t max_zero,
             KktData& d, IndexClassification& cls, RegularityCheck& out) {
  problem.check_point(pair);
  cls = classify_indices(problem, pair, act_tol);
  out.notes = cls.notes;
  if (!cls.ambiguous.empty()) {
    out.verdict = Verdict::Inconclusive;
    out.notes.push_back("index classification is ambiguous at act_tol");
    return false;
  }
  if (cls.zero.size() > max_zero)
    throw DimensionTooLarge("too many degenerate indices (" + std::to_string(cls.zero.size()) + ")");
  d = eval_kkt_data(problem, pair);
  return true;
}

}  // namespace

RegularityCheck check_semistability(const GnepProblem& problem, const JointPoint& pair,
                                    double act_tol) {
  RegularityCheck out;
  KktData d;
  IndexClassification cls;
  if (!prepare(problem, pair, act_tol, 12, d, cls, out)) return out;
  const Index n = problem.num_vars();
  const Index m = problem.num_constraints();
  const Index dim = n + m;

  ConeRows base;
  for (Index i = 0; i < n; ++i) {
    Vec r(dim);
    r << d.JxF.row(i).transpose(), d.E.row(i).transpose();
    base.eq.push_back(r);
  }
  auto g_row = [&](int i) {
    Vec r = Vec::Zero(dim);
    r.head(n) = d.JxG.row(i).transpose();
    return r;
  };
  for (int i : cls.plus) base.eq.push_back(g_row(i));
  for (int i : cls.minus) base.eq.push_back(unit_row(dim, n + i));

  const std::size_t z = cls.zero.size();
  for (unsigned long mask = 0; mask < (1ul << z); ++mask) {
    ConeRows rows = base;
    for (std::size_t k = 0; k < z; ++k) {
      const int i = cls.zero[k];
      if (mask & (1ul << k)) {
        rows.eq.push_back(g_row(i));
        rows.ineq.push_back(unit_row(dim, n + i));
      } else {
        rows.eq.push_back(unit_row(dim, n + i));
        rows.ineq.push_back(-g_row(i));
      }
    }
    ++out.branches;
    ConeAnalysis ca = analyze_cone(rows.stack(rows.eq, dim), rows.stack(rows.ineq, dim));
    if (!ca.trivial) {
      out.verdict = Verdict::False;
      out.witness = ca.ray;
      return out;
    }
  }
  out.verdict = Verdict::True;
  return out;
}

RegularityCheck check_strong_regularity(const GnepProblem& problem, const JointPoint& pair,
                                        double act_tol) {
  RegularityCheck out;
  KktData d;
  IndexClassification cls;
  if (!prepare(problem, pair, act_tol, 8, d, cls, out)) return out;
  const Index n = problem.num_vars();
  const Index m = problem.num_constraints();
  const Index dim = n + m;

  auto active_rows = cls.plus;
  active_rows.insert(active_rows.end(), cls.zero.begin(), cls.zero.end());
  for (int i : active_rows) {
    const Vec own = own_block_row(problem, d.JxG, i);
    if ((d.JxG.row(i).transpose() - own).cwiseAbs().maxCoeff() > 0.0)
      out.notes.push_back("active row " + std::to_string(i) +
                          " depends on other players' variables; only the own block enters");
  }

  ConeRows base;
  const Mat top_x = d.JxF.transpose();
  const Mat top_l = -d.JxG.transpose();
  for (Index i = 0; i < n; ++i) {
    Vec r(dim);
    r << top_x.row(i).transpose(), top_l.row(i).transpose();
    base.eq.push_back(r);
  }
  auto e_row = [&](int i) {
    Vec r = Vec::Zero(dim);
    r.head(n) = own_block_row(problem, d.JxG, i);
    return r;
  };
  for (int i : cls.plus) base.eq.push_back(e_row(i));
  for (int i : cls.minus) base.eq.push_back(unit_row(dim, n + i));

  const std::size_t z = cls.zero.size();
  long total = 1;
  for (std::size_t k = 0; k < z; ++k) total *= 3;
  for (long code = 0; code < total; ++code) {
    ConeRows rows = base;
    long c = code;
    for (std::size_t k = 0; k < z; ++k, c /= 3) {
      const int i = cls.zero[k];
      switch (c % 3) {
        case 0:  // J+
          rows.eq.push_back(e_row(i));
          break;
        case 1:  // J0
          rows.ineq.push_back(-unit_row(dim, n + i));
          rows.ineq.push_back(e_row(i));
          break;
        default:  // J-
          rows.eq.push_back(unit_row(dim, n + i));
      }
    }
    ++out.branches;
    ConeAnalysis ca = analyze_cone(rows.stack(rows.eq, dim), rows.stack(rows.ineq, dim));
    if (!ca.trivial) {
      out.verdict = Verdict::False;
      out.witness = ca.ray;
      return out;
    }
  }
  out.verdict = Verdict::True;
  return out;
}

ErrorBoundProbe probe_error_bound(const GnepProblem& problem, const JointPoint& pair,
                                  double radius, int samples, std::uint64_t seed) {
  if (!(radius > 0)) throw ContractViolation("radius must be positive");
  if (samples < 0) throw ContractViolation("samples must be >= 0");
  problem.check_point(pair);
  const Index n = pair.x.size();
  const Index m = pair.lambda.size();
  const Index dim = n + m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  ErrorBoundProbe out;
  for (int s = 0; s < samples; ++s) {
    Vec dir(dim);
    for (Index i = 0; i < dim; ++i) dir[i] = gauss(rng);
    const double nrm = dir.norm();
    if (nrm == 0.0) {
      ++out.skipped;
      continue;
    }
    dir *= radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim)) / nrm;
    JointPoint z{pair.x + dir.head(n), (pair.lambda + dir.tail(m)).cwiseMax(0.0)};
    const double num = (z.x - pair.x).norm() + (z.lambda - pair.lambda).norm();
    double den;
    try {
      FirstOrderData fo = eval_first_order(problem, z);
      den = fo.F.norm() + (m > 0 ? z.lambda.cwiseMin(-fo.G).norm() : 0.0);
    } catch (const Error&) {
      ++out.skipped;
      continue;
    }
    if (!(den >= 1e-14)) {
      ++out.skipped;
      if (num > 0) ++out.unbounded;
      continue;
    }
    ++out.used;
    out.c_estimate = std::max(out.c_estimate, num / den);
  }
  return out;
}

namespace {

double pair_distance(const JointPoint& a, const JointPoint& b) {
  return std::sqrt((a.x - b.x).squaredNorm() + (a.lambda - b.lambda).squaredNorm());
}

// Smallest distance to `pair` over all solutions of the linearized system at
// sub.base_point, found by enumerating which rows are tight.
std::optional<double> closest_by_patterns(const MixedLcSubproblem& sub, const JointPoint& pair) {
  const Index n = sub.n();
  const Index m = sub.m();
  const Vec& x = sub.base_point.x;
  const Vec El = sub.E * sub.base_point.lambda;
  std::optional<double> best;
  constexpr double kFeasTol = 1e-9;
  for (unsigned long mask = 0; mask < (1ul << m); ++mask) {
    std::vector<int> act;
    for (Index i = 0; i < m; ++i)
      if (mask & (1ul << i)) act.push_back(static_cast<int>(i));
    const Index a = static_cast<Index>(act.size());
    // unknowns y = (p, lt_A): JxF p + E_A lt_A = El - F,  JxG_A p = -G_A
    Mat K = Mat::Zero(n + a, n + a);
    Vec r(n + a);
    K.topLeftCorner(n, n) = sub.JxF;
    K.topRightCorner(n, a) = sub.E(Eigen::all, act);
    K.bottomLeftCorner(a, n) = sub.JxG(act, Eigen::all);
    r.head(n) = El - sub.F;
    r.tail(a) = -sub.G(act);
    Vec target(n + a);
    target.head(n) = pair.x - x;
    target.tail(a) = pair.lambda(act);
    Eigen::FullPivLU<Mat> lu(K);
    Vec y;
    if (lu.isInvertible()) {
      y = lu.solve(r);
    } else {
      y = target + Eigen::CompleteOrthogonalDecomposition<Mat>(K).solve(r - K * target);
      if ((K * y - r).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, r.cwiseAbs().maxCoeff()))
        continue;
    }
    const Vec p = y.head(n);
    Vec lt = Vec::Zero(m);
    for (Index i = 0; i < a; ++i) lt[act[i]] = y[n + i];
    if (m > 0 && lt.minCoeff() < -kFeasTol) continue;
    const Vec slack = -sub.G - sub.JxG * p;
    bool ok = true;
    for (Index i = 0; i < m && ok; ++i)
      if (!(mask & (1ul << i)) && slack[i] < -kFeasTol) ok = false;
    if (!ok) continue;
    const double dist = pair_distance({x + p, lt.cwiseMax(0.0)}, pair);
    if (!best || dist < *best) best = dist;
  }
  return best;
}

}  // namespace

std::vector<HemistabilitySample> check_hemistability_sample(
    const GnepProblem& problem, const JointPoint& pair,
    const std::vector<JointPoint>& perturbations, double delta) {
  if (!(delta > 0)) throw ContractViolation("delta must be positive");
  problem.check_point(pair);
  std::vector<HemistabilitySample> out;
  for (const JointPoint& z : perturbations) {
    HemistabilitySample s;
    s.perturbation = z;
    s.distance = std::numeric_limits<double>::infinity();
    try {
      problem.check_point(z);
      const MixedLcSubproblem sub = assemble(problem, z);
      try {
        SubproblemSolution sol = solve_subproblem(problem, sub, 1e-10);
        s.distance = pair_distance({z.x + sol.p, z.lambda + sol.q}, pair);
      } catch (const Error& e) {
        s.note = std::string("subproblem solver: ") + e.what();
      }
      if (s.distance > delta && sub.m() <= 12) {
        if (auto best = closest_by_patterns(sub, pair)) s.distance = std::min(s.distance, *best);
        else if (!std::isfinite(s.distance)) s.note += s.note.empty() ? "no solution" : "; no solution";
      }
    } catch (const Error& e) {
      s.failed = true;
      s.note = e.what();
    }
    s.nearby_solution = s.distance <= delta;
    out.push_back(std::move(s));
  }
  return out;
}

DiagnosticsReport diagnose(const GnepProblem& problem, const JointPoint& pair,
                           const DiagnosticsOptions& opts) {
  DiagnosticsReport rep;
  rep.kkt_residual = kkt_residual(problem, pair);
  try {
    rep.monotonicity = estimate_monotonicity(problem, pair);
  } catch (const Error& e) {
    rep.monotonicity_error = e.what();
  }
  rep.classification = classify_indices(problem, pair, opts.act_tol);
  auto guarded = [&](auto&& fn) {
    try {
      return fn();
    } catch (const DimensionTooLarge& e) {
      RegularityCheck r;
      r.notes.push_back(e.what());
      return r;
    }
  };
  rep.semistable = guarded([&] { return check_semistability(problem, pair, opts.act_tol); });
  rep.strongly_regular =
      guarded([&] { return check_strong_regularity(problem, pair, opts.act_tol); });
  rep.consistent = !(rep.strongly_regular.verdict == Verdict::True &&
                     rep.semistable.verdict != Verdict::True);
  if (opts.error_bound_samples > 0)
    rep.error_bound = probe_error_bound(problem, pair, opts.error_bound_radius,
                                        opts.error_bound_samples, opts.seed);
  if (opts.hemistability_samples > 0) {
    std::mt19937_64 rng(opts.seed + 1);
    std::normal_distribution<double> gauss;
    std::vector<JointPoint> perts;
    for (int s = 0; s < opts.hemistability_samples; ++s) {
      Vec dx(pair.x.size());
      for (Index i = 0; i < dx.size(); ++i) dx[i] = gauss(rng);
      if (dx.norm() > 0) dx *= opts.hemistability_radius / dx.norm();
      perts.push_back({pair.x + dx, pair.lambda});
    }
    rep.hemistability = check_hemistability_sample(problem, pair, perts, opts.hemistability_delta);
  }
  return rep;
}

}  // namespace gnep
