#include "gnep/lcp.hpp"

#include "gnep/cone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gnep {

void StandardLcp::validate() const {
  if (M.rows() != M.cols() || M.rows() != h.size())
    throw ContractViolation("LCP matrix must be square and match h");
  if (!M.allFinite() || !h.allFinite()) throw ContractViolation("LCP data must be finite");
}

void LcpSolveOptions::validate() const {
  if (!(tol > 0)) throw ContractViolation("LCP tol must be positive");
  if (max_iters <= 0) throw ContractViolation("LCP max_iters must be positive");
  if (!(lm_sigma_min > 0) || !(lm_sigma_min <= lm_sigma_max))
    throw ContractViolation("need 0 < lm_sigma_min <= lm_sigma_max");
  if (!(lm_scale > 1)) throw ContractViolation("lm_scale must exceed 1");
  if (!(ipm_centering > 0 && ipm_centering < 1))
    throw ContractViolation("ipm_centering must lie in (0, 1)");
  if (!(ipm_step_fraction > 0 && ipm_step_fraction < 1))
    throw ContractViolation("ipm_step_fraction must lie in (0, 1)");
}

const char* to_string(LcpStatus s) {
  switch (s) {
    case LcpStatus::Converged: return "converged";
    case LcpStatus::NonConvergence: return "non_convergence";
    case LcpStatus::SingularSystem: return "singular_system";
    case LcpStatus::IllConditioned: return "ill_conditioned";
  }
  return "unknown";
}

double fischer_burmeister(double a, double b) { return std::hypot(a, b) - a - b; }

double lcp_residual(const StandardLcp& lcp, const Vec& z) {
  if (z.size() != lcp.dim()) throw ContractViolation("z has wrong dimension");
  if (z.size() == 0) return 0.0;
  const Vec w = lcp.M * z + lcp.h;
  return z.cwiseMin(w).cwiseAbs().maxCoeff();
}

Vec fb_residual(const StandardLcp& lcp, const Vec& z) {
  if (z.size() != lcp.dim()) throw ContractViolation("z has wrong dimension");
  const Vec w = lcp.M * z + lcp.h;
  Vec out(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = fischer_burmeister(z[i], w[i]);
  return out;
}

namespace {

// Partial derivatives of phi_FB at (a, b); the (0, 0) kink uses the limit
// along direction (1, 1).
std::pair<double, double> fb_partials(double a, double b) {
  const double r = std::hypot(a, b);
  if (r == 0.0) {
    const double c = 1.0 / std::sqrt(2.0) - 1.0;
    return {c, c};
  }
  return {a / r - 1.0, b / r - 1.0};
}

// Re-solves the square system on the support read off a converged iterate.
// Kept only when it is no worse, which snaps near-solutions onto the exact
// vertex of the solution set.
void polish(const StandardLcp& lcp, Vec& z, LcpStats& st) {
  const Index k = lcp.dim();
  const Vec w = lcp.M * z + lcp.h;
  std::vector<Index> basis;
  for (Index i = 0; i < k; ++i)
    if (z[i] > w[i]) basis.push_back(i);
  Vec cand = Vec::Zero(k);
  if (!basis.empty()) {
    const Mat Mbb = lcp.M(basis, basis);
    Eigen::FullPivLU<Mat> lu(Mbb);
    if (!lu.isInvertible()) return;
    const Vec zb = lu.solve(-lcp.h(basis));
    if (!zb.allFinite()) return;
    cand(basis) = zb;
  }
  const double r = lcp_residual(lcp, cand);
  if (r <= st.residual) {
    z = cand;
    st.residual = r;
  }
}

struct LmCore {
  std::function<Vec(const Vec&)> residual;
  std::function<Mat(const Vec&)> jacobian;
  std::function<double(const Vec&)> natural;
};

constexpr double kGainAccept = 1e-4;
constexpr double kSigmaCeiling = 1e12;

LcpStats run_lm(const LmCore& core, Vec& y, const LcpSolveOptions& opts) {
  LcpStats st;
  st.method = "lm";
  Vec psi = core.residual(y);
  double f = 0.5 * psi.squaredNorm();
  double sigma = opts.lm_sigma_max;
  bool last_solve_failed = false;
  while (st.iterations < opts.max_iters) {
    st.residual = core.natural(y);
    if (st.residual <= opts.tol) {
      st.status = LcpStatus::Converged;
      return st;
    }
    const Mat J = core.jacobian(y);
    const Vec g = J.transpose() * psi;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-300) break;  // stationary, not a solution
    const Mat JtJ = J.transpose() * J;
    bool accepted = false;
    while (!accepted && st.iterations < opts.max_iters) {
      ++st.iterations;
      const double mu = sigma * std::sqrt(2.0 * f);
      Mat H = JtJ;
      H.diagonal().array() += mu;
      Eigen::LLT<Mat> llt(H);
      Vec d;
      if (llt.info() == Eigen::Success) d = -llt.solve(g);
      last_solve_failed = llt.info() != Eigen::Success || !d.allFinite();
      if (!last_solve_failed) {
        const double pred = f - 0.5 * (psi + J * d).squaredNorm();
        const Vec y_new = y + d;
        const Vec psi_new = core.residual(y_new);
        const double f_new = 0.5 * psi_new.squaredNorm();
        if (pred > 0 && std::isfinite(f_new) && (f - f_new) >= kGainAccept * pred) {
          y = y_new;
          psi = psi_new;
          f = f_new;
          sigma = std::max(sigma / opts.lm_scale, opts.lm_sigma_min);
          accepted = true;
          continue;
        }
      }
      sigma *= opts.lm_scale;
      if (sigma > kSigmaCeiling) {
        st.residual = core.natural(y);
        st.status = last_solve_failed ? LcpStatus::SingularSystem : LcpStatus::NonConvergence;
        return st;
      }
    }
  }
  st.residual = core.natural(y);
  st.status = st.residual <= opts.tol ? LcpStatus::Converged : LcpStatus::NonConvergence;
  return st;
}

}  // namespace

LcpResult solve_lcp_lm(const StandardLcp& lcp, const LcpSolveOptions& opts, const Vec& z0) {
  lcp.validate();
  opts.validate();
  const Index k = lcp.dim();
  LcpResult out;
  if (k == 0 || (lcp.h.array() >= 0.0).all()) {
    out.z = Vec::Zero(k);
    out.stats.method = "lm";
    out.stats.status = LcpStatus::Converged;
    return out;
  }
  out.z = z0.size() == k ? z0 : Vec(Vec::Zero(k));
  LmCore core;
  core.residual = [&](const Vec& z) { return fb_residual(lcp, z); };
  core.jacobian = [&](const Vec& z) {
    const Vec w = lcp.M * z + lcp.h;
    Mat J = lcp.M;
    for (Index i = 0; i < k; ++i) {
      auto [da, db] = fb_partials(z[i], w[i]);
      J.row(i) *= db;
      J(i, i) += da;
    }
    return J;
  };
  core.natural = [&](const Vec& z) { return lcp_residual(lcp, z); };
  out.stats = run_lm(core, out.z, opts);
  if (out.converged()) polish(lcp, out.z, out.stats);
  return out;
}

LcpResult solve_lcp_ipm(const StandardLcp& lcp, const LcpSolveOptions& opts) {
  lcp.validate();
  opts.validate();
  const Index k = lcp.dim();
  LcpResult out;
  out.stats.method = "ipm";
  if (k == 0 || (lcp.h.array() >= 0.0).all()) {
    out.z = Vec::Zero(k);
    out.stats.status = LcpStatus::Converged;
    return out;
  }
  Vec z = Vec::Ones(k);
  Vec w = Vec::Ones(k);
  const double kd = static_cast<double>(k);

  auto max_step = [](const Vec& v, const Vec& dv) {
    double a = 1.0;
    for (Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
    return a;
  };

  LcpStats& st = out.stats;
  for (st.iterations = 0; st.iterations < opts.max_iters; ++st.iterations) {
    st.residual = lcp_residual(lcp, z);
    if (st.residual <= opts.tol) {
      st.status = LcpStatus::Converged;
      out.z = z;
      polish(lcp, out.z, st);
      return out;
    }
    const Vec rp = w - lcp.M * z - lcp.h;
    const double mu = z.dot(w) / kd;
    // (W + Z M) dz = rc + Z rp,  dw = M dz - rp
    Mat K = z.asDiagonal() * lcp.M;
    K.diagonal() += w;
    Eigen::PartialPivLU<Mat> lu(K);
    const double rcond = lu.rcond();
    st.condition_estimate = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    auto solve = [&](const Vec& rc) {
      Vec dz = lu.solve(rc + z.cwiseProduct(rp));
      Vec dw = lcp.M * dz - rp;
      return std::pair{dz, dw};
    };
    auto [dz_aff, dw_aff] = solve(-z.cwiseProduct(w));
    if (!(rcond > 1e-16) || !dz_aff.allFinite()) {
      st.status = LcpStatus::IllConditioned;
      out.z = z;
      return out;
    }
    const double a_aff = std::min(max_step(z, dz_aff), max_step(w, dw_aff));
    const double mu_aff = (z + a_aff * dz_aff).dot(w + a_aff * dw_aff) / kd;
    const double sigma = std::min(opts.ipm_centering, std::pow(mu_aff / mu, 3));
    const Vec rc = Vec::Constant(k, sigma * mu) - z.cwiseProduct(w) -
                   dz_aff.cwiseProduct(dw_aff);
    auto [dz, dw] = solve(rc);
    if (!dz.allFinite()) {
      st.status = LcpStatus::IllConditioned;
      out.z = z;
      return out;
    }
    const double a = std::min(1.0, opts.ipm_step_fraction *
                                       std::min(max_step(z, dz), max_step(w, dw)) /
                                       1.0);
    z += a * dz;
    w += a * dw;
    z = z.cwiseMax(1e-300);
    w = w.cwiseMax(1e-300);
  }
  st.residual = lcp_residual(lcp, z);
  st.status = st.residual <= opts.tol ? LcpStatus::Converged : LcpStatus::NonConvergence;
  out.z = z;
  if (out.converged()) polish(lcp, out.z, st);
  return out;
}

std::vector<Vec> solve_lcp_bruteforce(const StandardLcp& lcp) {
  lcp.validate();
  const Index k = lcp.dim();
  if (k > 12) throw DimensionTooLarge("brute-force LCP enumeration limited to k <= 12");
  constexpr double kSignTol = 1e-10;
  constexpr double kDedupTol = 1e-8;
  std::vector<Vec> sols;
  const double scale = std::max(1.0, lcp.h.size() ? lcp.h.cwiseAbs().maxCoeff() : 0.0);
  for (unsigned long mask = 0; mask < (1ul << k); ++mask) {
    std::vector<Index> basis;
    for (Index i = 0; i < k; ++i)
      if (mask & (1ul << i)) basis.push_back(i);
    const Index b = static_cast<Index>(basis.size());
    Vec z = Vec::Zero(k);
    if (b > 0) {
      Mat Mbb(b, b);
      Vec hb(b);
      for (Index r = 0; r < b; ++r) {
        hb[r] = lcp.h[basis[r]];
        for (Index c = 0; c < b; ++c) Mbb(r, c) = lcp.M(basis[r], basis[c]);
      }
      Eigen::FullPivLU<Mat> lu(Mbb);
      Vec zb;
      if (lu.isInvertible()) {
        zb = lu.solve(-hb);
      } else {
        zb = Eigen::CompleteOrthogonalDecomposition<Mat>(Mbb).solve(-hb);
        if ((Mbb * zb + hb).cwiseAbs().maxCoeff() > 1e-9 * scale) continue;
      }
      for (Index r = 0; r < b; ++r) z[basis[r]] = zb[r];
    }
    if (k > 0 && z.minCoeff() < -kSignTol) continue;
    const Vec w = lcp.M * z + lcp.h;
    bool ok = true;
    for (Index i = 0; i < k && ok; ++i)
      if (!(mask & (1ul << i)) && w[i] < -kSignTol) ok = false;
    if (!ok) continue;
    const bool dup = std::any_of(sols.begin(), sols.end(), [&](const Vec& s) {
      return (s - z).cwiseAbs().maxCoeff() <= kDedupTol;
    });
    if (!dup) sols.push_back(z);
  }
  return sols;
}

PsdSolvability check_psd_solvability(const StandardLcp& lcp) {
  lcp.validate();
  const Index k = lcp.dim();
  if (k > 12) throw DimensionTooLarge("solvability certificate limited to k <= 12");
  PsdSolvability out;
  if (k == 0) {
    out.verdict = PsdVerdict::SolvableCertified;
    return out;
  }
  const Mat S = lcp.M + lcp.M.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * S, Eigen::EigenvaluesOnly);
  out.min_sym_eigenvalue = es.eigenvalues().minCoeff();
  if (out.min_sym_eigenvalue < -1e-10) {
    out.verdict = PsdVerdict::NotPsd;
    return out;
  }
  // For PSD M, u^T M u = 0 iff (M + M^T) u = 0.
  Mat B(2 * k, k);
  B << Mat::Identity(k, k), lcp.M;
  if (auto u = find_cone_descent_ray(S, B, lcp.h)) {
    out.verdict = PsdVerdict::ConditionViolated;
    out.u = *u;
  } else {
    out.verdict = PsdVerdict::SolvableCertified;
  }
  return out;
}

double mixed_lcp_residual(const MixedLcp& lcp, const Vec& u, const Vec& v) {
  double r = 0.0;
  if (lcp.a.size() > 0) r = (lcp.A * u + lcp.B * v + lcp.a).cwiseAbs().maxCoeff();
  if (lcp.c.size() > 0)
    r = std::max(r, v.cwiseMin(lcp.C * u + lcp.D * v + lcp.c).cwiseAbs().maxCoeff());
  return r;
}

MixedLcpResult solve_mixed_lcp_lm(const MixedLcp& lcp, const LcpSolveOptions& opts,
                                  double tikhonov, const Vec& u0, const Vec& v0) {
  opts.validate();
  const Index nu = lcp.a.size();
  const Index nv = lcp.c.size();
  if (lcp.A.rows() != nu || lcp.A.cols() != nu || lcp.B.rows() != nu || lcp.B.cols() != nv ||
      lcp.C.rows() != nv || lcp.C.cols() != nu || lcp.D.rows() != nv || lcp.D.cols() != nv)
    throw ContractViolation("mixed LCP blocks have inconsistent shapes");
  Vec y(nu + nv);
  y.head(nu) = u0.size() == nu ? u0 : Vec(Vec::Zero(nu));
  y.tail(nv) = v0.size() == nv ? v0 : Vec(Vec::Zero(nv));

  LmCore core;
  core.residual = [&](const Vec& yy) {
    const auto u = yy.head(nu);
    const auto v = yy.tail(nv);
    Vec psi(nu + nv);
    psi.head(nu) = lcp.A * u + lcp.B * v + lcp.a;
    const Vec w = lcp.C * u + lcp.D * v + lcp.c;
    for (Index i = 0; i < nv; ++i) psi[nu + i] = fischer_burmeister(v[i], w[i]);
    return psi;
  };
  core.jacobian = [&](const Vec& yy) {
    const auto u = yy.head(nu);
    const auto v = yy.tail(nv);
    const Vec w = lcp.C * u + lcp.D * v + lcp.c;
    Mat J(nu + nv, nu + nv);
    J.topLeftCorner(nu, nu) = lcp.A;
    J.topLeftCorner(nu, nu).diagonal().array() += tikhonov;
    J.topRightCorner(nu, nv) = lcp.B;
    J.bottomLeftCorner(nv, nu) = lcp.C;
    J.bottomRightCorner(nv, nv) = lcp.D;
    for (Index i = 0; i < nv; ++i) {
      auto [da, db] = fb_partials(v[i], w[i]);
      J.row(nu + i) *= db;
      J(nu + i, nu + i) += da;
    }
    return J;
  };
  core.natural = [&](const Vec& yy) {
    return mixed_lcp_residual(lcp, yy.head(nu), yy.tail(nv));
  };
  MixedLcpResult out;
  out.stats = run_lm(core, y, opts);
  out.stats.method = "mixed_lm";
  out.u = y.head(nu);
  out.v = y.tail(nv);
  return out;
}

}  // namespace gnep
