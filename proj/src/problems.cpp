#include "gnep/problems.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>

namespace gnep {

void InternetSwitchingParams::validate() const {
  const std::size_t N = l.size();
  if (N == 0) throw ContractViolation("internet switching needs at least one player");
  if (L.size() != N || informed.size() != N)
    throw ContractViolation("l, L and informed must have one entry per player");
  if (!(B > 0)) throw ContractViolation("buffer capacity B must be positive");
  for (std::size_t v = 0; v < N; ++v) {
    if (!(l[v] >= 0)) throw ContractViolation("lower bounds must be nonnegative");
    if (!(L[v] >= l[v])) throw ContractViolation("upper bound below lower bound");
  }
  if (std::accumulate(l.begin(), l.end(), 0.0) > B)
    throw ContractViolation("sum of lower bounds exceeds B");
}

InternetSwitchingParams a1_params() {
  InternetSwitchingParams p;
  p.B = 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  p.l = {0.3};
  p.L = {0.5};
  p.informed = {false};
  for (int v = 1; v < 10; ++v) {
    p.l.push_back(0.01);
    p.L.push_back(inf);
    p.informed.push_back(true);
  }
  return p;
}

GnepProblem make_internet_switching(const InternetSwitchingParams& params,
                                    const std::string& name) {
  params.validate();
  const int N = params.num_players();
  std::vector<int> cdims(static_cast<std::size_t>(N));
  std::vector<int> nonneg;
  for (int v = 0; v < N; ++v) {
    cdims[v] = 1 + (std::isfinite(params.L[v]) ? 1 : 0) + (params.informed[v] ? 1 : 0);
    if (params.l[v] == 0.0) nonneg.push_back(v);
  }
  const InternetSwitchingParams p = params;
  auto total = [](const Vec& x) {
    const double S = x.sum();
    if (!(S > 0)) throw DomainError("internet switching is undefined for S <= 0");
    return S;
  };

  GnepOracles o;
  o.objective = [p, total](int v, const Vec& x) {
    const double S = total(x);
    return -x[v] / S + x[v] / p.B;
  };
  o.objective_grad = [p, total](int v, const Vec& x) {
    const double S = total(x);
    return Vec(Vec::Constant(1, 1.0 / p.B - (S - x[v]) / (S * S)));
  };
  o.constraint = [p](int v, const Vec& x) {
    Vec g(1 + (std::isfinite(p.L[v]) ? 1 : 0) + (p.informed[v] ? 1 : 0));
    Index r = 0;
    g[r++] = p.l[v] - x[v];
    if (std::isfinite(p.L[v])) g[r++] = x[v] - p.L[v];
    if (p.informed[v]) g[r++] = x.sum() - p.B;
    return g;
  };
  o.constraint_jacobian = [p, N](int v, const Vec&) {
    Mat J = Mat::Zero(1 + (std::isfinite(p.L[v]) ? 1 : 0) + (p.informed[v] ? 1 : 0), N);
    Index r = 0;
    J(r++, v) = -1.0;
    if (std::isfinite(p.L[v])) J(r++, v) = 1.0;
    if (p.informed[v]) J.row(r++).setOnes();
    return J;
  };
  o.lagrangian_hessian = [total, N](int v, const Vec&, const Vec& x) {
    const double S = total(x);
    const double S3 = S * S * S;
    Mat H = Mat::Constant(1, N, (S - 2.0 * x[v]) / S3);
    H(0, v) = 2.0 * (S - x[v]) / S3;
    return H;
  };
  return GnepProblem(name, std::vector<int>(static_cast<std::size_t>(N), 1), cdims, std::move(o),
                     nonneg, Convexity::PlayerConvex);
}

JointPoint internet_switching_solution(const InternetSwitchingParams& params) {
  params.validate();
  const int N = params.num_players();
  double a = 0.0;
  double lsum = 0.0;
  int N1 = 0;
  for (int v = 0; v < N; ++v) {
    lsum += params.l[v];
    if (params.informed[v]) {
      ++N1;
      if (std::isfinite(params.L[v]))
        throw PreconditionError("informed players must have L = +inf");
    } else {
      a += params.l[v];
    }
  }
  const double B = params.B;
  if (N1 == 0) throw PreconditionError("at least one informed player is required");
  if (!(lsum < B)) throw PreconditionError("strict feasibility sum(l) < B fails");
  const double n1 = N1;
  const double t = 2.0 * a * n1 + B - B * n1;
  const double disc = t * t - 4.0 * n1 * n1 * (a * a - B * a);
  if (!(disc >= 0)) throw PreconditionError("discriminant (2aN1 + B - B N1)^2 - 4N1^2(a^2 - Ba) < 0");
  const double b = std::sqrt(disc);
  const double xi = (B * n1 - B - 2.0 * a * n1 + b) / (2.0 * n1 * n1);
  const double s = a + n1 * xi;
  if (!(s < B)) throw PreconditionError("capacity must be inactive: s < B fails");

  const GnepProblem shape = make_internet_switching(params);
  JointPoint out{Vec::Zero(N), Vec::Zero(shape.num_constraints())};
  for (int v = 0; v < N; ++v) {
    if (params.informed[v]) {
      if (!(xi > params.l[v]))
        throw PreconditionError("informed solution must exceed l_nu: x > l_" + std::to_string(v) +
                                " fails");
      out.x[v] = xi;
    } else {
      out.x[v] = params.l[v];
      if (!(params.l[v] <= params.L[v]))
        throw PreconditionError("l_nu <= L_nu fails for player " + std::to_string(v));
      const double lam = 1.0 / B - (s - params.l[v]) / (s * s);
      if (!(lam > 0))
        throw PreconditionError("multiplier 1/B - (s - l_nu)/s^2 > 0 fails for player " +
                                std::to_string(v));
      out.lambda[shape.constraint_offset(v)] = lam;
    }
  }
  return out;
}

GnepProblem make_two_player_quadratic() {
  AgnepSpec s;
  s.dims = {1, 1};
  s.c = {Vec::Zero(1), Vec::Zero(1)};
  s.Q.resize(2);
  s.Q[0][0] = Mat::Constant(1, 1, 1.0);
  s.Q[0][1] = Mat::Constant(1, 1, 1.0);
  s.Q[1][1] = Mat::Constant(1, 1, 1.0);
  s.Q[1][0] = Mat::Constant(1, 1, 2.0);
  return make_agnep(s, "two-player-quadratic");
}

GnepProblem make_four_player_semistable() {
  GnepOracles o;
  o.objective = [](int v, const Vec& x) {
    switch (v) {
      case 0: return std::pow(x[0], 4) / 12.0 + x[0] * x[1];
      case 1: return 0.5 * std::pow(x[0] + x[1] - x[2], 2);
      case 2: return x[2] * x[3];
      default: return 0.5 * std::pow(x[2] + x[3] - 1.0, 2);
    }
  };
  o.objective_grad = [](int v, const Vec& x) {
    double g;
    switch (v) {
      case 0: g = x[0] * x[0] * x[0] / 3.0 + x[1]; break;
      case 1: g = x[0] + x[1] - x[2]; break;
      case 2: g = x[3]; break;
      default: g = x[2] + x[3] - 1.0;
    }
    return Vec(Vec::Constant(1, g));
  };
  o.constraint = [](int v, const Vec& x) -> Vec {
    if (v == 0) return Vec::Constant(1, -x[0]);
    if (v == 2) return Vec::Constant(1, -x[2]);
    return Vec(0);
  };
  o.constraint_jacobian = [](int v, const Vec&) {
    if (v != 0 && v != 2) return Mat(0, 4);
    Mat J = Mat::Zero(1, 4);
    J(0, v) = -1.0;
    return J;
  };
  o.lagrangian_hessian = [](int v, const Vec&, const Vec& x) {
    Mat H = Mat::Zero(1, 4);
    switch (v) {
      case 0: H << x[0] * x[0], 1, 0, 0; break;
      case 1: H << 1, 1, -1, 0; break;
      case 2: H << 0, 0, 0, 1; break;
      default: H << 0, 0, 1, 1;
    }
    return H;
  };
  return GnepProblem("four-player-semistable", {1, 1, 1, 1}, {1, 0, 1, 0}, std::move(o), {0, 2},
                     Convexity::Unknown);
}

JointPoint four_player_semistable_solution() {
  JointPoint p;
  p.x = Vec(4);
  p.x << 0, 0, 0, 1;
  p.lambda = Vec(2);
  p.lambda << 0, 1;
  return p;
}

int AgnepSpec::num_vars() const { return std::accumulate(dims.begin(), dims.end(), 0); }

void AgnepSpec::validate() const {
  const int N = static_cast<int>(dims.size());
  if (N == 0) throw SchemaError("/players", "at least one player is required");
  const int n = num_vars();
  auto player = [](int v) { return "/players/" + std::to_string(v); };
  if (static_cast<int>(c.size()) != N || static_cast<int>(Q.size()) != N)
    throw SchemaError("/players", "c and Q must be given for every player");
  for (int v = 0; v < N; ++v) {
    if (dims[v] <= 0) throw SchemaError(player(v) + "/n", "must be a positive integer");
    if (c[v].size() != dims[v]) throw SchemaError(player(v) + "/c", "length must equal n");
    auto it = Q[v].find(v);
    if (it == Q[v].end())
      throw SchemaError(player(v) + "/Q/" + std::to_string(v), "own block is required");
    for (const auto& [mu, blk] : Q[v]) {
      const std::string ptr = player(v) + "/Q/" + std::to_string(mu);
      if (mu < 0 || mu >= N) throw SchemaError(ptr, "no such player");
      if (blk.rows() != dims[v] || blk.cols() != dims[mu])
        throw SchemaError(ptr, "block must be n_nu x n_mu");
      if (!blk.allFinite()) throw SchemaError(ptr, "entries must be finite");
    }
    const Mat& own = it->second;
    const double scale = std::max(1.0, own.cwiseAbs().maxCoeff());
    if ((own - own.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw SchemaError(player(v) + "/Q/" + std::to_string(v), "own block must be symmetric");
  }
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& cb = constraints[k];
    const std::string ptr = "/constraints/" + std::to_string(k);
    if (cb.owner < 0 || cb.owner >= N) throw SchemaError(ptr + "/owner", "no such player");
    if (cb.A.cols() != n) throw SchemaError(ptr + "/A", "rows must have length n");
    if (cb.A.rows() != cb.b.size()) throw SchemaError(ptr + "/b", "length must equal rows of A");
    if (!cb.A.allFinite()) throw SchemaError(ptr + "/A", "entries must be finite");
    if (!cb.b.allFinite()) throw SchemaError(ptr + "/b", "entries must be finite");
  }
  for (std::size_t k = 0; k < nonneg_vars.size(); ++k)
    if (nonneg_vars[k] < 0 || nonneg_vars[k] >= n)
      throw SchemaError("/nonneg_vars/" + std::to_string(k), "index out of range");
}

Mat AgnepSpec::jacobian() const {
  const int n = num_vars();
  std::vector<int> off(dims.size(), 0);
  for (std::size_t v = 1; v < dims.size(); ++v) off[v] = off[v - 1] + dims[v - 1];
  Mat J = Mat::Zero(n, n);
  for (std::size_t v = 0; v < dims.size(); ++v)
    for (const auto& [mu, blk] : Q[v]) J.block(off[v], off[mu], dims[v], dims[mu]) = blk;
  return J;
}

GnepProblem make_agnep(const AgnepSpec& spec, const std::string& name) {
  spec.validate();
  const int N = static_cast<int>(spec.dims.size());
  const int n = spec.num_vars();
  std::vector<int> off(static_cast<std::size_t>(N), 0);
  for (int v = 1; v < N; ++v) off[v] = off[v - 1] + spec.dims[v - 1];

  // Rows grouped by owner, keeping file order within each owner.
  std::vector<Mat> A(static_cast<std::size_t>(N));
  std::vector<Vec> b(static_cast<std::size_t>(N));
  std::vector<int> cdims(static_cast<std::size_t>(N), 0);
  for (int v = 0; v < N; ++v) {
    Index rows = 0;
    for (const auto& cb : spec.constraints)
      if (cb.owner == v) rows += cb.A.rows();
    A[v].resize(rows, n);
    b[v].resize(rows);
    Index r = 0;
    for (const auto& cb : spec.constraints) {
      if (cb.owner != v) continue;
      A[v].middleRows(r, cb.A.rows()) = cb.A;
      b[v].segment(r, cb.A.rows()) = cb.b;
      r += cb.A.rows();
    }
    cdims[v] = static_cast<int>(rows);
  }
  const Mat J = spec.jacobian();
  std::vector<Vec> c = spec.c;
  std::vector<int> dims = spec.dims;

  GnepOracles o;
  o.objective = [J, c, off, dims](int v, const Vec& x) {
    const auto xv = x.segment(off[v], dims[v]);
    const Mat Jv = J.middleRows(off[v], dims[v]);
    const Mat own = Jv.middleCols(off[v], dims[v]);
    return 0.5 * xv.dot(own * xv) + xv.dot(Jv * x - own * xv) + c[v].dot(xv);
  };
  o.objective_grad = [J, c, off, dims](int v, const Vec& x) {
    return Vec(J.middleRows(off[v], dims[v]) * x + c[v]);
  };
  o.constraint = [A, b](int v, const Vec& x) { return Vec(A[v] * x - b[v]); };
  o.constraint_jacobian = [A](int v, const Vec&) { return A[v]; };
  o.lagrangian_hessian = [J, off, dims](int v, const Vec&, const Vec&) {
    return Mat(J.middleRows(off[v], dims[v]));
  };
  return GnepProblem(name, spec.dims, cdims, std::move(o), spec.nonneg_vars,
                     Convexity::PlayerConvex);
}

RandomAgnep random_agnep(std::uint64_t seed, const std::vector<int>& dims, int m_private,
                         int m_shared) {
  if (dims.empty()) throw ContractViolation("random AGNEP needs at least one player");
  for (int d : dims)
    if (d <= 0) throw ContractViolation("player dimensions must be positive");
  if (m_private < 0 || m_shared < 0) throw ContractViolation("row counts must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto gauss_mat = [&](Index r, Index c) {
    Mat M(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) M(i, j) = gauss(rng);
    return M;
  };

  const int N = static_cast<int>(dims.size());
  std::vector<int> off(static_cast<std::size_t>(N), 0);
  for (int v = 1; v < N; ++v) off[v] = off[v - 1] + dims[v - 1];
  const int n = off.back() + dims.back();

  Mat D = Mat::Zero(n, n);
  for (int v = 0; v < N; ++v) {
    const int d = dims[v];
    Eigen::HouseholderQR<Mat> qr(gauss_mat(d, d));
    const Mat U = qr.householderQ();
    Vec ev(d);
    for (int i = 0; i < d; ++i) ev[i] = 1.0 + 2.0 * unif(rng);
    Mat blk = U * ev.asDiagonal() * U.transpose();
    blk = 0.5 * (blk + blk.transpose()).eval();
    D.block(off[v], off[v], d, d) = blk;
  }
  Mat R = gauss_mat(n, n);
  Mat S = 0.5 * (R - R.transpose());
  for (int v = 0; v < N; ++v) S.block(off[v], off[v], dims[v], dims[v]).setZero();
  if (S.cwiseAbs().maxCoeff() > 0) {
    Eigen::JacobiSVD<Mat> svd(S);
    S *= 0.5 / svd.singularValues()[0];
  }
  const Mat J = D + S;

  RandomAgnep out;
  AgnepSpec& s = out.spec;
  s.dims = dims;
  s.Q.resize(static_cast<std::size_t>(N));
  for (int v = 0; v < N; ++v) {
    Vec cv(dims[v]);
    for (int i = 0; i < dims[v]; ++i) cv[i] = gauss(rng);
    s.c.push_back(cv);
    for (int mu = 0; mu < N; ++mu) {
      if (mu != v && N > 1 && S.block(off[v], off[mu], dims[v], dims[mu]).cwiseAbs().maxCoeff() == 0)
        continue;
      s.Q[v][mu] = J.block(off[v], off[mu], dims[v], dims[mu]);
    }
    s.Q[v][v] = D.block(off[v], off[v], dims[v], dims[v]);
  }

  Vec xs(n);
  for (int i = 0; i < n; ++i) xs[i] = 2.0 * unif(rng) - 1.0;
  out.slater_point = xs;

  Mat shared = gauss_mat(m_shared, n);
  Vec shared_b(m_shared);
  for (int k = 0; k < m_shared; ++k) shared_b[k] = shared.row(k).dot(xs) + 0.1 + unif(rng);

  for (int v = 0; v < N; ++v) {
    const int d = dims[v];
    AgnepSpec::ConstraintBlock cb;
    cb.owner = v;
    const int rows = 2 * d + m_private + m_shared;
    cb.A = Mat::Zero(rows, n);
    cb.b = Vec::Zero(rows);
    int r = 0;
    for (int i = 0; i < d; ++i) {
      const int j = off[v] + i;
      const double u = 0.5 + unif(rng);
      cb.A(r, j) = 1.0;
      cb.b[r++] = xs[j] + u;
      cb.A(r, j) = -1.0;
      cb.b[r++] = -(xs[j] - u);
    }
    for (int k = 0; k < m_private; ++k) {
      const Mat a = gauss_mat(1, d);
      cb.A.block(r, off[v], 1, d) = a;
      cb.b[r++] = (a * xs.segment(off[v], d))(0) + 0.1 + unif(rng);
    }
    for (int k = 0; k < m_shared; ++k) {
      cb.A.row(r) = shared.row(k);
      cb.b[r++] = shared_b[k];
    }
    s.constraints.push_back(std::move(cb));
  }
  return out;
}

GnepProblem make_random_agnep(std::uint64_t seed, const std::vector<int>& dims, int m_private,
                              int m_shared) {
  return make_agnep(random_agnep(seed, dims, m_private, m_shared).spec,
                    "random-agnep-" + std::to_string(seed));
}

ProblemInstance resolve_problem(const std::string& id) {
  ProblemInstance out;
  if (id == "A1") {
    const auto p = a1_params();
    out.problem = std::make_shared<GnepProblem>(make_internet_switching(p, "A1"));
    out.reference_solution = internet_switching_solution(p);
  } else if (id == "two-player-quadratic") {
    out.problem = std::make_shared<GnepProblem>(make_two_player_quadratic());
    out.reference_solution = JointPoint{Vec::Zero(2), Vec(0)};
  } else if (id == "four-player-semistable") {
    out.problem = std::make_shared<GnepProblem>(make_four_player_semistable());
    out.reference_solution = four_player_semistable_solution();
  } else if (id.rfind("random-agnep-", 0) == 0) {
    const std::string tail = id.substr(13);
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
      throw ContractViolation("random-agnep id needs a numeric seed: " + id);
    const std::uint64_t seed = std::stoull(tail);
    RandomAgnep r = random_agnep(seed, {2, 2, 2}, 1, 0);
    out.problem = std::make_shared<GnepProblem>(make_agnep(r.spec, id));
    out.default_start = r.slater_point;
  } else if (std::filesystem::exists(id)) {
    out.problem = std::make_shared<GnepProblem>(load_agnep(id));
  } else {
    throw ContractViolation("unknown problem id: " + id);
  }
  return out;
}

}  // namespace gnep
