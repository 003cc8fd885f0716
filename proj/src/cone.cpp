#include "gnep/cone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace gnep {

Mat null_space(const Mat& A, Index cols, double rel_tol) {
  if (A.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double thr = rel_tol * std::max(1.0, s.size() > 0 ? s[0] : 0.0);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

namespace {

// Drops numerically zero rows and scales the rest to unit length.
Mat normalized_rows(const Mat& C) {
  std::vector<Index> keep;
  for (Index i = 0; i < C.rows(); ++i)
    if (C.row(i).norm() > 1e-12) keep.push_back(i);
  Mat out(static_cast<Index>(keep.size()), C.cols());
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.row(static_cast<Index>(k)) = C.row(keep[k]) / C.row(keep[k]).norm();
  return out;
}

double binomial(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Calls `visit` with every extreme ray w (|w|_2 = 1) of the pointed cone
// {w : C w >= 0}; stops early when `visit` returns true.
bool enumerate_extreme_rays(const Mat& C, double tol, long max_subsets,
                            const std::function<bool(const Vec&)>& visit) {
  const Index d = C.cols();
  const Index r = C.rows();
  if (d == 0) return false;
  auto feasible = [&](const Vec& w) { return r == 0 || (C * w).minCoeff() >= -tol; };
  if (d == 1) {
    for (double s : {1.0, -1.0}) {
      Vec w = Vec::Constant(1, s);
      if (feasible(w) && visit(w)) return true;
    }
    return false;
  }
  const Index k = d - 1;
  if (r < k) return false;  // a pointed cone in R^d needs at least d rows
  if (binomial(r, k) > static_cast<double>(max_subsets))
    throw DimensionTooLarge("cone ray enumeration needs C(" + std::to_string(r) + ", " +
                            std::to_string(k) + ") subsets");
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[i] = i;
  Mat sub(k, d);
  while (true) {
    for (Index i = 0; i < k; ++i) sub.row(i) = C.row(idx[i]);
    Eigen::FullPivLU<Mat> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() == k) {
      Vec w = lu.kernel().col(0);
      w.normalize();
      for (double s : {1.0, -1.0}) {
        Vec ws = s * w;
        if (feasible(ws) && visit(ws)) return true;
      }
    }
    // next combination
    Index pos = k - 1;
    while (pos >= 0 && idx[pos] == r - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (Index j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return false;
}

Vec unit_inf(Vec v) {
  const double s = v.cwiseAbs().maxCoeff();
  return s > 0 ? Vec(v / s) : v;
}

}  // namespace

ConeAnalysis analyze_cone(const Mat& A, const Mat& B, double tol, long max_subsets) {
  const Index n = A.rows() > 0 ? A.cols() : B.cols();
  ConeAnalysis out;
  const Mat N = null_space(A, n);
  if (N.cols() == 0) return out;
  const Mat C = normalized_rows(B.rows() > 0 ? Mat(B * N) : Mat(0, N.cols()));
  const Mat L = null_space(C, N.cols());
  if (L.cols() > 0) {
    out.trivial = false;
    out.ray = unit_inf(N * L.col(0));
    return out;
  }
  enumerate_extreme_rays(C, tol, max_subsets, [&](const Vec& w) {
    out.trivial = false;
    out.ray = unit_inf(N * w);
    return true;
  });
  return out;
}

std::optional<Vec> find_cone_descent_ray(const Mat& A, const Mat& B, const Vec& c, double tol,
                                         long max_subsets) {
  const Index n = c.size();
  const Mat N = null_space(A, n);
  if (N.cols() == 0) return std::nullopt;
  const Mat C = normalized_rows(B.rows() > 0 ? Mat(B * N) : Mat(0, N.cols()));
  const Vec cr = N.transpose() * c;
  const Mat L = null_space(C, N.cols());
  auto accept = [&](const Vec& v_orig) -> std::optional<Vec> {
    Vec v = unit_inf(v_orig);
    if (c.dot(v) < -tol) return v;
    return std::nullopt;
  };
  if (L.cols() > 0) {
    const Vec cl = L.transpose() * cr;
    if (cl.norm() > tol) {
      if (auto v = accept(N * (-(L * cl)))) return v;
    }
  }
  // Pointed part of the cone: restrict to the orthogonal complement of the lineality.
  const Mat N2 = L.cols() > 0 ? null_space(L.transpose(), N.cols()) : Mat(Mat::Identity(N.cols(), N.cols()));
  if (N2.cols() == 0) return std::nullopt;
  const Mat C2 = normalized_rows(C.rows() > 0 ? Mat(C * N2) : Mat(0, N2.cols()));
  std::optional<Vec> found;
  enumerate_extreme_rays(C2, tol, max_subsets, [&](const Vec& w) {
    found = accept(N * (N2 * w));
    return found.has_value();
  });
  return found;
}

}  // namespace gnep
