#pragma once

#include "gnep/types.hpp"

#include <optional>

namespace gnep {

/// Result of examining the polyhedral cone K = {v : A v = 0, B v >= 0}.
struct ConeAnalysis {
  bool trivial = true;
  /// A nonzero element of K with |ray|_inf = 1 when `trivial` is false.
  Vec ray;
};

/// Decides K == {0}.
///
/// The equalities are eliminated through an orthonormal basis of null(A). If
/// the remaining inequality system has a nontrivial null space, K contains a
/// line. Otherwise K is pointed and nontrivial exactly when it has an extreme
/// ray; extreme rays are enumerated as one-dimensional kernels of (d-1)-row
/// subsets of the reduced inequality rows. Throws DimensionTooLarge when the
/// enumeration would exceed `max_subsets`.
ConeAnalysis analyze_cone(const Mat& A, const Mat& B, double tol = 1e-10,
                          long max_subsets = 2'000'000);

/// Finds v in K with c^T v < -tol (|v|_inf = 1), or nullopt when c^T v >= 0 on K.
std::optional<Vec> find_cone_descent_ray(const Mat& A, const Mat& B, const Vec& c,
                                         double tol = 1e-10, long max_subsets = 2'000'000);

/// Orthonormal basis of null(A) (columns). `cols` gives the ambient dimension
/// so that zero-row matrices are handled.
Mat null_space(const Mat& A, Index cols, double rel_tol = 1e-10);

}  // namespace gnep
