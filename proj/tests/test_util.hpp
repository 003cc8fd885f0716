#pragma once

#include "gnep/model.hpp"
#include "gnep/lcp.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace testutil {

using gnep::Index;
using gnep::Mat;
using gnep::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double a : v) r[i++] = a;
  return r;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double normal() { return std::normal_distribution<double>()(eng); }
  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(eng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }

  Vec vec(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Mat mat(Index r, Index c) {
    Mat m(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Mat skew(Index k) {
    Mat a = mat(k, k);
    return a - a.transpose();
  }
};

enum class LcpFamily { PD, PSD, Skew };

// PD: A A^T + I.  PSD: L L^T (rank < k) plus skew.  Skew: pure skew.
inline gnep::StandardLcp random_lcp(Rng& rng, LcpFamily fam, Index k) {
  gnep::StandardLcp lcp;
  switch (fam) {
    case LcpFamily::PD: {
      Mat A = rng.mat(k, k);
      lcp.M = A * A.transpose() + Mat::Identity(k, k);
      break;
    }
    case LcpFamily::PSD: {
      const Index r = std::max<Index>(1, k / 2);
      Mat L = rng.mat(k, r);
      lcp.M = L * L.transpose() + rng.skew(k);
      break;
    }
    case LcpFamily::Skew:
      lcp.M = rng.skew(k);
      break;
  }
  lcp.h = rng.vec(k);
  return lcp;
}

// One player minimizing x^2/2 subject to 1 - x <= 0.
inline gnep::GnepProblem one_player_bound() {
  gnep::GnepOracles o;
  o.objective = [](int, const Vec& x) { return 0.5 * x[0] * x[0]; };
  o.objective_grad = [](int, const Vec& x) { return Vec(Vec::Constant(1, x[0])); };
  o.constraint = [](int, const Vec& x) { return Vec(Vec::Constant(1, 1.0 - x[0])); };
  o.constraint_jacobian = [](int, const Vec&) { return Mat(Mat::Constant(1, 1, -1.0)); };
  o.lagrangian_hessian = [](int, const Vec&, const Vec&) { return Mat(Mat::Constant(1, 1, 1.0)); };
  return gnep::GnepProblem("one-player", {1}, {1}, o);
}

}  // namespace testutil
