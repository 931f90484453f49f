#pragma once

// Seeded random instances for property checks.

#include <random>

#include "mvf/forms.hpp"
#include "mvf/matrixkit.hpp"

namespace mvf {

using Rng = std::mt19937_64;

inline CMatrix random_matrix(Rng& rng, int r, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  CMatrix m(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

inline CMatrix random_hermitian(Rng& rng, int r, double scale = 1.0) {
  const CMatrix m = random_matrix(rng, r, scale);
  return 0.5 * (m + m.adjoint());
}

inline CVector random_vector(Rng& rng, int n) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

inline CMatrix random_unitary(Rng& rng, int r) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, r));
  return qr.householderQ();
}

/// Gaussian Hermitian A_i and, when `with_b`, Gaussian B_ij for every i < j.
inline CurvatureData random_curvature(Rng& rng, int n, int r, bool with_b = true, double scale = 1.0) {
  CurvatureData c;
  c.n = n;
  c.r = r;
  for (int i = 0; i < n; ++i) c.A.push_back(random_hermitian(rng, r, scale));
  if (with_b)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) c.B[{i, j}] = random_matrix(rng, r, scale);
  return c;
}

/// Convex combination (1-s) c0 + s c1 of two curvature data of equal shape.
inline CurvatureData lerp(const CurvatureData& c0, const CurvatureData& c1, double s) {
  require(c0.n == c1.n && c0.r == c1.r, "lerp: shape mismatch");
  CurvatureData c;
  c.n = c0.n;
  c.r = c0.r;
  for (int i = 0; i < c.n; ++i) c.A.push_back((1.0 - s) * c0.A[i] + s * c1.A[i]);
  for (int i = 0; i < c.n; ++i)
    for (int j = i + 1; j < c.n; ++j) {
      const CMatrix b = (1.0 - s) * c0.b(i, j) + s * c1.b(i, j);
      if (b.norm() > 0.0) c.B[{i, j}] = b;
    }
  return c;
}

}  // namespace mvf
