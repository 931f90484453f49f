#pragma once

// Dense complex r x r arithmetic and the handful of spectral primitives the
// rest of the library needs. Thin layer over Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "mvf/error.hpp"

namespace mvf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Column-stacked vectorization of an r x r matrix.
struct MatVec {
  int r = 0;
  CVector data;
};

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= rel_tol * (1.0 + max_abs(m));
}

inline CMatrix identity(int r) { return CMatrix::Identity(r, r); }

/// Matrix unit with a single 1 at (i, j), zero-based.
inline CMatrix unit(int r, int i, int j) {
  CMatrix e = CMatrix::Zero(r, r);
  e(i, j) = 1.0;
  return e;
}

/// Real spectrum of a Hermitian matrix, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  require(m.rows() == m.cols(), "hermitian_eigenvalues: matrix is not square");
  require(is_hermitian(m), "hermitian_eigenvalues: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double hermitian_min_eigenvalue(const CMatrix& m) {
  return hermitian_eigenvalues(m)(0);
}

/// Smallest eigenpair of the Hermitian part (M + M*)/2. Used by the rank-one
/// minimizer, where the input is Hermitian only up to rounding.
inline std::pair<double, CVector> min_eigenpair(const CMatrix& m) {
  require(m.rows() == m.cols(), "min_eigenpair: matrix is not square");
  CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

inline Eigen::VectorXd singular_values(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues();
}

inline double min_singular_value(const CMatrix& m) {
  require(m.rows() == m.cols(), "min_singular_value: matrix is not square");
  if (m.size() == 0) return 0.0;
  auto s = singular_values(m);
  return s(s.size() - 1);
}

/// Positive-definite test with the scale-aware threshold
/// lambda_min > 1e-9 (1 + ||M||_F).
inline bool is_positive_definite(const CMatrix& m) {
  return hermitian_min_eigenvalue(m) > 1e-9 * (1.0 + m.norm());
}

inline MatVec vec(const CMatrix& m) {
  require(m.rows() == m.cols(), "vec: matrix is not square");
  MatVec v;
  v.r = static_cast<int>(m.rows());
  v.data = Eigen::Map<const CVector>(m.data(), m.size());
  return v;
}

inline CMatrix unvec(const MatVec& v) {
  require(v.data.size() == static_cast<Eigen::Index>(v.r) * v.r,
          "unvec: data length " + std::to_string(v.data.size()) +
              " does not match rank " + std::to_string(v.r));
  return Eigen::Map<const CMatrix>(v.data.data(), v.r, v.r);
}

/// True when every entry is a multiple of the identity (off-diagonals zero,
/// equal diagonal).
inline bool is_scalar_multiple_of_identity(const CMatrix& m, double tol = 1e-14) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const cplx d = m(0, 0);
  CMatrix diff = m - d * identity(static_cast<int>(m.rows()));
  return max_abs(diff) <= tol * (1.0 + std::abs(d));
}

}  // namespace mvf
