#pragma once

// All four equations as one polynomial family
//   sum_m c_m (iF)^m ^ omega^{n-m},
// evaluated through the wedge engine, plus the closed-form expansions used to
// cross-check it.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mvf/error.hpp"
#include "mvf/forms.hpp"

namespace mvf {

struct EquationCoeffs {
  int n = 0;
  std::vector<std::pair<int, double>> coeffs;  // (degree m, c_m)

  void validate() const {
    require(n >= 1, "EquationCoeffs: n must be positive");
    require(!coeffs.empty(), "EquationCoeffs: empty coefficient list");
    bool any = false;
    std::vector<bool> seen(n + 1, false);
    for (auto [m, c] : coeffs) {
      require(m >= 0 && m <= n, "EquationCoeffs: degree " + std::to_string(m) + " outside [0,n]");
      require(!seen[m], "EquationCoeffs: repeated degree " + std::to_string(m));
      seen[m] = true;
      any = any || c != 0.0;
    }
    require(any, "EquationCoeffs: all coefficients vanish");
  }

  EquationCoeffs scaled(double s) const {
    EquationCoeffs e = *this;
    for (auto& [m, c] : e.coeffs) c *= s;
    return e;
  }

  static EquationCoeffs vbma(int n) { return {n, {{n, 1.0}}}; }
  static EquationCoeffs sigma_k(int n, int k) {
    require(k >= 1 && k <= n, "sigma_k: need 1 <= k <= n");
    return {n, {{k, 1.0}}};
  }
  /// (iF)^n - omega ^ (iF)^{n-1}, with the constant c normalized to 1.
  static EquationCoeffs j_equation(int n) {
    require(n >= 2, "j_equation: n must be at least 2");
    return {n, {{n, 1.0}, {n - 1, -1.0}}};
  }
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// c_m = C(n,m) sin(m pi/2 - theta_hat), from
/// e^{-i theta}(omega + i(iF))^n = sum_m C(n,m) e^{i(m pi/2 - theta)} (iF)^m omega^{n-m}.
inline EquationCoeffs dhym_coeffs(int n, double theta_hat) {
  require(n >= 1, "dhym_coeffs: n must be positive");
  EquationCoeffs e{n, {}};
  for (int m = 0; m <= n; ++m) {
    double c = binomial(n, m) * std::sin(m * std::numbers::pi / 2.0 - theta_hat);
    if (std::abs(c) < 1e-15 * binomial(n, m)) c = 0.0;
    e.coeffs.emplace_back(m, c);
  }
  return e;
}

/// Powers of the curvature and of omega, shared by the residual and the
/// symbol computations.
class PreparedOperator {
 public:
  PreparedOperator(const MatrixForm& curvature, const MatrixForm& omega, EquationCoeffs eq)
      : eq_(std::move(eq)) {
    eq_.validate();
    require(curvature.p() == 1 && curvature.q() == 1, "operator: curvature must be a (1,1)-form");
    require(omega.p() == 1 && omega.q() == 1, "operator: omega must be a (1,1)-form");
    require(curvature.dim() == omega.dim() && curvature.rank() == omega.rank(),
            "operator: curvature and omega differ in dimension or rank");
    require(eq_.n == curvature.dim(), "operator: equation dimension does not match the forms");
    for (const auto& [k, m] : omega.terms())
      require(is_scalar_multiple_of_identity(m), "operator: omega must have scalar (multiple of Id) coefficients");
    curvature_powers_ = powers(curvature);
    omega_powers_ = powers(omega);
  }

  int dim() const { return eq_.n; }
  int rank() const { return curvature_powers_[0].rank(); }
  const EquationCoeffs& equation() const { return eq_; }
  const MatrixForm& curvature_power(int j) const { return curvature_powers_.at(j); }
  const MatrixForm& omega_power(int j) const { return omega_powers_.at(j); }

  /// top( sum_m c_m (iF)^m ^ omega^{n-m} ).
  CMatrix residual() const {
    CMatrix acc = CMatrix::Zero(rank(), rank());
    for (auto [m, c] : eq_.coeffs)
      if (c != 0.0) acc += c * top_of_wedge(curvature_powers_[m], omega_powers_[eq_.n - m]);
    return acc;
  }

 private:
  EquationCoeffs eq_;
  std::vector<MatrixForm> curvature_powers_;
  std::vector<MatrixForm> omega_powers_;
};

inline CMatrix poly_residual(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq) {
  return PreparedOperator(curvature, omega, eq).residual();
}

/// top((omega Id - F_H)^n) where `curvature` stores i F_H, so the base is
/// omega + i * curvature.
inline CMatrix dhym_top(const MatrixForm& curvature, const MatrixForm& omega) {
  require(curvature.dim() == omega.dim() && curvature.rank() == omega.rank(),
          "dhym_top: curvature and omega differ in dimension or rank");
  MatrixForm base = omega + kI * curvature;
  return top_coefficient(power(base, curvature.dim()));
}

/// Metric imaginary part (Z - Z*)/(2i).
inline CMatrix imag_h(const CMatrix& z) { return (z - z.adjoint()) / (2.0 * kI); }

/// Im_H(e^{-i theta_hat} top((omega Id - F)^n)) by direct complex expansion.
inline CMatrix dhym_direct(const MatrixForm& curvature, const MatrixForm& omega, double theta_hat) {
  return imag_h(std::exp(-kI * theta_hat) * dhym_top(curvature, omega));
}

/// Argument of Tr top((omega Id - F)^n), in (-pi, pi].
inline double dhym_angle(const MatrixForm& curvature, const MatrixForm& omega) {
  const cplx tr = dhym_top(curvature, omega).trace();
  if (std::abs(tr) <= 1e-12) throw DegenerateAngleError("dhym_angle: Tr((omega Id - F)^n) vanishes; phase undefined");
  return std::arg(tr);
}

inline CMatrix sym2(const CMatrix& x, const CMatrix& y) {
  require(x.rows() == x.cols() && x.rows() == y.rows() && y.rows() == y.cols(), "sym2: shape mismatch");
  return x * y + y * x;
}

inline CMatrix sym3(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
  require(a.rows() == a.cols() && a.rows() == b.rows() && b.rows() == b.cols() && b.rows() == c.rows() &&
              c.rows() == c.cols(),
          "sym3: shape mismatch");
  return a * b * c + a * c * b + b * a * c + b * c * a + c * a * b + c * b * a;
}

/// Closed form of top((iF)^3) on C^3.
inline CMatrix closed_vbma3(const CurvatureData& c) {
  require(c.n == 3, "closed_vbma3: requires n = 3");
  c.validate();
  const CMatrix b12 = c.b(0, 1), b13 = c.b(0, 2), b23 = c.b(1, 2);
  return sym3(c.A[0], c.A[1], c.A[2]) - sym3(c.A[0], b23, b23.adjoint()) - sym3(c.A[1], b13, b13.adjoint()) -
         sym3(c.A[2], b12, b12.adjoint()) + sym3(b13, b12.adjoint(), b23.adjoint()) +
         sym3(b13.adjoint(), b12, b23);
}

/// Closed form of top((iF)^3 - omega ^ (iF)^2) on C^3 with the standard omega.
inline CMatrix closed_j3(const CurvatureData& c) {
  require(c.n == 3, "closed_j3: requires n = 3");
  CMatrix out = closed_vbma3(c);
  out -= sym2(c.A[0], c.A[1]) + sym2(c.A[0], c.A[2]) + sym2(c.A[1], c.A[2]);
  for (const auto& [ij, b] : c.B) out += sym2(b, b.adjoint());
  return out;
}

/// sum_{i<j} (A_i A_j + A_j A_i - B_ij B_ij* - B_ij* B_ij); the sigma_2
/// operator up to the positive constant (n-2)!.
inline CMatrix closed_sigma2(const CurvatureData& c) {
  require(c.n >= 2, "closed_sigma2: requires n >= 2");
  c.validate();
  CMatrix out = CMatrix::Zero(c.r, c.r);
  for (int i = 0; i < c.n; ++i)
    for (int j = i + 1; j < c.n; ++j) {
      const CMatrix b = c.b(i, j);
      out += sym2(c.A[i], c.A[j]) - b * b.adjoint() - b.adjoint() * b;
    }
  return out;
}

}  // namespace mvf
