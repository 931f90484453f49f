#pragma once

// Principal symbol and Condition E for the polynomial family.
//
// For a covector chi = sum chi_i dz^i the symbol acts on End(E) as
//   Psi -> top( sum_m c_m sum_j (iF)^j ^ (i chi ^ chibar) Psi ^ (iF)^{m-1-j} ^ omega^{n-m} ),
// and Condition E evaluates, for xi = a (x) g,
//   Tr( sum_m c_m sum_j i xi ^ (iF)^j ^ xi^dagger ^ (iF)^{m-1-j} ^ omega^{n-m} ).
// With xi = chi Psi* the two agree: value(chi, Psi*) = <Psi, symbol(chi) Psi>.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mvf/equations.hpp"
#include "mvf/error.hpp"
#include "mvf/forms.hpp"
#include "mvf/matrixkit.hpp"

namespace mvf {

struct SymbolProbe {
  CVector a;  // covector components in the dz^i basis
  CMatrix g;
};

/// Rank-one probe result; the probe is normalized |a| = ||g||_F = 1.
struct RankOneMinimum {
  double value = 0.0;
  SymbolProbe probe;
  int starts = 0;
};

struct SymbolScan {
  double min_singular = 0.0;
  CVector worst_chi;
  int directions = 0;
  bool bracketed = false;  // a sign change of lambda_min was found and bisected
};

namespace detail {

inline CVector random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

// (iF)^{m-1-j} ^ omega^{n-m} for each (m, j) pair; the right factor of every
// symbol/Condition-E term.
struct RightFactor {
  double c;
  int j;
  MatrixForm right;
};

inline std::vector<RightFactor> right_factors(const PreparedOperator& op) {
  std::vector<RightFactor> out;
  const int n = op.dim();
  for (auto [m, c] : op.equation().coeffs) {
    if (c == 0.0 || m == 0) continue;
    for (int j = 0; j < m; ++j)
      out.push_back({c, j, wedge(op.curvature_power(m - 1 - j), op.omega_power(n - m))});
  }
  return out;
}

}  // namespace detail

/// Symbol and Condition-E evaluator over one prepared operator.
class EllipticityProbe {
 public:
  explicit EllipticityProbe(PreparedOperator op) : op_(std::move(op)), rights_(detail::right_factors(op_)) {}

  EllipticityProbe(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq)
      : EllipticityProbe(PreparedOperator(curvature, omega, eq)) {}

  int dim() const { return op_.dim(); }
  int rank() const { return op_.rank(); }
  const PreparedOperator& op() const { return op_; }

  /// The r^2 x r^2 matrix of the symbol in the column-stacked vec basis.
  CMatrix symbol_matrix(const CVector& chi) const {
    require(chi.size() == dim(), "symbol_matrix: covector has wrong length");
    require(chi.norm() > 0.0, "symbol_matrix: covector must be non-zero");
    const int r = rank();
    CMatrix pattern = kI * chi * chi.adjoint();  // (a,b) -> i chi_a conj(chi_b)
    CMatrix out(r * r, r * r);
    for (int l = 0; l < r; ++l)
      for (int k = 0; k < r; ++k) {
        const MatrixForm x = one_one(pattern, unit(r, k, l));
        CMatrix img = CMatrix::Zero(r, r);
        for (const auto& rf : rights_) img += rf.c * top_of_wedge(wedge(op_.curvature_power(rf.j), x), rf.right);
        out.col(k + l * r) = vec(img).data;
      }
    return out;
  }

  /// Condition-E value; the imaginary part is checked against rounding and dropped.
  double condition_e_value(const SymbolProbe& probe) const {
    require(probe.a.size() == dim(), "condition_e_value: covector has wrong length");
    require(probe.g.rows() == rank() && probe.g.cols() == rank(), "condition_e_value: endomorphism has wrong shape");
    require(probe.a.norm() > 0.0 && probe.g.norm() > 0.0, "condition_e_value: probe must be non-zero");
    const MatrixForm xi = covector_form(probe.a, probe.g);
    const MatrixForm xi_dag = dagger(xi);
    cplx acc = 0.0;
    double scale = 0.0;
    for (const auto& rf : rights_) {
      const MatrixForm left = wedge(wedge(xi, op_.curvature_power(rf.j)), xi_dag);
      const cplx term = rf.c * kI * top_of_wedge(left, rf.right).trace();
      acc += term;
      scale += std::abs(term);
    }
    if (std::abs(acc.imag()) > 1e-12 * (1.0 + scale))
      throw ContractError("condition_e_value: imaginary part " + std::to_string(acc.imag()) +
                          " exceeds rounding; curvature is not Hermitian?");
    return acc.real();
  }

  /// Hermitian n x n form in the covector for fixed g: value = w* Q w with a = conj(w).
  CMatrix covector_form_matrix(const CMatrix& g) const {
    const int n = dim();
    CMatrix q(n, n);
    std::vector<MatrixForm> xs, xds;
    for (int a = 0; a < n; ++a) {
      CVector e = CVector::Zero(n);
      e(a) = 1.0;
      xs.push_back(covector_form(e, g));
      xds.push_back(dagger(xs.back()));
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx acc = 0.0;
        for (const auto& rf : rights_) {
          const MatrixForm left = wedge(wedge(xs[a], op_.curvature_power(rf.j)), xds[b]);
          acc += rf.c * kI * top_of_wedge(left, rf.right).trace();
        }
        q(a, b) = acc;
      }
    return q;
  }

  /// Alternating minimization over normalized rank-one probes. Starts from
  /// every coordinate covector and from `restarts` seeded random covectors.
  RankOneMinimum min_rank_one(int restarts = 16, std::uint64_t seed = 0, double stationarity = 1e-12,
                              int max_sweeps = 500) const {
    require(restarts >= 1, "min_rank_one: restarts must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<CVector> starts;
    for (int i = 0; i < dim(); ++i) starts.push_back(CVector::Unit(dim(), i));
    for (int i = 0; i < restarts; ++i) starts.push_back(detail::random_unit(rng, dim()));

    RankOneMinimum best;
    best.value = std::numeric_limits<double>::infinity();
    best.starts = static_cast<int>(starts.size());
    for (const CVector& a0 : starts) {
      CVector a = a0;
      CMatrix g;
      double prev = std::numeric_limits<double>::infinity();
      for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        auto [lg, psi] = min_eigenpair(symbol_matrix(a));
        MatVec mv{rank(), psi};
        g = unvec(mv).adjoint();
        g /= g.norm();
        if (lg < best.value) best = {lg, {a, g}, best.starts};
        auto [la, w] = min_eigenpair(covector_form_matrix(g));
        a = w.conjugate();
        a /= a.norm();
        if (la < best.value) best = {la, {a, g}, best.starts};
        if (std::abs(prev - la) < stationarity * (1.0 + std::abs(la))) break;
        prev = la;
      }
    }
    best.value = condition_e_value(best.probe);
    return best;
  }

  /// Smallest singular value of the symbol over sampled covectors. The 2n
  /// directions e_k and i e_k are always included. When the symbol is
  /// Hermitian and lambda_min changes sign between samples, the segment
  /// between the extreme samples is bisected onto a singular covector.
  SymbolScan full_symbol_scan(int n_samples, std::uint64_t seed = 0) const {
    require(n_samples >= 1, "full_symbol_scan: n_samples must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<CVector> dirs;
    for (int i = 0; i < dim(); ++i) {
      dirs.push_back(CVector::Unit(dim(), i));
      dirs.push_back(kI * CVector::Unit(dim(), i));
    }
    for (int i = 0; i < n_samples; ++i) dirs.push_back(detail::random_unit(rng, dim()));
    SymbolScan scan;
    scan.min_singular = std::numeric_limits<double>::infinity();
    scan.directions = static_cast<int>(dirs.size());
    bool hermitian = true;
    double lo_val = std::numeric_limits<double>::infinity(), hi_val = -lo_val;
    CVector lo_chi, hi_chi;
    auto consider = [&](const CVector& chi, const CMatrix& s) {
      const double sv = min_singular_value(s);
      if (sv < scan.min_singular) {
        scan.min_singular = sv;
        scan.worst_chi = chi;
      }
    };
    for (const CVector& chi : dirs) {
      const CMatrix s = symbol_matrix(chi);
      consider(chi, s);
      hermitian = hermitian && (s - s.adjoint()).norm() <= 1e-10 * (1.0 + s.norm());
      const double l = min_eigenpair(s).first;
      if (l < lo_val) lo_val = l, lo_chi = chi;
      if (l > hi_val) hi_val = l, hi_chi = chi;
    }
    if (!hermitian || !(lo_val < 0.0 && hi_val > 0.0)) return scan;
    // lambda_min is continuous along the chord, so it vanishes somewhere on it.
    auto at = [&](double s) {
      CVector c = (1.0 - s) * hi_chi + s * lo_chi;
      return CVector(c / c.norm());
    };
    if (((hi_chi + lo_chi) / 2.0).norm() < 1e-8) return scan;  // antipodal chord through 0
    double a = 0.0, b = 1.0;
    for (int it = 0; it < 200 && b - a > 1e-17; ++it) {
      const double m = 0.5 * (a + b);
      (min_eigenpair(symbol_matrix(at(m))).first > 0.0 ? a : b) = m;
    }
    for (double s : {a, b}) consider(at(s), symbol_matrix(at(s)));
    scan.bracketed = true;
    return scan;
  }

 private:
  PreparedOperator op_;
  std::vector<detail::RightFactor> rights_;
};

inline CMatrix symbol_matrix(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq,
                             const CVector& chi) {
  return EllipticityProbe(curvature, omega, eq).symbol_matrix(chi);
}

inline double condition_e_value(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq,
                                const SymbolProbe& probe) {
  return EllipticityProbe(curvature, omega, eq).condition_e_value(probe);
}

/// (Condition-E value at xi = chi Psi*, Tr(Psi* symbol(chi) Psi)).
inline std::pair<double, double> pairing_check(const MatrixForm& curvature, const MatrixForm& omega,
                                               const EquationCoeffs& eq, const CVector& chi, const CMatrix& psi) {
  require(chi.norm() > 0.0 && psi.norm() > 0.0, "pairing_check: chi and Psi must be non-zero");
  EllipticityProbe ep(curvature, omega, eq);
  const double lhs = ep.condition_e_value({chi, psi.adjoint()});
  const CVector v = vec(psi).data;
  const cplx rhs = v.dot(ep.symbol_matrix(chi) * v);  // v* S v
  return {lhs, rhs.real()};
}

inline RankOneMinimum min_rank_one(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq,
                                   int restarts = 16, std::uint64_t seed = 0) {
  return EllipticityProbe(curvature, omega, eq).min_rank_one(restarts, seed);
}

inline SymbolScan full_symbol_scan(const MatrixForm& curvature, const MatrixForm& omega, const EquationCoeffs& eq,
                                   int n_samples, std::uint64_t seed = 0) {
  return EllipticityProbe(curvature, omega, eq).full_symbol_scan(n_samples, seed);
}

/// lambda_min( sum_{i != k} A_i ); positive iff Condition E holds for sigma_2
/// along dz^k.
inline double sigma2_pd_criterion(const CurvatureData& c, int k) {
  c.validate();
  require(k >= 0 && k < c.n, "sigma2_pd_criterion: direction index out of range");
  CMatrix s = CMatrix::Zero(c.r, c.r);
  for (int i = 0; i < c.n; ++i)
    if (i != k) s += c.A[i];
  return hermitian_min_eigenvalue(0.5 * (s + s.adjoint()));
}

}  // namespace mvf
