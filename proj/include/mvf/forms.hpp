#pragma once

// Graded algebra of End(E)-valued (p,q)-forms at a single point of C^n.
//
// A MatrixForm stores sum_{I,J} M_{I,J} dz^I ^ dzbar^J in the canonical order
// dz^{i_1} ^ ... ^ dz^{i_p} ^ dzbar^{j_1} ^ ... ^ dzbar^{j_q} with I, J strictly
// increasing. Index sets are bitmasks over {0..n-1}; all public index
// arguments are zero-based. The factor sqrt(-1) of i*F is folded into the
// coefficients.

#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mvf/error.hpp"
#include "mvf/matrixkit.hpp"

namespace mvf {

inline constexpr int kMaxDim = 16;
inline constexpr double kPruneRel = 1e-15;

struct FormKey {
  std::uint32_t dz = 0;
  std::uint32_t dzbar = 0;
  auto operator<=>(const FormKey&) const = default;
};

inline std::uint32_t mask_of(std::span<const int> idx, int n) {
  std::uint32_t m = 0;
  int prev = -1;
  for (int i : idx) {
    require(i > prev, "index tuple must be strictly increasing");
    require(i >= 0 && i < n, "index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
    m |= (1u << i);
    prev = i;
  }
  return m;
}

inline std::vector<int> indices_of(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

// Inversions when concatenating sorted index sets a and b: #{(i in a, k in b) : i > k}.
inline int merge_inversions(std::uint32_t a, std::uint32_t b) {
  int count = 0;
  for (; b != 0; b &= b - 1) {
    const int k = std::countr_zero(b);
    const std::uint32_t above = (k + 1 >= 32) ? 0u : (~0u << (k + 1));
    count += std::popcount(a & above);
  }
  return count;
}

class MatrixForm {
 public:
  using Terms = std::map<FormKey, CMatrix>;

  MatrixForm(int n, int r, int p, int q) : n_(n), r_(r), p_(p), q_(q) {
    require(n >= 1 && n <= kMaxDim, "form dimension out of range");
    require(r >= 1, "bundle rank must be positive");
    require(p >= 0 && q >= 0, "negative bidegree");
  }

  /// value * Id as a (0,0)-form.
  static MatrixForm scalar(int n, int r, cplx value = 1.0) {
    MatrixForm f(n, r, 0, 0);
    f.add(FormKey{}, value * identity(r));
    return f;
  }

  int dim() const { return n_; }
  int rank() const { return r_; }
  int p() const { return p_; }
  int q() const { return q_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Accumulates m into the (I, J) slot, pruning near-cancellations.
  void add(const FormKey& key, const CMatrix& m) {
    require(m.rows() == r_ && m.cols() == r_, "coefficient shape does not match bundle rank");
    require(std::popcount(key.dz) == p_ && std::popcount(key.dzbar) == q_,
            "term index sizes do not match bidegree");
    require(p_ <= n_ && q_ <= n_ && (key.dz >> n_) == 0 && (key.dzbar >> n_) == 0,
            "term index out of range");
    const double mn = m.norm();
    if (mn == 0.0) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(key, m);
      return;
    }
    const double before = it->second.norm();
    it->second += m;
    if (it->second.norm() <= kPruneRel * (before + mn)) terms_.erase(it);
  }

  void add(std::span<const int> I, std::span<const int> J, const CMatrix& m) {
    add(FormKey{mask_of(I, n_), mask_of(J, n_)}, m);
  }

  void add(std::initializer_list<int> I, std::initializer_list<int> J, const CMatrix& m) {
    add(std::span<const int>(I.begin(), I.size()), std::span<const int>(J.begin(), J.size()), m);
  }

  /// Coefficient at (I, J); zero matrix when absent.
  CMatrix coefficient(std::initializer_list<int> I, std::initializer_list<int> J) const {
    return coefficient(FormKey{mask_of(std::span<const int>(I.begin(), I.size()), n_),
                               mask_of(std::span<const int>(J.begin(), J.size()), n_)});
  }

  CMatrix coefficient(const FormKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? CMatrix::Zero(r_, r_) : it->second;
  }

  MatrixForm& operator+=(const MatrixForm& o) {
    require(same_shape(o), "adding forms of different shape or bidegree");
    for (const auto& [k, m] : o.terms_) add(k, m);
    return *this;
  }

  MatrixForm& operator*=(cplx s) {
    if (s == cplx(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, m] : terms_) m *= s;
    return *this;
  }

  friend MatrixForm operator+(MatrixForm a, const MatrixForm& b) { return a += b; }
  friend MatrixForm operator-(MatrixForm a, MatrixForm b) { return a += (b *= -1.0); }
  friend MatrixForm operator*(cplx s, MatrixForm f) { return f *= s; }

  /// Left-multiplies every coefficient by m (m acts as a 0-form).
  MatrixForm left_multiply(const CMatrix& m) const {
    MatrixForm out(n_, r_, p_, q_);
    for (const auto& [k, c] : terms_) out.add(k, m * c);
    return out;
  }

  bool same_shape(const MatrixForm& o) const {
    return n_ == o.n_ && r_ == o.r_ && p_ == o.p_ && q_ == o.q_;
  }

  /// Largest coefficientwise Frobenius distance to another form of the same shape.
  double max_distance(const MatrixForm& o) const {
    require(same_shape(o), "comparing forms of different shape");
    double d = 0.0;
    for (const auto& [k, m] : terms_) d = std::max(d, (m - o.coefficient(k)).norm());
    for (const auto& [k, m] : o.terms_)
      if (!terms_.contains(k)) d = std::max(d, m.norm());
    return d;
  }

 private:
  int n_, r_, p_, q_;
  Terms terms_;
};

/// Normal form of i F_H at a point: Hermitian diagonal blocks A_i and
/// arbitrary off-diagonal blocks B_ij (i < j, zero-based).
struct CurvatureData {
  int n = 0;
  int r = 0;
  std::vector<CMatrix> A;
  std::map<std::pair<int, int>, CMatrix> B;

  void validate() const {
    require(n >= 1 && n <= kMaxDim, "CurvatureData: n out of range");
    require(r >= 1, "CurvatureData: r must be positive");
    require(static_cast<int>(A.size()) == n,
            "CurvatureData: expected " + std::to_string(n) + " diagonal blocks, got " + std::to_string(A.size()));
    for (int i = 0; i < n; ++i) {
      require(A[i].rows() == r && A[i].cols() == r, "CurvatureData: A block has wrong shape");
      require(is_hermitian(A[i]), "CurvatureData: A_" + std::to_string(i + 1) + " is not Hermitian");
    }
    for (const auto& [ij, m] : B) {
      require(ij.first < ij.second && ij.first >= 0 && ij.second < n, "CurvatureData: B key must satisfy i<j<n");
      require(m.rows() == r && m.cols() == r, "CurvatureData: B block has wrong shape");
    }
  }

  /// Every A_i = rho Id, no off-diagonal blocks.
  static CurvatureData trivial(int n, int r, double rho = 1.0) {
    CurvatureData c;
    c.n = n;
    c.r = r;
    c.A.assign(n, rho * identity(r));
    return c;
  }

  CMatrix b(int i, int j) const {
    auto it = B.find({i, j});
    return it == B.end() ? CMatrix::Zero(r, r) : it->second;
  }
};

/// Sign-correct wedge product; coefficients multiply as f-coefficient times
/// g-coefficient.
inline MatrixForm wedge(const MatrixForm& f, const MatrixForm& g) {
  require(f.dim() == g.dim() && f.rank() == g.rank(), "wedge: incompatible dimension or rank");
  const int p = f.p() + g.p();
  const int q = f.q() + g.q();
  MatrixForm out(f.dim(), f.rank(), p, q);
  if (p > f.dim() || q > f.dim()) return out;
  // Moving the dz block of g past the dzbar block of f.
  const bool cross_odd = (f.q() * g.p()) % 2 == 1;
  struct Acc {
    CMatrix sum;
    double scale = 0.0;
  };
  std::map<FormKey, Acc> acc;
  for (const auto& [kf, mf] : f.terms()) {
    for (const auto& [kg, mg] : g.terms()) {
      if ((kf.dz & kg.dz) != 0 || (kf.dzbar & kg.dzbar) != 0) continue;
      const int inv = merge_inversions(kf.dz, kg.dz) + merge_inversions(kf.dzbar, kg.dzbar);
      const bool negative = ((inv % 2 == 1) != cross_odd);
      CMatrix prod = mf * mg;
      const FormKey key{kf.dz | kg.dz, kf.dzbar | kg.dzbar};
      auto [it, fresh] = acc.try_emplace(key, Acc{CMatrix::Zero(f.rank(), f.rank()), 0.0});
      it->second.scale += prod.norm();
      if (negative)
        it->second.sum -= prod;
      else
        it->second.sum += prod;
    }
  }
  for (const auto& [k, a] : acc)
    if (a.sum.norm() > kPruneRel * a.scale) out.add(k, a.sum);
  return out;
}

/// Conjugate-adjoint: (M dz^I ^ dzbar^J) -> (-1)^{pq} M* dz^J ^ dzbar^I.
inline MatrixForm dagger(const MatrixForm& f) {
  MatrixForm out(f.dim(), f.rank(), f.q(), f.p());
  const double sign = (f.p() * f.q()) % 2 == 0 ? 1.0 : -1.0;
  for (const auto& [k, m] : f.terms()) out.add(FormKey{k.dzbar, k.dz}, sign * m.adjoint());
  return out;
}

/// k-fold left-to-right wedge of a (1,1)-form; power(f, 0) = Id.
inline MatrixForm power(const MatrixForm& f, int k) {
  require(f.p() == 1 && f.q() == 1, "power: form must have bidegree (1,1)");
  require(k >= 0, "power: negative exponent");
  if (k > f.dim()) return MatrixForm(f.dim(), f.rank(), k, k);
  MatrixForm acc = MatrixForm::scalar(f.dim(), f.rank());
  for (int i = 0; i < k; ++i) acc = wedge(acc, f);
  return acc;
}

/// All powers f^0 .. f^n.
inline std::vector<MatrixForm> powers(const MatrixForm& f) {
  require(f.p() == 1 && f.q() == 1, "powers: form must have bidegree (1,1)");
  std::vector<MatrixForm> out;
  out.reserve(f.dim() + 1);
  out.push_back(MatrixForm::scalar(f.dim(), f.rank()));
  for (int k = 1; k <= f.dim(); ++k) out.push_back(wedge(out.back(), f));
  return out;
}

/// Coefficient relative to the volume form prod_k (i dz^k ^ dzbar^k).
/// That product equals i^n (-1)^{n(n-1)/2} times the canonical top monomial.
inline CMatrix top_coefficient(const MatrixForm& f) {
  const int n = f.dim();
  require(f.p() == n && f.q() == n, "top_coefficient: form must have bidegree (n,n)");
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  cplx vol = std::pow(kI, n);
  if ((n * (n - 1) / 2) % 2 == 1) vol = -vol;
  return f.coefficient(FormKey{full, full}) / vol;
}

/// top_coefficient(wedge(f, g)) without materializing the product: each term
/// of f meets only the complementary term of g.
inline CMatrix top_of_wedge(const MatrixForm& f, const MatrixForm& g) {
  const int n = f.dim();
  require(f.dim() == g.dim() && f.rank() == g.rank(), "top_of_wedge: incompatible dimension or rank");
  require(f.p() + g.p() == n && f.q() + g.q() == n, "top_of_wedge: bidegrees do not sum to (n,n)");
  const std::uint32_t full = (1u << n) - 1u;
  const bool cross_odd = (f.q() * g.p()) % 2 == 1;
  CMatrix acc = CMatrix::Zero(f.rank(), f.rank());
  for (const auto& [kf, mf] : f.terms()) {
    const FormKey need{full & ~kf.dz, full & ~kf.dzbar};
    auto it = g.terms().find(need);
    if (it == g.terms().end()) continue;
    const int inv = merge_inversions(kf.dz, need.dz) + merge_inversions(kf.dzbar, need.dzbar);
    if ((inv % 2 == 1) != cross_odd)
      acc -= mf * it->second;
    else
      acc += mf * it->second;
  }
  cplx vol = std::pow(kI, n);
  if ((n * (n - 1) / 2) % 2 == 1) vol = -vol;
  return acc / vol;
}

/// Folds the i factors: A_i -> i A_i at (i,i), B_ij -> i B_ij at (i,j),
/// i B_ij* at (j,i).
inline MatrixForm assemble(const CurvatureData& c) {
  c.validate();
  MatrixForm f(c.n, c.r, 1, 1);
  for (int i = 0; i < c.n; ++i) f.add({i}, {i}, kI * c.A[i]);
  for (const auto& [ij, m] : c.B) {
    f.add({ij.first}, {ij.second}, kI * m);
    f.add({ij.second}, {ij.first}, kI * m.adjoint());
  }
  return f;
}

/// Inverse of assemble for Hermitian (1,1)-forms.
inline CurvatureData disassemble(const MatrixForm& f) {
  require(f.p() == 1 && f.q() == 1, "disassemble: form must have bidegree (1,1)");
  CurvatureData c;
  c.n = f.dim();
  c.r = f.rank();
  c.A.assign(c.n, CMatrix::Zero(c.r, c.r));
  for (const auto& [k, m] : f.terms()) {
    const int i = std::countr_zero(k.dz);
    const int j = std::countr_zero(k.dzbar);
    if (i == j) {
      c.A[i] = -kI * m;
    } else if (i < j) {
      c.B[{i, j}] = -kI * m;
    }
  }
  for (int i = 0; i < c.n; ++i)
    for (int j = i + 1; j < c.n; ++j) {
      const CMatrix upper = f.coefficient({i}, {j});
      const CMatrix lower = f.coefficient({j}, {i});
      require(max_abs(lower - (-upper.adjoint())) <= 1e-12 * (1.0 + max_abs(upper)),
              "disassemble: form is not Hermitian at (" + std::to_string(i + 1) + "," +
                  std::to_string(j + 1) + ")");
    }
  c.validate();
  return c;
}

/// sum_i w_i (i dz^i ^ dzbar^i) (x) Id.
inline MatrixForm kahler(int n, int r, std::span<const double> weights) {
  require(static_cast<int>(weights.size()) == n, "kahler: need one weight per direction");
  MatrixForm f(n, r, 1, 1);
  for (int i = 0; i < n; ++i) {
    require(weights[i] > 0.0, "kahler: weight " + std::to_string(i + 1) + " is not positive");
    f.add({i}, {i}, kI * weights[i] * identity(r));
  }
  return f;
}

/// Like kahler() but accepts zero weights (degenerate limits such as eps = 0).
inline MatrixForm diagonal_form(int n, int r, std::span<const double> weights) {
  require(static_cast<int>(weights.size()) == n, "diagonal_form: need one weight per direction");
  MatrixForm f(n, r, 1, 1);
  for (int i = 0; i < n; ++i) {
    require(weights[i] >= 0.0, "diagonal_form: negative weight");
    if (weights[i] > 0.0) f.add({i}, {i}, kI * weights[i] * identity(r));
  }
  return f;
}

inline MatrixForm kahler(int n, int r) {
  std::vector<double> w(n, 1.0);
  return kahler(n, r, w);
}

/// sum_{a,b} K_ab Psi dz^a ^ dzbar^b for an n x n scalar pattern K.
inline MatrixForm one_one(const CMatrix& pattern, const CMatrix& psi) {
  const int n = static_cast<int>(pattern.rows());
  MatrixForm f(n, static_cast<int>(psi.rows()), 1, 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (pattern(a, b) != cplx(0.0)) f.add({a}, {b}, pattern(a, b) * psi);
  return f;
}

/// (1,0)-form sum_i a_i dz^i (x) g.
inline MatrixForm covector_form(const CVector& a, const CMatrix& g) {
  const int n = static_cast<int>(a.size());
  MatrixForm f(n, static_cast<int>(g.rows()), 1, 0);
  for (int i = 0; i < n; ++i)
    if (a(i) != cplx(0.0)) f.add({i}, {}, a(i) * g);
  return f;
}

}  // namespace mvf
