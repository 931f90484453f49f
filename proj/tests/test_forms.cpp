#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mvf/equations.hpp"
#include "mvf/forms.hpp"
#include "mvf/models.hpp"
#include "mvf/random.hpp"

using namespace mvf;

namespace {

// Exterior algebra on 2n generators: dz^i is generator i, dzbar^j is n+j.
// Words are concatenated, sorted by bubble sort, and signed by the number of
// swaps. Independent of the bitmask engine.
using Word = std::vector<int>;
using Oracle = std::map<Word, CMatrix>;

int sort_sign(Word& w) {
  int swaps = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j + 1 < w.size() - i; ++j)
      if (w[j] > w[j + 1]) {
        std::swap(w[j], w[j + 1]);
        ++swaps;
      }
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == w[i - 1]) return 0;
  return swaps % 2 ? -1 : 1;
}

Oracle to_oracle(const MatrixForm& f) {
  Oracle o;
  const int n = f.dim();
  for (const auto& [k, m] : f.terms()) {
    Word w;
    for (int i : indices_of(k.dz)) w.push_back(i);
    for (int j : indices_of(k.dzbar)) w.push_back(n + j);
    o[w] = m;
  }
  return o;
}

Oracle oracle_wedge(const Oracle& a, const Oracle& b, int r) {
  Oracle out;
  for (const auto& [wa, ma] : a)
    for (const auto& [wb, mb] : b) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      const int s = sort_sign(w);
      if (s == 0) continue;
      auto it = out.emplace(w, CMatrix::Zero(r, r)).first;
      it->second += double(s) * ma * mb;
    }
  return out;
}

double oracle_distance(const Oracle& a, const Oracle& b) {
  double d = 0.0;
  for (const auto& [w, m] : a) {
    auto it = b.find(w);
    d = std::max(d, it == b.end() ? m.norm() : (m - it->second).norm());
  }
  for (const auto& [w, m] : b)
    if (!a.contains(w)) d = std::max(d, m.norm());
  return d;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    if (std::popcount(mask) == k) out.push_back(indices_of(mask));
  return out;
}

MatrixForm random_form(Rng& rng, int n, int r, int p, int q, bool scalar = false) {
  MatrixForm f(n, r, p, q);
  std::bernoulli_distribution keep(0.7);
  for (const auto& I : subsets(n, p))
    for (const auto& J : subsets(n, q)) {
      if (!keep(rng)) continue;
      const CMatrix m = scalar ? CMatrix(random_vector(rng, 1)(0) * identity(r)) : random_matrix(rng, r);
      f.add(I, J, m);
    }
  return f;
}

}  // namespace

TEST(Wedge, DisjointDiagonalTerms) {
  MatrixForm a(2, 2, 1, 1), b(2, 2, 1, 1);
  a.add({0}, {0}, kI * identity(2));
  b.add({1}, {1}, kI * identity(2));
  EXPECT_LE((top_coefficient(wedge(a, b)) - identity(2)).norm(), 1e-15);
  EXPECT_LE((top_of_wedge(a, b) - identity(2)).norm(), 1e-15);
}

TEST(Wedge, OddSquareVanishes) {
  MatrixForm f(3, 2, 1, 0);
  f.add({1}, {}, unit(2, 0, 1) + identity(2));
  EXPECT_TRUE(wedge(f, f).is_zero());
}

TEST(Wedge, ScalarOracle) {
  Rng rng(21);
  for (int n = 1; n <= 4; ++n)
    for (int trial = 0; trial < 6; ++trial) {
      std::uniform_int_distribution<int> deg(0, n);
      const int p1 = deg(rng), q1 = deg(rng);
      const int p2 = std::uniform_int_distribution<int>(0, n - p1)(rng);
      const int q2 = std::uniform_int_distribution<int>(0, n - q1)(rng);
      const MatrixForm f = random_form(rng, n, 1, p1, q1, true), g = random_form(rng, n, 1, p2, q2, true);
      EXPECT_LE(oracle_distance(to_oracle(wedge(f, g)), oracle_wedge(to_oracle(f), to_oracle(g), 1)), 1e-12)
          << "n=" << n << " (" << p1 << "," << q1 << ")^(" << p2 << "," << q2 << ")";
    }
}

TEST(Wedge, MatrixOracle) {
  Rng rng(22);
  for (int n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 6; ++trial) {
      const MatrixForm f = random_form(rng, n, 3, 1, 1), g = random_form(rng, n, 3, 1, 0),
                       h = random_form(rng, n, 3, 0, 1);
      EXPECT_LE(oracle_distance(to_oracle(wedge(f, g)), oracle_wedge(to_oracle(f), to_oracle(g), 3)), 1e-12);
      EXPECT_LE(oracle_distance(to_oracle(wedge(h, f)), oracle_wedge(to_oracle(h), to_oracle(f), 3)), 1e-12);
    }
}

TEST(Wedge, Associative) {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixForm f = random_form(rng, 4, 2, 1, 0), g = random_form(rng, 4, 2, 1, 1),
                     h = random_form(rng, 4, 2, 0, 1);
    EXPECT_LE(wedge(wedge(f, g), h).max_distance(wedge(f, wedge(g, h))), 1e-12);
  }
}

TEST(Wedge, Bilinear) {
  Rng rng(24);
  const MatrixForm f1 = random_form(rng, 3, 2, 1, 1), f2 = random_form(rng, 3, 2, 1, 1),
                   g = random_form(rng, 3, 2, 1, 0);
  const cplx a(0.5, 1.5), b(-2.0, 0.25);
  EXPECT_LE(wedge(a * f1 + b * f2, g).max_distance(a * wedge(f1, g) + b * wedge(f2, g)), 1e-12);
  EXPECT_LE(wedge(g, a * f1 + b * f2).max_distance(a * wedge(g, f1) + b * wedge(g, f2)), 1e-12);
}

TEST(Wedge, ShapeMismatch) {
  EXPECT_THROW(wedge(MatrixForm(3, 2, 1, 0), MatrixForm(3, 3, 1, 0)), ContractError);
  EXPECT_THROW(wedge(MatrixForm(3, 2, 1, 0), MatrixForm(4, 2, 1, 0)), ContractError);
}

TEST(Dagger, CovectorTerm) {
  MatrixForm xi(3, 3, 1, 0);
  xi.add({1}, {}, unit(3, 0, 0));
  const MatrixForm d = dagger(xi);
  EXPECT_EQ(d.p(), 0);
  EXPECT_EQ(d.q(), 1);
  EXPECT_EQ(d.coefficient({}, {1}), unit(3, 0, 0));
}

TEST(Dagger, HermitianCurvatureFixed) {
  for (double t : {0.0, 0.5, 1.0}) {
    const MatrixForm f = assemble(vbma_path(t).data);
    EXPECT_LE(dagger(f).max_distance(f), 1e-15) << t;
  }
}

TEST(Dagger, Involution) {
  Rng rng(25);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      const MatrixForm f = random_form(rng, 3, 2, p, q);
      EXPECT_LE(dagger(dagger(f)).max_distance(f), 0.0);
    }
}

TEST(Dagger, PowersOfHermitianCurvature) {
  Rng rng(26);
  const MatrixForm f = assemble(random_curvature(rng, 4, 2));
  for (int k = 0; k <= 4; ++k) {
    const MatrixForm pk = power(f, k);
    EXPECT_LE(dagger(pk).max_distance(pk), 1e-12 * (1.0 + pk.max_distance(MatrixForm(4, 2, k, k))));
  }
  const CMatrix top = top_coefficient(power(f, 4));
  EXPECT_LE((top - top.adjoint()).norm(), 1e-12 * (1.0 + top.norm()));
}

TEST(Power, KahlerTop) {
  for (int n = 1; n <= 5; ++n) {
    const CMatrix top = top_coefficient(power(kahler(n, 1), n));
    EXPECT_NEAR(top(0, 0).real(), factorial(n), 1e-12 * factorial(n));
    EXPECT_NEAR(top(0, 0).imag(), 0.0, 1e-12);
  }
  EXPECT_LE((top_coefficient(power(kahler(3, 3), 3)) - 6.0 * identity(3)).norm(), 1e-14);
}

TEST(Power, VbmaCube) {
  for (double t : {0.0, 0.25, 0.5, 0.78, 1.0}) {
    const CMatrix top = top_coefficient(power(assemble(vbma_path(t).data), 3));
    EXPECT_LE((top - K_of_t(t) * identity(3)).norm(), 1e-12) << t;
  }
  const CMatrix top1 = top_coefficient(power(assemble(vbma_path(1.0).data), 3));
  EXPECT_NEAR(top1(0, 0).real(), -9.3 + 6.0 * std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(top1(0, 0).real(), 1.0923, 1e-4);
}

TEST(Power, NilpotentAndEdgeCases) {
  MatrixForm f(3, 2, 1, 1);
  f.add({0}, {1}, identity(2));
  EXPECT_TRUE(power(f, 2).is_zero());
  const MatrixForm one = power(f, 0);
  EXPECT_EQ(one.p(), 0);
  EXPECT_EQ(one.coefficient({}, {}), identity(2));
  EXPECT_TRUE(power(kahler(3, 2), 4).is_zero());
}

TEST(TopCoefficient, VolumeForm) {
  MatrixForm vol = MatrixForm::scalar(4, 2);
  for (int k = 0; k < 4; ++k) {
    MatrixForm d(4, 2, 1, 1);
    d.add({k}, {k}, kI * identity(2));
    vol = wedge(vol, d);
  }
  EXPECT_LE((top_coefficient(vol) - identity(2)).norm(), 1e-15);
  EXPECT_THROW(top_coefficient(MatrixForm(3, 2, 1, 1)), ContractError);
}

TEST(TopCoefficient, TrivialCube) {
  const CMatrix top = top_coefficient(power(assemble(CurvatureData::trivial(3, 3, 1.0)), 3));
  EXPECT_EQ(top, 6.0 * identity(3));
  const CMatrix top2 = top_coefficient(power(assemble(CurvatureData::trivial(3, 2, 2.0)), 3));
  EXPECT_LE((top2 - 48.0 * identity(2)).norm(), 1e-13);
}

TEST(Kahler, Weights) {
  const std::vector<double> w = {1e-3, 1e-3, 1e-3, 1.0};
  const MatrixForm om = kahler(4, 2, w);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(om.coefficient({i}, {i}), kI * w[i] * identity(2));
  EXPECT_EQ(om.terms().size(), 4u);
  const std::vector<double> bad = {1.0, 0.0, 1.0};
  EXPECT_THROW(kahler(3, 1, bad), ContractError);
  const std::vector<double> neg = {1.0, -1.0, 1.0};
  EXPECT_THROW(kahler(3, 1, neg), ContractError);
}

TEST(Assemble, Trivial) {
  const MatrixForm f = assemble(CurvatureData::trivial(3, 2, 2.5));
  EXPECT_EQ(f.terms().size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(f.coefficient({i}, {i}), kI * 2.5 * identity(2));
}

TEST(Assemble, VbmaStart) {
  const CurvatureData c = vbma_path(0.0).data;
  for (const auto& a : c.A) EXPECT_EQ(a, identity(3));
  EXPECT_TRUE(c.B.empty());
}

TEST(Assemble, SingleOffDiagonal) {
  CurvatureData c = CurvatureData::trivial(3, 3, 0.0);
  c.B[{0, 1}] = unit(3, 0, 1);
  const MatrixForm f = assemble(c);
  EXPECT_EQ(f.terms().size(), 2u);
  EXPECT_EQ(f.coefficient({0}, {1}), kI * unit(3, 0, 1));
  EXPECT_EQ(f.coefficient({1}, {0}), kI * unit(3, 1, 0));
}

TEST(Assemble, RejectsBadData) {
  CurvatureData c = CurvatureData::trivial(3, 2);
  c.A[1] = unit(2, 0, 1);
  EXPECT_THROW(assemble(c), ContractError);
  c = CurvatureData::trivial(3, 2);
  c.B[{2, 1}] = identity(2);
  EXPECT_THROW(assemble(c), ContractError);
  c = CurvatureData::trivial(3, 2);
  c.A.pop_back();
  EXPECT_THROW(assemble(c), ContractError);
}

TEST(Assemble, DisassembleRoundTrip) {
  Rng rng(27);
  const CurvatureData c = random_curvature(rng, 4, 3);
  const CurvatureData d = disassemble(assemble(c));
  for (int i = 0; i < 4; ++i) EXPECT_LE((c.A[i] - d.A[i]).norm(), 1e-15);
  for (const auto& [ij, m] : c.B) EXPECT_LE((m - d.b(ij.first, ij.second)).norm(), 1e-15);
}

TEST(Indices, StrictlyIncreasing) {
  MatrixForm f(3, 1, 2, 0);
  EXPECT_THROW(f.add({1, 0}, {}, identity(1)), ContractError);
  EXPECT_THROW(f.add({1, 1}, {}, identity(1)), ContractError);
  EXPECT_THROW(f.add({0, 3}, {}, identity(1)), ContractError);
  EXPECT_THROW(f.add({0}, {}, identity(1)), ContractError);
}

TEST(Prune, CancellationRemovesTerm) {
  MatrixForm f(2, 2, 1, 1);
  f.add({0}, {1}, identity(2));
  f.add({0}, {1}, -identity(2));
  EXPECT_TRUE(f.is_zero());
}
