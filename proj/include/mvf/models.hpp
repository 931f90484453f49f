#pragma once

// Explicit curvature families: the Monge-Ampere path on C^3 (rank 3), its
// block extension, the concatenated J-equation path and the scaffolds for the
// sigma_k and dHYM continuations.
//
// All rank-3 families share one shape:
//   A_1 = diag(p,q,r), A_2 = diag(s,u,v), A_3 = diag(x,y,z),
//   B_12 = a E_12, B_13 = b E_13, B_23 = c E_23.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mvf/error.hpp"
#include "mvf/forms.hpp"

namespace mvf {

using Labels = std::map<std::string, double>;

inline constexpr std::array<const char*, 12> kPathColumns = {"p", "q", "r", "s", "u", "v",
                                                             "x", "y", "z", "a", "b", "c"};

struct PathPoint {
  double t = 0.0;
  CurvatureData data;
  std::vector<double> omega_weights;
  Labels labels;
};

/// Rank-3 blocks on the first three directions of C^n from the twelve labels.
/// Directions 4..n get trailing[i] * Id (all zero-based past index 2).
inline CurvatureData curvature_from_labels(const Labels& L, int n = 3, const std::vector<double>& trailing = {}) {
  require(n >= 3, "curvature_from_labels: n must be at least 3");
  require(static_cast<int>(trailing.size()) == n - 3, "curvature_from_labels: need one trailing weight per extra direction");
  for (const char* key : kPathColumns) require(L.contains(key), std::string("missing path label ") + key);
  auto d3 = [](double a, double b, double c) {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
  };
  CurvatureData cd;
  cd.n = n;
  cd.r = 3;
  cd.A.push_back(d3(L.at("p"), L.at("q"), L.at("r")));
  cd.A.push_back(d3(L.at("s"), L.at("u"), L.at("v")));
  cd.A.push_back(d3(L.at("x"), L.at("y"), L.at("z")));
  for (double w : trailing) cd.A.push_back(w * identity(3));
  if (L.at("a") != 0.0) cd.B[{0, 1}] = L.at("a") * unit(3, 0, 1);
  if (L.at("b") != 0.0) cd.B[{0, 2}] = L.at("b") * unit(3, 0, 2);
  if (L.at("c") != 0.0) cd.B[{1, 2}] = L.at("c") * unit(3, 1, 2);
  return cd;
}

inline void require_unit_interval(double t, const char* who) {
  require(t >= 0.0 && t <= 1.0, std::string(who) + ": t=" + std::to_string(t) + " outside [0,1]");
}

/// K(t) = 6 - 18t + 2.7t^2 + 6t sqrt(3t), the common diagonal value of the cube.
inline double K_of_t(double t) { return 6.0 - 18.0 * t + 2.7 * t * t + 6.0 * t * std::sqrt(3.0 * t); }

/// Critical point of K from K'(t) = -18 + 5.4t + 9 sqrt(3) sqrt(t) = 0, as a
/// quadratic in sqrt(t).
inline double K_critical_point() {
  const double u0 = (-9.0 * std::sqrt(3.0) + std::sqrt(631.8)) / 10.8;
  return u0 * u0;
}

inline double vbma_u(double t) { return (6.0 + 14.7 * t * t) / (6.0 * (1.0 + t)); }
inline double vbma_z(double t) { return (6.0 + 12.3 * t * t) / (6.0 * (1.0 + 2.0 * t) * (1.0 - 0.9 * t)); }

inline Labels vbma_labels(double t) {
  const double amp = std::sqrt(3.0 * t);
  return {{"p", 1.0},         {"q", 1.0 + t},     {"r", 1.0 + 2.0 * t}, {"s", 1.0},
          {"u", vbma_u(t)},   {"v", 1.0 - 0.9 * t}, {"x", 1.0},         {"y", 1.0},
          {"z", vbma_z(t)},   {"a", amp},         {"b", amp},           {"c", amp}};
}

inline PathPoint vbma_path(double t) {
  require_unit_interval(t, "vbma_path");
  PathPoint pt;
  pt.t = t;
  pt.labels = vbma_labels(t);
  pt.data = curvature_from_labels(pt.labels);
  pt.omega_weights.assign(3, 1.0);
  return pt;
}

/// Divides every block by K(t)^{1/3} so the cube is Id, then pads the bundle
/// with extra_rank copies of 6^{-1/3} and the base with extra_dims directions
/// carrying Id.
inline PathPoint vbma_extend(const PathPoint& pt, int extra_rank, int extra_dims) {
  require(extra_rank >= 0 && extra_dims >= 0, "vbma_extend: negative extension count");
  require(pt.data.n == 3 && pt.data.r == 3, "vbma_extend: expects a rank-3 point on C^3");
  const double scale = 1.0 / std::cbrt(K_of_t(pt.t));
  const int n = 3 + extra_dims;
  const int r = 3 + extra_rank;
  const double pad = 1.0 / std::cbrt(6.0);

  PathPoint out;
  out.t = pt.t;
  for (const auto& [k, v] : pt.labels) out.labels[k] = v * scale;
  out.data.n = n;
  out.data.r = r;
  for (int i = 0; i < n; ++i) {
    CMatrix a = CMatrix::Zero(r, r);
    if (i < 3) {
      a.topLeftCorner(3, 3) = scale * pt.data.A[i];
      a.bottomRightCorner(extra_rank, extra_rank) = pad * identity(extra_rank);
    } else {
      a = identity(r);
    }
    out.data.A.push_back(a);
  }
  for (const auto& [ij, m] : pt.data.B) {
    CMatrix b = CMatrix::Zero(r, r);
    b.topLeftCorner(3, 3) = scale * m;
    out.data.B[ij] = b;
  }
  out.omega_weights.assign(n, 1.0);
  return out;
}

/// One chart of the concatenated J path; segment 1 or 2, local t in [0,1].
inline Labels j_segment_labels(int segment, double t) {
  require(segment == 1 || segment == 2, "j_segment_labels: segment must be 1 or 2");
  require_unit_interval(t, "j_segment_labels");
  if (segment == 1) {
    const double d = 1.0 + t;
    const double w = (1.0 + t) / (1.0 + 3.0 * t);
    return {{"p", d}, {"q", d}, {"r", d}, {"s", d}, {"u", d}, {"v", d},
            {"x", w}, {"y", w}, {"z", w}, {"a", 0.0}, {"b", 0.0}, {"c", 0.0}};
  }
  const double k = 25.0 * 5.5 * 5.5 / 12.0;
  const double z = (8.0 + (9.0 + k) * t + (3.0 / 5.0 + 34.5) * t * t + 4.0 * t * t * t) /
                   (16.0 + 20.0 * t + 100.0 * t * t);
  return {{"p", 2.0 + 2.0 * t * (1.0 - t)},
          {"q", 2.0},
          {"r", 2.0},
          {"s", 2.0 - t},
          {"u", 2.0 + k * t - 4.0 * t * t},
          {"v", 2.0 + 2.0 * t + 10.0 * t * t},
          {"x", 0.5},
          {"y", 0.5},
          {"z", z},
          {"a", std::sqrt(3.0) * t},
          {"b", std::sqrt(t / 5.0)},
          {"c", 5.5 * std::sqrt(5.0 * t / 12.0)}};
}

/// Concatenated J path, s in [0,2]; the charts meet at s = 1.
inline PathPoint j_path(double s) {
  require(s >= 0.0 && s <= 2.0, "j_path: s=" + std::to_string(s) + " outside [0,2]");
  PathPoint pt;
  pt.t = s;
  pt.labels = s <= 1.0 ? j_segment_labels(1, s) : j_segment_labels(2, s - 1.0);
  pt.data = curvature_from_labels(pt.labels);
  pt.omega_weights.assign(3, 1.0);
  return pt;
}

/// A family point with some labels prescribed and the rest left to a solver.
struct KnownScaffold {
  std::string family;
  double t = 0.0;
  int n = 3;
  Labels fixed;
  std::vector<std::string> unknowns;
  std::vector<double> guesses;
  std::vector<double> trailing;       // curvature weight on directions 4..n
  std::vector<double> omega_weights;  // Kahler weights actually used by the equation

  PathPoint realize(const std::vector<double>& values) const {
    require(values.size() == unknowns.size(), "KnownScaffold::realize: wrong number of unknowns");
    PathPoint pt;
    pt.t = t;
    pt.labels = fixed;
    for (std::size_t i = 0; i < unknowns.size(); ++i) pt.labels[unknowns[i]] = values[i];
    pt.data = curvature_from_labels(pt.labels, n, trailing);
    pt.omega_weights = omega_weights;
    return pt;
  }
};

/// sigma_k family on C^n: the rank-3 Monge-Ampere blocks on directions 1..3,
/// Id on 4..k, eps Id on k+1..n; omega has weight eps on the first k
/// directions and 1 after. a = b = c = sqrt(amp_sq_at_one * t), where
/// amp_sq_at_one = 3 is the eps = 0 value.
inline KnownScaffold sigma_k_scaffold(double t, int k, int n, double eps, double amp_sq_at_one = 3.0) {
  require_unit_interval(t, "sigma_k_scaffold");
  require(k >= 3, "sigma_k_scaffold: k must be at least 3");
  require(k < n, "sigma_k_scaffold: need k < n (k = n is the Monge-Ampere equation)");
  require(eps >= 0.0, "sigma_k_scaffold: eps must be non-negative");
  require(amp_sq_at_one >= 0.0, "sigma_k_scaffold: negative squared amplitude");
  KnownScaffold sc;
  sc.family = "sigma-k";
  sc.t = t;
  sc.n = n;
  const double amp = std::sqrt(amp_sq_at_one * t);
  sc.fixed = {{"p", 1.0}, {"q", 1.0 + t}, {"r", 1.0 + 2.0 * t}, {"s", 1.0}, {"v", 1.0 - 0.9 * t},
              {"x", 1.0}, {"y", 1.0},     {"a", amp},           {"b", amp}, {"c", amp}};
  sc.unknowns = {"u", "z"};
  sc.guesses = {vbma_u(t), vbma_z(t)};
  for (int i = 3; i < n; ++i) sc.trailing.push_back(i < k ? 1.0 : eps);
  for (int i = 0; i < n; ++i) sc.omega_weights.push_back(i < k ? eps : 1.0);
  return sc;
}

/// dHYM family: the second J chart with a(t) = sqrt(amp_sq_at_one) t, unknowns
/// v, u, z. omega_weights hold the unscaled form (all ones); the continuation
/// applies the eps*theta/n factor.
inline KnownScaffold dhym_scaffold(double t, int n, double eps, double theta, double amp_sq_at_one = 3.0) {
  require_unit_interval(t, "dhym_scaffold");
  require(n >= 3, "dhym_scaffold: n must be at least 3");
  require(eps >= 0.0, "dhym_scaffold: eps must be non-negative");
  require(theta > 0.0, "dhym_scaffold: theta must be positive");
  require(amp_sq_at_one >= 0.0, "dhym_scaffold: negative squared amplitude");
  const Labels j = j_segment_labels(2, t);
  KnownScaffold sc;
  sc.family = "dhym";
  sc.t = t;
  sc.n = n;
  sc.fixed = j;
  sc.fixed["a"] = std::sqrt(amp_sq_at_one) * t;
  for (const char* k : {"v", "u", "z"}) sc.fixed.erase(k);
  sc.unknowns = {"v", "u", "z"};
  sc.guesses = {j.at("v"), j.at("u"), j.at("z")};
  sc.trailing.assign(n - 3, 1.0);
  sc.omega_weights.assign(n, 1.0);
  return sc;
}

}  // namespace mvf
