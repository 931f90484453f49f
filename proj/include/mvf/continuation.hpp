#pragma once

// Newton root-finding and the two implicit-function continuations (sigma_k,
// dHYM), plus sampling-based positivity certification on an interval.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mvf/ellipticity.hpp"
#include "mvf/equations.hpp"
#include "mvf/error.hpp"
#include "mvf/forms.hpp"
#include "mvf/models.hpp"
#include "mvf/report.hpp"

namespace mvf {

struct NewtonOpts {
  double tol = 1e-12;
  int max_iter = 50;
  double fd_step = 1e-7;  // relative central-difference step
  double max_condition = 1e12;
};

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
  double jacobian_condition = 0.0;
  std::vector<double> trace;  // residual norm per iterate
};

using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

inline std::string format_vector(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

inline Eigen::MatrixXd fd_jacobian(const VectorFn& f, const Eigen::VectorXd& x, Eigen::Index m, double rel_step) {
  Eigen::MatrixXd jac(m, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

/// Newton with a central finite-difference Jacobian. Throws NewtonError on a
/// singular Jacobian or when max_iter is exhausted.
inline NewtonResult newton(const VectorFn& f, Eigen::VectorXd x0, const NewtonOpts& opts = {}) {
  require(opts.tol > 0.0 && opts.max_iter >= 1, "newton: invalid options");
  require(x0.size() >= 1 && x0.size() <= 4, "newton: dimension must be 1..4");
  NewtonResult res;
  res.x = std::move(x0);
  for (int it = 0;; ++it) {
    const Eigen::VectorXd fx = f(res.x);
    require(fx.size() == res.x.size(), "newton: residual and unknown dimensions differ");
    res.residual_norm = fx.norm();
    res.trace.push_back(res.residual_norm);
    res.iterations = it;
    if (!std::isfinite(res.residual_norm))
      throw NewtonError("newton: non-finite residual at x=" + format_vector(res.x));
    const Eigen::MatrixXd jac = fd_jacobian(f, res.x, fx.size(), opts.fd_step);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    res.jacobian_condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (res.residual_norm <= opts.tol) return res;
    if (!(res.jacobian_condition <= opts.max_condition))
      throw NewtonError("newton: singular Jacobian (condition " + std::to_string(res.jacobian_condition) +
                        ") at x=" + format_vector(res.x));
    if (it >= opts.max_iter) {
      std::ostringstream os;
      os << "newton: no convergence after " << opts.max_iter << " iterations at x=" << format_vector(res.x)
         << "; residual trace:";
      for (double r : res.trace) os << ' ' << r;
      throw NewtonError(os.str());
    }
    res.x += jac.colPivHouseholderQr().solve(-fx);
  }
}

struct PositivityCertificate {
  double min_value = 0.0;
  double argmin = 0.0;
  int grid_points = 0;
  std::string method = "grid scan + golden-section refinement (sampling-based, not a proof)";
};

/// Minimum of f on [lo, hi] from a uniform grid refined by golden-section
/// search in the cells adjacent to the best sample.
inline PositivityCertificate certify_positive(const std::function<double(double)>& f, double lo, double hi,
                                              int grid_points = 1001) {
  require(grid_points >= 101, "certify_positive: need at least 101 grid points");
  require(hi > lo, "certify_positive: empty interval");
  PositivityCertificate cert;
  cert.grid_points = grid_points;
  const double step = (hi - lo) / (grid_points - 1);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double t = (i == grid_points - 1) ? hi : lo + i * step;
    const double v = f(t);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  cert.min_value = best_val;
  cert.argmin = (best == grid_points - 1) ? hi : lo + best * step;

  double a = std::max(lo, lo + (best - 1) * step);
  double b = std::min(hi, lo + (best + 1) * step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double tm = 0.5 * (a + b);
  const double fm = f(tm);
  if (fm < cert.min_value) {
    cert.min_value = fm;
    cert.argmin = tm;
  }
  return cert;
}

struct AmplitudeFit {
  double amp_sq = 0.0;           // squared amplitude at t = 1 making the witness vanish
  double intercept = 0.0;        // e0
  double slope = 0.0;            // e1
  double affine_residual = 0.0;  // |E(x2) - (e0 + e1 x2)| at a third sample
};

/// Fits E(x) = e0 + e1 x through samples at x = 0 and x = 1, checks a third
/// sample, and returns the root -e0/e1.
inline AmplitudeFit fit_offdiag_amplitude(const std::function<double(double)>& witness_of_amp_sq,
                                          double check_at = 3.0) {
  AmplitudeFit fit;
  const double e0 = witness_of_amp_sq(0.0);
  const double e1 = witness_of_amp_sq(1.0) - e0;
  fit.intercept = e0;
  fit.slope = e1;
  if (!(e1 < 0.0))
    throw InfeasibleError("fit_offdiag_amplitude: witness does not decrease with the amplitude (slope " +
                          std::to_string(e1) + ")");
  fit.affine_residual = std::abs(witness_of_amp_sq(check_at) - (e0 + e1 * check_at));
  fit.amp_sq = -e0 / e1;
  if (fit.amp_sq < 0.0)
    throw InfeasibleError("fit_offdiag_amplitude: witness already negative at zero amplitude");
  return fit;
}

inline std::vector<double> make_grid(double lo, double hi, int count) {
  require(count >= 2, "make_grid: need at least two points");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

struct ResidualTriple {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

struct PathRow {
  double t = 0.0;
  Labels labels;
  std::vector<double> unknowns;
  double residual_norm = 0.0;
  double offdiag_max = 0.0;
  double K = 0.0;
  ResidualTriple triple;
  double witness = 0.0;
  double symbol_scan_min = std::numeric_limits<double>::quiet_NaN();
  double jacobian_condition = 0.0;
  int newton_iterations = 0;
};

struct PathReport {
  std::string equation;
  int k = 0, n = 0;
  double eps = 0.0, theta = 0.0, delta = 0.0, theta_hat = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> unknown_names;
  AmplitudeFit fit;
  std::vector<PathRow> rows;
  std::vector<Check> checks;

  bool passed() const { return all_pass(checks); }
};

inline ResidualTriple diagonal_triple(const CMatrix& r) { return {r(0, 0).real(), r(1, 1).real(), r(2, 2).real()}; }

inline double offdiag_max(const CMatrix& r) {
  CMatrix o = r;
  o.diagonal().setZero();
  return max_abs(o);
}

inline bool strictly_decreasing(const std::vector<PathRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].witness < rows[i - 1].witness)) return false;
  return true;
}

/// The sigma_k system on one scaffold: residual top((iF)^k ^ omega^{n-k}) and
/// the Condition-E witness along (dz^2, E_11).
struct SigmaKSystem {
  int k, n;
  double eps;

  MatrixForm omega(const PathPoint& pt) const { return diagonal_form(n, 3, pt.omega_weights); }
  EquationCoeffs coeffs() const { return EquationCoeffs::sigma_k(n, k); }

  CMatrix residual(const PathPoint& pt) const { return poly_residual(assemble(pt.data), omega(pt), coeffs()); }

  double witness(const PathPoint& pt) const {
    return condition_e_value(assemble(pt.data), omega(pt), coeffs(), {CVector::Unit(n, 1), unit(3, 0, 0)});
  }

  EllipticityProbe probe(const PathPoint& pt) const { return {assemble(pt.data), omega(pt), coeffs()}; }
};

struct SigmaKOptions {
  NewtonOpts newton{};
  int scan_samples = 0;  // 0 disables the per-t symbol scan
  std::uint64_t seed = 0;
};

/// Continuation of the sigma_k counter-example: at each grid t solve (u, z)
/// so that beta - alpha = gamma - alpha = 0, warm-started from the eps = 0
/// closed forms.
inline PathReport solve_sigma_k(int k, int n, double eps, const std::vector<double>& grid,
                                const SigmaKOptions& opts = {}) {
  require(k >= 3 && k < n, "solve_sigma_k: need 3 <= k < n");
  require(eps >= 0.0, "solve_sigma_k: eps must be non-negative");
  require(!grid.empty() && std::is_sorted(grid.begin(), grid.end()), "solve_sigma_k: grid must be sorted");
  const SigmaKSystem sys{k, n, eps};

  PathReport rep;
  rep.equation = "sigma-k";
  rep.k = k;
  rep.n = n;
  rep.eps = eps;
  rep.seed = opts.seed;
  rep.unknown_names = {"u", "z"};
  rep.fit = fit_offdiag_amplitude([&](double amp_sq) {
    const KnownScaffold sc = sigma_k_scaffold(1.0, k, n, eps, amp_sq);
    return sys.witness(sc.realize(sc.guesses));
  });

  for (double t : grid) {
    const KnownScaffold sc = sigma_k_scaffold(t, k, n, eps, rep.fit.amp_sq);
    auto f = [&](const Eigen::VectorXd& x) {
      const CMatrix r = sys.residual(sc.realize({x(0), x(1)}));
      Eigen::VectorXd out(2);
      out << (r(1, 1) - r(0, 0)).real(), (r(2, 2) - r(0, 0)).real();
      return out;
    };
    NewtonResult nr;
    try {
      nr = newton(f, Eigen::Vector2d(sc.guesses[0], sc.guesses[1]), opts.newton);
    } catch (const NewtonError& e) {
      throw NewtonError("solve_sigma_k at t=" + std::to_string(t) + ": " + e.what());
    }
    PathRow row;
    row.t = t;
    row.unknowns = {nr.x(0), nr.x(1)};
    const PathPoint pt = sc.realize(row.unknowns);
    row.labels = pt.labels;
    const CMatrix r = sys.residual(pt);
    row.triple = diagonal_triple(r);
    row.K = row.triple.alpha;
    row.residual_norm = (r - row.K * identity(3)).norm();
    row.offdiag_max = offdiag_max(r);
    row.witness = sys.witness(pt);
    row.jacobian_condition = nr.jacobian_condition;
    row.newton_iterations = nr.iterations;
    if (opts.scan_samples > 0) row.symbol_scan_min = sys.probe(pt).full_symbol_scan(opts.scan_samples, opts.seed).min_singular;
    rep.rows.push_back(std::move(row));
  }

  double max_res = 0.0, min_alpha = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    max_res = std::max(max_res, row.residual_norm);
    min_alpha = std::min(min_alpha, row.triple.alpha);
  }
  rep.checks.push_back(check_le("affine_fit_residual", rep.fit.affine_residual, 1e-10));
  rep.checks.push_back(check_le("residual_norm_max", max_res, 1e-8));
  rep.checks.push_back(check_gt("alpha_min", min_alpha, 0.0));
  if (grid.front() == 0.0) rep.checks.push_back(check_gt("witness_at_t0", rep.rows.front().witness, 0.0));
  if (grid.back() == 1.0) rep.checks.push_back(check_le("witness_at_t1", std::abs(rep.rows.back().witness), 1e-8));
  rep.checks.push_back(note("witness_strictly_decreasing", strictly_decreasing(rep.rows) ? 1.0 : 0.0));
  return rep;
}

/// The dHYM system with theta_hat = -eps theta + pi n/2 and omega = (eps theta/n)
/// omega~. The operator is divided by eps*theta so its eps -> 0 limit is the
/// J-equation; at eps = 0 the J-equation is used directly.
struct DhymSystem {
  int n;
  double eps, theta;

  double theta_hat() const { return -eps * theta + std::numbers::pi * n / 2.0; }

  std::vector<double> omega_weights() const {
    return std::vector<double>(n, eps > 0.0 ? eps * theta / n : 1.0);
  }
  MatrixForm omega() const { return kahler(n, 3, omega_weights()); }

  EquationCoeffs coeffs() const {
    if (eps == 0.0) return EquationCoeffs::j_equation(n);
    return dhym_coeffs(n, theta_hat()).scaled(1.0 / (eps * theta));
  }

  CMatrix residual(const PathPoint& pt) const { return poly_residual(assemble(pt.data), omega(), coeffs()); }

  double witness(const PathPoint& pt) const {
    return condition_e_value(assemble(pt.data), omega(), coeffs(), {CVector::Unit(n, 2), unit(3, 0, 0)});
  }

  EllipticityProbe probe(const PathPoint& pt) const { return {assemble(pt.data), omega(), coeffs()}; }
};

struct DhymOptions {
  NewtonOpts newton{};
  int scan_samples = 0;
  int restarts = 16;
  std::uint64_t seed = 0;
};

/// Continuation of the J-path counter-example into dHYM: at each grid t in
/// [delta, 1] solve (v, u, z) so the three diagonal residual entries vanish.
inline PathReport solve_dhym(int n, double eps, double theta, const std::vector<double>& grid,
                             const DhymOptions& opts = {}) {
  require(n >= 3, "solve_dhym: n must be at least 3");
  require(eps >= 0.0, "solve_dhym: eps must be non-negative");
  require(theta > 0.0, "solve_dhym: theta must be positive");
  require(!grid.empty() && std::is_sorted(grid.begin(), grid.end()), "solve_dhym: grid must be sorted");
  require(grid.front() > 0.0 && grid.back() <= 1.0,
          "solve_dhym: grid must lie in (0,1]; the Jacobian is singular at t=0");
  const DhymSystem sys{n, eps, theta};

  PathReport rep;
  rep.equation = "dhym";
  rep.n = n;
  rep.eps = eps;
  rep.theta = theta;
  rep.delta = grid.front();
  rep.theta_hat = sys.theta_hat();
  rep.seed = opts.seed;
  rep.unknown_names = {"v", "u", "z"};
  rep.fit = fit_offdiag_amplitude([&](double amp_sq) {
    const KnownScaffold sc = dhym_scaffold(1.0, n, eps, theta, amp_sq);
    return sys.witness(sc.realize(sc.guesses));
  });

  for (double t : grid) {
    const KnownScaffold sc = dhym_scaffold(t, n, eps, theta, rep.fit.amp_sq);
    auto f = [&](const Eigen::VectorXd& x) {
      const CMatrix r = sys.residual(sc.realize({x(0), x(1), x(2)}));
      Eigen::VectorXd out(3);
      out << r(0, 0).real(), r(1, 1).real(), r(2, 2).real();
      return out;
    };
    NewtonResult nr;
    try {
      nr = newton(f, Eigen::Vector3d(sc.guesses[0], sc.guesses[1], sc.guesses[2]), opts.newton);
    } catch (const NewtonError& e) {
      throw NewtonError("solve_dhym at t=" + std::to_string(t) + ": " + e.what());
    }
    PathRow row;
    row.t = t;
    row.unknowns = {nr.x(0), nr.x(1), nr.x(2)};
    const PathPoint pt = sc.realize(row.unknowns);
    row.labels = pt.labels;
    const CMatrix r = sys.residual(pt);
    row.triple = diagonal_triple(r);
    row.residual_norm = r.norm();
    row.offdiag_max = offdiag_max(r);
    row.witness = sys.witness(pt);
    row.jacobian_condition = nr.jacobian_condition;
    row.newton_iterations = nr.iterations;
    if (opts.scan_samples > 0) row.symbol_scan_min = sys.probe(pt).full_symbol_scan(opts.scan_samples, opts.seed).min_singular;
    rep.rows.push_back(std::move(row));
  }

  double max_res = 0.0, max_off = 0.0;
  for (const auto& row : rep.rows) {
    max_res = std::max(max_res, row.residual_norm);
    max_off = std::max(max_off, row.offdiag_max);
  }
  rep.checks.push_back(check_le("affine_fit_residual", rep.fit.affine_residual, 1e-10));
  rep.checks.push_back(check_le("residual_norm_max", max_res, 1e-8));
  rep.checks.push_back(check_le("offdiag_residual_max", max_off, 1e-10));
  {
    const PathPoint start = dhym_scaffold(grid.front(), n, eps, theta, rep.fit.amp_sq).realize(rep.rows.front().unknowns);
    const RankOneMinimum m = sys.probe(start).min_rank_one(opts.restarts, opts.seed);
    rep.checks.push_back(check_gt("min_rank_one_at_delta", m.value, 0.0));
  }
  if (grid.back() == 1.0) rep.checks.push_back(check_le("witness_at_t1", std::abs(rep.rows.back().witness), 1e-8));
  rep.checks.push_back(note("witness_strictly_decreasing", strictly_decreasing(rep.rows) ? 1.0 : 0.0));
  rep.checks.push_back(note("jacobian_condition_at_delta", rep.rows.front().jacobian_condition));
  return rep;
}

}  // namespace mvf
