#pragma once

// Command suites behind the mvf executable. Each suite returns an Outcome
// (JSON report, CSV trace, checks); run() writes the files and maps the
// result to an exit status: 0 pass, 1 assertion failure, 2 configuration
// error.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvf/continuation.hpp"
#include "mvf/ellipticity.hpp"
#include "mvf/equations.hpp"
#include "mvf/io.hpp"
#include "mvf/models.hpp"
#include "mvf/random.hpp"
#include "mvf/report.hpp"

namespace mvf::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;  // verify | solve | ellipticity | export-point
  std::string target;   // suite or family name
  std::string eq = "vbma";
  int k = 3;
  int n = 0;     // 0: the suite default
  int r = 3;
  int grid = 0;  // 0: the suite default
  int trials = 200;
  int paths = 10000;
  int samples = 8;
  int restarts = 16;
  int extra_dims = 0;
  int extra_rank = 0;
  double eps = 1e-3;
  double theta = 1.0;
  double delta = 0.05;
  std::optional<double> theta_hat;
  double t = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string input, out, csv, witness;
};

struct Outcome {
  json report;
  std::string csv;
  std::vector<Check> checks;
};

inline void config_require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

inline json base_report(const RunConfig& cfg) {
  return {{"schema_version", kReportSchemaVersion}, {"command", cfg.command}, {"suite", cfg.target},
          {"seed", cfg.seed}};
}

inline void finish(Outcome& o, const json& tolerances) {
  o.report["tolerances"] = tolerances;
  o.report["checks"] = checks_to_json(o.checks);
  o.report["pass"] = all_pass(o.checks);
}

inline double witness_3px_b2(const Labels& L) { return 3.0 * L.at("p") * L.at("x") - L.at("b") * L.at("b"); }
inline double witness_j(const Labels& L) {
  return 2.0 * (3.0 * L.at("p") * L.at("s") - L.at("a") * L.at("a") - L.at("p") - L.at("s"));
}

// verify vbma-path ---------------------------------------------------------

inline Outcome verify_vbma_path(const RunConfig& cfg) {
  const int N = cfg.grid ? cfg.grid : 101;
  config_require(N >= 2, "--grid must be at least 2");
  const double tol = cfg.tol.value_or(1e-10);
  const MatrixForm om = kahler(3, 3);
  const EquationCoeffs eq = EquationCoeffs::vbma(3);
  const SymbolProbe witness_probe{CVector::Unit(3, 1), unit(3, 0, 0)};

  Outcome o;
  o.report = base_report(cfg);
  std::vector<PathPoint> pts;
  std::vector<double> residual, K, closed_err, wit;
  for (double t : make_grid(0.0, 1.0, N)) {
    PathPoint pt = vbma_path(t);
    const MatrixForm f = assemble(pt.data);
    const CMatrix top = poly_residual(f, om, eq);
    K.push_back(K_of_t(t));
    residual.push_back((top - K.back() * identity(3)).norm());
    closed_err.push_back((closed_vbma3(pt.data) - top).norm() / std::max(1.0, top.norm()));
    wit.push_back(condition_e_value(f, om, eq, witness_probe));
    pts.push_back(std::move(pt));
  }
  const double calibration = wit.front() / witness_3px_b2(pts.front().labels);
  double ratio_err = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    ratio_err = std::max(ratio_err, std::abs(wit[i] / wit.front() - witness_3px_b2(pts[i].labels) / 3.0));

  const PositivityCertificate cert = certify_positive(K_of_t, 0.0, 1.0, 1001);
  const EllipticityProbe start(assemble(pts.front().data), om, eq);
  const EllipticityProbe end(assemble(pts.back().data), om, eq);
  const RankOneMinimum m0 = start.min_rank_one(cfg.restarts, cfg.seed);
  const RankOneMinimum m1 = end.min_rank_one(cfg.restarts, cfg.seed);
  const SymbolScan scan = end.full_symbol_scan(cfg.samples, cfg.seed);

  o.checks = {
      check_le("residual_norm_max", *std::max_element(residual.begin(), residual.end()), tol),
      check_le("closed_form_rel_err_max", *std::max_element(closed_err.begin(), closed_err.end()), 1e-9),
      check_gt("K_min_positive", cert.min_value, 0.0),
      check_near("K_min", cert.min_value, 0.76, 0.01),
      check_near("K_argmin", cert.argmin, 0.78, 0.01),
      check_le("witness_at_t1", std::abs(wit.back()), 1e-8),
      check_gt("witness_calibrated_at_t0", wit.front() / calibration, 1.0),
      check_le("witness_ratio_vs_3px_minus_b2", ratio_err, 1e-9),
      check_gt("min_rank_one_at_t0", m0.value, 0.0),
      check_le("min_rank_one_at_t1", m1.value, 1e-8),
      check_le("symbol_scan_at_t1", scan.min_singular, 1e-8),
      note("witness_calibration", calibration),
      note("K_critical_point_analytic", K_critical_point()),
      note("K_at_critical_point", K_of_t(K_critical_point())),
      note("symbol_scan_bracketed", scan.bracketed ? 1.0 : 0.0),
  };
  o.report["K_certificate"] = {{"min_value", cert.min_value}, {"argmin", cert.argmin},
                               {"grid_points", cert.grid_points}, {"method", cert.method}};
  o.report["min_rank_one_t0"] = probe_to_json(m0);
  o.report["min_rank_one_t1"] = probe_to_json(m1);
  o.report["symbol_scan_t1"] = {{"min_singular", scan.min_singular}, {"directions", scan.directions},
                                {"bracketed", scan.bracketed},
                                {"method", "sampled covectors plus sign-change bisection (necessary check, not a proof)"}};

  std::ostringstream os;
  os << "t";
  for (const char* c : kPathColumns) os << ',' << c;
  os << ",K,residual_norm,witness\n";
  json rows = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << csv_number(pts[i].t);
    for (const char* c : kPathColumns) os << ',' << csv_number(pts[i].labels.at(c));
    os << ',' << csv_number(K[i]) << ',' << csv_number(residual[i]) << ',' << csv_number(wit[i]) << '\n';
    rows.push_back({{"t", pts[i].t}, {"K", K[i]}, {"residual_norm", residual[i]}, {"witness", wit[i]}});
  }
  o.csv = os.str();
  o.report["rows"] = rows;
  finish(o, {{"residual", tol}, {"closed_form_rel", 1e-9}, {"K_min", 0.01}, {"K_argmin", 0.01},
             {"witness_zero", 1e-8}, {"witness_ratio", 1e-9}, {"symbol_scan", 1e-8}});
  return o;
}

// verify vbma-extended -----------------------------------------------------

inline Outcome verify_vbma_extended(const RunConfig& cfg) {
  const int N = cfg.grid ? cfg.grid : 101;
  config_require(N >= 2, "--grid must be at least 2");
  config_require(cfg.extra_dims >= 0 && cfg.extra_rank >= 0, "--extra-dims and --extra-rank must be non-negative");
  config_require(3 + cfg.extra_dims <= 8, "--extra-dims too large for a dense top-degree evaluation");
  const double tol = cfg.tol.value_or(1e-10);
  const int k = cfg.extra_dims;
  const int n = 3 + k, r = 3 + cfg.extra_rank;
  const MatrixForm om = kahler(n, r);
  const EquationCoeffs eq = EquationCoeffs::vbma(n);
  const SymbolProbe witness_probe{CVector::Unit(n, 1), unit(r, 0, 0)};

  Outcome o;
  o.report = base_report(cfg);
  o.report["extra_dims"] = cfg.extra_dims;
  o.report["extra_rank"] = cfg.extra_rank;
  std::vector<PathPoint> pts;
  std::vector<double> residual, wit, ratio;
  double normalization = 0.0;  // engine value of the normalized 3-dimensional cube
  {
    const PathPoint p3 = vbma_extend(vbma_path(0.0), 0, 0);
    const CMatrix top3 = poly_residual(assemble(p3.data), kahler(3, 3), EquationCoeffs::vbma(3));
    normalization = top3(0, 0).real();
  }
  const double constant = binomial(k + 3, 3) * factorial(k) * normalization;
  const double expected_ratio = factorial(k + 3) / 3.0;
  double res_max = 0.0, ratio_spread = 0.0, ratio_ref = std::numeric_limits<double>::quiet_NaN();
  for (double t : make_grid(0.0, 1.0, N)) {
    PathPoint pt = vbma_extend(vbma_path(t), cfg.extra_rank, cfg.extra_dims);
    const MatrixForm f = assemble(pt.data);
    const CMatrix top = poly_residual(f, om, eq);
    residual.push_back((top - constant * identity(r)).norm() / (1.0 + constant));
    res_max = std::max(res_max, residual.back());
    wit.push_back(condition_e_value(f, om, eq, witness_probe));
    const double base = witness_3px_b2(pt.labels);
    ratio.push_back(std::abs(base) > 1e-6 ? wit.back() / base : std::numeric_limits<double>::quiet_NaN());
    if (std::isfinite(ratio.back())) {
      if (std::isnan(ratio_ref)) ratio_ref = ratio.back();
      ratio_spread = std::max(ratio_spread, std::abs(ratio.back() / ratio_ref - 1.0));
    }
    pts.push_back(std::move(pt));
  }
  o.checks = {
      check_le("residual_rel_max", res_max, tol),
      check_near("internal_normalization", normalization, 1.0, 1e-12),
      check_gt("witness_ratio_positive", ratio_ref, 0.0),
      check_le("witness_ratio_spread", ratio_spread, 1e-8),
      check_near("witness_ratio_vs_factorial", ratio_ref / expected_ratio, 1.0, 1e-8),
      check_le("witness_at_t1", std::abs(wit.back()), 1e-8),
      note("equation_constant", constant),
      note("witness_ratio", ratio_ref),
  };
  std::ostringstream os;
  os << "t";
  for (const char* c : kPathColumns) os << ',' << c;
  os << ",residual_rel,witness,witness_ratio\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << csv_number(pts[i].t);
    for (const char* c : kPathColumns) os << ',' << csv_number(pts[i].labels.at(c));
    os << ',' << csv_number(residual[i]) << ',' << csv_number(wit[i]) << ',' << csv_number(ratio[i]) << '\n';
  }
  o.csv = os.str();
  finish(o, {{"residual_rel", tol}, {"witness_ratio", 1e-8}, {"witness_zero", 1e-8}});
  return o;
}

// verify j-path ------------------------------------------------------------

inline Outcome verify_j_path(const RunConfig& cfg) {
  const int N = cfg.grid ? cfg.grid : 201;
  config_require(N >= 3, "--grid must be at least 3");
  const double tol = cfg.tol.value_or(1e-10);
  const MatrixForm om = kahler(3, 3);
  const EquationCoeffs eq = EquationCoeffs::j_equation(3);
  const SymbolProbe witness_probe{CVector::Unit(3, 2), unit(3, 0, 0)};

  Outcome o;
  o.report = base_report(cfg);
  std::vector<PathPoint> pts;
  std::vector<double> residual, wit;
  double closed_err = 0.0, seg1 = 0.0;
  for (double s : make_grid(0.0, 2.0, N)) {
    PathPoint pt = j_path(s);
    const MatrixForm f = assemble(pt.data);
    const CMatrix res = poly_residual(f, om, eq);
    residual.push_back(res.norm());
    closed_err = std::max(closed_err, (closed_j3(pt.data) - res).norm() / std::max(1.0, res.norm()));
    if (s <= 1.0) {
      const Labels& L = pt.labels;
      seg1 = std::max(seg1, std::abs(3.0 - (1.0 / L.at("r") + 1.0 / L.at("v") + 1.0 / L.at("z"))));
    }
    wit.push_back(condition_e_value(f, om, eq, witness_probe));
    pts.push_back(std::move(pt));
  }
  const double calibration = wit.front() / witness_j(pts.front().labels);
  double formula_err = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    formula_err = std::max(formula_err, std::abs(wit[i] - calibration * witness_j(pts[i].labels)));
  double seam = 0.0;
  {
    const Labels a = j_segment_labels(1, 1.0), b = j_segment_labels(2, 0.0);
    for (const char* c : kPathColumns) seam = std::max(seam, std::abs(a.at(c) - b.at(c)));
  }
  const RankOneMinimum m0 =
      EllipticityProbe(assemble(pts.front().data), om, eq).min_rank_one(cfg.restarts, cfg.seed);

  o.checks = {
      check_le("residual_norm_max", *std::max_element(residual.begin(), residual.end()), tol),
      check_le("closed_form_rel_err_max", closed_err, 1e-9),
      check_le("segment1_identity", seg1, 1e-14),
      check_le("segment_seam", seam, 1e-14),
      check_le("witness_vs_formula", formula_err, 1e-8),
      check_gt("witness_at_start", wit.front(), 0.0),
      check_le("witness_at_end", std::abs(wit.back()), 1e-8),
      check_gt("min_rank_one_at_start", m0.value, 0.0),
      note("witness_calibration", calibration),
  };
  o.report["min_rank_one_start"] = probe_to_json(m0);
  std::ostringstream os;
  os << "s";
  for (const char* c : kPathColumns) os << ',' << c;
  os << ",residual_norm,witness\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << csv_number(pts[i].t);
    for (const char* c : kPathColumns) os << ',' << csv_number(pts[i].labels.at(c));
    os << ',' << csv_number(residual[i]) << ',' << csv_number(wit[i]) << '\n';
  }
  o.csv = os.str();
  finish(o, {{"residual", tol}, {"closed_form_rel", 1e-9}, {"segment1_identity", 1e-14},
             {"witness_formula", 1e-8}, {"witness_zero", 1e-8}});
  return o;
}

// verify sigma2-lemmas -----------------------------------------------------

struct Sigma2Stats {
  double calibration = 0.0;  // engine / closed form at A_i = Id
  double closed_rel_err = 0.0;
  double kernel_err = 0.0;
  double kernel_max_value = -std::numeric_limits<double>::infinity();  // v* sigma2 v, should be <= 0
  int paths = 0;
  int crossings = 0;   // criterion reached zero along a path while sigma_2 was tracked
  int violations = 0;  // criterion reached zero with sigma_2 still positive definite
  int pointwise_hits = 0;
};

/// Hermitian A_i with (sum_{i != k} A_i) v = 0 for a unit v, obtained by
/// correcting one summand.
inline CurvatureData kernel_instance(Rng& rng, int n, int r, int k, CVector& v) {
  CurvatureData c = random_curvature(rng, n, r, false);
  v = random_vector(rng, r);
  v /= v.norm();
  CMatrix s = CMatrix::Zero(r, r);
  for (int i = 0; i < n; ++i)
    if (i != k) s += c.A[i];
  const CVector sv = s * v;
  const cplx vsv = v.dot(sv);
  const int l = (k + 1) % n;
  c.A[l] -= sv * v.adjoint() + v * sv.adjoint() - vsv * v * v.adjoint();
  c.A[l] = 0.5 * (c.A[l] + c.A[l].adjoint());
  return c;
}

inline double sigma2_min(const CurvatureData& c) {
  const CMatrix s = closed_sigma2(c);
  return hermitian_min_eigenvalue(0.5 * (s + s.adjoint()));
}

inline double criterion_min(const CurvatureData& c) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.n; ++k) m = std::min(m, sigma2_pd_criterion(c, k));
  return m;
}

/// Straight continuity paths from the trivial solution A_i = Id towards
/// random endpoints. While sigma_2 stays positive definite the criterion must
/// stay positive; a sign change is bisected and sigma_2 inspected at the zero.
inline void sigma2_paths(Rng& rng, int n, int r, int count, Sigma2Stats& st) {
  constexpr int kSteps = 40;
  const CurvatureData c0 = CurvatureData::trivial(n, r, 1.0);
  for (int p = 0; p < count; ++p) {
    const CurvatureData c1 = random_curvature(rng, n, r, true, 1.5);
    ++st.paths;
    double prev = 0.0;
    for (int step = 1; step <= kSteps; ++step) {
      const double s = static_cast<double>(step) / kSteps;
      const CurvatureData c = lerp(c0, c1, s);
      if (criterion_min(c) <= 0.0) {
        ++st.crossings;
        double a = prev, b = s;
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (a + b);
          (criterion_min(lerp(c0, c1, m)) > 0.0 ? a : b) = m;
        }
        // sigma_2 at the first zero of the criterion, and on the way there.
        bool stayed_pd = true;
        for (int q = 1; q <= 64 && stayed_pd; ++q) stayed_pd = sigma2_min(lerp(c0, c1, prev + (b - prev) * q / 64.0)) > 0.0;
        if (stayed_pd && sigma2_min(lerp(c0, c1, b)) > 1e-9) ++st.violations;
        break;
      }
      if (!(sigma2_min(c) > 0.0)) break;
      prev = s;
    }
  }
}

inline Sigma2Stats sigma2_lemmas(int n, int r, int trials, int paths, std::uint64_t seed) {
  Rng rng(seed);
  Sigma2Stats st;
  const MatrixForm om = kahler(n, r);
  const EquationCoeffs eq = EquationCoeffs::sigma_k(n, 2);
  {
    const CurvatureData id = CurvatureData::trivial(n, r, 1.0);
    st.calibration = poly_residual(assemble(id), om, eq)(0, 0).real() / closed_sigma2(id)(0, 0).real();
  }
  for (int t = 0; t < trials; ++t) {
    const CurvatureData c = random_curvature(rng, n, r);
    const CMatrix engine = poly_residual(assemble(c), om, eq);
    const CMatrix closed = st.calibration * closed_sigma2(c);
    st.closed_rel_err = std::max(st.closed_rel_err, (engine - closed).norm() / std::max(1.0, engine.norm()));
  }
  for (int t = 0; t < trials; ++t) {
    const int k = t % n;
    CVector v;
    const CurvatureData c = kernel_instance(rng, n, r, k, v);
    CMatrix pairs = CMatrix::Zero(r, r);
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs += sym2(c.A[i], c.A[j]);
      if (i != k) rhs -= (c.A[i] * v).squaredNorm();
    }
    const double lhs = v.dot(pairs * v).real();
    st.kernel_err = std::max(st.kernel_err, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    st.kernel_max_value = std::max(st.kernel_max_value, lhs);
  }
  for (int t = 0; t < paths; ++t) {
    const CurvatureData c = random_curvature(rng, n, r);
    if (sigma2_min(c) > 0.0 && criterion_min(c) <= 0.0) ++st.pointwise_hits;
  }
  sigma2_paths(rng, n, r, paths, st);
  return st;
}

inline Outcome verify_sigma2_lemmas(const RunConfig& cfg) {
  config_require(cfg.trials >= 1, "--trials must be positive");
  config_require(cfg.paths >= 0, "--paths must be non-negative");
  config_require(cfg.r >= 1 && cfg.r <= 6, "--r must lie in 1..6");
  std::vector<int> dims;
  if (cfg.n) {
    config_require(cfg.n >= 2 && cfg.n <= 6, "--n must lie in 2..6 for sigma2-lemmas");
    dims = {cfg.n};
  } else {
    dims = {2, 3, 4};
  }
  const double tol = cfg.tol.value_or(1e-9);
  Outcome o;
  o.report = base_report(cfg);
  json per = json::array();
  for (int n : dims) {
    const Sigma2Stats st = sigma2_lemmas(n, cfg.r, cfg.trials, cfg.paths, cfg.seed + static_cast<std::uint64_t>(n));
    const std::string tag = "n" + std::to_string(n) + "_";
    o.checks.push_back(check_near(tag + "calibration", st.calibration, factorial(n - 2), 1e-12 * factorial(n - 2)));
    o.checks.push_back(check_le(tag + "closed_form_rel_err", st.closed_rel_err, tol));
    o.checks.push_back(check_le(tag + "kernel_identity_err", st.kernel_err, tol));
    o.checks.push_back(check_le(tag + "kernel_value_max", st.kernel_max_value, tol));
    o.checks.push_back(check_le(tag + "preservation_violations", st.violations, 0.0));
    o.checks.push_back(note(tag + "preservation_crossings", st.crossings));
    o.checks.push_back(note(tag + "pointwise_pd_without_criterion", st.pointwise_hits));
    per.push_back({{"n", n}, {"calibration", st.calibration}, {"closed_form_rel_err", st.closed_rel_err},
                   {"kernel_identity_err", st.kernel_err}, {"kernel_value_max", st.kernel_max_value},
                   {"paths", st.paths}, {"crossings", st.crossings}, {"violations", st.violations},
                   {"pointwise_pd_without_criterion", st.pointwise_hits}});
  }
  o.report["dimensions"] = per;
  o.report["trials"] = cfg.trials;
  o.report["paths"] = cfg.paths;
  std::ostringstream os;
  os << "n,calibration,closed_form_rel_err,kernel_identity_err,paths,crossings,violations,pointwise_hits\n";
  for (const auto& j : per)
    os << j["n"] << ',' << csv_number(j["calibration"]) << ',' << csv_number(j["closed_form_rel_err"]) << ','
       << csv_number(j["kernel_identity_err"]) << ',' << j["paths"] << ',' << j["crossings"] << ',' << j["violations"]
       << ',' << j["pointwise_pd_without_criterion"] << '\n';
  o.csv = os.str();
  finish(o, {{"closed_form_rel", tol}, {"kernel_identity", tol}});
  return o;
}

// solve sigma-k / dhym -----------------------------------------------------

inline double jacobian_factor(double t) { return 36.0 * (1.0 + t) * (1.0 + 2.0 * t) * (1.0 - 0.9 * t); }

inline Outcome solve_sigma_k_cmd(const RunConfig& cfg) {
  const int n = cfg.n ? cfg.n : 4;
  config_require(cfg.k >= 3 && cfg.k < n, "sigma-k needs 3 <= k < n");
  config_require(n <= 8, "--n too large for a dense top-degree evaluation");
  config_require(cfg.eps >= 0.0 && cfg.eps <= 0.1, "--eps must lie in [0, 0.1]");
  const int N = cfg.grid ? cfg.grid : 21;
  config_require(N >= 2, "--grid must be at least 2");
  const double tol = cfg.tol.value_or(1e-8);

  SigmaKOptions opts;
  opts.seed = cfg.seed;
  PathReport rep = solve_sigma_k(cfg.k, n, cfg.eps, make_grid(0.0, 1.0, N), opts);
  Outcome o;
  o.report = base_report(cfg);
  for (auto& c : rep.checks)
    if (c.name == "residual_norm_max") c = check_le(c.name, c.value, tol);
  o.checks = rep.checks;
  double dev = 0.0;
  for (const auto& row : rep.rows)
    dev = std::max({dev, std::abs(row.unknowns[0] - vbma_u(row.t)), std::abs(row.unknowns[1] - vbma_z(row.t))});
  if (cfg.eps == 0.0) {
    o.checks.push_back(check_le("closed_form_deviation", dev, 1e-9));
    o.checks.push_back(check_near("amp_sq_at_eps0", rep.fit.amp_sq, 3.0, 1e-12));
  } else {
    o.checks.push_back(check_le("deviation_over_eps", dev / cfg.eps, 100.0));
  }
  const PositivityCertificate cert = certify_positive(jacobian_factor, 0.0, 1.0, 1001);
  o.checks.push_back(check_near("jacobian_factor_min", cert.min_value, 21.6, 1e-10));
  o.checks.push_back(check_near("jacobian_factor_argmin", cert.argmin, 1.0, 1e-9));
  o.report["path"] = path_report_to_json(rep);
  o.report["jacobian_factor_certificate"] = {{"min_value", cert.min_value}, {"argmin", cert.argmin},
                                             {"method", cert.method}};
  o.csv = path_report_csv(rep);
  finish(o, {{"residual", tol}, {"affine_fit", 1e-10}, {"witness_zero", 1e-8},
             {"closed_form", 1e-9}, {"deviation_over_eps", 100.0}});
  return o;
}

inline Outcome solve_dhym_cmd(const RunConfig& cfg) {
  const int n = cfg.n ? cfg.n : 3;
  config_require(n >= 3 && n <= 8, "dhym needs 3 <= n <= 8");
  config_require(cfg.delta > 0.0 && cfg.delta < 1.0,
                 "--delta must lie in (0,1): the continuation Jacobian vanishes at t = 0");
  config_require(cfg.eps >= 0.0 && cfg.eps <= 0.1, "--eps must lie in [0, 0.1]");
  config_require(cfg.theta > 0.0, "--theta must be positive");
  const int N = cfg.grid ? cfg.grid : 20;
  config_require(N >= 2, "--grid must be at least 2");
  const double tol = cfg.tol.value_or(1e-8);

  DhymOptions opts;
  opts.seed = cfg.seed;
  opts.restarts = cfg.restarts;
  PathReport rep = solve_dhym(n, cfg.eps, cfg.theta, make_grid(cfg.delta, 1.0, N), opts);
  Outcome o;
  o.report = base_report(cfg);
  for (auto& c : rep.checks)
    if (c.name == "residual_norm_max") c = check_le(c.name, c.value, tol);
  o.checks = rep.checks;
  double dev = 0.0;
  for (const auto& row : rep.rows) dev = std::max(dev, std::abs(row.unknowns[0] - (2.0 + 2.0 * row.t + 10.0 * row.t * row.t)));
  o.checks.push_back(check_le("v_deviation", dev, cfg.eps > 0.0 ? 10.0 * cfg.eps : 1e-9));
  o.report["path"] = path_report_to_json(rep);
  o.csv = path_report_csv(rep);
  finish(o, {{"residual", tol}, {"affine_fit", 1e-10}, {"offdiag", 1e-10}, {"witness_zero", 1e-8},
             {"v_deviation", cfg.eps > 0.0 ? 10.0 * cfg.eps : 1e-9}});
  return o;
}

// ellipticity --input ------------------------------------------------------

inline EquationCoeffs select_equation(const RunConfig& cfg, const MatrixForm& f, const MatrixForm& om, double* theta_hat) {
  const int n = f.dim();
  if (cfg.eq == "vbma") return EquationCoeffs::vbma(n);
  if (cfg.eq == "sigma-k") {
    config_require(cfg.k >= 1 && cfg.k <= n, "--k must lie in 1..n");
    return EquationCoeffs::sigma_k(n, cfg.k);
  }
  if (cfg.eq == "j") {
    config_require(n >= 2, "the J equation needs n >= 2");
    return EquationCoeffs::j_equation(n);
  }
  if (cfg.eq == "dhym") {
    double th = 0.0;
    if (cfg.theta_hat) {
      th = *cfg.theta_hat;
    } else {
      try {
        th = dhym_angle(f, om);
      } catch (const DegenerateAngleError& e) {
        throw ConfigError(std::string(e.what()) + "; pass --theta-hat explicitly");
      }
    }
    if (theta_hat) *theta_hat = th;
    return dhym_coeffs(n, th);
  }
  throw ConfigError("--eq must be one of vbma, sigma-k, j, dhym");
}

inline Outcome ellipticity_cmd(const RunConfig& cfg) {
  config_require(!cfg.input.empty(), "ellipticity needs --input <curvature.json>");
  CurvatureInput in;
  try {
    in = curvature_from_json(read_json_file(cfg.input));
  } catch (const ParseError& e) {
    throw ConfigError(std::string("malformed input: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed input: ") + e.what());
  }
  const MatrixForm f = assemble(in.data);
  const MatrixForm om = kahler(in.data.n, in.data.r, in.omega_weights);
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  const EquationCoeffs eq = select_equation(cfg, f, om, &theta_hat);
  const double tol = cfg.tol.value_or(1e-8);

  Outcome o;
  o.report = base_report(cfg);
  o.report["equation"] = cfg.eq;
  o.report["n"] = in.data.n;
  o.report["r"] = in.data.r;
  if (cfg.eq == "sigma-k") o.report["k"] = cfg.k;
  if (cfg.eq == "dhym") o.report["theta_hat"] = theta_hat;

  const EllipticityProbe probe(PreparedOperator(f, om, eq));
  const RankOneMinimum m = probe.min_rank_one(cfg.restarts, cfg.seed);
  const SymbolScan scan = probe.full_symbol_scan(cfg.samples, cfg.seed);
  o.report["min_rank_one"] = probe_to_json(m);
  o.report["symbol_scan"] = {{"min_singular", scan.min_singular}, {"directions", scan.directions},
                             {"bracketed", scan.bracketed},
                             {"method", "sampled covectors plus sign-change bisection (necessary check, not a proof)"}};
  o.checks = {check_gt("condition_e_min", m.value, 0.0), check_gt("symbol_scan_min", scan.min_singular, tol)};

  if (!cfg.witness.empty()) {
    int a = 0, i = 0, j = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(cfg.witness);
    is >> a >> c1 >> i >> c2 >> j;
    config_require(is && c1 == ',' && c2 == ',', "--witness expects a,i,j (1-based)");
    config_require(a >= 1 && a <= in.data.n && i >= 1 && i <= in.data.r && j >= 1 && j <= in.data.r,
                   "--witness indices out of range");
    const double w = probe.condition_e_value({CVector::Unit(in.data.n, a - 1), unit(in.data.r, i - 1, j - 1)});
    o.report["witness"] = {{"a", a}, {"i", i}, {"j", j}, {"value", w}};
    o.checks.push_back(note("witness_value", w));
  }
  if (cfg.eq == "sigma-k" && cfg.k == 2) {
    json crit = json::array();
    for (int k = 0; k < in.data.n; ++k) {
      const double v = sigma2_pd_criterion(in.data, k);
      crit.push_back(v);
      o.checks.push_back(note("sigma2_criterion_k" + std::to_string(k + 1), v));
    }
    o.report["sigma2_criterion"] = crit;
  }
  std::ostringstream os;
  os << "quantity,value\ncondition_e_min," << csv_number(m.value) << "\nsymbol_scan_min,"
     << csv_number(scan.min_singular) << '\n';
  o.csv = os.str();
  finish(o, {{"symbol_scan", tol}});
  return o;
}

// export-point -------------------------------------------------------------

inline Outcome export_point(const RunConfig& cfg) {
  PathPoint pt;
  if (cfg.target == "vbma") {
    config_require(cfg.t >= 0.0 && cfg.t <= 1.0, "--t must lie in [0,1] for the vbma path");
    pt = vbma_path(cfg.t);
    if (cfg.extra_dims || cfg.extra_rank) pt = vbma_extend(pt, cfg.extra_rank, cfg.extra_dims);
  } else if (cfg.target == "j") {
    config_require(cfg.t >= 0.0 && cfg.t <= 2.0, "--t must lie in [0,2] for the J path");
    pt = j_path(cfg.t);
  } else if (cfg.target == "trivial") {
    config_require(cfg.n >= 1 || cfg.n == 0, "--n must be positive");
    pt.data = CurvatureData::trivial(cfg.n ? cfg.n : 3, cfg.r, 1.0);
    pt.omega_weights.assign(pt.data.n, 1.0);
  } else {
    throw ConfigError("export-point path must be vbma, j or trivial");
  }
  Outcome o;
  o.report = curvature_to_json(pt.data, pt.omega_weights);
  return o;
}

inline Outcome dispatch(const RunConfig& cfg) {
  if (cfg.command == "verify") {
    if (cfg.target == "vbma-path") return verify_vbma_path(cfg);
    if (cfg.target == "vbma-extended") return verify_vbma_extended(cfg);
    if (cfg.target == "j-path") return verify_j_path(cfg);
    if (cfg.target == "sigma2-lemmas") return verify_sigma2_lemmas(cfg);
    throw ConfigError("unknown verify suite '" + cfg.target + "'");
  }
  if (cfg.command == "solve") {
    if (cfg.target == "sigma-k") return solve_sigma_k_cmd(cfg);
    if (cfg.target == "dhym") return solve_dhym_cmd(cfg);
    throw ConfigError("unknown solve family '" + cfg.target + "'");
  }
  if (cfg.command == "ellipticity") return ellipticity_cmd(cfg);
  if (cfg.command == "export-point") return export_point(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

inline void print_summary(const Outcome& o, std::ostream& os) {
  for (const auto& c : o.checks) {
    os << (c.gating ? (c.pass ? "[PASS] " : "[FAIL] ") : "[INFO] ") << c.name << " = " << csv_number(c.value);
    if (c.gating) os << "  (" << c.relation << ' ' << csv_number(c.tolerance) << ')';
    os << '\n';
  }
}

/// Runs one command, writes --out/--csv, returns the exit status.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Outcome o;
  try {
    o = dispatch(cfg);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    // Newton or feasibility failure: still leave a report behind.
    err << "failure: " << e.what() << '\n';
    json rep = base_report(cfg);
    rep["error"] = e.what();
    rep["pass"] = false;
    if (!cfg.out.empty()) write_text(cfg.out, rep.dump(2) + "\n");
    return kExitFail;
  }
  if (cfg.command == "export-point") {
    const std::string text = o.report.dump(2) + "\n";
    if (cfg.out.empty())
      out << text;
    else
      write_text(cfg.out, text);
    return kExitPass;
  }
  print_summary(o, out);
  if (!cfg.out.empty()) write_text(cfg.out, o.report.dump(2) + "\n");
  if (!cfg.csv.empty()) write_text(cfg.csv, o.csv);
  const bool pass = all_pass(o.checks);
  out << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitPass : kExitFail;
}

}  // namespace mvf::cli
