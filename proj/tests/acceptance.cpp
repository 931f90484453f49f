// One line per acceptance criterion; exit status 0 iff every line passes.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mvf/cli.hpp"

using namespace mvf;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
};

std::vector<Check> suite(cli::RunConfig cfg) {
  return cli::dispatch(cfg).checks;
}

cli::RunConfig config(const std::string& command, const std::string& target) {
  cli::RunConfig cfg;
  cfg.command = command;
  cfg.target = target;
  return cfg;
}

void append(std::vector<Check>& out, const std::vector<Check>& more, const std::string& prefix = "") {
  for (Check c : more) {
    c.name = prefix + c.name;
    out.push_back(std::move(c));
  }
}

Criterion vbma_path_criterion() {
  Criterion c{1, "vbMA path: residual, K certificate, witness", {}};
  cli::RunConfig cfg = config("verify", "vbma-path");
  cfg.grid = 101;
  append(c.checks, suite(cfg));
  return c;
}

Criterion lemma_criterion() {
  Criterion c{2, "closed-form cube vs engine, sym3 identity", {}};
  Rng rng(2002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int r = 1 + i % 4;
    const CurvatureData d = random_curvature(rng, 3, r);
    const CMatrix engine = poly_residual(assemble(d), kahler(3, r), EquationCoeffs::vbma(3));
    worst = std::max(worst, (closed_vbma3(d) - engine).norm() / std::max(1.0, engine.norm()));
  }
  c.checks.push_back(check_le("closed_vbma3_rel_err_max", worst, 1e-9));
  const CMatrix s = sym3(unit(3, 0, 2), unit(3, 1, 0), unit(3, 2, 1));
  c.checks.push_back(check_le("sym3_E13_E21_E32_minus_identity", (s - identity(3)).norm(), 0.0));
  return c;
}

Criterion extension_criterion() {
  Criterion c{3, "block extension constant and witness ratio", {}};
  for (auto [dims, rank] : {std::pair{0, 1}, {1, 0}, {1, 1}, {2, 2}}) {
    cli::RunConfig cfg = config("verify", "vbma-extended");
    cfg.extra_dims = dims;
    cfg.extra_rank = rank;
    append(c.checks, suite(cfg), "(" + std::to_string(dims) + "," + std::to_string(rank) + ") ");
  }
  return c;
}

Criterion sigma2_criterion() {
  Criterion c{4, "sigma_2 closed form, kernel identity, 10^4 path trials", {}};
  cli::RunConfig cfg = config("verify", "sigma2-lemmas");
  cfg.trials = 200;
  cfg.paths = 10000;
  append(c.checks, suite(cfg));
  // Kernel identity again, in absolute terms.
  Rng rng(4004);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 3, r = 1 + t % 3, k = t % n;
    CVector v;
    const CurvatureData d = cli::kernel_instance(rng, n, r, k, v);
    CMatrix pairs = CMatrix::Zero(r, r);
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs += d.A[i] * d.A[j] + d.A[j] * d.A[i];
      if (i != k) rhs -= (d.A[i] * v).squaredNorm();
    }
    worst = std::max(worst, std::abs(v.dot(pairs * v).real() - rhs));
  }
  c.checks.push_back(check_le("kernel_identity_abs_err", worst, 1e-9));
  return c;
}

Criterion j_criterion() {
  Criterion c{5, "J path: residual, segment identity, witness formula", {}};
  cli::RunConfig cfg = config("verify", "j-path");
  cfg.grid = 201;
  append(c.checks, suite(cfg));
  return c;
}

Criterion sigma_k_criterion() {
  Criterion c{6, "sigma_3 continuation on n = 4", {}};
  for (double eps : {0.0, 1e-3}) {
    cli::RunConfig cfg = config("solve", "sigma-k");
    cfg.k = 3;
    cfg.n = 4;
    cfg.eps = eps;
    append(c.checks, suite(cfg), eps == 0.0 ? "eps=0 " : "eps=1e-3 ");
  }
  return c;
}

Criterion dhym_criterion() {
  Criterion c{7, "dHYM continuation near the J equation", {}};
  for (double eps : {1e-3, 1e-2}) {
    cli::RunConfig cfg = config("solve", "dhym");
    cfg.eps = eps;
    cfg.theta = 1.0;
    cfg.delta = 0.05;
    append(c.checks, suite(cfg), eps == 1e-3 ? "eps=1e-3 " : "eps=1e-2 ");
  }
  Rng rng(7007);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 3, r = 1 + i % 3;
    const CurvatureData d = random_curvature(rng, n, r);
    const double th = ang(rng);
    const MatrixForm f = assemble(d), om = kahler(n, r);
    const CMatrix direct = dhym_direct(f, om, th);
    worst = std::max(worst, (poly_residual(f, om, dhym_coeffs(n, th)) - direct).norm() / std::max(1.0, direct.norm()));
  }
  c.checks.push_back(check_le("dhym_coeffs_vs_direct", worst, 1e-10));
  return c;
}

Criterion ellipticity_criterion() {
  Criterion c{8, "pairing identity, trivial symbol, endpoint scan", {}};
  Rng rng(8008);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 3, r = 1 + i % 3;
    const CurvatureData d = random_curvature(rng, n, r);
    const EquationCoeffs eq = i % 4 == 0   ? EquationCoeffs::vbma(n)
                              : i % 4 == 1 ? EquationCoeffs::j_equation(n)
                              : i % 4 == 2 ? EquationCoeffs::sigma_k(n, 1 + i % n)
                                           : dhym_coeffs(n, 0.37 * i);
    auto [lhs, rhs] = pairing_check(assemble(d), kahler(n, r), eq, random_vector(rng, n), random_matrix(rng, r));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  c.checks.push_back(check_le("pairing_identity", worst, 1e-10));

  const MatrixForm triv = assemble(CurvatureData::trivial(3, 3));
  double sym_err = 0.0;
  for (int k = 0; k < 3; ++k)
    sym_err = std::max(sym_err,
                       (symbol_matrix(triv, kahler(3, 3), EquationCoeffs::vbma(3), CVector::Unit(3, k)) - 6.0 * identity(9)).norm());
  for (int i = 0; i < 20; ++i) {
    CVector chi = random_vector(rng, 3);
    chi /= chi.norm();
    sym_err = std::max(sym_err, (symbol_matrix(triv, kahler(3, 3), EquationCoeffs::vbma(3), chi) - 6.0 * identity(9)).norm());
  }
  c.checks.push_back(check_le("trivial_symbol_minus_6Id", sym_err, 1e-12));

  const SymbolScan scan = full_symbol_scan(assemble(vbma_path(1.0).data), kahler(3, 3), EquationCoeffs::vbma(3), 8, 1);
  c.checks.push_back(check_le("symbol_scan_at_vbma_t1", scan.min_singular, 1e-8));
  c.checks.push_back(note("scan_directions", scan.directions));
  return c;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  using Builder = Criterion (*)();
  const Builder builders[] = {vbma_path_criterion, lemma_criterion,   extension_criterion,  sigma2_criterion,
                              j_criterion,         sigma_k_criterion, dhym_criterion,        ellipticity_criterion};
  int failed = 0;
  for (int id = 1; id <= 8; ++id) {
    const Builder b = builders[id - 1];
    Criterion c{id, "", {}};
    std::string error;
    try {
      c = b();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const bool pass = error.empty() && all_pass(c.checks);
    std::ostringstream detail;
    int gating = 0;
    for (const auto& ch : c.checks) {
      if (!ch.gating) continue;
      ++gating;
      if (!ch.pass) detail << "  " << ch.name << "=" << fmt(ch.value) << " (" << ch.relation << " " << fmt(ch.tolerance) << ")";
    }
    if (!error.empty()) detail << "  error: " << error;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << c.title << " (" << gating
              << " checks)" << detail.str() << '\n';
    if (verbose) cli::print_summary(cli::Outcome{json::object(), "", c.checks}, std::cout);
    failed += !pass;
  }
  std::cout << (failed ? "FAIL" : "PASS") << ": " << (8 - failed) << "/8 criteria\n";
  return failed ? 1 : 0;
}
