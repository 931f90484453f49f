// mvf: verification and continuation runs for matrix-valued curvature paths.

#include <CLI11.hpp>

#include "mvf/cli.hpp"

namespace {

void common_flags(CLI::App* app, mvf::cli::RunConfig& cfg) {
  app->add_option("--seed", cfg.seed, "random seed");
  app->add_option("--tol", cfg.tol, "override the primary residual tolerance");
  app->add_option("--out", cfg.out, "JSON report path");
  app->add_option("--csv", cfg.csv, "CSV trace path");
  app->add_option("--restarts", cfg.restarts, "random starts for the rank-one minimizer")->check(CLI::PositiveNumber);
  app->add_option("--samples", cfg.samples, "random covectors in the symbol scan")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvf - pointwise algebra of matrix-valued forms and the vbMA / sigma_k / J / dHYM counter-example paths"};
  app.require_subcommand(1);
  mvf::cli::RunConfig cfg;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", cfg.target, "vbma-path | vbma-extended | j-path | sigma2-lemmas")
      ->required()
      ->check(CLI::IsMember({"vbma-path", "vbma-extended", "j-path", "sigma2-lemmas"}));
  verify->add_option("--grid", cfg.grid, "grid points");
  verify->add_option("--trials", cfg.trials, "random instances per property (sigma2-lemmas)");
  verify->add_option("--paths", cfg.paths, "continuity paths for the preservation check (sigma2-lemmas)");
  verify->add_option("--n", cfg.n, "base dimension (sigma2-lemmas; default 2,3,4)");
  verify->add_option("--r", cfg.r, "bundle rank (sigma2-lemmas)");
  verify->add_option("--extra-dims", cfg.extra_dims, "extra base directions (vbma-extended)");
  verify->add_option("--extra-rank", cfg.extra_rank, "extra bundle rank (vbma-extended)");
  common_flags(verify, cfg);

  auto* solve = app.add_subcommand("solve", "run a continuation");
  solve->add_option("family", cfg.target, "sigma-k | dhym")->required()->check(CLI::IsMember({"sigma-k", "dhym"}));
  solve->add_option("--grid", cfg.grid, "grid points");
  solve->add_option("--k", cfg.k, "sigma_k degree");
  solve->add_option("--n", cfg.n, "base dimension");
  solve->add_option("--eps", cfg.eps, "perturbation parameter");
  solve->add_option("--theta", cfg.theta, "dHYM angle scale");
  solve->add_option("--delta", cfg.delta, "dHYM grid start, > 0");
  common_flags(solve, cfg);

  auto* ell = app.add_subcommand("ellipticity", "Condition E and symbol scan for a curvature file");
  ell->add_option("--input", cfg.input, "curvature JSON")->required();
  ell->add_option("--eq", cfg.eq, "vbma | sigma-k | j | dhym")->check(CLI::IsMember({"vbma", "sigma-k", "j", "dhym"}));
  ell->add_option("--k", cfg.k, "sigma_k degree");
  ell->add_option("--theta-hat", cfg.theta_hat, "dHYM phase; default arg Tr((omega - F)^n)");
  ell->add_option("--witness", cfg.witness, "also evaluate the probe (dz^a, E_ij), given as a,i,j (1-based)");
  common_flags(ell, cfg);

  auto* exp = app.add_subcommand("export-point", "write one path point as curvature JSON");
  exp->add_option("path", cfg.target, "vbma | j | trivial")->required()->check(CLI::IsMember({"vbma", "j", "trivial"}));
  exp->add_option("--t", cfg.t, "path parameter");
  exp->add_option("--n", cfg.n, "dimension (trivial)");
  exp->add_option("--r", cfg.r, "rank (trivial)");
  exp->add_option("--extra-dims", cfg.extra_dims, "extra base directions (vbma)");
  exp->add_option("--extra-rank", cfg.extra_rank, "extra bundle rank (vbma)");
  exp->add_option("--out", cfg.out, "output path; stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mvf::cli::kExitConfig;
  }
  for (auto* sub : {verify, solve, ell, exp})
    if (sub->parsed()) cfg.command = sub->get_name();
  return mvf::cli::run(cfg);
}
