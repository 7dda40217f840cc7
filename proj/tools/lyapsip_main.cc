#include <iostream>

#include <CLI11.hpp>

#include "lyapsip/commands.h"

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov and Chetaev certificate synthesis by sampled max-min relaxation"};
  app.require_subcommand(1);

  lyapsip::CommandOptions opts;
  std::uint64_t seed = 0;
  int grid = 0, restarts = 0;

  auto* synth = app.add_subcommand("synth", "synthesize a certificate from a config");
  synth->add_option("--config", opts.config, "run config (JSON)")->required();
  synth->add_option("--out", opts.out, "output directory (overrides output.dir)");
  auto* seed_opt = synth->add_option("--seed", seed, "master seed");
  auto* restarts_opt = synth->add_option("--restarts", restarts, "annealing restarts");
  auto* grid_opt = synth->add_option("--grid", grid, "verification grid points");

  auto* verify = app.add_subcommand("verify", "verify a certificate and tabulate sphere curves");
  verify->add_option("--cert", opts.cert, "certificate (JSON)")->required();
  verify->add_option("--config", opts.config, "run config; defaults to the embedded one");
  verify->add_option("--out", opts.out, "output directory (overrides output.dir)");
  verify->add_option("--radii", opts.radii, "radii list or count");
  auto* vgrid_opt = verify->add_option("--grid", grid, "verification grid points");

  auto* curves = app.add_subcommand("curves", "tabulate min V and max dV/dt on spheres");
  curves->add_option("--cert", opts.cert, "certificate (JSON)")->required();
  curves->add_option("--config", opts.config, "run config; defaults to the embedded one");
  curves->add_option("--out", opts.out, "output directory (overrides output.dir)");
  curves->add_option("--radii", opts.radii, "radii list (\"0.1,0.2\") or count (\"50\")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lyapsip::kExitInputError;
  }
  if (seed_opt->count()) opts.seed = seed;
  if (restarts_opt->count()) opts.restarts = restarts;
  if (grid_opt->count() || vgrid_opt->count()) opts.grid = grid;

  if (synth->parsed()) return lyapsip::CmdSynth(opts, std::cout, std::cerr);
  if (verify->parsed()) return lyapsip::CmdVerify(opts, std::cout, std::cerr);
  return lyapsip::CmdCurves(opts, std::cout, std::cerr);
}
