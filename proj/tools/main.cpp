// gpscat <command> [--config PATH] [--out DIR] [overrides]
// Exit status: 0 ok, 1 tolerance breach or smallness failure, 2 invalid input.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "gpscat/errors.hpp"

using gpscat::cli::ExperimentConfig;

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for small-data scattering of the Gross-Pitaevskii equation"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "gpscat_out";
  std::optional<long long> seed;
  std::optional<int> d, N;
  std::optional<double> L, sigma, s, tol_scale;
  bool snapshots = false;
  app.add_option("--config", config_path, "flat JSON config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "overrides data.seed");
  app.add_option("--d", d, "overrides grid.d");
  app.add_option("--N", N, "overrides grid.N");
  app.add_option("--L", L, "overrides grid.L");
  app.add_option("--sigma", sigma, "overrides solve.sigma");
  app.add_option("--s", s, "overrides solve.s");
  app.add_option("--tol-scale", tol_scale, "overrides tol.scale");
  app.add_flag("--snapshots", snapshots, "also write binary field snapshots");
  for (const auto& name : gpscat::cli::command_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    gpscat::cli::RunContext ctx;
    if (!config_path.empty()) ctx.config = ExperimentConfig::load(config_path);
    if (seed) ctx.config.set("data.seed", *seed);
    if (d) ctx.config.set("grid.d", *d);
    if (N) ctx.config.set("grid.N", *N);
    if (L) ctx.config.set("grid.L", *L);
    if (sigma) ctx.config.set("solve.sigma", *sigma);
    if (s) ctx.config.set("solve.s", *s);
    if (tol_scale) ctx.config.set("tol.scale", *tol_scale);
    ctx.out_dir = out_dir;
    ctx.snapshots = snapshots;
    ctx.log = &std::cout;
    const std::string command = app.get_subcommands().front()->get_name();
    const int status = gpscat::cli::run_command(command, ctx);
    std::cout << command << ": " << (status == 0 ? "PASS" : "FAIL (tolerance breach)") << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "gpscat: error: " << e.what() << "\n";
    return gpscat::cli::exit_code_for(e);
  }
}
