#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accrete/driver.hpp"

namespace {

void print_report(const accrete::RunReport& rep) {
  std::printf("%s: %s\n", rep.command.c_str(), rep.summary.c_str());
  for (const auto& c : rep.convergence)
    std::printf("  n_cells %5d  linf %.3e  l2 %.3e\n", c.n_cells, c.linf, c.l2);
  if (rep.fitted_order) std::printf("  fitted order %.3f\n", *rep.fitted_order);
  for (const auto& c : rep.checks)
    std::printf("  [%s] %s = %.3e (%s %.3e)\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.value,
                c.at_least ? "min" : "tol", c.tolerance);
  std::printf("  wall %.3f s\n", rep.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth of incompressible bodies by surface accretion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", accrete::kVersion);

  std::string config, out = "out", seeds;
  std::vector<int> cells;
  accrete::DriverOptions opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--tol-scale", opt.tol_scale, "multiplier on every residual tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "sample the closed-form fields at the output times");
  common(run);
  auto* cmp = app.add_subcommand("compare", "grid solver against the closed form");
  common(cmp);
  cmp->add_option("--cells", cells, "resolution(s); several run a convergence study")->delimiter(',');
  auto* chr = app.add_subcommand("characteristics", "trace characteristic curves");
  common(chr);
  chr->add_option("--seeds", seeds, "e.g. tau:0,tau:0.5,r:1.2 (default: 8 surface seeds)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : accrete::exit_config;
  }

  try {
    const auto cfg = accrete::load_config(config);
    accrete::RunReport rep;
    if (*run) rep = accrete::cmd_run(cfg, out, opt);
    else if (*cmp) rep = accrete::cmd_compare(cfg, cells, out, opt);
    else rep = accrete::cmd_characteristics(cfg, accrete::parse_seeds(seeds), out, opt);
    print_report(rep);
    return rep.exit_code();
  } catch (const accrete::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return accrete::exit_config;
  } catch (const accrete::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return accrete::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return accrete::exit_solver;
  }
}
