// Command-line driver: run, eoc, validate.
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vpsim/krylov.hpp"
#include "vpsim/sim.hpp"
#include "vpsim/state.hpp"

namespace {

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> steps;
  bool quiet = false;
};

void apply(const Overrides& o, vpsim::RunConfig& c) {
  if (o.out_dir) c.output.out_dir = *o.out_dir;
  if (o.seed) c.init.seed = *o.seed;
  if (o.steps) c.n_steps = *o.steps;
}

int cmd_run(const std::string& path, const Overrides& o) {
  vpsim::RunConfig cfg = vpsim::run_config_from(vpsim::load_config_file(path));
  apply(o, cfg);
  try {
    const vpsim::RunSummary s = vpsim::run(cfg, o.quiet ? nullptr : &std::cerr);
    if (!o.quiet) {
      std::cout << "steps " << s.steps << "\nenergy " << s.energy_csv << "\nfinal " << s.final_snapshot
                << "\nwall_seconds " << s.wall_seconds << '\n';
    }
    return 0;
  } catch (const vpsim::RunAborted& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    return e.code();
  }
}

int cmd_eoc(const std::string& path, const Overrides& o) {
  vpsim::EocConfig cfg = vpsim::eoc_config_from(vpsim::load_config_file(path));
  apply(o, cfg.base);
  try {
    const auto rows = vpsim::run_eoc(cfg, o.quiet ? nullptr : &std::cerr);
    std::cout << "dt,L1_err_phi,EOC_phi,L1_err_q,EOC_q\n" << std::setprecision(10);
    for (const auto& r : rows) {
      std::cout << r.dt << ',' << r.err_phi << ',' << r.eoc_phi << ',' << r.err_q << ',' << r.eoc_q << '\n';
    }
    return 0;
  } catch (const vpsim::SolverError& e) {
    std::cerr << "eoc aborted: " << e.what() << '\n';
    return 2;
  } catch (const vpsim::FixpointError& e) {
    std::cerr << "eoc aborted: " << e.what() << '\n';
    return 2;
  }
}

int cmd_validate(const std::string& path, double tol, bool quiet) {
  const vpsim::ValidationReport r = vpsim::validate_energy_csv(path, tol);
  for (const auto& p : r.problems) std::cerr << p << '\n';
  if (!quiet) std::cout << (r.ok ? "ok" : "FAILED") << ' ' << r.rows << " rows\n";
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscoelastic phase-separation simulator"};
  app.require_subcommand(1);
  Overrides o;
  std::string config, csv;
  double tol = 1e-10;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", o.out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "PRNG seed (overrides init.seed)");
    sub->add_option("--steps", o.steps, "Step count (overrides time.steps)")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", o.quiet, "Suppress progress output");
  };
  CLI::App* run = app.add_subcommand("run", "Run a simulation from a config file");
  run->add_option("config", config, "Config file")->required();
  add_common(run);
  CLI::App* eoc = app.add_subcommand("eoc", "Time-convergence study from a config file");
  eoc->add_option("config", config, "Config file")->required();
  add_common(eoc);
  CLI::App* val = app.add_subcommand("validate", "Check an energy CSV for monotone total energy");
  val->add_option("csv", csv, "energy.csv")->required();
  val->add_option("--tol", tol, "Relative tolerance per step");
  val->add_flag("--quiet", o.quiet, "Only set the exit status");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config, o);
    if (eoc->parsed()) return cmd_eoc(config, o);
    return cmd_validate(csv, tol, o.quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
