#include "vpsim/sim.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vpsim/io.hpp"
#include "vpsim/schemes.hpp"

namespace vpsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

InitPreset parse_init_preset(const std::string& v) {
  if (v == "random_uniform") return InitPreset::RandomUniform;
  if (v == "smooth_sine") return InitPreset::SmoothSine;
  throw std::invalid_argument("unknown init preset '" + v + "'");
}

SigmaInit parse_sigma_init(const std::string& v) {
  if (v == "zero") return SigmaInit::Zero;
  if (v == "b2_sqrt2_identity") return SigmaInit::B2Sqrt2Identity;
  throw std::invalid_argument("unknown sigma_init '" + v + "'");
}

// The whole-run presets; "init.preset" also accepts them.
bool apply_preset(const std::string& name, RunConfig& c) {
  if (name == "experiment1") {
    c = preset_experiment1();
  } else if (name == "experiment2") {
    c = preset_experiment2(false);
  } else if (name == "experiment2_simplified") {
    c = preset_experiment2(true);
  } else if (name == "eoc") {
    c = preset_eoc().base;
  } else {
    return false;
  }
  return true;
}

void apply_key(RunConfig& c, const std::string& k, const std::string& v) {
  ModelParams& m = c.model;
  if (k == "preset") return;
  if (k == "grid.nx") c.grid.nx = static_cast<int>(to_long(k, v));
  else if (k == "grid.ny") c.grid.ny = static_cast<int>(to_long(k, v));
  else if (k == "grid.lx") c.grid.lx = to_double(k, v);
  else if (k == "grid.ly") c.grid.ly = to_double(k, v);
  else if (k == "time.dt") c.dt = to_double(k, v);
  else if (k == "time.steps") c.n_steps = to_long(k, v);
  else if (k == "scheme") c.scheme = parse_scheme(v);
  else if (k == "model.C0") m.C0 = to_double(k, v);
  else if (k == "model.M") m.M = to_double(k, v);
  else if (k == "model.mobility_exponent") m.mobility_exponent = static_cast<int>(to_long(k, v));
  else if (k == "model.tau_b0") m.tau_b0 = to_double(k, v);
  else if (k == "model.tau_s0") m.tau_s0 = to_double(k, v);
  else if (k == "model.ms0") m.ms0 = to_double(k, v);
  else if (k == "model.Mb0") m.Mb0 = to_double(k, v);
  else if (k == "model.Mb1") m.Mb1 = to_double(k, v);
  else if (k == "model.phi_star") m.phi_star = to_double(k, v);
  else if (k == "model.eps_A1") m.eps_A1 = to_double(k, v);
  else if (k == "model.potential") m.potential.variant = parse_potential(v);
  else if (k == "model.np") m.potential.np = to_double(k, v);
  else if (k == "model.ns") m.potential.ns = to_double(k, v);
  else if (k == "model.chi") m.potential.chi = to_double(k, v);
  else if (k == "model.fapprox") m.fapprox = parse_fapprox(v);
  else if (k == "model.phi_clamp_eps") m.phi_clamp_eps = to_double(k, v);
  else if (k == "model.eta_floor") m.eta_floor = to_double(k, v);
  else if (k == "init.preset") {
    if (!apply_preset(v, c)) c.init.preset = parse_init_preset(v);
  } else if (k == "init.phi0_mean") c.init.phi0_mean = to_double(k, v);
  else if (k == "init.perturb_amplitude") c.init.perturb_amplitude = to_double(k, v);
  else if (k == "init.seed") c.init.seed = static_cast<std::uint64_t>(to_long(k, v));
  else if (k == "sigma_init" || k == "init.sigma_init") c.init.sigma = parse_sigma_init(v);
  else if (k == "output.energy_every") c.output.energy_every = to_long(k, v);
  else if (k == "output.snapshot_every") c.output.snapshot_every = to_long(k, v);
  else if (k == "output.dir") c.output.out_dir = v;
  else if (k == "solver.rel_tol") c.step.solver.rel_tol = to_double(k, v);
  else if (k == "solver.max_iter") c.step.solver.max_iter = static_cast<int>(to_long(k, v));
  else if (k == "solver.method") c.step.solver.method = parse_solver_method(v);
  else if (k == "solver.jacobi") c.step.solver.jacobi = to_bool(k, v);
  else if (k == "solver.gmres_restart") c.step.solver.gmres_restart = static_cast<int>(to_long(k, v));
  else if (k == "fixpoint.delta") c.step.fixpoint.delta = to_double(k, v);
  else if (k == "fixpoint.max_l") c.step.fixpoint.max_l = static_cast<int>(to_long(k, v));
  else if (k == "mass.conserve") c.step.conserve_mass = to_bool(k, v);
  else throw std::invalid_argument("unknown config key '" + k + "'");
}

RunConfig config_with_preset(const ConfigMap& kv) {
  RunConfig c;
  if (auto it = kv.find("preset"); it != kv.end()) {
    if (!apply_preset(it->second, c)) throw std::invalid_argument("unknown preset '" + it->second + "'");
  }
  // init.preset may replace the whole config, so it goes before the rest.
  if (auto it = kv.find("init.preset"); it != kv.end()) apply_key(c, it->first, it->second);
  return c;
}

bool is_eoc_key(const std::string& k) { return k.rfind("eoc.", 0) == 0; }

double l1_error(const CellField& a, const CellField& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc * a.grid().cell_area();
}

long commensurate_steps(double t_final, double dt) {
  const double r = t_final / dt;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * n) {
    throw std::invalid_argument("t_final is not an integer multiple of dt");
  }
  return static_cast<long>(n);
}

double min_conf_eig(const State& s, const ModelParams& p) { return conformation_tensor(s, p).min_eigenvalue; }

}  // namespace

void RunConfig::validate() const {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("grid needs at least 2 cells per direction");
  if (!(grid.lx > 0.0) || !(grid.ly > 0.0)) throw std::invalid_argument("domain lengths must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(init.perturb_amplitude >= 0.0)) throw std::invalid_argument("perturb_amplitude must be >= 0");
  if (output.energy_every < 1) throw std::invalid_argument("energy_every must be >= 1");
  if (output.snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
  model.validate();
  step.solver.validate();
  if (!(step.fixpoint.delta > 0.0) || step.fixpoint.max_l < 1) {
    throw std::invalid_argument("fixpoint needs delta > 0 and max_l >= 1");
  }
}

void EocConfig::validate() const {
  RunConfig b = base;
  b.n_steps = 1;
  b.validate();
  if (is_full_model(base.scheme)) throw std::invalid_argument("the EOC study needs a simplified-model scheme");
  if (dt_ladder.empty()) throw std::invalid_argument("empty dt ladder");
  for (std::size_t k = 1; k < dt_ladder.size(); ++k) {
    if (!(dt_ladder[k] < dt_ladder[k - 1])) throw std::invalid_argument("dt ladder must be decreasing");
  }
  if (!(dt_ref > 0.0) || !(dt_ref < dt_ladder.back())) throw std::invalid_argument("dt_ref must be below the ladder");
  for (double dt : dt_ladder) commensurate_steps(t_final, dt);
  commensurate_steps(t_final, dt_ref);
}

RunConfig preset_experiment1() {
  RunConfig c;
  c.grid = GridSpec(128, 128, 1.0, 1.0);
  c.dt = 1e-4;
  c.n_steps = 5000;
  c.scheme = SchemeKind::SplittingChorin;
  ModelParams& m = c.model;
  m.C0 = 1.0 / 600.0;
  m.M = 10.0;
  m.tau_b0 = 10.0;
  m.tau_s0 = 5.0;
  m.ms0 = 0.2;
  m.Mb0 = 0.5;
  m.Mb1 = 1.0;
  m.phi_star = 0.4;
  m.eps_A1 = 0.01;
  m.potential = PotentialKind{PotentialKind::Variant::FloryHuggins, 1.0, 1.0, 3.0};
  m.fapprox = FApproxKind::F3OD2;
  c.init = InitConfig{InitPreset::RandomUniform, 0.4, 0.05, 1, SigmaInit::B2Sqrt2Identity};
  c.output.energy_every = 1;
  c.output.snapshot_every = 500;
  return c;
}

RunConfig preset_experiment2(bool simplified) {
  RunConfig c = preset_experiment1();
  c.grid = GridSpec(128, 128, 128.0, 128.0);
  c.model.C0 = 1.0;
  c.model.potential.chi = 28.0 / 11.0;
  c.init.perturb_amplitude = 0.001;
  c.init.sigma = SigmaInit::Zero;
  if (simplified) {
    c.scheme = SchemeKind::SimplifiedO2;
    c.dt = 0.25;
    c.n_steps = 4000;
    c.output.snapshot_every = 400;
  } else {
    c.scheme = SchemeKind::SplittingChorin;
    c.dt = 0.025;
    c.n_steps = 10000;
    c.output.snapshot_every = 1000;
  }
  return c;
}

EocConfig preset_eoc() {
  EocConfig e;
  e.base = preset_experiment1();
  e.base.grid = GridSpec(64, 64, 1.0, 1.0);
  e.base.scheme = SchemeKind::SimplifiedO2;
  e.base.init.preset = InitPreset::SmoothSine;
  e.base.init.sigma = SigmaInit::Zero;
  e.base.step.solver.rel_tol = 1e-12;
  return e;
}

ConfigMap parse_key_values(const std::string& text) {
  ConfigMap kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, val).second) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open config");
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_key_values(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

RunConfig run_config_from(const ConfigMap& kv) {
  RunConfig c = config_with_preset(kv);
  for (const auto& [k, v] : kv) {
    if (k == "init.preset") continue;
    if (is_eoc_key(k)) throw std::invalid_argument("eoc key '" + k + "' in a run config");
    apply_key(c, k, v);
  }
  c.validate();
  return c;
}

EocConfig eoc_config_from(const ConfigMap& kv) {
  EocConfig e = preset_eoc();
  ConfigMap run_kv;
  for (const auto& [k, v] : kv) {
    if (!is_eoc_key(k)) run_kv.emplace(k, v);
  }
  if (run_kv.count("preset") || run_kv.count("init.preset")) {
    e.base = config_with_preset(run_kv);
  }
  for (const auto& [k, v] : run_kv) {
    if (k != "init.preset") apply_key(e.base, k, v);
  }
  for (const auto& [k, v] : kv) {
    if (k == "eoc.dt_ladder") e.dt_ladder = to_list(k, v);
    else if (k == "eoc.dt_ref") e.dt_ref = to_double(k, v);
    else if (k == "eoc.t_final") e.t_final = to_double(k, v);
    else if (is_eoc_key(k)) throw std::invalid_argument("unknown config key '" + k + "'");
  }
  e.validate();
  return e;
}

State init_state(const RunConfig& cfg) {
  const GridSpec& g = cfg.grid;
  State s(g);
  if (cfg.init.preset == InitPreset::RandomUniform) {
    SplitMix64 rng(cfg.init.seed);
    const double a = cfg.init.perturb_amplitude;
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
      const double r = rng.uniform();
      s.phi[k] = a == 0.0 ? cfg.init.phi0_mean : cfg.init.phi0_mean + a * (2.0 * r - 1.0);
    }
  } else {
    const double tp = 2.0 * std::numbers::pi;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        s.phi(i, j) = 0.5 + 0.5 * std::sin(tp * g.xc(i) / g.lx) * std::sin(tp * g.yc(j) / g.ly);
      }
    }
  }
  if (cfg.init.sigma == SigmaInit::B2Sqrt2Identity) {
    CellField b(g);
    for (std::size_t k = 0; k < b.size(); ++k) {
      b[k] = coefficients(cfg.model, s.phi[k]).B2 * (std::numbers::sqrt2 - 1.0);
    }
    s.sigma = SymTensorField::isotropic(b);
  }
  return s;
}

RunSummary run(const RunConfig& cfg, std::ostream* log, const StepObserver& observer) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output.out_dir);
  fs::create_directories(dir);

  RunSummary sum;
  sum.energy_csv = (dir / "energy.csv").string();
  sum.final_snapshot = (dir / "final.vtk").string();
  std::ofstream csv(sum.energy_csv);
  if (!csv) throw std::runtime_error(sum.energy_csv + ": cannot open for writing");

  State s = init_state(cfg);
  csv << energy_csv_header() << '\n'
      << energy_csv_row(0, s.t, energy(s, cfg.model), min_conf_eig(s, cfg.model)) << '\n';

  auto snapshot_name = [&](long step) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%06ld.vtk", step);
    return (dir / buf).string();
  };
  if (cfg.output.snapshot_every > 0) write_snapshot(s, snapshot_name(0));

  auto abort_run = [&](const std::string& why, int code) {
    csv.flush();
    write_snapshot(s, sum.final_snapshot);
    throw RunAborted("step " + std::to_string(s.step + 1) + ": " + why, code);
  };

  for (long n = 1; n <= cfg.n_steps; ++n) {
    StepResult r;
    try {
      r = advance(cfg.scheme, s, cfg.model, cfg.dt, cfg.step);
    } catch (const SolverError& e) {
      abort_run(std::string("linear solver failed: ") + e.what(), 2);
    } catch (const FixpointError& e) {
      abort_run(std::string("fixpoint iteration failed: ") + e.what(), 2);
    }
    if (!r.state.all_finite()) abort_run("non-finite field values", 3);
    const EnergyBreakdown e = step_breakdown(s, r.state, r.aux, cfg.model);
    if (!std::isfinite(e.e_tot)) abort_run("non-finite energy", 3);
    if (observer) observer(s, r, e);
    s = std::move(r.state);
    if (n % cfg.output.energy_every == 0) {
      csv << energy_csv_row(n, s.t, e, min_conf_eig(s, cfg.model)) << '\n';
    }
    if (cfg.output.snapshot_every > 0 && n % cfg.output.snapshot_every == 0) write_snapshot(s, snapshot_name(n));
    if (log && n % 100 == 0) *log << "step " << n << " t " << s.t << " e_tot " << e.e_tot << '\n';
    sum.steps = n;
  }
  csv.flush();
  if (!csv) throw std::runtime_error(sum.energy_csv + ": write failed");
  write_snapshot(s, sum.final_snapshot);
  sum.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sum;
}

State integrate_to(const RunConfig& cfg, const State& s0, double dt, double t_final) {
  const long n = commensurate_steps(t_final, dt);
  State s = s0;
  for (long k = 0; k < n; ++k) s = advance(cfg.scheme, s, cfg.model, dt, cfg.step).state;
  return s;
}

std::vector<EocRow> run_eoc(const EocConfig& cfg, std::ostream* log) {
  cfg.validate();
  const State s0 = init_state(cfg.base);
  const State ref = integrate_to(cfg.base, s0, cfg.dt_ref, cfg.t_final);
  std::vector<EocRow> rows;
  for (double dt : cfg.dt_ladder) {
    const State s = integrate_to(cfg.base, s0, dt, cfg.t_final);
    EocRow r;
    r.dt = dt;
    r.err_phi = l1_error(s.phi, ref.phi);
    r.err_q = l1_error(s.q, ref.q);
    if (!rows.empty()) {
      r.eoc_phi = std::log2(rows.back().err_phi / r.err_phi);
      r.eoc_q = std::log2(rows.back().err_q / r.err_q);
    }
    if (log) *log << "dt " << dt << " err_phi " << r.err_phi << " err_q " << r.err_q << '\n';
    rows.push_back(r);
  }
  return rows;
}

ValidationReport validate_energy_csv(const std::string& path, double rel_tol) {
  ValidationReport rep;
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open");
  auto problem = [&](const std::string& msg) {
    rep.ok = false;
    if (rep.problems.size() < 20) rep.problems.push_back(msg);
  };
  std::string line;
  if (!std::getline(is, line) || trim(line) != energy_csv_header()) {
    problem("header mismatch");
    return rep;
  }
  constexpr int cols = 14;
  constexpr int e_tot_col = 6;
  bool have_prev = false;
  double prev = 0.0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    ++rep.rows;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        v.push_back(NAN);
      }
    }
    const std::string where = "row " + std::to_string(rep.rows);
    if (static_cast<int>(v.size()) != cols) {
      problem(where + ": expected " + std::to_string(cols) + " columns");
      continue;
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        problem(where + ": non-finite value");
        break;
      }
    }
    const double e = v[e_tot_col];
    if (have_prev && e > prev + rel_tol * std::max(1.0, std::abs(prev))) {
      std::ostringstream os;
      os.precision(17);
      os << where << ": e_tot increased from " << prev << " to " << e;
      problem(os.str());
    }
    prev = e;
    have_prev = true;
  }
  if (rep.rows == 0) problem("no data rows");
  return rep;
}

}  // namespace vpsim
