/// @file sim.hpp
/// @brief Run configuration, presets, initial data, the run loop and the
/// EOC harness.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpsim/energy.hpp"
#include "vpsim/grid.hpp"
#include "vpsim/materials.hpp"
#include "vpsim/state.hpp"

namespace vpsim {

/// SplitMix64 (Steele, Lea, Flood); one 64-bit output per call.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t s_;
};

enum class InitPreset { RandomUniform, SmoothSine };
enum class SigmaInit { Zero, B2Sqrt2Identity };

struct InitConfig {
  InitPreset preset = InitPreset::RandomUniform;
  double phi0_mean = 0.4;
  double perturb_amplitude = 0.05;
  std::uint64_t seed = 1;
  SigmaInit sigma = SigmaInit::Zero;
};

struct OutputConfig {
  long energy_every = 1;
  long snapshot_every = 0;  ///< 0: final snapshot only
  std::string out_dir = "out";
};

struct RunConfig {
  GridSpec grid{64, 64, 1.0, 1.0};
  double dt = 1e-4;
  long n_steps = 100;
  SchemeKind scheme = SchemeKind::SplittingChorin;
  ModelParams model{};
  InitConfig init{};
  OutputConfig output{};
  StepOptions step{};
  /// Throws std::invalid_argument.
  void validate() const;
};

struct EocConfig {
  RunConfig base;
  std::vector<double> dt_ladder{4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4};
  double dt_ref = 6.25e-5;
  double t_final = 0.032;
  void validate() const;
};

/// Experiment 1: phi0 = 0.4 +- 0.05 on [0,1]^2 (128^2), Flory-Huggins chi = 3,
/// splitting with Chorin projection, dt = 1e-4, sigma = B2 (sqrt2 - 1) 1.
RunConfig preset_experiment1();
/// Experiment 2: phi0 = 0.4 +- 0.001 on [0,128]^2 (128^2), C0 = 1, chi = 28/11,
/// sigma = 0; full model dt = 0.025, simplified second order dt = 0.25.
RunConfig preset_experiment2(bool simplified = false);
/// Table-1 setup: smooth sine data with experiment-1 parameters on 64^2.
EocConfig preset_eoc();

/// Flat "key = value" text. '#' starts a comment; blank lines are skipped.
/// Throws std::invalid_argument with the line number on malformed input or
/// duplicate keys.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_key_values(const std::string& text);
ConfigMap load_config_file(const std::string& path);

/// Applies "preset" first (if given), then every other key. Unknown keys
/// throw std::invalid_argument.
RunConfig run_config_from(const ConfigMap& kv);
EocConfig eoc_config_from(const ConfigMap& kv);

State init_state(const RunConfig& cfg);

/// Thrown by run(); code 2 for solver failure, 3 for non-finite fields.
class RunAborted : public std::runtime_error {
 public:
  RunAborted(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct RunSummary {
  std::string energy_csv;
  std::string final_snapshot;
  long steps = 0;
  double wall_seconds = 0.0;
};

/// Called after each accepted step with the old state, the step result and
/// its energy breakdown.
using StepObserver = std::function<void(const State&, const StepResult&, const EnergyBreakdown&)>;

/// Runs cfg.n_steps steps, writing energy.csv and VTK snapshots into
/// cfg.output.out_dir. Outputs written so far are flushed before RunAborted.
RunSummary run(const RunConfig& cfg, std::ostream* log = nullptr, const StepObserver& observer = {});

struct EocRow {
  double dt = 0.0;
  double err_phi = 0.0;
  double err_q = 0.0;
  double eoc_phi = 0.0;  ///< log2(e(2dt)/e(dt)); 0 on the first row
  double eoc_q = 0.0;
};

/// Runs base.scheme to t_final for each ladder dt and for dt_ref; L1 errors
/// hx hy sum |z - z_ref|.
std::vector<EocRow> run_eoc(const EocConfig& cfg, std::ostream* log = nullptr);

/// State after t_final with step dt (dt must divide t_final).
State integrate_to(const RunConfig& cfg, const State& s0, double dt, double t_final);

struct ValidationReport {
  bool ok = true;
  long rows = 0;
  std::vector<std::string> problems;
};

/// Checks the CSV header, finiteness, and
/// e_tot(k+1) <= e_tot(k) + rel_tol max(1, |e_tot(k)|).
ValidationReport validate_energy_csv(const std::string& path, double rel_tol = 1e-10);

}  // namespace vpsim
