#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heraldsim/fock.hpp"
#include "heraldsim/herald.hpp"
#include "heraldsim/phys_params.hpp"
#include "heraldsim/pulse.hpp"

namespace heraldsim {

enum class Engine { fock, pfunction, cooling_model, both };

struct PFunctionConfig {
  double extent = 0.0;   // 0 = auto (5 sqrt(n_thermal))
  int resolution = 256;
};

struct CoolingModelConfig {
  double n0 = 0.0;
  double lambda = 0.0;
  int rounds = 0;
  bool retune = false;
};

struct SweepEntry {
  std::string path;  // e.g. "oscillator.gamma"
  std::vector<double> values;
};

struct RunConfig {
  Engine engine = Engine::fock;
  RunMode mode = RunMode::conditioned;
  OscillatorSpec oscillator;
  SpinSpec spin;
  PulseSchedule schedule;
  std::optional<LabSetup> lab;
  PFunctionConfig pfunction;
  std::optional<CoolingModelConfig> cooling_model;
  int n_trajectories = 0;
  bool continue_on_fail = false;
  int max_restarts = 1000;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool strict_truncation = true;
  std::string output_dir = "out";
  std::vector<SweepEntry> sweep;
};

// Parse + validate UTF-8 JSON. Unknown keys are rejected by name; defaults
// per the schema (gamma=0, readout_fidelity=1, t2 absent = infinite, dim
// auto-sized to 10(n_thermal+1)).
RunConfig parse_config(const std::string& text);

// Cartesian expansion of the sweep entries, in declaration order. Returns
// (label, config-with-sweep-cleared) pairs; empty sweep yields one entry.
std::vector<std::pair<std::string, RunConfig>> expand_sweep(const RunConfig& base);

// Resolve a sweep parameter path and assign `value`; throws ConfigError for
// unknown paths.
void assign_parameter(RunConfig& cfg, const std::string& path, double value);

}  // namespace heraldsim
