#include "heraldsim/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heraldsim/errors.hpp"

namespace heraldsim {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + (where.empty() ? "" : where + ".") +
                        it.key() + "\"");
  }
}

double get_num(const json& obj, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number())
    throw ConfigError("field \"" + key + "\" must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer())
    throw ConfigError("field \"" + key + "\" must be an integer");
  return obj[key].get<int>();
}

bool get_bool(const json& obj, const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_boolean())
    throw ConfigError("field \"" + key + "\" must be a boolean");
  return obj[key].get<bool>();
}

OscillatorSpec parse_oscillator(const json& j) {
  require_keys(j, "oscillator",
               {"omega", "gamma", "gamma_h", "n_thermal", "dim"});
  OscillatorSpec spec;
  spec.omega = get_num(j, "omega", 1.0);
  spec.gamma = get_num(j, "gamma", 0.0);
  spec.gamma_h = get_num(j, "gamma_h", 0.0);
  spec.n_thermal = get_num(j, "n_thermal", 0.0);
  const int auto_dim =
      std::max(32, static_cast<int>(std::ceil(10.0 * (spec.n_thermal + 1.0))));
  spec.dim = get_int(j, "dim", auto_dim);
  spec.validate();
  return spec;
}

SpinSpec parse_spin(const json& j) {
  require_keys(j, "spin", {"t2", "readout_fidelity"});
  SpinSpec spin;
  if (j.contains("t2")) {
    const double t2 = get_num(j, "t2", 0.0);
    if (!(t2 > 0)) throw ConfigError("spin.t2 must be > 0 (omit for infinite)");
    spin.t2 = t2;
  }
  spin.readout_fidelity = get_num(j, "readout_fidelity", 1.0);
  spin.validate();
  return spin;
}

PulseSchedule parse_schedule(const json& j) {
  require_keys(j, "schedule",
               {"n_c", "epsilon", "detuning_sign", "g", "rounds", "nc_schedule"});
  PulseSchedule s;
  s.n_c = get_int(j, "n_c", 1);
  s.epsilon = get_num(j, "epsilon", 0.0);
  s.g = get_num(j, "g", 0.0);
  s.rounds = get_int(j, "rounds", 1);
  if (j.contains("detuning_sign")) {
    const std::string v = j["detuning_sign"].get<std::string>();
    if (v == "minus")
      s.detuning_sign = DetuningSign::minus;
    else if (v == "plus")
      s.detuning_sign = DetuningSign::plus;
    else
      throw ConfigError("schedule.detuning_sign must be \"minus\" or \"plus\"");
  }
  if (j.contains("nc_schedule")) {
    const json& n = j["nc_schedule"];
    require_keys(n, "nc_schedule", {"type", "prefactor", "exponent", "values"});
    const std::string type = n.contains("type") ? n["type"].get<std::string>() : "";
    if (type == "power") {
      s.nc_schedule = power_law_schedule(get_num(n, "prefactor", 0.0),
                                         get_num(n, "exponent", 0.0), s.rounds);
    } else if (type == "list") {
      if (!n.contains("values") || !n["values"].is_array())
        throw ConfigError("nc_schedule.values must be an array");
      for (const auto& v : n["values"]) s.nc_schedule.push_back(v.get<int>());
      if (static_cast<int>(s.nc_schedule.size()) < s.rounds)
        throw ConfigError("nc_schedule.values shorter than schedule.rounds");
    } else {
      throw ConfigError("nc_schedule.type must be \"power\" or \"list\"");
    }
  }
  s.validate();
  return s;
}

LabSetup parse_lab(const json& j) {
  require_keys(j, "lab",
               {"mode_frequency_hz", "zero_point_motion_m", "field_gradient_t_per_m",
                "gyromagnetic_hz_per_t", "temperature_k", "quality_factor", "t2_s"});
  LabSetup lab;
  lab.mode_frequency_hz = get_num(j, "mode_frequency_hz", lab.mode_frequency_hz);
  lab.zero_point_motion_m = get_num(j, "zero_point_motion_m", lab.zero_point_motion_m);
  lab.field_gradient_t_per_m =
      get_num(j, "field_gradient_t_per_m", lab.field_gradient_t_per_m);
  lab.gyromagnetic_hz_per_t =
      get_num(j, "gyromagnetic_hz_per_t", lab.gyromagnetic_hz_per_t);
  lab.temperature_k = get_num(j, "temperature_k", lab.temperature_k);
  lab.quality_factor = get_num(j, "quality_factor", lab.quality_factor);
  lab.t2_s = get_num(j, "t2_s", lab.t2_s);
  lab.validate();
  return lab;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  require_keys(j, "",
               {"engine", "mode", "oscillator", "spin", "schedule", "lab",
                "pfunction", "cooling_model", "n_trajectories", "continue_on_fail",
                "max_restarts", "seed", "strict_truncation", "output_dir", "sweep"});

  RunConfig cfg;
  if (!j.contains("engine")) throw ConfigError("missing required key \"engine\"");
  const std::string engine = j["engine"].get<std::string>();
  if (engine == "fock")
    cfg.engine = Engine::fock;
  else if (engine == "pfunction")
    cfg.engine = Engine::pfunction;
  else if (engine == "cooling_model")
    cfg.engine = Engine::cooling_model;
  else if (engine == "both")
    cfg.engine = Engine::both;
  else
    throw ConfigError("engine must be fock|pfunction|cooling_model|both");

  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "conditioned")
      cfg.mode = RunMode::conditioned;
    else if (mode == "trajectory")
      cfg.mode = RunMode::trajectory;
    else
      throw ConfigError("mode must be conditioned|trajectory");
  }

  if (j.contains("lab")) cfg.lab = parse_lab(j["lab"]);

  if (j.contains("oscillator")) {
    cfg.oscillator = parse_oscillator(j["oscillator"]);
  } else if (cfg.lab) {
    cfg.oscillator = spec_from_lab(*cfg.lab).oscillator;
  } else if (cfg.engine != Engine::cooling_model) {
    throw ConfigError("missing \"oscillator\" section");
  }

  if (j.contains("spin"))
    cfg.spin = parse_spin(j["spin"]);
  else if (cfg.lab)
    cfg.spin = spec_from_lab(*cfg.lab).spin;

  if (j.contains("schedule")) {
    cfg.schedule = parse_schedule(j["schedule"]);
  } else if (cfg.lab) {
    cfg.schedule = spec_from_lab(*cfg.lab).schedule;
  } else if (cfg.engine != Engine::cooling_model) {
    throw ConfigError("missing \"schedule\" section");
  }

  if (j.contains("pfunction")) {
    require_keys(j["pfunction"], "pfunction", {"extent", "resolution"});
    cfg.pfunction.extent = get_num(j["pfunction"], "extent", 0.0);
    cfg.pfunction.resolution = get_int(j["pfunction"], "resolution", 256);
  }
  if (j.contains("cooling_model")) {
    require_keys(j["cooling_model"], "cooling_model",
                 {"n0", "lambda", "rounds", "retune"});
    CoolingModelConfig cm;
    cm.n0 = get_num(j["cooling_model"], "n0", 0.0);
    cm.lambda = get_num(j["cooling_model"], "lambda", 0.0);
    cm.rounds = get_int(j["cooling_model"], "rounds", 0);
    cm.retune = get_bool(j["cooling_model"], "retune", false);
    cfg.cooling_model = cm;
  }
  if (cfg.engine == Engine::cooling_model && !cfg.cooling_model)
    throw ConfigError("engine cooling_model requires a \"cooling_model\" section");

  cfg.n_trajectories = get_int(j, "n_trajectories", 0);
  if (cfg.n_trajectories < 0) throw ConfigError("n_trajectories must be >= 0");
  cfg.continue_on_fail = get_bool(j, "continue_on_fail", false);
  cfg.max_restarts = get_int(j, "max_restarts", 1000);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ConfigError("seed must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.has_seed = true;
  }
  if (cfg.n_trajectories > 0 && !cfg.has_seed)
    throw ConfigError("seed is required when n_trajectories > 0");
  cfg.strict_truncation = get_bool(j, "strict_truncation", true);
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();

  if (j.contains("sweep")) {
    if (!j["sweep"].is_array()) throw ConfigError("sweep must be an array");
    for (const auto& e : j["sweep"]) {
      require_keys(e, "sweep[]", {"path", "values"});
      SweepEntry entry;
      entry.path = e.at("path").get<std::string>();
      for (const auto& v : e.at("values")) entry.values.push_back(v.get<double>());
      if (entry.values.empty())
        throw ConfigError("sweep entry for \"" + entry.path + "\" has no values");
      cfg.sweep.push_back(std::move(entry));
    }
    // fail fast on unknown parameter paths
    RunConfig probe = cfg;
    for (const auto& e : cfg.sweep) assign_parameter(probe, e.path, e.values[0]);
  }

  if (cfg.mode == RunMode::trajectory && cfg.n_trajectories == 0)
    cfg.n_trajectories = 1;
  return cfg;
}

void assign_parameter(RunConfig& cfg, const std::string& path, double value) {
  auto as_int = [&](int& field) { field = static_cast<int>(std::llround(value)); };
  if (path == "oscillator.omega") cfg.oscillator.omega = value;
  else if (path == "oscillator.gamma") cfg.oscillator.gamma = value;
  else if (path == "oscillator.gamma_h") cfg.oscillator.gamma_h = value;
  else if (path == "oscillator.n_thermal") cfg.oscillator.n_thermal = value;
  else if (path == "oscillator.dim") as_int(cfg.oscillator.dim);
  else if (path == "spin.t2") cfg.spin.t2 = value;
  else if (path == "spin.readout_fidelity") cfg.spin.readout_fidelity = value;
  else if (path == "schedule.n_c") as_int(cfg.schedule.n_c);
  else if (path == "schedule.epsilon") cfg.schedule.epsilon = value;
  else if (path == "schedule.g") cfg.schedule.g = value;
  else if (path == "schedule.rounds") as_int(cfg.schedule.rounds);
  else if (path == "cooling_model.n0" && cfg.cooling_model) cfg.cooling_model->n0 = value;
  else if (path == "cooling_model.lambda" && cfg.cooling_model)
    cfg.cooling_model->lambda = value;
  else
    throw ConfigError("sweep path \"" + path + "\" does not name a parameter");
}

std::vector<std::pair<std::string, RunConfig>> expand_sweep(const RunConfig& base) {
  std::vector<std::pair<std::string, RunConfig>> points;
  if (base.sweep.empty()) {
    points.emplace_back("", base);
    return points;
  }
  std::vector<size_t> idx(base.sweep.size(), 0);
  while (true) {
    RunConfig cfg = base;
    cfg.sweep.clear();
    std::ostringstream label;
    for (size_t k = 0; k < base.sweep.size(); ++k) {
      const auto& entry = base.sweep[k];
      assign_parameter(cfg, entry.path, entry.values[idx[k]]);
      if (k) label << ",";
      label << entry.path << "=" << entry.values[idx[k]];
    }
    points.emplace_back(label.str(), std::move(cfg));
    // odometer increment
    size_t k = base.sweep.size();
    while (k > 0) {
      --k;
      if (++idx[k] < base.sweep[k].values.size()) break;
      idx[k] = 0;
      if (k == 0) return points;
    }
  }
}

}  // namespace heraldsim
