#include "heraldsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "heraldsim/csv.hpp"
#include "heraldsim/errors.hpp"
#include "heraldsim/pfunction.hpp"

namespace heraldsim {

using nlohmann::json;

namespace {

struct RoundRow {
  int round = 0;
  double p_success = 0.0;
  double occupancy = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double eta = 1.0;
};

void write_rounds_csv(const std::filesystem::path& path,
                      const std::vector<RoundRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << "round,p_success,occupancy,var_x,var_p,eta\n";
  for (const auto& r : rows)
    out << r.round << ',' << fmt17(r.p_success) << ',' << fmt17(r.occupancy) << ','
        << fmt17(r.var_x) << ',' << fmt17(r.var_p) << ',' << fmt17(r.eta) << '\n';
}

void write_pgrid_csv(const std::filesystem::path& path, const PGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << "re_alpha,im_alpha,p_value\n";
  for (int j = 0; j < grid.resolution; ++j)
    for (int i = 0; i < grid.resolution; ++i)
      out << fmt17(grid.re_at(i)) << ',' << fmt17(grid.im_at(j)) << ','
          << fmt17(grid.values[static_cast<size_t>(j) * grid.resolution + i])
          << '\n';
}

json observables_json(const Observables& o) {
  return json{{"occupancy", o.occupancy},
              {"mean_x", o.mean_x},
              {"var_x", o.var_x},
              {"var_p", o.var_p},
              {"purity", o.purity}};
}

json rows_json(const std::vector<RoundRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back(json{{"round", r.round},
                       {"p_success", r.p_success},
                       {"occupancy", r.occupancy},
                       {"var_x", r.var_x},
                       {"var_p", r.var_p},
                       {"eta", r.eta}});
  return arr;
}

// Fock-engine rounds. In trajectory mode the per-round rows are ensemble
// means over the final (successful) attempt of each trajectory, reduced in
// trajectory order so the bytes do not depend on scheduling.
struct FockOutput {
  std::vector<RoundRow> rows;
  Observables final_obs;
  double event_rate = 1.0;
  int restarts = 0;
  double final_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  json trajectories = json::array();
};

FockOutput run_fock(const RunConfig& cfg, int threads,
                    std::vector<std::string>* warnings) {
  FockOutput out;
  ProtocolOptions opts;
  opts.mode = cfg.mode;
  opts.continue_on_fail = cfg.continue_on_fail;
  opts.max_restarts = cfg.max_restarts;
  opts.strict_truncation = cfg.strict_truncation;

  if (cfg.mode == RunMode::conditioned) {
    opts.seed = cfg.seed;
    const TrajectoryRecord rec =
        run_protocol(cfg.oscillator, cfg.schedule, cfg.spin, opts, warnings);
    for (const auto& r : rec.rounds)
      out.rows.push_back({r.round, r.p_success, r.occupancy, r.var_x, r.var_p, r.eta});
    out.final_obs = rec.final_observables;
    out.event_rate = rec.event_rate;
    out.final_min_eigenvalue = rec.final_min_eigenvalue;
    return out;
  }

  const int n_traj = std::max(1, cfg.n_trajectories);
  std::vector<TrajectoryRecord> recs(n_traj);
  std::vector<std::vector<std::string>> traj_warnings(n_traj);
  const int workers = std::max(1, std::min(threads, n_traj));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_traj; i = next.fetch_add(1)) {
        ProtocolOptions o = opts;
        o.seed = split_seed(cfg.seed, static_cast<std::uint64_t>(i));
        recs[i] = run_protocol(cfg.oscillator, cfg.schedule, cfg.spin, o,
                               &traj_warnings[i]);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (warnings)
    for (const auto& ws : traj_warnings)
      for (const auto& w : ws) warnings->push_back(w);

  const int rounds = cfg.schedule.rounds;
  out.rows.assign(rounds, RoundRow{});
  double mean_event = 0.0;
  for (int i = 0; i < n_traj; ++i) {
    const auto& rec = recs[i];
    int k = 0;
    for (const auto& r : rec.rounds) {
      if (r.restarted) continue;  // final attempt only
      RoundRow& row = out.rows[k];
      row.round = r.round;
      row.p_success += r.p_success / n_traj;
      row.occupancy += r.occupancy / n_traj;
      row.var_x += r.var_x / n_traj;
      row.var_p += r.var_p / n_traj;
      row.eta = r.eta;
      ++k;
    }
    out.restarts += rec.restarts;
    mean_event += rec.event_rate / n_traj;
    out.trajectories.push_back(json{{"trajectory", i},
                                    {"event_rate", rec.event_rate},
                                    {"restarts", rec.restarts},
                                    {"rounds_completed", rec.rounds_completed}});
  }
  out.event_rate = mean_event;
  // ensemble mean of the final observables
  for (int i = 0; i < n_traj; ++i) {
    const auto& f = recs[i].final_observables;
    out.final_obs.occupancy += f.occupancy / n_traj;
    out.final_obs.mean_x += f.mean_x / n_traj;
    out.final_obs.var_x += f.var_x / n_traj;
    out.final_obs.var_p += f.var_p / n_traj;
    out.final_obs.purity += f.purity / n_traj;
  }
  return out;
}

struct PFunctionOutput {
  std::vector<RoundRow> rows;
  Observables final_obs;
  PGrid final_grid;
};

PFunctionOutput run_pfunction(const RunConfig& cfg,
                              std::vector<std::string>* warnings) {
  if (!cfg.schedule.nc_schedule.empty())
    throw ConfigError("pfunction engine requires a fixed n_c (no nc_schedule)");
  const double omega = cfg.oscillator.omega;
  const double t = cfg.schedule.block_time(omega);
  FilterParams params;
  params.lambda = lambda_eff(cfg.schedule.g, cfg.schedule.n_c, omega);
  params.epsilon = cxd(cfg.schedule.epsilon, cfg.oscillator.gamma);
  params.block_time = t;
  params.rounds = cfg.schedule.rounds;

  const double extent = cfg.pfunction.extent > 0
                            ? cfg.pfunction.extent
                            : 5.0 * std::sqrt(cfg.oscillator.n_thermal);
  PFunctionOutput out;
  const PRoundTrace trace = evolve_p_trace(cfg.oscillator.n_thermal, params, extent,
                                           cfg.pfunction.resolution, warnings);
  const double eta_block = cfg.spin.eta(t);
  for (int k = 0; k < static_cast<int>(trace.per_round.size()); ++k) {
    const Observables& o = trace.per_round[k];
    out.rows.push_back(
        {k + 1, trace.norm_ratio[k], o.occupancy, o.var_x, o.var_p, eta_block});
  }
  out.final_obs = trace.per_round.empty() ? Observables{} : trace.per_round.back();
  out.final_grid = evolve_p(cfg.oscillator.n_thermal, params, extent,
                            cfg.pfunction.resolution, nullptr);
  return out;
}

std::vector<RoundRow> run_cooling_model(const RunConfig& cfg) {
  const CoolingModelConfig& cm = *cfg.cooling_model;
  const CoolingModelState st =
      cooling_recurrence(cm.n0, cm.lambda, cm.rounds, cm.retune);
  std::vector<RoundRow> rows;
  for (int k = 1; k <= cm.rounds; ++k) {
    const double n_prev = st.occupancies[k - 1];
    const double lam = st.lambdas[k - 1];
    RoundRow row;
    row.round = k;
    // thermal-input model probability 1/2 (1 + e^{-2 lambda^2 (2n+1)})
    row.p_success = 0.5 * (1.0 + std::exp(-2.0 * lam * lam * (2.0 * n_prev + 1.0)));
    row.occupancy = st.occupancies[k];
    row.var_x = st.occupancies[k] + 0.5;
    row.var_p = st.occupancies[k] + 0.5;
    row.eta = 1.0;
    rows.push_back(row);
  }
  return rows;
}

void write_compare_csv(const std::filesystem::path& path,
                       const std::vector<RoundRow>& fock,
                       const std::vector<RoundRow>& pf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << "round,occ_fock,occ_pf,rel_occ,var_x_fock,var_x_pf,rel_var_x,"
         "var_p_fock,var_p_pf,rel_var_p\n";
  const size_t n = std::min(fock.size(), pf.size());
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), 1e-300);
  };
  for (size_t k = 0; k < n; ++k)
    out << fock[k].round << ',' << fmt17(fock[k].occupancy) << ','
        << fmt17(pf[k].occupancy) << ',' << fmt17(rel(fock[k].occupancy, pf[k].occupancy))
        << ',' << fmt17(fock[k].var_x) << ',' << fmt17(pf[k].var_x) << ','
        << fmt17(rel(fock[k].var_x, pf[k].var_x)) << ',' << fmt17(fock[k].var_p) << ','
        << fmt17(pf[k].var_p) << ',' << fmt17(rel(fock[k].var_p, pf[k].var_p)) << '\n';
}

}  // namespace

RunResult run_single(const RunConfig& cfg, const std::filesystem::path& out_dir,
                     int threads) {
  if (threads <= 0) threads = default_thread_cap();
  std::filesystem::create_directories(out_dir);
  RunResult result;
  result.out_dir = out_dir;

  json summary;
  summary["seed"] = cfg.seed;
  std::vector<RoundRow> rows;
  Observables final_obs;
  double ev_rate = 1.0;

  switch (cfg.engine) {
    case Engine::fock: {
      FockOutput fo = run_fock(cfg, threads, &result.warnings);
      rows = fo.rows;
      final_obs = fo.final_obs;
      ev_rate = fo.event_rate;
      summary["engine"] = "fock";
      summary["restarts"] = fo.restarts;
      if (std::isfinite(fo.final_min_eigenvalue))
        summary["final_min_eigenvalue"] = fo.final_min_eigenvalue;
      if (!fo.trajectories.empty()) summary["trajectories"] = fo.trajectories;
      break;
    }
    case Engine::pfunction: {
      PFunctionOutput po = run_pfunction(cfg, &result.warnings);
      rows = po.rows;
      final_obs = po.final_obs;
      for (const auto& r : rows) ev_rate *= r.p_success;
      summary["engine"] = "pfunction";
      summary["c_m"] = po.final_grid.c_m;
      write_pgrid_csv(out_dir / "pgrid.csv", po.final_grid);
      break;
    }
    case Engine::cooling_model: {
      rows = run_cooling_model(cfg);
      final_obs.occupancy = rows.empty() ? cfg.cooling_model->n0 : rows.back().occupancy;
      final_obs.var_x = final_obs.var_p = final_obs.occupancy + 0.5;
      for (const auto& r : rows) ev_rate *= r.p_success;
      summary["engine"] = "cooling_model";
      break;
    }
    case Engine::both: {
      FockOutput fo = run_fock(cfg, threads, &result.warnings);
      PFunctionOutput po = run_pfunction(cfg, &result.warnings);
      rows = fo.rows;
      final_obs = fo.final_obs;
      ev_rate = fo.event_rate;
      summary["engine"] = "both";
      summary["pfunction_final"] = observables_json(po.final_obs);
      write_pgrid_csv(out_dir / "pgrid.csv", po.final_grid);
      write_compare_csv(out_dir / "compare.csv", fo.rows, po.rows);
      break;
    }
  }

  if (cfg.lab) {
    const LabBundle bundle = spec_from_lab(*cfg.lab);
    summary["lab_derived"] = json{{"g_rad", bundle.schedule.g},
                                  {"omega", bundle.oscillator.omega},
                                  {"gamma", bundle.oscillator.gamma},
                                  {"n_thermal", bundle.oscillator.n_thermal},
                                  {"lambda_suggestion", bundle.lambda_suggestion},
                                  {"suggested_n_c", bundle.schedule.n_c}};
    for (const auto& w : bundle.warnings) result.warnings.push_back(w);
  }

  write_rounds_csv(out_dir / "rounds.csv", rows);
  summary["final"] = observables_json(final_obs);
  summary["event_rate"] = ev_rate;
  summary["rounds"] = rows_json(rows);
  summary["warnings"] = result.warnings;

  std::ofstream js(out_dir / "summary.json", std::ios::binary);
  if (!js) throw ConfigError("cannot open summary.json for writing");
  js << summary.dump(2) << '\n';
  return result;
}

std::vector<RunResult> run_config(const RunConfig& cfg,
                                  const std::filesystem::path& out_dir, int threads,
                                  bool quiet) {
  const auto points = expand_sweep(cfg);
  std::vector<RunResult> results(points.size());

  if (points.size() == 1) {
    results[0] = run_single(points[0].second, out_dir, threads);
  } else {
    // manifest first, in declaration order
    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(out_dir / "sweep_manifest.csv", std::ios::binary);
    manifest << "point,label\n";
    for (size_t i = 0; i < points.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "point_%03zu", i);
      manifest << name << ',' << points[i].first << '\n';
    }
    manifest.close();

    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < points.size();
             i = next.fetch_add(1)) {
          char name[32];
          std::snprintf(name, sizeof(name), "point_%03zu", i);
          try {
            results[i] = run_single(points[i].second, out_dir / name, threads);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!failed.exchange(true)) first_error = e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failed) throw NumericError("sweep point failed: " + first_error);
  }

  if (!quiet) {
    for (const auto& r : results)
      for (const auto& w : r.warnings)
        std::cerr << "warning: " << w << '\n';
  }
  return results;
}

int default_thread_cap() {
  if (const char* env = std::getenv("HERALD_SIM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace heraldsim
