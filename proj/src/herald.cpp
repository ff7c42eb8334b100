#include "heraldsim/herald.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "heraldsim/errors.hpp"

namespace heraldsim {

void SpinSpec::validate() const {
  if (!(t2 > 0)) throw ConfigError("spin.t2 must be > 0");
  if (readout_fidelity < 0.5 || readout_fidelity > 1.0)
    throw ConfigError("spin.readout_fidelity must be in [0.5, 1]");
}

double SpinSpec::eta(double block_time) const {
  if (std::isinf(t2)) return 1.0;
  return std::exp(-block_time / t2);
}

ConditionalKick build_conditional_ops(const PulseSchedule& schedule, const SpinSpec& spin,
                                      const OscillatorSpec& spec, int round,
                                      std::vector<std::string>* warnings) {
  spin.validate();
  const BranchPropagator up = compose_branch(schedule, spec, +1, round);
  const BranchPropagator um = compose_branch(schedule, spec, -1, round);

  const int dim = spec.dim;
  if (std::norm(up.displacement) * (spec.n_thermal + 1.0) > 0.5 * dim && warnings) {
    std::ostringstream os;
    os << "kick displacement |beta|^2=" << std::norm(up.displacement)
       << " with n_thermal=" << spec.n_thermal << " approaches dim=" << dim;
    warnings->push_back(os.str());
  }

  const MatrixXcd dp = std::polar(1.0, up.phase) * displacement_op(up.displacement, dim);
  const MatrixXcd dm = std::polar(1.0, um.phase) * displacement_op(um.displacement, dim);
  const VectorXcd r = rotation_phases(up.rotation, dim);

  ConditionalKick kick;
  kick.v_op = 0.5 * (dp + dm);
  kick.w_op = 0.5 * (dp - dm);
  for (int c = 0; c < dim; ++c) {
    kick.v_op.col(c) *= r(c);
    kick.w_op.col(c) *= r(c);
  }
  kick.block_time = schedule.block_time(spec.omega, round);
  kick.eta = spin.eta(kick.block_time);
  kick.readout_fidelity = spin.readout_fidelity;
  kick.beta = up.displacement;
  kick.theta = up.rotation;
  return kick;
}

namespace {

// One projected round, shared by the public ops and the protocol loop.
// Returns the physical V-branch weight and (optionally) the post-outcome
// state for mixture weights (wa, wb) on V.V^dag / W.W^dag.
struct KickApplication {
  MatrixXcd sv;       // V rho V^dag
  double pv = 0.0;    // its trace
  double pw = 0.0;    // 1 - pv up to truncation; exact trace when W applied
};

KickApplication apply_v(const ConditionalKick& kick, const DensityMatrix& rho) {
  KickApplication ka;
  ka.sv.noalias() = kick.v_op * rho.m * kick.v_op.adjoint();
  ka.pv = ka.sv.trace().real();
  ka.pw = 1.0 - ka.pv;  // completeness V^dag V + W^dag W = I
  return ka;
}

// Mixture weights of V.V^dag / W.W^dag given an observed outcome, with the
// readout error folded as a classical bit flip.
std::pair<double, double> observed_weights(const ConditionalKick& kick, bool success) {
  const double f = kick.readout_fidelity;
  const double a_s = 0.5 * (1.0 + kick.eta);
  const double b_s = 0.5 * (1.0 - kick.eta);
  if (success) return {f * a_s + (1.0 - f) * b_s, f * b_s + (1.0 - f) * a_s};
  return {f * b_s + (1.0 - f) * a_s, f * a_s + (1.0 - f) * b_s};
}

DensityMatrix mix_outcome(const ConditionalKick& kick, const DensityMatrix& rho,
                          KickApplication& ka, double wa, double wb, double norm) {
  if (norm <= 1e-12)
    throw NumericError("conditional projection: outcome probability below 1e-12");
  MatrixXcd out;
  if (wb != 0.0) {
    MatrixXcd sw;
    sw.noalias() = kick.w_op * rho.m * kick.w_op.adjoint();
    ka.pw = sw.trace().real();
    norm = wa * ka.pv + wb * ka.pw;
    out = (wa / norm) * ka.sv + (wb / norm) * sw;
  } else {
    out = (wa / norm) * ka.sv;
  }
  return DensityMatrix{std::move(out)};
}

double canonical_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double success_probability(const ConditionalKick& kick, const DensityMatrix& rho) {
  const KickApplication ka = apply_v(kick, rho);
  const double p = 0.5 * (1.0 + kick.eta) * ka.pv + 0.5 * (1.0 - kick.eta) * ka.pw;
  const double f = kick.readout_fidelity;
  return f * p + (1.0 - f) * (1.0 - p);
}

DensityMatrix project(const ConditionalKick& kick, const DensityMatrix& rho,
                      Outcome outcome) {
  KickApplication ka = apply_v(kick, rho);
  const double a = outcome == Outcome::success ? 0.5 * (1.0 + kick.eta)
                                               : 0.5 * (1.0 - kick.eta);
  const double b = outcome == Outcome::success ? 0.5 * (1.0 - kick.eta)
                                               : 0.5 * (1.0 + kick.eta);
  return mix_outcome(kick, rho, ka, a, b, a * ka.pv + b * ka.pw);
}

TrajectoryRecord run_protocol(const OscillatorSpec& spec, const PulseSchedule& schedule,
                              const SpinSpec& spin, const ProtocolOptions& opts,
                              std::vector<std::string>* warnings) {
  spec.validate();
  schedule.validate();
  spin.validate();
  if (schedule.rounds < 1) throw ConfigError("run_protocol: rounds must be >= 1");

  const DensityMatrix fresh = build_thermal(spec, opts.strict_truncation, warnings);
  DensityMatrix rho = fresh;
  std::mt19937_64 rng(split_seed(opts.seed, 0));

  TrajectoryRecord rec;
  int restarts = 0;
  int round = 1;
  // rounds with equal n_c share one kick (eta depends only on block time)
  std::map<int, ConditionalKick> kick_cache;
  auto kick_for = [&](int r) -> const ConditionalKick& {
    const int n_c = schedule.nc_for_round(r);
    auto it = kick_cache.find(n_c);
    if (it == kick_cache.end())
      it = kick_cache.emplace(n_c, build_conditional_ops(schedule, spin, spec, r, warnings))
               .first;
    return it->second;
  };

  while (round <= schedule.rounds) {
    const ConditionalKick& kick = kick_for(round);
    if (spec.gamma > 0 || spec.gamma_h > 0)
      rho = lindblad_damping(rho, spec, kick.block_time);

    KickApplication ka = apply_v(kick, rho);
    const double p_phys =
        0.5 * (1.0 + kick.eta) * ka.pv + 0.5 * (1.0 - kick.eta) * ka.pw;
    const double f = kick.readout_fidelity;
    const double p_obs = f * p_phys + (1.0 - f) * (1.0 - p_phys);

    bool success = true;
    if (opts.mode == RunMode::trajectory) success = canonical_u01(rng) < p_obs;

    const auto [wa, wb] = observed_weights(kick, success);
    rho = mix_outcome(kick, rho, ka, wa, wb, wa * ka.pv + wb * ka.pw);

    const Observables obs = observables_of(rho);
    RoundRecord rr;
    rr.round = round;
    rr.outcome = success ? Outcome::success : Outcome::fail;
    rr.p_success = p_obs;
    rr.occupancy = obs.occupancy;
    rr.var_x = obs.var_x;
    rr.var_p = obs.var_p;
    rr.eta = kick.eta;
    rec.rounds_completed++;

    if (!success && opts.mode == RunMode::trajectory && !opts.continue_on_fail) {
      if (++restarts > opts.max_restarts)
        throw NumericError("run_protocol: max_restarts exceeded");
      rr.restarted = true;
      rec.rounds.push_back(rr);
      // heralding failed: discard the run and start over from thermal
      rho = fresh;
      round = 1;
      // drop the records of the failed attempt's successful prefix
      std::vector<RoundRecord> kept;
      for (const auto& r : rec.rounds)
        if (r.restarted) kept.push_back(r);
      rec.rounds = std::move(kept);
      continue;
    }
    rec.rounds.push_back(rr);
    ++round;
  }

  rec.restarts = restarts;
  rec.final_observables = observables_of(rho);
  if (spec.dim <= 512) {
    rec.final_min_eigenvalue = rho.min_eigenvalue();
    if (rec.final_min_eigenvalue < -1e-8 && warnings) {
      std::ostringstream os;
      os << "final state min eigenvalue " << rec.final_min_eigenvalue
         << " below -1e-8 (positivity diagnostic)";
      warnings->push_back(os.str());
    }
  } else {
    rec.final_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  }
  rec.event_rate = 1.0;
  for (const auto& r : rec.rounds)
    if (!r.restarted) rec.event_rate *= r.p_success;
  return rec;
}

double event_rate(const TrajectoryRecord& record) { return record.event_rate; }

CoolingModelState cooling_recurrence(double n0, double lambda, int rounds, bool retune,
                                     double g, double omega) {
  if (n0 < 0) throw ConfigError("cooling_recurrence: n0 must be >= 0");
  if (rounds < 0) throw ConfigError("cooling_recurrence: rounds must be >= 0");
  if (!retune && lambda * lambda * n0 >= 1.0)
    throw NumericError("cooling_recurrence: regime violation, lambda^2 n0 >= 1");

  CoolingModelState st;
  st.occupancies.reserve(rounds + 1);
  st.occupancies.push_back(n0);
  const bool rate = g > 0 && omega > 0;
  if (rate) st.gamma_m.push_back(4.0 * g * g / omega * n0);
  double n = n0;
  for (int k = 0; k < rounds; ++k) {
    const double lam =
        retune ? std::min(1.0, std::sqrt(0.5 / std::max(n, 1e-12))) : lambda;
    st.lambdas.push_back(lam);
    n *= std::exp(-2.0 * lam * lam * n);
    st.occupancies.push_back(n);
    if (rate) st.gamma_m.push_back(4.0 * g * g / omega * n);
  }
  return st;
}

int speed_limit_rounds(double n0) {
  if (n0 < 1) throw ConfigError("speed_limit_rounds: n0 must be >= 1");
  return static_cast<int>(std::ceil(2.0 * std::log2(n0)));
}

int useful_rounds(double g, double omega, double gamma, double n0, int cap) {
  if (gamma < 0) throw ConfigError("useful_rounds: gamma must be >= 0");
  if (g <= 0) return 0;
  if (gamma == 0) return cap;
  const double rate0 = 4.0 * g * g / omega;
  int count = 0;
  double n = n0;
  while (count < cap && rate0 * n > gamma) {
    ++count;
    n *= std::exp(-1.0);  // retuned recurrence: 2 lambda_k^2 n_k = 1
  }
  return count;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace heraldsim
