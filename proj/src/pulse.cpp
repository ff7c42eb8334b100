#include "heraldsim/pulse.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "heraldsim/errors.hpp"

namespace heraldsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PulseSchedule::validate() const {
  if (n_c < 1) throw ConfigError("schedule.n_c must be >= 1");
  if (g < 0) throw ConfigError("schedule.g must be >= 0");
  if (rounds < 0) throw ConfigError("schedule.rounds must be >= 0");
  for (int v : nc_schedule)
    if (v < 1) throw ConfigError("schedule.nc_schedule entries must be >= 1");
}

double PulseSchedule::tau(double omega) const {
  const double denom =
      detuning_sign == DetuningSign::minus ? omega - epsilon : omega + epsilon;
  if (!(denom > 0)) throw ConfigError("schedule: omega -/+ epsilon must be > 0");
  return kPi / denom;
}

int PulseSchedule::nc_for_round(int round) const {
  if (!nc_schedule.empty()) {
    const int idx = round - 1;
    if (idx < 0 || idx >= static_cast<int>(nc_schedule.size()))
      throw ConfigError("nc_schedule has no entry for round " + std::to_string(round));
    return nc_schedule[idx];
  }
  return n_c;
}

double PulseSchedule::block_time(double omega, int round) const {
  return nc_for_round(round) * tau(omega);
}

void BranchPropagator::lmul_displacement(cxd b) {
  phase += std::imag(b * std::conj(displacement));
  displacement += b;
}

void BranchPropagator::lmul_rotation(double theta) {
  displacement *= std::polar(1.0, -theta);
  rotation += theta;
}

MatrixXcd BranchPropagator::to_matrix(int dim) const {
  MatrixXcd D = displacement_op(displacement, dim);
  const VectorXcd r = rotation_phases(rotation, dim);
  D *= std::polar(1.0, phase);
  for (int c = 0; c < dim; ++c) D.col(c) *= r(c);
  return D;
}

double filter_function(int n_c, double t, double omega) {
  if (n_c < 1) throw ConfigError("filter_function: n_c must be >= 1");
  const double arg = omega * t / (2.0 * n_c + 2.0);
  if (std::abs(std::cos(arg)) < 1e-12)
    throw NumericError("filter_function: tan pole at omega t/(2 n_c + 2)");
  const double tn = std::tan(arg);
  const double cs = std::cos(omega * t / 2.0);
  return 4.0 * tn * tn * cs * cs;
}

double lambda_eff(double g, int n_c, double omega) {
  if (!(omega > 0)) throw ConfigError("lambda_eff: omega must be > 0");
  return 2.0 * g * n_c / omega;
}

BranchPropagator compose_branch(const PulseSchedule& schedule, const OscillatorSpec& spec,
                                int initial_sign, int round) {
  schedule.validate();
  spec.validate();
  if (initial_sign != 1 && initial_sign != -1)
    throw ConfigError("compose_branch: initial_sign must be +1 or -1");

  const double omega = spec.omega;
  const double g = schedule.g;
  const double tau = schedule.tau(omega);
  const int n_c = schedule.nc_for_round(round);

  BranchPropagator u;  // identity
  int s = initial_sign;
  // segments: tau/2, tau, ..., tau, tau/2 with the spin sign flipping at
  // each pi pulse; factors applied in time order (left-multiplication).
  for (int seg = 0; seg <= n_c; ++seg) {
    const double dt = (seg == 0 || seg == n_c) ? 0.5 * tau : tau;
    const double gam = s * g / omega;
    u.lmul_displacement(gam);
    u.lmul_rotation(omega * dt);
    u.lmul_displacement(-gam);
    u.lmul_phase(g * g * dt / omega);
    s = -s;
  }
  return u;
}

std::vector<ModeFilterRow> multimode_filter_report(const ModeList& modes,
                                                   const PulseSchedule& schedule,
                                                   double omega_ref) {
  if (modes.modes.empty())
    throw ConfigError("multimode_filter_report: empty mode list");
  const double tau = schedule.tau(omega_ref);
  const double t = schedule.n_c * tau;

  // Window-integrate F around each mode: the point value oscillates with
  // period 2 pi/t, so the mode's weight is the average over a few lobes.
  const double half_window = 4.0 * kPi / t;
  const int samples = 801;

  std::vector<ModeFilterRow> rows;
  rows.reserve(modes.modes.size());
  double total = 0.0;
  for (const auto& [wm, gm] : modes.modes) {
    ModeFilterRow row;
    row.omega_m = wm;
    row.g_m = gm;
    try {
      row.point_value = filter_function(schedule.n_c, t, wm);
    } catch (const NumericError&) {
      row.point_value = std::numeric_limits<double>::infinity();
    }
    double acc = 0.0;
    const double dw = 2.0 * half_window / (samples - 1);
    for (int i = 0; i < samples; ++i) {
      const double w = wm - half_window + i * dw;
      if (w <= 0) continue;
      double f;
      try {
        f = filter_function(schedule.n_c, t, w);
      } catch (const NumericError&) {
        continue;  // isolated tan pole; measure-zero for the trapezoid
      }
      const double scale = (i == 0 || i == samples - 1) ? 0.5 : 1.0;
      acc += scale * f * dw;
    }
    row.weight = acc;
    total += acc;
    rows.push_back(row);
  }
  for (auto& row : rows) row.weight_fraction = total > 0 ? row.weight / total : 0.0;
  return rows;
}

std::vector<int> power_law_schedule(double prefactor, double exponent, int rounds) {
  if (rounds < 0) throw ConfigError("power_law_schedule: rounds must be >= 0");
  std::vector<int> out;
  out.reserve(rounds);
  for (int m = 1; m <= rounds; ++m) {
    const double v = prefactor * std::pow(static_cast<double>(m), exponent);
    const int n = static_cast<int>(std::lround(v));
    if (n < 1) throw ConfigError("power_law_schedule: n_c rounds to < 1");
    out.push_back(n);
  }
  return out;
}

}  // namespace heraldsim
