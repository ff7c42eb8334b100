#pragma once

#include <utility>
#include <vector>

#include "heraldsim/fock.hpp"

namespace heraldsim {

enum class DetuningSign { minus, plus };  // tau = pi/(omega - eps) vs pi/(omega + eps)

// Stroboscopic pi-pulse train: n_c equally spaced pulses bracketed by
// half-intervals (symmetric CPMG layout), repeated for `rounds` blocks.
struct PulseSchedule {
  int n_c = 1;            // pi-pulse count per block
  double epsilon = 0.0;   // detuning (rad/s)
  DetuningSign detuning_sign = DetuningSign::minus;
  double g = 0.0;         // spin-phonon coupling (rad/s)
  int rounds = 1;
  std::vector<int> nc_schedule;  // optional per-round n_c override, index 0 = round 1

  void validate() const;
  double tau(double omega) const;
  int nc_for_round(int round) const;  // 1-based round index
  double block_time(double omega, int round = 1) const;
};

// Exact single-block propagator for one spin branch, as the unitary
// e^{i phase} D(displacement) R(rotation).
struct BranchPropagator {
  double phase = 0.0;
  cxd displacement = 0.0;
  double rotation = 0.0;

  // Left-multiplication by primitive factors, reduced with the group rules
  //   D(b1) D(b2) = e^{i Im(b1 b2*)} D(b1 + b2)
  //   R(th) D(b)  = D(b e^{-i th}) R(th)
  void lmul_phase(double phi) { phase += phi; }
  void lmul_displacement(cxd b);
  void lmul_rotation(double theta);

  MatrixXcd to_matrix(int dim) const;
};

// Relevant oscillator modes (omega_m, g_m); used for filter diagnostics only.
struct ModeList {
  std::vector<std::pair<double, double>> modes;
};

struct ModeFilterRow {
  double omega_m = 0.0;
  double g_m = 0.0;
  double point_value = 0.0;  // F at omega_m (oscillates fast near resonance)
  double weight = 0.0;       // integral of F over a window around omega_m
  double weight_fraction = 0.0;
};

// CPMG filter F(n_c, t, omega) = 4 tan^2[omega t/(2 n_c + 2)] cos^2[omega t/2].
double filter_function(int n_c, double t, double omega);

// Effective coupling lambda = 2 g n_c / omega.
double lambda_eff(double g, int n_c, double omega);

// Exact product of segment propagators over the pulse train for the branch
// starting with spin sign initial_sign; each tau' segment uses
// e^{-i H_s tau'} = e^{i g^2 tau'/omega} D(-s g/omega) R(omega tau') D(s g/omega).
BranchPropagator compose_branch(const PulseSchedule& schedule, const OscillatorSpec& spec,
                                int initial_sign, int round = 1);

// Per-mode filter weights (window-integrated; the bare point value oscillates
// at the pulse rate and is reported as a secondary column).
std::vector<ModeFilterRow> multimode_filter_report(const ModeList& modes,
                                                   const PulseSchedule& schedule,
                                                   double omega_ref);

// n_c(M) = prefactor * M^exponent rounded to nearest integer, M = 1..rounds.
std::vector<int> power_law_schedule(double prefactor, double exponent, int rounds);

}  // namespace heraldsim
