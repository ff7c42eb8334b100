#pragma once

#include <string>
#include <vector>

#include "heraldsim/fock.hpp"
#include "heraldsim/herald.hpp"
#include "heraldsim/pulse.hpp"

namespace heraldsim {

// Laboratory-side description of a spin-cantilever setup.
struct LabSetup {
  double mode_frequency_hz = 1e7;
  double zero_point_motion_m = 1e-14;
  double field_gradient_t_per_m = 2e5;     // 2 G/nm
  double gyromagnetic_hz_per_t = 2.8e10;   // electron-spin value
  double temperature_k = 4.0;
  double quality_factor = 1e5;
  double t2_s = 1e-2;

  void validate() const;
};

struct CouplingEstimate {
  double g_hz = 0.0;
  double g_rad = 0.0;  // 2 pi g_hz
};

CouplingEstimate coupling_from_gradient(const LabSetup& setup);

// Bose occupancy 1/(e^{hf/kT} - 1).
double nbar_from_temperature(const LabSetup& setup);

// Gamma = omega/Q.
double gamma_from_q(const LabSetup& setup);

struct LabBundle {
  OscillatorSpec oscillator;
  SpinSpec spin;
  PulseSchedule schedule;      // suggested n_c so lambda^2 n <= 0.5
  double lambda_suggestion = 0.0;
  std::vector<std::string> warnings;
};

LabBundle spec_from_lab(const LabSetup& setup);

}  // namespace heraldsim
