#include "heraldsim/phys_params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "heraldsim/errors.hpp"

namespace heraldsim {

namespace {
constexpr double kPlanck = 6.62607015e-34;     // J s
constexpr double kBoltzmann = 1.380649e-23;    // J/K
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void LabSetup::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("lab.") + name + " must be > 0");
  };
  positive(mode_frequency_hz, "mode_frequency_hz");
  positive(zero_point_motion_m, "zero_point_motion_m");
  if (field_gradient_t_per_m < 0)
    throw ConfigError("lab.field_gradient_t_per_m must be >= 0");
  positive(gyromagnetic_hz_per_t, "gyromagnetic_hz_per_t");
  positive(temperature_k, "temperature_k");
  positive(quality_factor, "quality_factor");
  positive(t2_s, "t2_s");
}

CouplingEstimate coupling_from_gradient(const LabSetup& setup) {
  setup.validate();
  CouplingEstimate est;
  est.g_hz = setup.gyromagnetic_hz_per_t * setup.field_gradient_t_per_m *
             setup.zero_point_motion_m;
  est.g_rad = kTwoPi * est.g_hz;
  return est;
}

double nbar_from_temperature(const LabSetup& setup) {
  setup.validate();
  const double x = kPlanck * setup.mode_frequency_hz /
                   (kBoltzmann * setup.temperature_k);
  return 1.0 / std::expm1(x);
}

double gamma_from_q(const LabSetup& setup) {
  setup.validate();
  return kTwoPi * setup.mode_frequency_hz / setup.quality_factor;
}

LabBundle spec_from_lab(const LabSetup& setup) {
  setup.validate();
  LabBundle bundle;

  const double omega = kTwoPi * setup.mode_frequency_hz;
  const double nbar = nbar_from_temperature(setup);
  bundle.oscillator.omega = omega;
  bundle.oscillator.gamma = gamma_from_q(setup);
  bundle.oscillator.n_thermal = nbar;
  bundle.oscillator.dim = static_cast<int>(std::ceil(10.0 * (nbar + 1.0)));

  bundle.spin.t2 = setup.t2_s;
  bundle.spin.readout_fidelity = 1.0;

  const CouplingEstimate g = coupling_from_gradient(setup);
  bundle.lambda_suggestion = std::min(1.0, std::sqrt(0.5 / std::max(nbar, 0.5)));
  bundle.schedule.g = g.g_rad;
  bundle.schedule.epsilon = 0.0;
  bundle.schedule.rounds = 1;
  if (g.g_rad > 0) {
    const long n_c = std::lround(bundle.lambda_suggestion * omega / (2.0 * g.g_rad));
    bundle.schedule.n_c = static_cast<int>(std::max(1L, n_c));
  }

  const double block = bundle.schedule.block_time(omega);
  if (block > setup.t2_s) {
    std::ostringstream os;
    os << "infeasible regime: suggested block time " << block
       << " s exceeds T2 = " << setup.t2_s << " s";
    bundle.warnings.push_back(os.str());
  }
  return bundle;
}

}  // namespace heraldsim
