#include "heraldsim/pfunction.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heraldsim/errors.hpp"

namespace heraldsim {

void FilterParams::validate() const {
  if (lambda < 0) throw ConfigError("filter.lambda must be >= 0");
  if (!(block_time > 0)) throw ConfigError("filter.block_time must be > 0");
  if (rounds < 0) throw ConfigError("filter.rounds must be >= 0");
  if (epsilon.imag() < 0) throw ConfigError("filter: Im(epsilon) must be >= 0");
}

double PGrid::boundary_mass() const {
  double mass = 0.0;
  const int n = resolution;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1)
        mass += std::abs(values[j * n + i]);
  return mass * cell_area();
}

double p0_eval(cxd alpha, double n_thermal) {
  if (n_thermal <= 1e-9)
    throw NumericError(
        "p0_eval: P-function is singular for n_thermal <= 1e-9; use the Fock engine");
  return std::exp(-std::norm(alpha) / n_thermal) / (std::numbers::pi * n_thermal);
}

namespace {

// kappa = lambda (e^{i et} - 1) / (et), with the series branch for small et
// fixing the resonant limit kappa -> i lambda.
cxd filter_kappa(double lambda, cxd et) {
  if (std::abs(et) < 1e-6) {
    const cxd iet(0.0, 1.0);
    // (e^{i et} - 1)/(et) = i (1 + i et/2 - et^2/6 + ...)
    return lambda * iet * (1.0 + iet * et / 2.0 - et * et / 6.0);
  }
  return lambda * (std::exp(cxd(0, 1) * et) - 1.0) / et;
}

}  // namespace

double g_filter_log(cxd alpha, const FilterParams& params) {
  params.validate();
  const cxd et = params.epsilon * params.block_time;
  const cxd kappa = filter_kappa(params.lambda, et);
  const cxd iet = cxd(0, 1) * et;

  double log_mag = 0.0;
  cxd ph_a(1.0, 0.0);                       // e^{i (k-1) et}
  cxd ph_b = std::conj(std::exp(iet));      // conj(e^{i k et})
  const cxd step = std::exp(iet);
  for (int k = 1; k <= params.rounds; ++k) {
    const cxd z = kappa * (alpha * ph_a + std::conj(alpha) * ph_b);
    // Re exp(z) = e^{Re z} cos(Im z); squared factor in log form
    const double c = std::cos(z.imag());
    if (c == 0.0) return -std::numeric_limits<double>::infinity();
    log_mag += 2.0 * (z.real() + std::log(std::abs(c)));
    ph_a *= step;
    ph_b *= std::conj(step);
  }
  return log_mag;
}

double g_filter(cxd alpha, const FilterParams& params) {
  return std::exp(g_filter_log(alpha, params));
}

double damped_filter(cxd alpha, const FilterParams& params) {
  if (params.epsilon.imag() < 0)
    throw ConfigError("damped_filter: Gamma = Im(epsilon) must be >= 0");
  return g_filter(alpha, params);
}

double resonant_kernel(cxd alpha, double lambda, int rounds) {
  const double c = std::cos(2.0 * lambda * alpha.real());
  return std::pow(c * c, rounds);
}

PGrid evolve_p(double n_thermal, const FilterParams& params, double extent,
               int resolution, std::vector<std::string>* warnings) {
  params.validate();
  if (resolution < 64) throw ConfigError("pgrid.resolution must be >= 64");
  if (n_thermal <= 1e-9) throw NumericError("evolve_p: n_thermal too small");
  if (extent < 5.0 * std::sqrt(n_thermal) && warnings)
    warnings->push_back("pgrid extent below 5 sqrt(n_thermal)");

  PGrid grid;
  grid.extent = extent;
  grid.resolution = resolution;
  grid.values.assign(static_cast<size_t>(resolution) * resolution, 0.0);

  // log-domain accumulation; exponentiate relative to the grid max
  std::vector<double> logs(grid.values.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const cxd a(grid.re_at(i), grid.im_at(j));
      const double lg = std::log(p0_eval(a, n_thermal)) + g_filter_log(a, params);
      logs[j * resolution + i] = lg;
      if (lg > max_log) max_log = lg;
    }
  }
  if (!std::isfinite(max_log))
    throw NumericError("evolve_p: filter vanished on the whole grid");

  double sum = 0.0;
  for (size_t k = 0; k < logs.size(); ++k) {
    grid.values[k] = std::exp(logs[k] - max_log);
    sum += grid.values[k];
  }
  const double integral = sum * grid.cell_area();
  for (double& v : grid.values) v /= integral;
  grid.c_m = std::exp(-max_log) / integral;  // P_M = c_m * P0 * G on the grid

  if (grid.boundary_mass() > 1e-4 && warnings)
    warnings->push_back("pgrid boundary mass exceeds 1e-4; increase extent");
  return grid;
}

Observables moments_from_p(const PGrid& grid) {
  const int n = grid.resolution;
  const double dA = grid.cell_area();
  double m0 = 0, mx = 0, my = 0, mxx = 0, myy = 0, mr2 = 0;
  for (int j = 0; j < n; ++j) {
    const double y = grid.im_at(j);
    for (int i = 0; i < n; ++i) {
      const double x = grid.re_at(i);
      const double w = grid.values[j * n + i] * dA;
      m0 += w;
      mx += w * x;
      my += w * y;
      mxx += w * x * x;
      myy += w * y * y;
      mr2 += w * (x * x + y * y);
    }
  }
  mx /= m0; my /= m0; mxx /= m0; myy /= m0; mr2 /= m0;

  Observables obs;
  obs.occupancy = mr2;
  obs.mean_x = std::sqrt(2.0) * mx;
  // normal ordering: Var(X) = 2 <(Re a)^2>_P - 2 <Re a>_P^2 + 1/2
  obs.var_x = 2.0 * (mxx - mx * mx) + 0.5;
  obs.var_p = 2.0 * (myy - my * my) + 0.5;
  obs.purity = 0.0;  // not defined from a P-grid sample
  return obs;
}

PRoundTrace evolve_p_trace(double n_thermal, FilterParams params, double extent,
                           int resolution, std::vector<std::string>* warnings) {
  PRoundTrace trace;
  const int rounds = params.rounds;
  double prev_z = 1.0;  // Z_0: P0 integrates to 1
  for (int m = 1; m <= rounds; ++m) {
    params.rounds = m;
    PGrid grid = evolve_p(n_thermal, params, extent, resolution,
                          m == rounds ? warnings : nullptr);
    trace.per_round.push_back(moments_from_p(grid));
    // Z_m = integral of P0 * G_m = 1/c_m (same grid quadrature)
    const double z = 1.0 / grid.c_m;
    trace.norm_ratio.push_back(z / prev_z);
    prev_z = z;
  }
  return trace;
}

}  // namespace heraldsim
