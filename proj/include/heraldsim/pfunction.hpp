#pragma once

#include <string>
#include <vector>

#include "heraldsim/fock.hpp"

namespace heraldsim {

// Spin-induced filter parameters: epsilon is complex so damping enters as
// epsilon + i Gamma.
struct FilterParams {
  double lambda = 0.0;
  cxd epsilon = 0.0;       // rad/s
  double block_time = 0.0; // t (s)
  int rounds = 0;          // M

  void validate() const;
};

// Sampled P_M on a uniform square grid |Re a|, |Im a| <= extent, midpoint
// rule; values normalized so the grid integral is 1.
struct PGrid {
  double extent = 0.0;
  int resolution = 0;
  std::vector<double> values;  // row-major, values[j*resolution + i]
  double c_m = 1.0;            // normalization constant applied to P0 * G

  double cell() const { return 2.0 * extent / resolution; }
  double cell_area() const { return cell() * cell(); }
  double re_at(int i) const { return -extent + (i + 0.5) * cell(); }
  double im_at(int j) const { return -extent + (j + 0.5) * cell(); }
  double boundary_mass() const;
};

// Thermal P-function 1/(pi n) e^{-|a|^2/n}; singular at n -> 0.
double p0_eval(cxd alpha, double n_thermal);

// Filter value at alpha: the product over k = 1..M of the squared factor
//   (Re exp(kappa [a e^{i(k-1) et} + a* conj(e^{i k et})]))^2,
// kappa = lambda (e^{i et} - 1)/(et), et = epsilon * t. One squared factor
// is the success-probability weight of a coherent state under one heralded
// projection; the epsilon -> 0 limit is the resonant kernel cos^2(2 lambda
// Re a) per round (series branch below |et| = 1e-6). Evaluated in
// log-magnitude form.
double g_filter(cxd alpha, const FilterParams& params);

// Same contract with Im(epsilon) = Gamma >= 0 enforced.
double damped_filter(cxd alpha, const FilterParams& params);

// Directly coded resonant kernel prod_k cos^2(2 lambda Re a) = the
// epsilon -> 0 limit of g_filter.
double resonant_kernel(cxd alpha, double lambda, int rounds);

// log|G| at alpha (grid evaluation subtracts the max before exponentiating).
double g_filter_log(cxd alpha, const FilterParams& params);

PGrid evolve_p(double n_thermal, const FilterParams& params, double extent,
               int resolution, std::vector<std::string>* warnings = nullptr);

Observables moments_from_p(const PGrid& grid);

// Per-round moments plus the round's norm ratio Z_k/Z_{k-1} (the model's
// success-probability analogue). Entry k corresponds to M = k+1.
struct PRoundTrace {
  std::vector<Observables> per_round;
  std::vector<double> norm_ratio;
};
PRoundTrace evolve_p_trace(double n_thermal, FilterParams params, double extent,
                           int resolution, std::vector<std::string>* warnings = nullptr);

}  // namespace heraldsim
