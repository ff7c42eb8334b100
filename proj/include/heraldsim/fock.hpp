#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace heraldsim {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Oscillator mode and its thermal environment, plus the Fock truncation
// used for exact numerics.
struct OscillatorSpec {
  double omega = 1.0;      // mode angular frequency (rad/s)
  double gamma = 0.0;      // amplitude damping rate Gamma (1/s)
  double gamma_h = 0.0;    // extra heating rate Gamma_h (1/s)
  double n_thermal = 0.0;  // bath occupancy n >= 0
  int dim = 64;            // Fock truncation N >= 2

  void validate() const;  // throws ConfigError on bad fields
};

struct Observables {
  double occupancy = 0.0;  // <a^dag a>
  double mean_x = 0.0;     // <X>, X = (a + a^dag)/sqrt(2)
  double var_x = 0.0;      // Var(X); 1/2 for vacuum
  double var_p = 0.0;      // Var(P)
  double purity = 0.0;     // Tr rho^2
};

// Trace-one Hermitian operator on the truncated Fock space. Treated as an
// immutable value; every map returns a fresh instance.
struct DensityMatrix {
  MatrixXcd m;

  int dim() const { return static_cast<int>(m.rows()); }
  double trace_real() const { return m.trace().real(); }
  double hermiticity_defect() const;    // max |rho - rho^dag|
  double min_eigenvalue() const;        // diagnostic, not enforced
  void check(double trace_tol = 1e-10, double herm_tol = 1e-12) const;
};

// Largest index such that rows/cols below it are unaffected by truncation
// for a displacement of size beta (spec block: dim - 4|beta|^2 - 8).
int interior_dim(int dim, cxd beta);

// Geometric-series tail mass of a thermal state beyond the truncation.
double thermal_tail_mass(double n_thermal, int dim);

// Diagonal thermal state with p_k ~ (n/(n+1))^k, renormalized on the
// truncated space. strict=true turns excessive tail mass (>1e-6) into a
// TruncationError; otherwise (and for dim < 10(n+1)) a warning is appended.
DensityMatrix build_thermal(const OscillatorSpec& spec, bool strict = true,
                            std::vector<std::string>* warnings = nullptr);

// exp(beta a^dag - beta* a) via exact Laguerre matrix elements; every entry
// equals the infinite-dimensional operator's matrix element to machine
// precision (truncation shows up only through lost column tail mass).
MatrixXcd displacement_op(cxd beta, int dim);

// exp(-i theta a^dag a) as phases / diagonal matrix.
VectorXcd rotation_phases(double theta, int dim);
MatrixXcd rotation_op(double theta, int dim);

Observables observables_of(const DensityMatrix& rho);

// Thermal-contact master equation over `duration`: down rate Gamma(n+1),
// up rate Gamma n + Gamma_h. Fixed-step RK4 on each Fock off-diagonal band
// (the dissipator is band-preserving), step capped by both the accuracy
// bound 0.05/(Gamma(n+1)) and the truncation stability bound
// 0.5/((kd+ku)(dim+1)).
DensityMatrix lindblad_damping(const DensityMatrix& rho, const OscillatorSpec& spec,
                               double duration);

}  // namespace heraldsim
