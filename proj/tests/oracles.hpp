// Test-only oracles, independent of the library's computation paths:
//  - brute-force matrix exponentials (eigendecomposition of Hermitian
//    generators) for displacement operators and piecewise propagators,
//  - Gaussian closed forms for one conditional kick on a thermal state,
//  - dense full-matrix RK4 for the damping channel.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "heraldsim/fock.hpp"
#include "heraldsim/pulse.hpp"

namespace oracles {

using heraldsim::cxd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

inline MatrixXcd lowering(int dim) {
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// exp(M) for anti-Hermitian M (= -i H with H Hermitian) via eigendecomposition.
inline MatrixXcd expm_antihermitian(const MatrixXcd& m) {
  const MatrixXcd h = cxd(0, 1) * m;  // Hermitian
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  const VectorXd ev = es.eigenvalues();
  MatrixXcd phases = MatrixXcd::Zero(m.rows(), m.cols());
  for (int k = 0; k < ev.size(); ++k)
    phases(k, k) = std::polar(1.0, -ev(k));  // e^{-i ev} = e^{m eigenvalue}
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

inline MatrixXcd displacement_brute(cxd beta, int dim) {
  const MatrixXcd a = lowering(dim);
  return expm_antihermitian(beta * a.adjoint() - std::conj(beta) * a);
}

// Ordered product of matrix exponentials of the piecewise Hamiltonians
// H_s = omega n + s g (a + a^dag) over the symmetric CPMG train.
inline MatrixXcd branch_brute(int n_c, double tau, double omega, double g,
                              int initial_sign, int dim) {
  const MatrixXcd a = lowering(dim);
  const MatrixXcd n_op = a.adjoint() * a;
  const MatrixXcd x_op = a + a.adjoint();
  MatrixXcd u = MatrixXcd::Identity(dim, dim);
  int s = initial_sign;
  for (int seg = 0; seg <= n_c; ++seg) {
    const double dt = (seg == 0 || seg == n_c) ? 0.5 * tau : tau;
    const MatrixXcd h = omega * n_op + static_cast<double>(s) * g * x_op;
    u = expm_antihermitian(cxd(0, -dt) * h) * u;
    s = -s;
  }
  return u;
}

// One resonant conditional kick V = cos(sqrt2 lambda X) on a thermal state:
// exact Gaussian moments (S = n + 1/2, E = e^{-4 lambda^2 S}).
struct OneKickMoments {
  double p_success;
  double var_x;
  double var_p;
  double occupancy;
};

inline OneKickMoments thermal_one_kick(double n, double lambda) {
  const double S = n + 0.5;
  const double c2 = 2.0 * lambda * lambda;  // c^2 with c = sqrt2 lambda
  const double E = std::exp(-2.0 * c2 * S);
  OneKickMoments m;
  m.p_success = 0.5 * (1.0 + E);
  m.var_x = (S + (S - 4.0 * c2 * S * S) * E) / (1.0 + E);
  m.var_p = S + c2 / (1.0 + E);
  m.occupancy = 0.5 * (m.var_x + m.var_p - 1.0);
  return m;
}

// Dense RK4 for the thermal-contact master equation (small dims only).
inline MatrixXcd damp_brute(const MatrixXcd& rho0, double gamma, double nth,
                            double gamma_h, double t) {
  const int dim = static_cast<int>(rho0.rows());
  const MatrixXcd a = lowering(dim);
  const MatrixXcd ad = a.adjoint();
  const MatrixXcd n_op = ad * a;
  const MatrixXcd aad = a * ad;
  const double kd = gamma * (nth + 1.0);
  const double ku = gamma * nth + gamma_h;
  auto rhs = [&](const MatrixXcd& r) -> MatrixXcd {
    return kd * (a * r * ad - 0.5 * (n_op * r + r * n_op)) +
           ku * (ad * r * a - 0.5 * (aad * r + r * aad));
  };
  const double cap = std::min(kd > 0 ? 0.05 / kd : 1e300,
                              0.5 / ((kd + ku) * (dim + 1.0)));
  const int steps = std::max(1, static_cast<int>(std::ceil(t / cap)));
  const double dt = t / steps;
  MatrixXcd r = rho0;
  for (int s = 0; s < steps; ++s) {
    const MatrixXcd k1 = rhs(r);
    const MatrixXcd k2 = rhs(r + 0.5 * dt * k1);
    const MatrixXcd k3 = rhs(r + 0.5 * dt * k2);
    const MatrixXcd k4 = rhs(r + dt * k3);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return r;
}

}  // namespace oracles
