#include "heraldsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "heraldsim/errors.hpp"

namespace heraldsim {

void OscillatorSpec::validate() const {
  if (!(omega > 0)) throw ConfigError("oscillator.omega must be > 0");
  if (gamma < 0) throw ConfigError("oscillator.gamma must be >= 0");
  if (gamma_h < 0) throw ConfigError("oscillator.gamma_h must be >= 0");
  if (n_thermal < 0) throw ConfigError("oscillator.n_thermal must be >= 0");
  if (dim < 2) throw ConfigError("oscillator.dim must be >= 2");
}

double DensityMatrix::hermiticity_defect() const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint()),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check(double trace_tol, double herm_tol) const {
  if (std::abs(trace_real() - 1.0) > trace_tol)
    throw NumericError("density matrix trace drifted from 1");
  if (hermiticity_defect() > herm_tol)
    throw NumericError("density matrix lost hermiticity");
}

int interior_dim(int dim, cxd beta) {
  const double b2 = std::norm(beta);
  const int cut = dim - static_cast<int>(std::ceil(4.0 * b2)) - 8;
  return std::max(cut, 0);
}

double thermal_tail_mass(double n_thermal, int dim) {
  if (n_thermal <= 0) return 0.0;
  const double r = n_thermal / (n_thermal + 1.0);
  return std::pow(r, dim);  // sum_{k>=dim} (1-r) r^k = r^dim
}

DensityMatrix build_thermal(const OscillatorSpec& spec, bool strict,
                            std::vector<std::string>* warnings) {
  spec.validate();
  const int dim = spec.dim;
  const double n = spec.n_thermal;

  if (dim < 10.0 * (n + 1.0)) {
    std::ostringstream os;
    os << "truncation dim=" << dim << " below 10*(n_thermal+1)="
       << 10.0 * (n + 1.0);
    if (warnings) warnings->push_back(os.str());
  }
  const double tail = thermal_tail_mass(n, dim);
  if (tail > 1e-6) {
    std::ostringstream os;
    os << "thermal tail mass " << tail << " beyond dim=" << dim
       << " exceeds 1e-6";
    if (strict) throw TruncationError(os.str());
    if (warnings) warnings->push_back(os.str());
  }

  VectorXd p(dim);
  if (n <= 0) {
    p.setZero();
    p(0) = 1.0;
  } else {
    const double r = n / (n + 1.0);
    double w = 1.0;
    for (int k = 0; k < dim; ++k, w *= r) p(k) = w;
    p /= p.sum();
  }
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  m.diagonal() = p.cast<cxd>();
  return DensityMatrix{std::move(m)};
}

MatrixXcd displacement_op(cxd beta, int dim) {
  if (dim < 2) throw ConfigError("displacement_op: dim must be >= 2");
  MatrixXcd D = MatrixXcd::Zero(dim, dim);
  const double x = std::norm(beta);
  if (x == 0.0) {
    D.setIdentity();
    return D;
  }
  std::vector<double> lg(dim + 1);
  for (int k = 0; k <= dim; ++k) lg[k] = std::lgamma(k + 1.0);
  const double e = std::exp(-x / 2.0);

  // <n+d|D|n> = sqrt(n!/(n+d)!) beta^d e^{-x/2} L_n^{(d)}(x); the lower
  // triangle follows from D(-beta) = D(beta)^dag. Laguerre recurrence in n
  // for each fixed band d.
  for (int d = 0; d < dim; ++d) {
    const cxd bu = std::pow(beta, d);
    const cxd bl = std::pow(-std::conj(beta), d);
    double Lm1 = 0.0, L = 1.0;  // L_{-1} = 0, L_0 = 1
    for (int n = 0; n + d < dim; ++n) {
      const int m = n + d;
      const double amp = std::exp(0.5 * (lg[n] - lg[m])) * e * L;
      D(m, n) = amp * bu;
      D(n, m) = amp * bl;
      const double Lp = ((2.0 * n + 1.0 + d - x) * L - (n + d) * Lm1) / (n + 1.0);
      Lm1 = L;
      L = Lp;
    }
  }
  return D;
}

VectorXcd rotation_phases(double theta, int dim) {
  VectorXcd ph(dim);
  for (int k = 0; k < dim; ++k) ph(k) = std::polar(1.0, -theta * k);
  return ph;
}

MatrixXcd rotation_op(double theta, int dim) {
  MatrixXcd R = MatrixXcd::Zero(dim, dim);
  R.diagonal() = rotation_phases(theta, dim);
  return R;
}

Observables observables_of(const DensityMatrix& rho) {
  const int dim = rho.dim();
  const MatrixXcd& m = rho.m;

  // <a^dag a>, <a>, <a^2> straight from the matrix elements: a has
  // a_{n,n+1} = sqrt(n+1).
  double occ = 0.0;
  cxd a1(0, 0), a2(0, 0);
  for (int n = 0; n < dim; ++n) {
    occ += n * m(n, n).real();
    if (n + 1 < dim) a1 += std::sqrt(n + 1.0) * m(n + 1, n);
    if (n + 2 < dim) a2 += std::sqrt((n + 1.0) * (n + 2.0)) * m(n + 2, n);
  }
  // X = (a + a^dag)/sqrt2, P = (a - a^dag)/(i sqrt2):
  //   <X^2> = Re<a^2> + <n> + 1/2,  <P^2> = -Re<a^2> + <n> + 1/2
  const double mean_x = std::sqrt(2.0) * a1.real();
  const double mean_p = std::sqrt(2.0) * a1.imag();
  const double x2 = a2.real() + occ + 0.5;
  const double p2 = -a2.real() + occ + 0.5;

  Observables out;
  out.occupancy = occ;
  out.mean_x = mean_x;
  out.var_x = x2 - mean_x * mean_x;
  out.var_p = p2 - mean_p * mean_p;
  out.purity = (m * m).trace().real();
  return out;
}

namespace {

// RK4 on one off-diagonal band r_k = <k|rho|k+d> of the thermal-contact
// dissipator; kd = Gamma(n+1), ku = Gamma n + Gamma_h. The up-jump operator
// is the truncated a^dag, whose a a^dag product vanishes at the top level;
// that closes the boundary, so the channel is trace-preserving on the
// truncated space and the truncated thermal state is its exact fixed point.
void evolve_band(std::vector<cxd>& r, int d, int dim, double kd, double ku,
                 double t, int steps) {
  const int L = static_cast<int>(r.size());
  const double dt = t / steps;
  auto up_diag = [dim](int level) {
    return level < dim - 1 ? level + 1.0 : 0.0;
  };
  std::vector<double> sdown(L), sup(L), diag(L);
  for (int k = 0; k < L; ++k) {
    sdown[k] = std::sqrt((k + 1.0) * (k + 1.0 + d));
    sup[k] = std::sqrt(static_cast<double>(k) * (k + d));
    diag[k] = -0.5 * kd * (2.0 * k + d) -
              0.5 * ku * (up_diag(k) + up_diag(k + d));
  }
  std::vector<cxd> k1(L), k2(L), k3(L), k4(L), tmp(L);
  auto rhs = [&](const std::vector<cxd>& v, std::vector<cxd>& out) {
    for (int k = 0; k < L; ++k) {
      cxd acc = diag[k] * v[k];
      if (k + 1 < L) acc += kd * sdown[k] * v[k + 1];
      if (k > 0) acc += ku * sup[k] * v[k - 1];
      out[k] = acc;
    }
  };
  for (int s = 0; s < steps; ++s) {
    rhs(r, k1);
    for (int k = 0; k < L; ++k) tmp[k] = r[k] + 0.5 * dt * k1[k];
    rhs(tmp, k2);
    for (int k = 0; k < L; ++k) tmp[k] = r[k] + 0.5 * dt * k2[k];
    rhs(tmp, k3);
    for (int k = 0; k < L; ++k) tmp[k] = r[k] + dt * k3[k];
    rhs(tmp, k4);
    for (int k = 0; k < L; ++k)
      r[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
}

}  // namespace

DensityMatrix lindblad_damping(const DensityMatrix& rho, const OscillatorSpec& spec,
                               double duration) {
  spec.validate();
  if (duration < 0) throw ConfigError("lindblad_damping: negative duration");
  const double kd = spec.gamma * (spec.n_thermal + 1.0);
  const double ku = spec.gamma * spec.n_thermal + spec.gamma_h;
  if (duration == 0.0 || (kd == 0.0 && ku == 0.0)) return rho;

  const int dim = rho.dim();
  const double dt_acc = kd > 0 ? 0.05 / kd : std::numeric_limits<double>::infinity();
  const double dt_stab = 0.5 / ((kd + ku) * (dim + 1.0));
  const double dt = std::min(dt_acc, dt_stab);
  const int steps = std::max(1, static_cast<int>(std::ceil(duration / dt)));

  const double trace_in = rho.trace_real();
  MatrixXcd out = rho.m;
  std::vector<cxd> band;
  for (int d = 0; d < dim; ++d) {
    const int L = dim - d;
    band.resize(L);
    double mx = 0.0;
    for (int k = 0; k < L; ++k) {
      band[k] = out(k, k + d);
      mx = std::max(mx, std::abs(band[k]));
    }
    if (mx < 1e-300) continue;
    evolve_band(band, d, dim, kd, ku, duration, steps);
    for (int k = 0; k < L; ++k) {
      out(k, k + d) = band[k];
      if (d > 0) out(k + d, k) = std::conj(band[k]);
    }
  }

  DensityMatrix result{std::move(out)};
  const double drift = std::abs(result.trace_real() - trace_in);
  if (drift > 1e-8) {
    std::ostringstream os;
    os << "lindblad_damping: trace drift " << drift << " exceeds 1e-8 "
       << "(steps=" << steps << ", dim=" << dim << ")";
    throw NumericError(os.str());
  }
  return result;
}

}  // namespace heraldsim
