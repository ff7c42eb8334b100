#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "heraldsim/errors.hpp"
#include "heraldsim/fock.hpp"
#include "oracles.hpp"

using namespace heraldsim;

namespace {

DensityMatrix pure_state(const VectorXcd& psi) {
  VectorXcd v = psi / psi.norm();
  return DensityMatrix{v * v.adjoint()};
}

}  // namespace

TEST_CASE("thermal state: zero temperature is the ground state") {
  OscillatorSpec spec;
  spec.n_thermal = 0.0;
  spec.dim = 32;
  const DensityMatrix rho = build_thermal(spec);
  CHECK(std::abs(rho.m(0, 0).real() - 1.0) < 1e-15);
  CHECK(rho.m.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("thermal state: geometric occupancy at n=10") {
  OscillatorSpec spec;
  spec.n_thermal = 10.0;
  spec.dim = 256;
  const DensityMatrix rho = build_thermal(spec);
  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-12);
  const Observables obs = observables_of(rho);
  CHECK(obs.occupancy == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(obs.var_x == doctest::Approx(10.5).epsilon(1e-6));
}

TEST_CASE("thermal state: strict mode rejects a short truncation") {
  OscillatorSpec spec;
  spec.n_thermal = 10.0;
  spec.dim = 16;
  CHECK_THROWS_AS(build_thermal(spec, true), TruncationError);
  std::vector<std::string> warnings;
  const DensityMatrix rho = build_thermal(spec, false, &warnings);
  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-12);
  CHECK(warnings.size() >= 1);
}

TEST_CASE("displacement: beta=0 is the identity") {
  const MatrixXcd d = displacement_op(0.0, 16);
  CHECK((d - MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("displacement: coherent-state occupancy is |beta|^2") {
  const int dim = 64;
  const cxd beta(0.0, 0.25);
  const MatrixXcd d = displacement_op(beta, dim);
  VectorXcd vac = VectorXcd::Zero(dim);
  vac(0) = 1.0;
  const DensityMatrix rho = pure_state(d * vac);
  CHECK(observables_of(rho).occupancy == doctest::Approx(0.0625).epsilon(1e-8));
}

TEST_CASE("displacement: matches the matrix-exponential oracle") {
  // Exact matrix elements agree with expm of the truncated generator away
  // from the edge; the oracle's corrupted boundary layer grows with
  // |beta| sqrt(dim), so the comparison block shrinks accordingly.
  const int dim = 128;
  for (const cxd beta : {cxd(0.1, 0.0), cxd(0.0, 0.25), cxd(1.3, 0.7)}) {
    const MatrixXcd mine = displacement_op(beta, dim);
    const MatrixXcd ref = oracles::displacement_brute(beta, dim);
    const int margin = static_cast<int>(std::ceil(10.0 * std::abs(beta) * std::sqrt(dim)));
    const int ib = std::max(8, interior_dim(dim, beta) - margin);
    const double err =
        (mine.topLeftCorner(ib, ib) - ref.topLeftCorner(ib, ib)).cwiseAbs().maxCoeff();
    CAPTURE(beta.real());
    CAPTURE(beta.imag());
    CHECK(err < 1e-10);
  }
}

TEST_CASE("displacement: D(beta) D(-beta) = 1 on the interior block") {
  const int dim = 128;
  const cxd beta(0.1, 0.05);
  const MatrixXcd prod = displacement_op(beta, dim) * displacement_op(-beta, dim);
  const int ib = interior_dim(dim, beta);
  const double err =
      (prod.topLeftCorner(ib, ib) - MatrixXcd::Identity(ib, ib)).cwiseAbs().maxCoeff();
  CHECK(err < 1e-9);
}

TEST_CASE("displacement: composition rule with brute-force products") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  const int dim = 32;
  for (int trial = 0; trial < 6; ++trial) {
    const cxd b1(u(rng), u(rng)), b2(u(rng), u(rng));
    const MatrixXcd lhs = displacement_op(b1, dim) * displacement_op(b2, dim);
    const cxd phase = std::polar(1.0, std::imag(b1 * std::conj(b2)));
    const MatrixXcd rhs = phase * displacement_op(b1 + b2, dim);
    const int ib = interior_dim(dim, b1 + b2) - 10;
    const double err =
        (lhs.topLeftCorner(ib, ib) - rhs.topLeftCorner(ib, ib)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-9);
  }
}

TEST_CASE("rotation: identity at 0 and 2 pi, conjugation rotates beta") {
  CHECK((rotation_op(0.0, 8) - MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rotation_op(2.0 * M_PI, 8) - MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() <
        1e-12);

  const int dim = 32;
  const double theta = 0.7;
  const cxd beta(0.2, -0.1);
  const MatrixXcd lhs =
      rotation_op(theta, dim) * displacement_op(beta, dim) * rotation_op(-theta, dim);
  const MatrixXcd rhs = displacement_op(beta * std::polar(1.0, -theta), dim);
  const int ib = interior_dim(dim, beta);
  CHECK((lhs.topLeftCorner(ib, ib) - rhs.topLeftCorner(ib, ib)).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("observables: vacuum quadratures") {
  OscillatorSpec spec;
  spec.dim = 16;
  const Observables obs = observables_of(build_thermal(spec));
  CHECK(obs.occupancy == doctest::Approx(0.0));
  CHECK(obs.var_x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(obs.var_p == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(obs.purity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observables: even-cat occupancy lambda^2 tanh(lambda^2)") {
  const int dim = 64;
  const double lam = 0.25;
  VectorXcd vac = VectorXcd::Zero(dim);
  vac(0) = 1.0;
  const VectorXcd cat = (displacement_op(cxd(0, lam), dim) * vac +
                         displacement_op(cxd(0, -lam), dim) * vac);
  const DensityMatrix rho = pure_state(cat);
  CHECK(observables_of(rho).occupancy ==
        doctest::Approx(0.25 * 0.25 * std::tanh(0.25 * 0.25)).epsilon(1e-6));
}

TEST_CASE("damping: thermal state is a fixed point") {
  OscillatorSpec spec;
  spec.n_thermal = 10.0;
  spec.gamma = 1.0;
  spec.dim = 160;
  const DensityMatrix rho = build_thermal(spec);
  const DensityMatrix out = lindblad_damping(rho, spec, 0.7);
  CHECK((out.m - rho.m).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("damping: vacuum relaxes along the exact thermalization law") {
  OscillatorSpec spec;
  spec.n_thermal = 10.0;
  spec.gamma = 1.0;
  spec.dim = 160;
  OscillatorSpec vac = spec;
  vac.n_thermal = 0.0;
  DensityMatrix rho = build_thermal(vac);
  rho.m.conservativeResize(spec.dim, spec.dim);  // same dim already
  const DensityMatrix out = lindblad_damping(rho, spec, 1.0);
  const double expected = 10.0 * (1.0 - std::exp(-1.0));
  CHECK(observables_of(out).occupancy == doctest::Approx(expected).epsilon(0.01));
  CHECK(std::abs(out.trace_real() - 1.0) < 1e-8);
}

TEST_CASE("damping: gamma=0 is the identity map") {
  OscillatorSpec spec;
  spec.n_thermal = 3.0;
  spec.gamma = 0.0;
  spec.dim = 64;
  const DensityMatrix rho = build_thermal(spec);
  const DensityMatrix out = lindblad_damping(rho, spec, 5.0);
  CHECK((out.m - rho.m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("damping: band integration matches the dense-oracle channel") {
  const int dim = 24;
  OscillatorSpec spec;
  spec.n_thermal = 2.0;
  spec.gamma = 0.3;
  spec.gamma_h = 0.05;
  spec.dim = dim;
  // displaced thermal state carries all off-diagonal bands
  OscillatorSpec small = spec;
  small.dim = dim;
  const MatrixXcd d = displacement_op(cxd(0.8, 0.4), dim);
  const DensityMatrix rho0{d * build_thermal(small, false).m * d.adjoint()};
  const DensityMatrix mine = lindblad_damping(rho0, spec, 1.7);
  const MatrixXcd ref = oracles::damp_brute(rho0.m, 0.3, 2.0, 0.05, 1.7);
  CHECK((mine.m - ref).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(mine.hermiticity_defect() < 1e-10);
}

TEST_CASE("damping: pure heating follows (n0+1) e^{Gh t} - 1") {
  OscillatorSpec spec;
  spec.n_thermal = 0.0;
  spec.gamma = 0.0;
  spec.gamma_h = 0.2;
  spec.dim = 96;
  const DensityMatrix out = lindblad_damping(build_thermal(spec), spec, 2.0);
  const double expected = std::expm1(0.2 * 2.0);  // from n0 = 0
  CHECK(observables_of(out).occupancy == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("damping preserves the uncertainty product") {
  OscillatorSpec spec;
  spec.n_thermal = 1.0;
  spec.gamma = 0.5;
  spec.dim = 48;
  const MatrixXcd d = displacement_op(cxd(0.5, -0.3), spec.dim);
  const DensityMatrix rho0{d * build_thermal(spec, false).m * d.adjoint()};
  const Observables obs = observables_of(lindblad_damping(rho0, spec, 0.9));
  CHECK(obs.var_x * obs.var_p >= 0.25 - 1e-9);
}
