#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heraldsim/errors.hpp"
#include "heraldsim/pulse.hpp"
#include "oracles.hpp"

using namespace heraldsim;

namespace {
constexpr double kPi = std::numbers::pi;

PulseSchedule make_schedule(int n_c, double g, double eps = 0.0) {
  PulseSchedule s;
  s.n_c = n_c;
  s.g = g;
  s.epsilon = eps;
  return s;
}

OscillatorSpec unit_osc(int dim = 32) {
  OscillatorSpec spec;
  spec.omega = 1.0;
  spec.dim = dim;
  return spec;
}
}  // namespace

TEST_CASE("filter function: small-argument limit vanishes") {
  CHECK(filter_function(4, 1e-6, 1e-3) < 1e-15);
}

TEST_CASE("filter function: direct formula value 12") {
  // n_c=2, t=2 tau, omega=pi/tau with tau=1: 4 tan^2(pi/3) cos^2(pi) = 12
  CHECK(filter_function(2, 2.0, kPi) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("filter function: pole throws") {
  // omega t/(2 n_c + 2) = pi/2 exactly
  CHECK_THROWS_AS(filter_function(2, 3.0 * kPi, 1.0), NumericError);
}

TEST_CASE("filter function: concentrates near omega = pi/tau") {
  const int n_c = 50;
  const double tau = 1.0;
  const double t = n_c * tau;
  double peak = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double w = (0.2 + 1.8 * i / 4000.0) * kPi / tau;
    double f = 0.0;
    try {
      f = filter_function(n_c, t, w);
    } catch (const NumericError&) {
      continue;
    }
    peak = std::max(peak, f);
  }
  for (const double off : {0.8, 1.2}) {
    const double f = filter_function(n_c, t, off * kPi / tau);
    CHECK(f < 0.05 * peak);
  }
}

TEST_CASE("filter function: asymptotic 2 pi/t quasi-periodicity") {
  // The cos^2 factor is exactly 2 pi/t-periodic; the tan factor's argument
  // shifts by pi/(n_c+1) per period, so the property is asymptotic in n_c
  // with relative error ~ 2 pi/((n_c+1) theta). Probe at large n_c away
  // from the tan poles and cos zeros.
  const int n_c = 400;
  const double t = n_c * 1.0;
  const double dw = 2.0 * kPi / t;
  double ref_peak = 0.0;
  for (int i = 0; i < 40; ++i)
    ref_peak = std::max(ref_peak, filter_function(n_c, t, 0.8 + i * 0.01));
  for (int i = 0; i < 40; ++i) {
    const double w = 0.8 + i * 0.01;
    const double f0 = filter_function(n_c, t, w);
    const double f1 = filter_function(n_c, t, w + dw);
    if (f0 < 0.02 * ref_peak) continue;  // skip near-zeros of cos^2
    CHECK(std::abs(f1 - f0) / f0 < 0.10);
  }
}

TEST_CASE("lambda_eff values") {
  CHECK(lambda_eff(0.0, 100, 1.0) == 0.0);
  CHECK(lambda_eff(2.5e-4, 500, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(lambda_eff(2.5e-4, 100, 1.0) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("compose_branch: free evolution at g=0") {
  const PulseSchedule s = make_schedule(6, 0.0);
  const BranchPropagator u = compose_branch(s, unit_osc(), +1);
  CHECK(u.displacement == cxd(0.0, 0.0));
  CHECK(u.phase == 0.0);
  CHECK(u.rotation == doctest::Approx(6.0 * kPi).epsilon(1e-14));
}

TEST_CASE("compose_branch: resonant displacement magnitude equals lambda") {
  for (const int n_c : {10, 100, 500}) {
    const PulseSchedule s = make_schedule(n_c, 2.5e-4);
    const BranchPropagator u = compose_branch(s, unit_osc(), +1);
    const double lam = lambda_eff(s.g, n_c, 1.0);
    CHECK(std::abs(u.displacement) == doctest::Approx(lam).epsilon(0.05));
  }
}

TEST_CASE("compose_branch: spin-inversion symmetry") {
  const PulseSchedule s = make_schedule(7, 0.013, 0.004);
  const BranchPropagator up = compose_branch(s, unit_osc(), +1);
  const BranchPropagator um = compose_branch(s, unit_osc(), -1);
  CHECK(std::abs(up.displacement + um.displacement) < 1e-12);
  CHECK(std::abs(up.phase - um.phase) < 1e-12);
  CHECK(up.rotation == um.rotation);
}

TEST_CASE("compose_branch: matches brute-force matrix products") {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> nc(1, 8);
  std::uniform_real_distribution<double> gd(1e-3, 0.04), ed(-0.02, 0.02);
  const int dim = 32;
  const OscillatorSpec spec = unit_osc(dim);
  for (int trial = 0; trial < 5; ++trial) {
    const PulseSchedule s = make_schedule(nc(rng), gd(rng), ed(rng));
    for (const int sign : {+1, -1}) {
      const BranchPropagator u = compose_branch(s, spec, sign);
      const MatrixXcd mine = u.to_matrix(dim);
      const MatrixXcd ref =
          oracles::branch_brute(s.n_c, s.tau(1.0), 1.0, sign * s.g, +1, dim);
      const int ib = interior_dim(dim, u.displacement);
      const double err = (mine.topLeftCorner(ib, ib) - ref.topLeftCorner(ib, ib))
                             .cwiseAbs()
                             .maxCoeff();
      CHECK(err < 1e-6);
    }
  }
}

TEST_CASE("multimode report: single resonant mode carries all weight") {
  PulseSchedule s = make_schedule(40, 1e-3);
  ModeList modes;
  modes.modes.push_back({kPi / s.tau(1.0), 1e-3});
  const auto rows = multimode_filter_report(modes, s, 1.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].weight_fraction == doctest::Approx(1.0));
}

TEST_CASE("multimode report: off-resonant mode weight below 5%") {
  PulseSchedule s = make_schedule(50, 1e-3);
  const double w0 = kPi / s.tau(1.0);
  ModeList modes;
  modes.modes.push_back({w0, 1e-3});
  modes.modes.push_back({2.7 * w0, 1e-3});
  const auto rows = multimode_filter_report(modes, s, 1.0);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].weight_fraction < 0.05);
}

TEST_CASE("multimode report: resonant weight scales linearly with n_c") {
  ModeList modes;
  PulseSchedule s50 = make_schedule(50, 1e-3);
  modes.modes.push_back({kPi / s50.tau(1.0), 1e-3});
  const double w50 = multimode_filter_report(modes, s50, 1.0)[0].weight;
  PulseSchedule s100 = make_schedule(100, 1e-3);
  ModeList modes100;
  modes100.modes.push_back({kPi / s100.tau(1.0), 1e-3});
  const double w100 = multimode_filter_report(modes100, s100, 1.0)[0].weight;
  CHECK(w100 / w50 == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("multimode report: empty list rejected") {
  CHECK_THROWS_AS(multimode_filter_report(ModeList{}, make_schedule(4, 1e-3), 1.0),
                  ConfigError);
}

TEST_CASE("power-law schedule rounds to nearest integer") {
  const auto nc = power_law_schedule(100.0, 0.25, 10);
  REQUIRE(nc.size() == 10);
  CHECK(nc[0] == 100);
  CHECK(nc[1] == 119);
  CHECK(nc[9] == 178);
}

TEST_CASE("schedule validation") {
  PulseSchedule s = make_schedule(0, 1e-3);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = make_schedule(4, 1e-3, 2.0);  // omega - eps < 0
  CHECK_THROWS_AS(s.tau(1.0), ConfigError);
}
