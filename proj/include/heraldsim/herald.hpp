#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "heraldsim/fock.hpp"
#include "heraldsim/pulse.hpp"

namespace heraldsim {

struct SpinSpec {
  double t2 = std::numeric_limits<double>::infinity();  // coherence time (s)
  double readout_fidelity = 1.0;                        // in [0.5, 1]

  void validate() const;
  double eta(double block_time) const;  // dephasing contrast e^{-t/T2}
};

// Conditional measurement operators for one block:
//   V = (e^{i phi+} D(b+) + e^{i phi-} D(b-)) R(theta) / 2   (success)
//   W = (e^{i phi+} D(b+) - e^{i phi-} D(b-)) R(theta) / 2   (failure)
// with V^dag V + W^dag W = I.
struct ConditionalKick {
  MatrixXcd v_op;
  MatrixXcd w_op;
  double eta = 1.0;
  double readout_fidelity = 1.0;
  double block_time = 0.0;
  cxd beta = 0.0;      // branch displacement (initial_sign = +1)
  double theta = 0.0;  // free-rotation angle of the block
};

enum class Outcome { success, fail };

struct RoundRecord {
  int round = 0;
  Outcome outcome = Outcome::success;
  double p_success = 0.0;  // observed probability (readout fold included)
  double occupancy = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double eta = 1.0;
  bool restarted = false;  // trajectory mode: this round followed a restart
};

struct TrajectoryRecord {
  std::vector<RoundRecord> rounds;
  double event_rate = 1.0;   // product of observed per-round success probabilities
  int rounds_completed = 0;  // total blocks executed (restarts included)
  int restarts = 0;
  Observables final_observables;
  // positivity diagnostic of the final state; NaN when dim > 512 (skipped:
  // the eigensolve would dominate the run). Warned, never projected.
  double final_min_eigenvalue = 0.0;
};

enum class RunMode { conditioned, trajectory };

struct ProtocolOptions {
  RunMode mode = RunMode::conditioned;
  std::uint64_t seed = 0;
  bool continue_on_fail = false;  // exploration variant: apply the fail
                                  // projection and keep going (no restart)
  int max_restarts = 1000;
  bool strict_truncation = true;
};

struct CoolingModelState {
  std::vector<double> occupancies;  // n_0 ... n_M
  std::vector<double> lambdas;      // lambda used for each step (retuned or fixed)
  std::vector<double> gamma_m;      // (4 g^2/omega) n_k when g, omega given
};

ConditionalKick build_conditional_ops(const PulseSchedule& schedule, const SpinSpec& spin,
                                      const OscillatorSpec& spec, int round = 1,
                                      std::vector<std::string>* warnings = nullptr);

// Observed success probability: p = (1+eta)/2 Tr[V rho V^dag]
// + (1-eta)/2 Tr[W rho W^dag], folded with the readout fidelity f as
// f p + (1-f)(1-p).
double success_probability(const ConditionalKick& kick, const DensityMatrix& rho);

DensityMatrix project(const ConditionalKick& kick, const DensityMatrix& rho,
                      Outcome outcome);

// M rounds of damp -> kick -> measure. Conditioned mode post-selects success
// every round; trajectory mode samples outcomes with the seeded generator and
// restarts from the fresh thermal state on failure.
TrajectoryRecord run_protocol(const OscillatorSpec& spec, const PulseSchedule& schedule,
                              const SpinSpec& spin, const ProtocolOptions& opts,
                              std::vector<std::string>* warnings = nullptr);

double event_rate(const TrajectoryRecord& record);

// Occupancy recurrence n -> n e^{-2 lambda^2 n}. lambda > 0 keeps it fixed;
// retune=true uses lambda_k^2 = 0.5/n_k each round instead.
CoolingModelState cooling_recurrence(double n0, double lambda, int rounds,
                                     bool retune = false, double g = 0.0,
                                     double omega = 0.0);

// ceil(2 log2 n0) successful projections to approach the ground state.
int speed_limit_rounds(double n0);

// Rounds k with (4 g^2/omega) n_k > Gamma along the retuned recurrence.
int useful_rounds(double g, double omega, double gamma, double n0,
                  int cap = 1000000);

// Deterministic per-trajectory stream: splitmix64 over (seed, index).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

}  // namespace heraldsim
