#pragma once

#include <vector>

#include "ssb/operator_core.hpp"

namespace ssb {

// Ordered system of 1..3 spins coupled through its mean x magnetization to K
// non-interacting bath qubits (pure dephasing in the pointer basis):
//   H = H_sys x 1 + 1 x sum_k (omega_k/2) sigma_z + g m_x x sum_k sigma_z.
// H_sys is the ordered-phase chain Hamiltonian -sum sigma_x sigma_x (zero for
// a single spin), so the pointer observable m_x is conserved exactly.
struct CompositeSpec {
  int n_sys_spins = 1;
  int n_bath_qubits = 4;
  double coupling_g = 0.1;
  std::vector<double> bath_frequencies;  // empty means all zero
  int dim_budget = 2048;
};

struct CompositeSystem {
  CompositeSpec spec;
  int d_sys = 0;
  int d_bath = 0;
  LinearOperator h_total;
  LinearOperator combined_symmetry;  // parity x (flip every bath qubit)
  LinearOperator pointer;            // m_x x 1
  BasisPtr basis;
  StateVector initial_state;  // symmetric system branch pair x bath |+x...+x>
  Eigen::VectorXcd branch_plus;   // pointer branch with m_x = +1 (system part)
  Eigen::VectorXcd branch_minus;  // pointer branch with m_x = -1
};

// Builds the composite and verifies [H, Sigma] = 0 at construction. Nonzero
// bath splittings break the combined flip symmetry, so they are rejected.
CompositeSystem build_composite(const CompositeSpec& spec);

struct DecohereSample {
  double t = 0.0;
  double purity_reduced = 0.0;
  double coherence_abs = 0.0;   // |<branch+| rho_sys |branch->|
  double population_plus = 0.0;
  double population_minus = 0.0;
  double symmetry_expectation = 0.0;  // <m_x x 1> in the full state
  double full_purity = 0.0;
};

struct DecohereResult {
  std::vector<DecohereSample> samples;
  std::vector<DensityMatrix> reduced;  // system state at each sample
};

// Unitary evolution via the spectral propagator: each sample is computed as
// U exp(-i E t) U^+ |psi0>, so pointer populations and the global norm are
// conserved to rounding, not merely to integrator tolerance.
DecohereResult decohere_run(const CompositeSystem& system, double t_final,
                            int n_samples);

struct CatLionReport {
  double time = 0.0;
  double full_purity = 0.0;
  double reduced_purity_system = 0.0;
  double reduced_purity_bath = 0.0;
  double entanglement_entropy = 0.0;
  double symmetry_before = 0.0;
  double symmetry_after = 0.0;
};

// Single bath qubit taken to the fully entangled point t = pi/(4g): both
// reduced states are maximally mixed while the global state stays pure.
CatLionReport cat_lion_demo(const CompositeSpec& spec);

}  // namespace ssb
