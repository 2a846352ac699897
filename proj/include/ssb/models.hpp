#pragma once

#include <optional>

#include "ssb/operator_core.hpp"

namespace ssb {

// Planar rotor with moment of inertia proportional to the particle number, in
// the angular momentum basis m = -cutoff..cutoff.
struct RotorModel {
  double n_particles = 1.0;  // sets extensivity; kinetic prefactor 1/(2N)
  int cutoff = 4;            // max |m| retained
  double field_b = 0.0;      // pinning field strength per particle
  double theta0 = 0.0;       // field orientation
  double epsilon = 0.0;      // weight growth rate for non-unitary runs

  int dim() const { return 2 * cutoff + 1; }
  void validate() const;
};

// Transverse-field Ising chain interpolating between a paramagnet (p = 0) and
// an Ising ferromagnet (p = 1).
struct TfimModel {
  int n_spins = 2;
  double p = 0.0;
  bool open_boundary = true;

  int dim() const { return 1 << n_spins; }
  void validate() const;
};

enum class ModelKind { rotor, tfim };

// A model's Hamiltonian together with its symmetry generator, order parameter
// and pinning field operator.
struct ModelBundle {
  ModelKind kind = ModelKind::rotor;
  LinearOperator hamiltonian;
  LinearOperator symmetry_generator;  // L_z, or spin-flip parity
  LinearOperator order_parameter;     // e^{i theta}, or mean x magnetization
  LinearOperator breaking_field;      // N cos(theta - theta0), or sum sigma_x
  BasisPtr basis;
  std::optional<RotorModel> rotor;
  std::optional<TfimModel> tfim;
};

// H = L_z^2/(2N) - B N cos(theta - theta0). The order parameter is the pure
// shift |m> -> |m+1>; it annihilates the top edge state under truncation, so
// runs must keep the edge amplitude negligible.
ModelBundle build_rotor(const RotorModel& params);

// H(p) = -(1-p) sum sigma_z - p sum sigma_x sigma_x, parity sum rule
// [H(p), prod sigma_z] = 0 for every p.
ModelBundle build_tfim(const TfimModel& params);

// Symmetric state with vanishing order parameter: |m=0> for the rotor, the
// even-parity ground state for the chain.
StateVector symmetric_state(const ModelBundle& model);

// Gaussian angular momentum superposition centered on theta_c with the
// equilibrium width sigma_m^2 = (N/2) sqrt(B). Throws when sigma_m^2 < 1
// (packet narrower than one basis site).
StateVector wavepacket_state(const RotorModel& params, double theta_c);

// sigma_m^2 = (N/2) sqrt(B) for the pinned rotor ground state.
double wavepacket_sigma_m_squared(double n_particles, double field_b);

// Pauli matrix acting on one site of a spin chain, embedded in the full
// product space. axis is 'x', 'y' or 'z'.
Eigen::MatrixXcd pauli_on_site(int n_spins, int site, char axis);

}  // namespace ssb
