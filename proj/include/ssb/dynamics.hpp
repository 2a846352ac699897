#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ssb/models.hpp"

namespace ssb {

// Right-hand side of d|psi>/dt = rhs(t, psi). Must be linear in psi; the
// integrator renormalizes freely and reconstructs the discarded scale in
// log_norm.
using Rhs =
    std::function<void(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd&)>;

// Generator of the non-unitary flow
//   d|psi>/dt = -i H |psi> + (epsilon/2) B |psi>,
// i.e. H is perturbed by the anti-Hermitian term +i(epsilon/2)B. epsilon is
// the weight growth rate: with H = 0 a component at B-eigenvalue b gains
// probability weight as exp(epsilon b t), so the field pumps weight toward
// configurations aligned with B. epsilon = 0 reduces the generator to -iH
// exactly (the field term is never evaluated).
struct GeneratorSpec {
  LinearOperator hamiltonian;
  double epsilon = 0.0;
  std::optional<LinearOperator> breaking_field;

  void validate() const;
  Rhs make_rhs() const;
};

struct IntegratorOptions {
  double tolerance = 1e-9;  // local error per unit time
  double max_step = 0.5;
  double initial_step = 1e-4;
};

// Time series of normalized observables along a run. log_norm accumulates the
// logarithm of the norm discarded by per-step renormalization, so the
// unnormalized solution is |psi(t)> * exp(log_norm).
struct Trajectory {
  std::vector<double> times;
  std::vector<double> op_modulus;
  std::vector<double> op_phase;
  std::vector<double> energy;
  std::vector<double> log_norm;
  std::vector<double> step_sizes;
  long total_accepted_steps = 0;

  int size() const { return static_cast<int>(times.size()); }
};

// Adaptive Dormand-Prince 5(4) with renormalization after every accepted
// step. The observer sees the normalized state at uniform sample times.
using SampleObserver = std::function<void(
    double t, const Eigen::VectorXcd& y, double log_norm, double last_step)>;

long integrate_adaptive(const Rhs& rhs, Eigen::VectorXcd state, double t_final,
                        double record_every, const IntegratorOptions& opts,
                        const SampleObserver& observe);

Trajectory evolve(const StateVector& psi0, const GeneratorSpec& gen,
                  const LinearOperator& order_param, double t_final,
                  double record_every, const IntegratorOptions& opts = {});

// First time a sampled series reaches `threshold`, linearly interpolated
// between samples. Returns nullopt when the threshold is never reached.
std::optional<double> first_crossing(const std::vector<double>& times,
                                     const std::vector<double>& values,
                                     double threshold);

struct CollapseOptions {
  double gamma = 0.5;
  int samples = 2000;
  double budget_factor = 50.0;  // budget = factor/(eps N) + 10/sqrt(eps)
  IntegratorOptions integrator;
};

struct CollapseResult {
  double time = 0.0;
  bool reached = false;
  double plateau_op = 0.0;
  Trajectory trajectory;
};

// Collapse of the symmetric rotor state |m=0> under the pinning field at
// theta0: time for the order parameter modulus to first reach gamma. The
// Hamiltonian is the symmetric B = 0 one; only the non-unitary field acts.
CollapseResult collapse_time(const RotorModel& params, double epsilon,
                             double gamma, const CollapseOptions& opts = {});

struct ReorientOptions {
  double capture_radius = 0.1;  // radians around theta_field
  int samples = 2000;
  double budget_factor = 50.0;  // budget = factor * sqrt(B) / eps
  IntegratorOptions integrator;
};

struct ReorientResult {
  double time = 0.0;
  bool reached = false;
  Trajectory trajectory;
};

// Reorientation of an already-ordered packet: the packet starts at
// theta_start with the equilibrium width set by (N, B), the field points
// along theta_field, and the Hamiltonian is symmetric. params.field_b only
// fixes the packet width.
ReorientResult reorientation_time(const RotorModel& params, double theta_start,
                                  double theta_field, double epsilon,
                                  const ReorientOptions& opts = {});

// Linear ramp of the chain control parameter from 0 to 1 over t_total.
struct QuenchSchedule {
  double t_total = 50.0;
};

struct QuenchOptions {
  double record_every = 0.1;
  IntegratorOptions integrator;
};

// Sweep H(p(t)) across the transition from the p = 0 ground state.
// field_sign orients the pinning field +-sum sigma_x; with epsilon = 0 the
// order parameter is conserved (identically zero) through the whole ramp.
Trajectory quench_sweep(const TfimModel& params, const QuenchSchedule& schedule,
                        double epsilon, double field_sign = 1.0,
                        const QuenchOptions& opts = {});

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  int n = 0;
};

// Ordinary least squares on (log x, log y).
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double wrap_angle(double a);  // into (-pi, pi]

}  // namespace ssb
