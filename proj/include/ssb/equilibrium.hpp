#pragma once

#include <vector>

#include "ssb/models.hpp"

namespace ssb {

struct LimitScanPoint {
  double n_particles = 0.0;
  double field_b = 0.0;
  int cutoff = 0;
  double op_modulus = 0.0;
  bool converged = false;
};

// Grid of ground-state order parameter moduli over (N, B), sorted by (N, B).
struct LimitScanResult {
  std::vector<LimitScanPoint> points;
};

struct TowerLevel {
  int m = 0;
  double energy = 0.0;
  int degeneracy = 1;
};

// Lowest part of the symmetric spectrum, labeled by |m|; gaps close as 1/N.
struct TowerSpectrum {
  double n_particles = 0.0;
  std::vector<TowerLevel> levels;
};

// |<gs|e^{i theta}|gs>| of the pinned rotor ground state.
double order_parameter_eq(const ModelBundle& model);

// k lowest levels of the unpinned rotor (B must be 0), energies m^2/(2N).
TowerSpectrum tower_spectrum(const RotorModel& params, int k);

struct CutoffOptions {
  double energy_rel_tol = 1e-10;
  double op_abs_tol = 1e-6;
  int hard_limit = 100000;
};

// Smallest cutoff (factor-2 search) whose doubling moves neither the ground
// energy nor the order parameter beyond tolerance. Never below 6 sigma_m.
int cutoff_converge(const RotorModel& params, const CutoffOptions& opts = {});

// Ground-state scan over the (N, B) grid; points run concurrently, assembly
// is sorted so output does not depend on scheduling. Unconverged points are
// flagged, not dropped.
LimitScanResult limit_scan(const std::vector<double>& n_grid,
                           const std::vector<double>& b_grid,
                           double theta0 = 0.0);

}  // namespace ssb
