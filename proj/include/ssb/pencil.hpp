#pragma once

#include <vector>

namespace ssb {

// Rigid pencil balancing on a flat base of radius b with center of mass at
// height h_c. Tilted beyond phi_crit = arctan(b/h_c) it pivots on the base
// edge and topples; below, damped restoring dynamics settles it back upright.
struct PencilParams {
  double base_radius = 0.0;
  double height = 1.0;    // center-of-mass height
  double phi0 = 0.0;      // initial tilt
  double damping = 0.5;
  double r_max = 1.0;     // projection length when flat
  double azimuth = 0.0;   // direction of the initial perturbation

  void validate() const;
};

double critical_angle(double base_radius, double height);

struct PencilSample {
  double t = 0.0;
  double phi = 0.0;
  double ratio = 0.0;  // r / r_max
};

struct PencilTrajectory {
  std::vector<PencilSample> samples;
  double final_ratio = 0.0;  // 0 (settled back) or 1 (fell flat)
  double final_azimuth = 0.0;
};

// Integrates the tilt dynamics until the pencil either lies flat or settles
// upright. phi0 exactly at the critical angle is a degenerate equilibrium and
// is rejected.
PencilTrajectory simulate_fall(const PencilParams& params);

struct PencilScanEntry {
  double base_radius = 0.0;
  double phi0 = 0.0;
  double final_ratio = 0.0;
};

// Full outcome table over the two grids, ordered b-major. Evaluating the
// trailing entries along each axis realizes the two orderings of the
// (b -> 0, phi0 -> 0) limits.
std::vector<PencilScanEntry> pencil_limit_scan(
    const std::vector<double>& b_grid, const std::vector<double>& phi0_grid,
    double height = 1.0);

}  // namespace ssb
