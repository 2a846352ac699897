#include "ssb/pencil.hpp"

#include <cmath>
#include <stdexcept>

namespace ssb {

void PencilParams::validate() const {
  if (base_radius < 0.0) {
    throw std::invalid_argument("pencil: base radius must be >= 0");
  }
  if (!(height > 0.0)) {
    throw std::invalid_argument("pencil: center-of-mass height must be > 0");
  }
  if (phi0 < 0.0 || phi0 >= M_PI / 2.0) {
    throw std::invalid_argument("pencil: phi0 must be in [0, pi/2)");
  }
  if (damping < 0.0) {
    throw std::invalid_argument("pencil: damping must be >= 0");
  }
  if (!(r_max > 0.0)) {
    throw std::invalid_argument("pencil: r_max must be > 0");
  }
  if (phi0 == critical_angle(base_radius, height)) {
    throw std::invalid_argument(
        "pencil: phi0 sits exactly on the unstable equilibrium");
  }
}

double critical_angle(double base_radius, double height) {
  if (base_radius < 0.0 || height < 0.0) {
    throw std::invalid_argument("critical_angle: inputs must be >= 0");
  }
  if (base_radius == 0.0) return 0.0;
  return std::atan2(base_radius, height);
}

namespace {

struct TiltState {
  double phi;
  double omega;
};

// phi'' = +-(1/h) sin(phi) - damping * phi': pivoting on the base edge above
// the critical angle, restoring toward upright below it.
TiltState rhs(const TiltState& s, double phi_crit, double inv_h,
              double damping) {
  const double accel = std::abs(s.phi) > phi_crit
                           ? inv_h * std::sin(s.phi)
                           : -inv_h * std::sin(s.phi);
  return {s.omega, accel - damping * s.omega};
}

}  // namespace

PencilTrajectory simulate_fall(const PencilParams& params) {
  params.validate();
  const double phi_crit = critical_angle(params.base_radius, params.height);
  const double inv_h = 1.0 / params.height;
  const double damping = params.damping;

  constexpr double kStep = 0.005;
  constexpr double kSettleTol = 1e-4;
  constexpr double kTMax = 5000.0;
  constexpr int kRecordEvery = 20;

  PencilTrajectory traj;
  traj.final_azimuth = params.azimuth;

  // Once the energy drops below the edge-pivot barrier the pencil can never
  // topple; it then only remains to ride out the damped rocking.
  const double barrier = inv_h * (1.0 - std::cos(phi_crit));
  const auto captured = [&](const TiltState& s) {
    return std::abs(s.phi) <= phi_crit &&
           0.5 * s.omega * s.omega + inv_h * (1.0 - std::cos(s.phi)) < barrier;
  };

  TiltState s{params.phi0, 0.0};
  double t = 0.0;
  long step = 0;
  traj.samples.push_back({t, s.phi, std::sin(std::abs(s.phi))});

  if (captured(s) && std::abs(s.phi) < kSettleTol) {
    traj.final_ratio = 0.0;
    return traj;
  }

  while (t < kTMax) {
    const TiltState k1 = rhs(s, phi_crit, inv_h, damping);
    const TiltState k2 = rhs({s.phi + 0.5 * kStep * k1.phi,
                              s.omega + 0.5 * kStep * k1.omega},
                             phi_crit, inv_h, damping);
    const TiltState k3 = rhs({s.phi + 0.5 * kStep * k2.phi,
                              s.omega + 0.5 * kStep * k2.omega},
                             phi_crit, inv_h, damping);
    const TiltState k4 = rhs(
        {s.phi + kStep * k3.phi, s.omega + kStep * k3.omega}, phi_crit, inv_h,
        damping);
    s.phi += kStep / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
    s.omega +=
        kStep / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
    t += kStep;
    ++step;

    if (step % kRecordEvery == 0) {
      traj.samples.push_back(
          {t, s.phi, std::min(1.0, std::sin(std::abs(s.phi)))});
    }

    if (std::abs(s.phi) >= M_PI / 2.0) {
      traj.samples.push_back({t, M_PI / 2.0, 1.0});
      traj.final_ratio = 1.0;
      return traj;
    }
    if (captured(s) && std::abs(s.phi) < kSettleTol &&
        std::abs(s.omega) < kSettleTol) {
      traj.samples.push_back({t, s.phi, std::sin(std::abs(s.phi))});
      traj.final_ratio = 0.0;
      return traj;
    }
  }
  throw std::runtime_error("simulate_fall: no settling within the time budget");
}

std::vector<PencilScanEntry> pencil_limit_scan(
    const std::vector<double>& b_grid, const std::vector<double>& phi0_grid,
    double height) {
  auto descending_positive = [](const std::vector<double>& grid) {
    if (grid.empty()) return false;
    for (size_t i = 0; i < grid.size(); ++i) {
      if (!(grid[i] > 0.0)) return false;
      if (i > 0 && grid[i] >= grid[i - 1]) return false;
    }
    return true;
  };
  if (!descending_positive(b_grid) || !descending_positive(phi0_grid)) {
    throw std::invalid_argument(
        "pencil_limit_scan: grids must be strictly positive and descending");
  }

  const int total = static_cast<int>(b_grid.size() * phi0_grid.size());
  std::vector<PencilScanEntry> table(total);
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const size_t i = idx / phi0_grid.size();
    const size_t j = idx % phi0_grid.size();
    PencilParams params;
    params.base_radius = b_grid[i];
    params.height = height;
    params.phi0 = phi0_grid[j];
    const PencilTrajectory traj = simulate_fall(params);
    table[idx] = {b_grid[i], phi0_grid[j], traj.final_ratio};
  }
  return table;
}

}  // namespace ssb
