#include "ssb/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssb {

double order_parameter_eq(const ModelBundle& model) {
  if (model.kind != ModelKind::rotor) {
    throw std::invalid_argument("order_parameter_eq: rotor bundle required");
  }
  const EigenPair gs = ground_state(model.hamiltonian);
  StateVector state(model.basis, gs.vector.amplitudes);
  return std::abs(expectation_normalized(state, model.order_parameter));
}

TowerSpectrum tower_spectrum(const RotorModel& params, int k) {
  params.validate();
  if (params.field_b != 0.0) {
    throw std::invalid_argument("tower_spectrum: requires B = 0");
  }
  if (k < 1 || k > params.cutoff + 1) {
    throw std::invalid_argument("tower_spectrum: k exceeds spectrum size");
  }
  TowerSpectrum tower;
  tower.n_particles = params.n_particles;
  tower.levels.reserve(k);
  for (int m = 0; m < k; ++m) {
    const double energy =
        static_cast<double>(m) * m / (2.0 * params.n_particles);
    tower.levels.push_back({m, energy, m == 0 ? 1 : 2});
  }
  return tower;
}

namespace {

struct PointSolution {
  double energy = 0.0;
  double op_modulus = 0.0;
};

PointSolution solve_at_cutoff(const RotorModel& params, int cutoff) {
  RotorModel p = params;
  p.cutoff = cutoff;
  const ModelBundle bundle = build_rotor(p);
  const EigenPair gs = ground_state(bundle.hamiltonian);
  StateVector state(bundle.basis, gs.vector.amplitudes);
  return {gs.value,
          std::abs(expectation_normalized(state, bundle.order_parameter))};
}

}  // namespace

int cutoff_converge(const RotorModel& params, const CutoffOptions& opts) {
  params.validate();
  const double sigma_m =
      std::sqrt(wavepacket_sigma_m_squared(params.n_particles, params.field_b));
  int m = std::max(4, static_cast<int>(std::ceil(6.0 * sigma_m)));

  PointSolution at_m = solve_at_cutoff(params, m);
  while (true) {
    if (2 * m > opts.hard_limit) {
      throw std::runtime_error("cutoff_converge: exceeded hard cutoff limit");
    }
    const PointSolution at_2m = solve_at_cutoff(params, 2 * m);
    // energy scale floored at the tower gap so a near-zero ground energy
    // does not turn the relative test into an absolute one at machine zero
    const double scale =
        std::max(std::abs(at_2m.energy), 0.5 / params.n_particles);
    const bool energy_ok =
        std::abs(at_m.energy - at_2m.energy) < opts.energy_rel_tol * scale;
    const bool op_ok =
        std::abs(at_m.op_modulus - at_2m.op_modulus) < opts.op_abs_tol;
    if (energy_ok && op_ok) return m;
    m *= 2;
    at_m = at_2m;
  }
}

LimitScanResult limit_scan(const std::vector<double>& n_grid,
                           const std::vector<double>& b_grid, double theta0) {
  if (n_grid.empty() || b_grid.empty()) {
    throw std::invalid_argument("limit_scan: empty grid");
  }
  auto sorted_positive = [](const std::vector<double>& grid, bool strictly) {
    for (size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] < 0.0 || (strictly && grid[i] <= 0.0)) return false;
      if (i > 0 && grid[i] <= grid[i - 1]) return false;
    }
    return true;
  };
  if (!sorted_positive(n_grid, true) || !sorted_positive(b_grid, false)) {
    throw std::invalid_argument("limit_scan: grids must be sorted ascending");
  }

  const int total = static_cast<int>(n_grid.size() * b_grid.size());
  LimitScanResult result;
  result.points.resize(total);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const size_t i = idx / b_grid.size();
    const size_t j = idx % b_grid.size();
    RotorModel params;
    params.n_particles = n_grid[i];
    params.field_b = b_grid[j];
    params.theta0 = theta0;
    params.cutoff = 4;

    LimitScanPoint point;
    point.n_particles = params.n_particles;
    point.field_b = params.field_b;
    try {
      point.cutoff = cutoff_converge(params);
      point.converged = true;
    } catch (const std::exception&) {
      point.cutoff = 4;  // best effort; flagged unconverged
      point.converged = false;
    }
    params.cutoff = point.cutoff;
    const ModelBundle bundle = build_rotor(params);
    const EigenPair gs = ground_state(bundle.hamiltonian);
    StateVector state(bundle.basis, gs.vector.amplitudes);
    point.op_modulus =
        std::abs(expectation_normalized(state, bundle.order_parameter));
    result.points[idx] = point;
  }
  return result;
}

}  // namespace ssb
