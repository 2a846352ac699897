#include "ssb/bath.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ssb/models.hpp"

namespace ssb {

namespace {

constexpr int kHardDimLimit = 1 << 14;

Eigen::VectorXcd aligned_x_product(int n_spins, int sign) {
  const int dim = 1 << n_spins;
  Eigen::VectorXcd v(dim);
  const double amp = std::pow(2.0, -0.5 * n_spins);
  for (int idx = 0; idx < dim; ++idx) {
    const int downs = __builtin_popcount(static_cast<unsigned>(idx));
    const double s = (sign < 0 && (downs & 1)) ? -1.0 : 1.0;
    v(idx) = Complex(s * amp, 0.0);
  }
  return v;
}

}  // namespace

CompositeSystem build_composite(const CompositeSpec& spec) {
  if (spec.n_sys_spins < 1 || spec.n_sys_spins > 3) {
    throw std::invalid_argument("build_composite: n_sys_spins must be 1..3");
  }
  if (spec.n_bath_qubits < 1) {
    throw std::invalid_argument("build_composite: need at least one bath qubit");
  }
  const int d_sys = 1 << spec.n_sys_spins;
  const int d_bath = 1 << spec.n_bath_qubits;
  const long total = static_cast<long>(d_sys) * d_bath;
  if (total > kHardDimLimit) {
    throw std::invalid_argument("build_composite: total dimension exceeds 2^14");
  }
  if (total > spec.dim_budget) {
    throw std::invalid_argument("build_composite: dimension budget exceeded");
  }
  std::vector<double> omega = spec.bath_frequencies;
  if (omega.empty()) omega.assign(spec.n_bath_qubits, 0.0);
  if (static_cast<int>(omega.size()) != spec.n_bath_qubits) {
    throw std::invalid_argument(
        "build_composite: bath_frequencies length mismatch");
  }

  const int ns = spec.n_sys_spins;
  const int nb = spec.n_bath_qubits;

  Eigen::MatrixXcd h_sys = Eigen::MatrixXcd::Zero(d_sys, d_sys);
  for (int i = 0; i + 1 < ns; ++i) {
    h_sys -= pauli_on_site(ns, i, 'x') * pauli_on_site(ns, i + 1, 'x');
  }
  Eigen::MatrixXcd m_x = Eigen::MatrixXcd::Zero(d_sys, d_sys);
  for (int i = 0; i < ns; ++i) m_x += pauli_on_site(ns, i, 'x');
  m_x /= static_cast<double>(ns);

  Eigen::MatrixXcd h_bath = Eigen::MatrixXcd::Zero(d_bath, d_bath);
  Eigen::MatrixXcd sum_bz = Eigen::MatrixXcd::Zero(d_bath, d_bath);
  for (int k = 0; k < nb; ++k) {
    const Eigen::MatrixXcd sz = pauli_on_site(nb, k, 'z');
    h_bath += 0.5 * omega[k] * sz;
    sum_bz += sz;
  }

  const Eigen::MatrixXcd id_sys = Eigen::MatrixXcd::Identity(d_sys, d_sys);
  const Eigen::MatrixXcd id_bath = Eigen::MatrixXcd::Identity(d_bath, d_bath);

  const LinearOperator h_total = LinearOperator::dense(
      tensor_product(LinearOperator::dense(h_sys, true),
                     LinearOperator::dense(id_bath, true))
              .to_dense() +
          tensor_product(LinearOperator::dense(id_sys, true),
                         LinearOperator::dense(h_bath, true))
              .to_dense() +
          spec.coupling_g *
              tensor_product(LinearOperator::dense(m_x, true),
                             LinearOperator::dense(sum_bz, true))
                  .to_dense(),
      true);

  Eigen::MatrixXcd parity = Eigen::MatrixXcd::Identity(d_sys, d_sys);
  for (int i = 0; i < ns; ++i) parity = parity * pauli_on_site(ns, i, 'z');
  Eigen::MatrixXcd flip = Eigen::MatrixXcd::Identity(d_bath, d_bath);
  for (int k = 0; k < nb; ++k) flip = flip * pauli_on_site(nb, k, 'x');

  const LinearOperator sigma =
      tensor_product(LinearOperator::dense(std::move(parity), true),
                     LinearOperator::dense(std::move(flip), true));

  const Eigen::MatrixXcd commutator = h_total.to_dense() * sigma.to_dense() -
                                      sigma.to_dense() * h_total.to_dense();
  const double comm_norm = commutator.cwiseAbs().maxCoeff();
  if (comm_norm >= 1e-12 * std::max(1.0, h_total.norm_bound())) {
    throw std::invalid_argument(
        "build_composite: no combined symmetry commutes with this coupling "
        "(commutator norm " +
        std::to_string(comm_norm) + "); bath splittings must vanish");
  }

  const LinearOperator pointer = tensor_product(
      LinearOperator::dense(m_x, true), LinearOperator::dense(id_bath, true));

  // (branch+ + branch-)/sqrt(2), bath qubits all along +x
  Eigen::VectorXcd branch_plus = aligned_x_product(ns, +1);
  Eigen::VectorXcd branch_minus = aligned_x_product(ns, -1);
  Eigen::VectorXcd sys0 = (branch_plus + branch_minus) / std::sqrt(2.0);
  Eigen::VectorXcd bath0 = aligned_x_product(nb, +1);
  Eigen::VectorXcd full0(total);
  for (int i = 0; i < d_sys; ++i) {
    full0.segment(i * d_bath, d_bath) = sys0(i) * bath0;
  }

  BasisPtr basis = [&] {
    auto labels = std::make_shared<BasisLabels>();
    labels->reserve(total);
    const BasisPtr sys_labels = spin_basis(ns);
    const BasisPtr bath_labels = spin_basis(nb);
    for (const auto& ls : *sys_labels) {
      for (const auto& lb : *bath_labels) {
        labels->push_back(ls + "*" + lb);
      }
    }
    return labels;
  }();

  CompositeSystem system{spec,
                         d_sys,
                         d_bath,
                         h_total,
                         sigma,
                         pointer,
                         basis,
                         StateVector(basis, std::move(full0)),
                         std::move(branch_plus),
                         std::move(branch_minus)};
  return system;
}

namespace {

struct Propagator {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd energies;
  Eigen::VectorXcd modes;  // eigenbasis coefficients of the initial state

  Eigen::VectorXcd at(double t) const {
    Eigen::VectorXcd phased(modes.size());
    for (int i = 0; i < modes.size(); ++i) {
      phased(i) = std::exp(Complex(0.0, -energies(i) * t)) * modes(i);
    }
    return vectors * phased;
  }
};

Propagator make_propagator(const CompositeSystem& system) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      system.h_total.to_dense());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("decohere_run: eigensolver failed");
  }
  Propagator prop;
  prop.vectors = solver.eigenvectors();
  prop.energies = solver.eigenvalues();
  prop.modes = prop.vectors.adjoint() * system.initial_state.amplitudes;
  return prop;
}

Eigen::MatrixXcd reduced_system_matrix(const Eigen::VectorXcd& psi, int d_sys,
                                       int d_bath) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d_sys, d_sys);
  for (int i = 0; i < d_sys; ++i) {
    for (int j = 0; j < d_sys; ++j) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < d_bath; ++k) {
        acc += psi(i * d_bath + k) * std::conj(psi(j * d_bath + k));
      }
      rho(i, j) = acc;
    }
  }
  return rho;
}

}  // namespace

DecohereResult decohere_run(const CompositeSystem& system, double t_final,
                            int n_samples) {
  if (!(t_final > 0.0) || n_samples < 1) {
    throw std::invalid_argument("decohere_run: bad sampling request");
  }
  const long total = static_cast<long>(system.d_sys) * system.d_bath;
  if (total > system.spec.dim_budget) {
    throw std::invalid_argument("decohere_run: dimension budget exceeded");
  }
  const Propagator prop = make_propagator(system);

  DecohereResult result;
  result.samples.reserve(n_samples + 1);
  result.reduced.reserve(n_samples + 1);

  const Eigen::VectorXcd& bp = system.branch_plus;
  const Eigen::VectorXcd& bm = system.branch_minus;

  for (int s = 0; s <= n_samples; ++s) {
    const double t = t_final * static_cast<double>(s) / n_samples;
    const Eigen::VectorXcd psi = prop.at(t);
    const Eigen::MatrixXcd rho_sys =
        reduced_system_matrix(psi, system.d_sys, system.d_bath);

    DecohereSample sample;
    sample.t = t;
    const double norm2 = psi.squaredNorm();
    sample.full_purity = norm2 * norm2;
    sample.purity_reduced = (rho_sys * rho_sys).trace().real();
    // dephasing factor: branch coherence relative to its t = 0 value of 1/2
    sample.coherence_abs = 2.0 * std::abs((bp.adjoint() * rho_sys * bm)(0));
    sample.population_plus = (bp.adjoint() * rho_sys * bp)(0).real();
    sample.population_minus = (bm.adjoint() * rho_sys * bm)(0).real();
    StateVector full(system.basis, psi);
    sample.symmetry_expectation =
        expectation_normalized(full, system.pointer).real();

    result.samples.push_back(sample);
    result.reduced.emplace_back(rho_sys / norm2);
  }
  return result;
}

CatLionReport cat_lion_demo(const CompositeSpec& spec) {
  if (spec.n_bath_qubits != 1) {
    throw std::invalid_argument("cat_lion_demo: exactly one bath qubit");
  }
  if (!(spec.coupling_g > 0.0)) {
    throw std::invalid_argument("cat_lion_demo: coupling must be positive");
  }
  const CompositeSystem system = build_composite(spec);
  const double t_star = M_PI / (4.0 * spec.coupling_g);
  const Propagator prop = make_propagator(system);

  CatLionReport report;
  report.time = t_star;

  const Eigen::VectorXcd psi0 = prop.at(0.0);
  const Eigen::VectorXcd psi = prop.at(t_star);

  StateVector before(system.basis, psi0);
  StateVector after(system.basis, psi);
  report.symmetry_before =
      expectation_normalized(before, system.pointer).real();
  report.symmetry_after = expectation_normalized(after, system.pointer).real();

  const double norm2 = psi.squaredNorm();
  report.full_purity = norm2 * norm2;

  const DensityMatrix full = DensityMatrix::from_pure(after);
  const DensityMatrix rho_sys =
      partial_trace(full, system.d_sys, system.d_bath, Keep::system);
  const DensityMatrix rho_bath =
      partial_trace(full, system.d_sys, system.d_bath, Keep::bath);
  report.reduced_purity_system = rho_sys.purity();
  report.reduced_purity_bath = rho_bath.purity();
  report.entanglement_entropy = rho_sys.entropy();
  return report;
}

}  // namespace ssb
