#include "ssb/models.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ssb {

void RotorModel::validate() const {
  if (n_particles < 1.0) throw std::invalid_argument("rotor: N must be >= 1");
  if (cutoff < 4) throw std::invalid_argument("rotor: cutoff must be >= 4");
  if (field_b < 0.0) throw std::invalid_argument("rotor: B must be >= 0");
  if (epsilon < 0.0) throw std::invalid_argument("rotor: epsilon must be >= 0");
  if (!std::isfinite(theta0)) throw std::invalid_argument("rotor: bad theta0");
}

void TfimModel::validate() const {
  if (n_spins < 2 || n_spins > 12) {
    throw std::invalid_argument("tfim: n_spins must be in [2, 12]");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("tfim: p must be in [0, 1]");
  }
}

namespace {

// cos(theta - theta0): <m+1|.|m> = exp(-i theta0)/2, <m-1|.|m> = exp(i theta0)/2
LinearOperator rotor_cos_field(int cutoff, double theta0, double prefactor) {
  const int dim = 2 * cutoff + 1;
  Eigen::MatrixXcd diags = Eigen::MatrixXcd::Zero(3, dim);
  const Complex up = 0.5 * prefactor * std::exp(Complex(0.0, theta0));
  const Complex down = 0.5 * prefactor * std::exp(Complex(0.0, -theta0));
  for (int i = 0; i + 1 < dim; ++i) {
    diags(2, i) = up;        // A(i, i+1)
    diags(0, i + 1) = down;  // A(i+1, i)
  }
  return LinearOperator::banded(dim, 1, std::move(diags), true);
}

}  // namespace

ModelBundle build_rotor(const RotorModel& params) {
  params.validate();
  const int m_max = params.cutoff;
  const int dim = params.dim();
  const double n = params.n_particles;

  Eigen::MatrixXcd lz_diag = Eigen::MatrixXcd::Zero(1, dim);
  Eigen::MatrixXcd kinetic = Eigen::MatrixXcd::Zero(1, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = static_cast<double>(i - m_max);
    lz_diag(0, i) = m;
    kinetic(0, i) = m * m / (2.0 * n);
  }
  LinearOperator l_z = LinearOperator::banded(dim, 0, std::move(lz_diag), true);
  LinearOperator h =
      LinearOperator::banded(dim, 0, std::move(kinetic), true);
  LinearOperator field = rotor_cos_field(m_max, params.theta0, n);
  if (params.field_b > 0.0) {
    h = h.add(field.scaled(-params.field_b));
  }

  // raising shift |m> -> |m+1>: <m+1|O|m> = 1
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(3, dim);
  for (int i = 0; i + 1 < dim; ++i) {
    shift(0, i + 1) = Complex(1.0, 0.0);  // A(i+1, i)
  }
  LinearOperator order =
      LinearOperator::banded(dim, 1, std::move(shift), false);

  ModelBundle bundle{ModelKind::rotor, std::move(h),     std::move(l_z),
                     std::move(order), std::move(field), rotor_basis(m_max),
                     params,           std::nullopt};
  return bundle;
}

Eigen::MatrixXcd pauli_on_site(int n_spins, int site, char axis) {
  if (site < 0 || site >= n_spins) {
    throw std::invalid_argument("pauli_on_site: site out of range");
  }
  Eigen::MatrixXcd sigma(2, 2);
  switch (axis) {
    case 'x':
      sigma << 0, 1, 1, 0;
      break;
    case 'y':
      sigma << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case 'z':
      sigma << 1, 0, 0, -1;
      break;
    default:
      throw std::invalid_argument("pauli_on_site: axis must be x, y or z");
  }
  const int dim = 1 << n_spins;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const int below = n_spins - 1 - site;  // site 0 is the slowest index
  for (int idx = 0; idx < dim; ++idx) {
    const int bit = (idx >> below) & 1;
    for (int bit2 = 0; bit2 < 2; ++bit2) {
      const Complex val = sigma(bit2, bit);
      if (val == Complex(0.0, 0.0)) continue;
      const int idx2 = (idx & ~(1 << below)) | (bit2 << below);
      out(idx2, idx) += val;
    }
  }
  return out;
}

ModelBundle build_tfim(const TfimModel& params) {
  params.validate();
  const int n = params.n_spins;
  const int dim = params.dim();

  Eigen::MatrixXcd sum_sz = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd sum_sx = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    sum_sz += pauli_on_site(n, i, 'z');
    sum_sx += pauli_on_site(n, i, 'x');
  }
  Eigen::MatrixXcd bonds = Eigen::MatrixXcd::Zero(dim, dim);
  const int n_bonds = params.open_boundary ? n - 1 : n;
  for (int i = 0; i < n_bonds; ++i) {
    bonds += pauli_on_site(n, i, 'x') * pauli_on_site(n, (i + 1) % n, 'x');
  }

  Eigen::MatrixXcd ham = -(1.0 - params.p) * sum_sz - params.p * bonds;

  Eigen::MatrixXcd parity = Eigen::MatrixXcd::Identity(dim, dim);
  for (int i = 0; i < n; ++i) parity = parity * pauli_on_site(n, i, 'z');

  ModelBundle bundle{
      ModelKind::tfim,
      LinearOperator::dense(std::move(ham), true),
      LinearOperator::dense(std::move(parity), true),
      LinearOperator::dense(sum_sx / static_cast<double>(n), true),
      LinearOperator::dense(std::move(sum_sx), true),
      spin_basis(n),
      std::nullopt,
      params};
  return bundle;
}

namespace {

// Ground state of the chain projected onto the even-parity sector, with the
// largest-magnitude amplitude rotated to be real positive.
StateVector tfim_symmetric_state(const ModelBundle& model) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      model.hamiltonian.to_dense());
  const Eigen::MatrixXcd parity = model.symmetry_generator.to_dense();
  const int dim = model.hamiltonian.dim();

  for (int k = 0; k < dim; ++k) {
    Eigen::VectorXcd v = solver.eigenvectors().col(k);
    Eigen::VectorXcd even = 0.5 * (v + parity * v);
    const double norm = even.norm();
    if (norm < 1e-8) continue;
    even /= norm;
    int imax = 0;
    even.cwiseAbs().maxCoeff(&imax);
    const Complex a = even(imax);
    even *= std::conj(a) / std::abs(a);
    return StateVector(model.basis, std::move(even));
  }
  throw std::runtime_error("symmetric_state: no even-parity ground state");
}

}  // namespace

StateVector symmetric_state(const ModelBundle& model) {
  if (model.kind == ModelKind::rotor) {
    return basis_state(model.basis, model.rotor->cutoff);  // |m=0>
  }
  return tfim_symmetric_state(model);
}

double wavepacket_sigma_m_squared(double n_particles, double field_b) {
  return 0.5 * n_particles * std::sqrt(field_b);
}

StateVector wavepacket_state(const RotorModel& params, double theta_c) {
  params.validate();
  const double sigma2 =
      wavepacket_sigma_m_squared(params.n_particles, params.field_b);
  if (sigma2 < 1.0) {
    throw std::invalid_argument(
        "wavepacket_state: sigma_m^2 = " + std::to_string(sigma2) +
        " < 1; packet narrower than one basis site (N sqrt(B) too small)");
  }
  const int m_max = params.cutoff;
  Eigen::VectorXcd amps(params.dim());
  for (int i = 0; i < params.dim(); ++i) {
    const double m = static_cast<double>(i - m_max);
    amps(i) = std::exp(Complex(-m * m / (4.0 * sigma2), -m * theta_c));
  }
  amps /= amps.norm();
  return StateVector(rotor_basis(m_max), std::move(amps));
}

}  // namespace ssb
