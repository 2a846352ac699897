#include "ssb/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ssb/kernels.hpp"

namespace ssb {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPositivityTol = 1e-10;
constexpr double kNormFloor = 1e-300;

void check_dims(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
  }
}

}  // namespace

BasisPtr rotor_basis(int cutoff) {
  auto labels = std::make_shared<BasisLabels>();
  labels->reserve(2 * cutoff + 1);
  for (int m = -cutoff; m <= cutoff; ++m) {
    labels->push_back("m=" + std::to_string(m));
  }
  return labels;
}

BasisPtr spin_basis(int n_spins) {
  const int dim = 1 << n_spins;
  auto labels = std::make_shared<BasisLabels>();
  labels->reserve(dim);
  for (int idx = 0; idx < dim; ++idx) {
    std::string s(n_spins, 'u');
    for (int site = 0; site < n_spins; ++site) {
      // site 0 is the slowest-varying index
      if ((idx >> (n_spins - 1 - site)) & 1) s[site] = 'd';
    }
    labels->push_back(std::move(s));
  }
  return labels;
}

BasisPtr numbered_basis(int dim) {
  auto labels = std::make_shared<BasisLabels>();
  labels->reserve(dim);
  for (int i = 0; i < dim; ++i) {
    labels->push_back(std::to_string(i));
  }
  return labels;
}

StateVector::StateVector(BasisPtr labels, Eigen::VectorXcd amps)
    : basis_labels(std::move(labels)), amplitudes(std::move(amps)) {
  if (!basis_labels || basis_labels->empty()) {
    throw std::invalid_argument("StateVector: empty basis");
  }
  if (static_cast<int>(basis_labels->size()) != amplitudes.size()) {
    throw std::invalid_argument("StateVector: label/amplitude length mismatch");
  }
}

StateVector StateVector::normalized() const {
  const double n2 = norm_squared();
  if (!(n2 > kNormFloor)) {
    throw std::runtime_error("StateVector: vanished norm");
  }
  return StateVector(basis_labels, amplitudes / std::sqrt(n2));
}

StateVector basis_state(BasisPtr labels, int index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(labels->size());
  v(index) = Complex(1.0, 0.0);
  return StateVector(std::move(labels), std::move(v));
}

LinearOperator LinearOperator::dense(Eigen::MatrixXcd m, bool hermitian) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("LinearOperator: matrix must be square");
  }
  if (hermitian) {
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev >= kHermitianTol) {
      throw std::invalid_argument(
          "LinearOperator: hermitian flag set but max|A - A^+| = " +
          std::to_string(dev));
    }
  }
  LinearOperator op;
  op.dim_ = static_cast<int>(m.rows());
  op.storage_ = Storage::dense;
  op.bandwidth_ = op.dim_ - 1;
  op.hermitian_ = hermitian;
  op.data_ = std::move(m);
  return op;
}

LinearOperator LinearOperator::banded(int dim, int bandwidth,
                                      Eigen::MatrixXcd diags, bool hermitian) {
  if (dim < 1 || bandwidth < 0 || bandwidth >= dim) {
    throw std::invalid_argument("LinearOperator: bad banded shape");
  }
  if (diags.rows() != 2 * bandwidth + 1 || diags.cols() != dim) {
    throw std::invalid_argument("LinearOperator: diags must be (2b+1) x dim");
  }
  if (hermitian) {
    double dev = 0.0;
    for (int d = -bandwidth; d <= bandwidth; ++d) {
      for (int i = std::max(0, -d); i < dim - std::max(0, d); ++i) {
        const Complex upper = diags(bandwidth + d, i);
        const Complex lower = diags(bandwidth - d, i + d);
        dev = std::max(dev, std::abs(upper - std::conj(lower)));
      }
    }
    if (dev >= kHermitianTol) {
      throw std::invalid_argument(
          "LinearOperator: hermitian flag set but max|A - A^+| = " +
          std::to_string(dev));
    }
  }
  LinearOperator op;
  op.dim_ = dim;
  op.storage_ = Storage::banded;
  op.bandwidth_ = bandwidth;
  op.hermitian_ = hermitian;
  op.data_ = std::move(diags);
  return op;
}

Eigen::MatrixXcd LinearOperator::to_dense() const {
  if (storage_ == Storage::dense) return data_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    const int lo = std::max(-bandwidth_, -i);
    const int hi = std::min(bandwidth_, dim_ - 1 - i);
    for (int d = lo; d <= hi; ++d) {
      m(i, i + d) = data_(bandwidth_ + d, i);
    }
  }
  return m;
}

Complex LinearOperator::coeff(int i, int j) const {
  if (storage_ == Storage::dense) return data_(i, j);
  const int d = j - i;
  if (d < -bandwidth_ || d > bandwidth_) return Complex(0.0, 0.0);
  return data_(bandwidth_ + d, i);
}

void LinearOperator::apply(const Complex* x, Complex* y) const {
  if (storage_ == Storage::banded) {
    kernels::banded_apply_parallel(data_, bandwidth_, x, y, dim_);
  } else {
    kernels::dense_apply_parallel(data_, x, y);
  }
}

Eigen::VectorXcd LinearOperator::apply(const Eigen::VectorXcd& x) const {
  check_dims(dim_, static_cast<int>(x.size()), "apply");
  Eigen::VectorXcd y(dim_);
  apply(x.data(), y.data());
  return y;
}

LinearOperator LinearOperator::adjoint() const {
  if (storage_ == Storage::dense) {
    return dense(data_.adjoint(), hermitian_);
  }
  Eigen::MatrixXcd diags =
      Eigen::MatrixXcd::Zero(2 * bandwidth_ + 1, dim_);
  for (int d = -bandwidth_; d <= bandwidth_; ++d) {
    for (int i = std::max(0, -d); i < dim_ - std::max(0, d); ++i) {
      // A^+(i, i+d) = conj(A(i+d, i))
      diags(bandwidth_ + d, i) = std::conj(data_(bandwidth_ - d, i + d));
    }
  }
  return banded(dim_, bandwidth_, std::move(diags), hermitian_);
}

LinearOperator LinearOperator::scaled(Complex factor) const {
  const bool herm = hermitian_ && factor.imag() == 0.0;
  if (storage_ == Storage::dense) {
    return dense(factor * data_, herm);
  }
  return banded(dim_, bandwidth_, factor * data_, herm);
}

LinearOperator LinearOperator::add(const LinearOperator& other) const {
  check_dims(dim_, other.dim_, "add");
  if (storage_ == Storage::banded && other.storage_ == Storage::banded) {
    const int b = std::max(bandwidth_, other.bandwidth_);
    Eigen::MatrixXcd diags = Eigen::MatrixXcd::Zero(2 * b + 1, dim_);
    diags.middleRows(b - bandwidth_, 2 * bandwidth_ + 1) = data_;
    diags.middleRows(b - other.bandwidth_, 2 * other.bandwidth_ + 1) +=
        other.data_;
    return banded(dim_, b, std::move(diags), hermitian_ && other.hermitian_);
  }
  return dense(to_dense() + other.to_dense(), hermitian_ && other.hermitian_);
}

double LinearOperator::norm_bound() const {
  double bound = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double row = 0.0;
    if (storage_ == Storage::banded) {
      const int lo = std::max(-bandwidth_, -i);
      const int hi = std::min(bandwidth_, dim_ - 1 - i);
      for (int d = lo; d <= hi; ++d) row += std::abs(data_(bandwidth_ + d, i));
    } else {
      row = data_.row(i).cwiseAbs().sum();
    }
    bound = std::max(bound, row);
  }
  return bound;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
    throw std::invalid_argument("DensityMatrix: must be square");
  }
  const double herm_dev = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev >= kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian, dev = " +
                                std::to_string(herm_dev));
  }
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) >= kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace = " +
                                std::to_string(tr));
  }
  if (min_eigenvalue() < -kPositivityTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(min_eigenvalue()));
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const double n2 = psi.norm_squared();
  if (!(n2 > kNormFloor)) {
    throw std::runtime_error("DensityMatrix: vanished norm");
  }
  return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint() / n2);
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::entropy() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      rho_, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    const double p = solver.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

Complex expectation_normalized(const StateVector& state,
                               const LinearOperator& op) {
  check_dims(op.dim(), state.dim(), "expectation_normalized");
  const double n2 = state.norm_squared();
  if (!(n2 > kNormFloor)) {
    throw std::runtime_error(
        "expectation_normalized: vanished norm (renormalization failure)");
  }
  const Eigen::VectorXcd applied = op.apply(state.amplitudes);
  Complex val = state.amplitudes.dot(applied) / n2;
  if (op.is_hermitian() && std::abs(val.imag()) < 1e-10) {
    val = Complex(val.real(), 0.0);
  }
  return val;
}

namespace {

BasisPtr product_labels(const BasisPtr& a, const BasisPtr& b) {
  auto labels = std::make_shared<BasisLabels>();
  labels->reserve(a->size() * b->size());
  for (const auto& la : *a) {
    for (const auto& lb : *b) {
      labels->push_back(la + "*" + lb);
    }
  }
  return labels;
}

void check_tensor_limit(long long dim, int max_dim) {
  if (dim > max_dim) {
    throw std::invalid_argument("tensor_product: dimension " +
                                std::to_string(dim) + " exceeds limit " +
                                std::to_string(max_dim));
  }
}

}  // namespace

LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b,
                              int max_dim) {
  const long long dim =
      static_cast<long long>(a.dim()) * static_cast<long long>(b.dim());
  check_tensor_limit(dim, max_dim);
  const Eigen::MatrixXcd da = a.to_dense();
  const Eigen::MatrixXcd db = b.to_dense();
  Eigen::MatrixXcd out(dim, dim);
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      out.block(i * b.dim(), j * b.dim(), b.dim(), b.dim()) = da(i, j) * db;
    }
  }
  return LinearOperator::dense(std::move(out),
                               a.is_hermitian() && b.is_hermitian());
}

StateVector tensor_product(const StateVector& a, const StateVector& b,
                           int max_dim) {
  const long long dim =
      static_cast<long long>(a.dim()) * static_cast<long long>(b.dim());
  check_tensor_limit(dim, max_dim);
  Eigen::VectorXcd out(dim);
  for (int i = 0; i < a.dim(); ++i) {
    out.segment(i * b.dim(), b.dim()) = a.amplitudes(i) * b.amplitudes;
  }
  return StateVector(product_labels(a.basis_labels, b.basis_labels),
                     std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, int d_sys, int d_bath,
                            Keep keep) {
  if (d_sys < 1 || d_bath < 1 || d_sys * d_bath != rho.dim()) {
    throw std::invalid_argument(
        "partial_trace: dimension does not factor as d_sys * d_bath");
  }
  const Eigen::MatrixXcd& full = rho.matrix();
  const int d_keep = keep == Keep::system ? d_sys : d_bath;
  const int d_sum = keep == Keep::system ? d_bath : d_sys;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d_keep, d_keep);
  for (int i = 0; i < d_keep; ++i) {
    for (int j = 0; j < d_keep; ++j) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < d_sum; ++k) {
        if (keep == Keep::system) {
          acc += full(i * d_bath + k, j * d_bath + k);
        } else {
          acc += full(k * d_bath + i, k * d_bath + j);
        }
      }
      out(i, j) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

namespace {

EigenPair dense_ground_state(const LinearOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.to_dense());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("ground_state: dense eigensolver failed");
  }
  EigenPair pair;
  pair.value = solver.eigenvalues()(0);
  pair.vector =
      StateVector(numbered_basis(op.dim()), solver.eigenvectors().col(0));
  return pair;
}

// Thick-restart Lanczos: Krylov extension with full reorthogonalization
// inside a small window, restarted from the lowest Ritz vectors. Only
// op.apply is required. Keeps memory at window_size vectors while matching
// the convergence of a long unrestarted run.
EigenPair lanczos_ground_state(const LinearOperator& op,
                               const GroundStateOptions& opts) {
  const int n = op.dim();
  const int window = std::min(64, n);
  const int keep = std::min(16, window / 4);
  const double scale = std::max(op.norm_bound(), 1.0);

  std::mt19937_64 gen(0x5b5ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(dist(gen), dist(gen));
  v /= v.norm();

  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(window + 1);
  basis.push_back(v);
  Eigen::MatrixXcd projected = Eigen::MatrixXcd::Zero(window + 1, window + 1);

  Eigen::VectorXcd z(n);
  long matvecs = 0;
  int processed = 0;  // columns of the projection with A applied
  double beta_last = 1.0;
  bool exhausted = false;

  while (true) {
    // extend the window; column j of the projection is W^+ (A w_j). The last
    // basis vector is always the unprocessed residual direction.
    while (!exhausted && static_cast<int>(basis.size()) <= window &&
           processed < static_cast<int>(basis.size()) &&
           matvecs < opts.max_lanczos_iterations) {
      const int j = processed;
      op.apply(basis[j].data(), z.data());
      ++matvecs;
      for (int pass = 0; pass < 2; ++pass) {
        for (size_t i = 0; i < basis.size(); ++i) {
          const Complex c = basis[i].dot(z);
          z -= c * basis[i];
          projected(i, j) += c;
          projected(j, i) = std::conj(projected(i, j));
        }
      }
      ++processed;
      beta_last = z.norm();
      if (beta_last < 1e-13 * scale ||
          static_cast<int>(basis.size()) >= n) {
        exhausted = true;
        break;
      }
      if (static_cast<int>(basis.size()) <= window) {
        projected(basis.size(), j) = beta_last;
        projected(j, basis.size()) = beta_last;
        basis.push_back(z / beta_last);
      }
    }

    const int m = processed;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(
        projected.topLeftCorner(m, m));
    const Eigen::VectorXd values = small.eigenvalues();
    const Eigen::MatrixXcd vectors = small.eigenvectors();

    const double residual_estimate = beta_last * std::abs(vectors(m - 1, 0));
    const bool budget_spent = matvecs >= opts.max_lanczos_iterations;
    if (residual_estimate < opts.tolerance * scale || exhausted ||
        budget_spent) {
      Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < m; ++i) ground += vectors(i, 0) * basis[i];
      ground /= ground.norm();
      op.apply(ground.data(), z.data());
      const double residual = (z - values(0) * ground).norm();
      if (residual >= 1e-8 * scale) {
        throw std::runtime_error(
            "ground_state: Lanczos did not converge after " +
            std::to_string(matvecs) + " products, residual = " +
            std::to_string(residual) + " (scale " + std::to_string(scale) +
            ")");
      }
      EigenPair pair;
      pair.value = values(0);
      pair.vector = StateVector(numbered_basis(n), std::move(ground));
      return pair;
    }

    // thick restart: keep the lowest Ritz vectors plus the residual
    // direction. The couplings between the kept vectors and A * residual are
    // rebuilt exactly when the residual column is processed next.
    std::vector<Eigen::VectorXcd> kept;
    kept.reserve(keep + 1);
    for (int r = 0; r < keep; ++r) {
      Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
      for (int i = 0; i < m; ++i) u += vectors(i, r) * basis[i];
      u /= u.norm();
      kept.push_back(std::move(u));
    }
    kept.push_back(basis.back());
    basis = std::move(kept);
    projected.setZero();
    for (int r = 0; r < keep; ++r) projected(r, r) = values(r);
    processed = keep;
  }
}

}  // namespace

EigenPair ground_state(const LinearOperator& op,
                       const GroundStateOptions& opts) {
  if (!op.is_hermitian()) {
    throw std::invalid_argument("ground_state: operator must be Hermitian");
  }
  if (op.dim() < opts.dense_threshold) {
    return dense_ground_state(op);
  }
  return lanczos_ground_state(op, opts);
}

StateVector matrix_free_apply(const LinearOperator& op,
                              const StateVector& state) {
  check_dims(op.dim(), state.dim(), "matrix_free_apply");
  return StateVector(state.basis_labels, op.apply(state.amplitudes));
}

}  // namespace ssb
