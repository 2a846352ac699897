#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ssb {

using Complex = std::complex<double>;

using BasisLabels = std::vector<std::string>;
using BasisPtr = std::shared_ptr<const BasisLabels>;

// Label factories for the two bases used throughout: angular momentum
// eigenstates m = -cutoff..cutoff, and spin-z product states written as
// 'u'/'d' strings with site 0 leftmost.
BasisPtr rotor_basis(int cutoff);
BasisPtr spin_basis(int n_spins);
BasisPtr numbered_basis(int dim);

// Complex amplitude vector over a labeled finite basis.
struct StateVector {
  BasisPtr basis_labels;
  Eigen::VectorXcd amplitudes;

  StateVector() = default;
  StateVector(BasisPtr labels, Eigen::VectorXcd amps);

  int dim() const { return static_cast<int>(amplitudes.size()); }
  double norm_squared() const { return amplitudes.squaredNorm(); }
  StateVector normalized() const;
};

StateVector basis_state(BasisPtr labels, int index);

enum class Storage { dense, banded };

// Complex matrix in dense or banded storage with a Hermitian flag. Banded
// storage keeps the diagonals as described in kernels.hpp.
class LinearOperator {
 public:
  static LinearOperator dense(Eigen::MatrixXcd m, bool hermitian);
  // diags must be (2*bandwidth+1) x dim.
  static LinearOperator banded(int dim, int bandwidth, Eigen::MatrixXcd diags,
                               bool hermitian);

  int dim() const { return dim_; }
  Storage storage() const { return storage_; }
  int bandwidth() const { return bandwidth_; }
  bool is_hermitian() const { return hermitian_; }

  Eigen::MatrixXcd to_dense() const;
  Complex coeff(int i, int j) const;

  void apply(const Complex* x, Complex* y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  LinearOperator adjoint() const;
  LinearOperator scaled(Complex factor) const;
  LinearOperator add(const LinearOperator& other) const;

  // Gershgorin bound on the spectral radius; used for residual scales.
  double norm_bound() const;

 private:
  LinearOperator() = default;

  int dim_ = 0;
  Storage storage_ = Storage::dense;
  int bandwidth_ = 0;
  bool hermitian_ = false;
  Eigen::MatrixXcd data_;  // dense matrix, or diagonal stack for banded
};

// Hermitian matrix with unit trace and non-negative spectrum; validated on
// construction (positivity within a small negative tolerance).
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd rho);
  static DensityMatrix from_pure(const StateVector& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  double trace_real() const { return rho_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  // von Neumann entropy, natural log.
  double entropy() const;

 private:
  Eigen::MatrixXcd rho_;
};

enum class Keep { system, bath };

// <psi|op|psi> / <psi|psi>. The imaginary part is dropped when the operator
// carries the Hermitian flag and the residual imaginary part is below 1e-10.
Complex expectation_normalized(const StateVector& state,
                               const LinearOperator& op);

inline constexpr int kDefaultTensorLimit = 1 << 14;

// Kronecker products with the left factor's index major (leftmost factor
// varies slowest): index = i_a * dim_b + i_b.
LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b,
                              int max_dim = kDefaultTensorLimit);
StateVector tensor_product(const StateVector& a, const StateVector& b,
                           int max_dim = kDefaultTensorLimit);

DensityMatrix partial_trace(const DensityMatrix& rho, int d_sys, int d_bath,
                            Keep keep);

struct GroundStateOptions {
  int dense_threshold = 512;  // full dense solve below this dimension
  int max_lanczos_iterations = 20000;  // matrix-vector product budget
  double tolerance = 1e-10;
};

struct EigenPair {
  double value = 0.0;
  StateVector vector;
};

// Minimum eigenpair of a Hermitian operator. Dense solve below the dimension
// threshold, Lanczos with full reorthogonalization above it.
EigenPair ground_state(const LinearOperator& op,
                       const GroundStateOptions& opts = {});

// Same contract as LinearOperator::apply but returning a StateVector; works
// for banded operators without densifying.
StateVector matrix_free_apply(const LinearOperator& op,
                              const StateVector& state);

}  // namespace ssb
