#pragma once

#include <complex>

#include <Eigen/Core>

namespace ssb::kernels {

using Complex = std::complex<double>;

// Banded storage convention: diags is a (2*bandwidth+1) x n matrix with
// diags(bandwidth + d, i) = A(i, i + d) for every offset d in [-bandwidth,
// bandwidth] and every row i with 0 <= i + d < n. Entries outside that range
// are never read.

void banded_apply_serial(const Eigen::MatrixXcd& diags, int bandwidth,
                         const Complex* x, Complex* y, int n);

void banded_apply_parallel(const Eigen::MatrixXcd& diags, int bandwidth,
                           const Complex* x, Complex* y, int n);

void dense_apply_serial(const Eigen::MatrixXcd& a, const Complex* x,
                        Complex* y);

void dense_apply_parallel(const Eigen::MatrixXcd& a, const Complex* x,
                          Complex* y);

// Rows below this count are not worth forking threads for.
inline constexpr int kParallelCutoff = 256;

// Both parallel kernels split work by output row, so each y[i] is summed in a
// fixed order and results are bit-identical to the serial reference for any
// thread count.
void set_kernel_parallelism(bool enabled);
bool kernel_parallelism_enabled();

}  // namespace ssb::kernels
