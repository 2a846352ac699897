// Compares the serial reference kernels against the OpenMP variants on the
// two workloads that dominate runs: banded rotor matvecs and dense chain
// matvecs, plus a ground-state sweep through the harness.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <omp.h>

#include "ssb/equilibrium.hpp"
#include "ssb/kernels.hpp"
#include "ssb/models.hpp"

using ssb::Complex;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Eigen::VectorXcd random_vector(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(dist(gen), dist(gen));
  return v;
}

template <typename Fn>
double time_loop(int reps, Fn fn) {
  fn();  // warm up
  const double start = now_seconds();
  for (int r = 0; r < reps; ++r) fn();
  return (now_seconds() - start) / reps;
}

void bench_banded(int n, int reps) {
  std::mt19937_64 gen(7);
  Eigen::MatrixXcd diags(3, n);
  for (int i = 0; i < n; ++i) {
    diags(0, i) = Complex(0.5, 0.1);
    diags(1, i) = Complex(static_cast<double>(i) / n, 0.0);
    diags(2, i) = Complex(0.5, -0.1);
  }
  const Eigen::VectorXcd x = random_vector(n, gen);
  Eigen::VectorXcd y(n);

  ssb::kernels::set_kernel_parallelism(false);
  const double t_serial = time_loop(reps, [&] {
    ssb::kernels::banded_apply_serial(diags, 1, x.data(), y.data(), n);
  });
  ssb::kernels::set_kernel_parallelism(true);
  const double t_parallel = time_loop(reps, [&] {
    ssb::kernels::banded_apply_parallel(diags, 1, x.data(), y.data(), n);
  });
  std::printf("banded  n=%-7d serial %10.3f us   omp %10.3f us   speedup %.2fx\n",
              n, t_serial * 1e6, t_parallel * 1e6, t_serial / t_parallel);
}

void bench_dense(int n, int reps) {
  std::mt19937_64 gen(11);
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) a.col(j) = random_vector(n, gen);
  const Eigen::VectorXcd x = random_vector(n, gen);
  Eigen::VectorXcd y(n);

  ssb::kernels::set_kernel_parallelism(false);
  const double t_serial = time_loop(
      reps, [&] { ssb::kernels::dense_apply_serial(a, x.data(), y.data()); });
  ssb::kernels::set_kernel_parallelism(true);
  const double t_parallel = time_loop(reps, [&] {
    ssb::kernels::dense_apply_parallel(a, x.data(), y.data());
  });
  std::printf("dense   n=%-7d serial %10.3f us   omp %10.3f us   speedup %.2fx\n",
              n, t_serial * 1e6, t_parallel * 1e6, t_serial / t_parallel);
}

void bench_scan() {
  const std::vector<double> n_grid = {100.0, 1000.0};
  const std::vector<double> b_grid = {1e-4, 1e-2};

  omp_set_num_threads(1);
  const double t1 = time_loop(1, [&] { ssb::limit_scan(n_grid, b_grid); });
  omp_set_num_threads(omp_get_num_procs());
  const double tp = time_loop(1, [&] { ssb::limit_scan(n_grid, b_grid); });
  std::printf("scan    2x2 grid  1 worker %8.1f ms   %d workers %8.1f ms   speedup %.2fx\n",
              t1 * 1e3, omp_get_num_procs(), tp * 1e3, t1 / tp);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  bench_banded(1 << 12, 2000);
  bench_banded(1 << 16, 200);
  bench_dense(256, 2000);
  bench_dense(2048, 20);
  bench_scan();
  return 0;
}
