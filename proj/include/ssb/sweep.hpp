#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <omp.h>

namespace ssb {

template <typename Result>
struct SweepOutcome {
  Result value{};
  bool ok = false;
  std::string error;
};

// Runs fn over every point with up to worker_budget concurrent workers.
// Results come back indexed like the input regardless of completion order,
// and a failure in one point never takes down the rest. The seed only
// shuffles the dispatch order (load balancing); outputs are
// schedule-independent.
template <typename Point, typename Fn>
auto sweep_execute(const std::vector<Point>& points, int worker_budget,
                   std::uint64_t seed, Fn fn)
    -> std::vector<SweepOutcome<decltype(fn(points.front()))>> {
  using Result = decltype(fn(points.front()));
  const int total = static_cast<int>(points.size());
  std::vector<SweepOutcome<Result>> results(total);
  if (total == 0) return results;

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(seed);
  std::shuffle(order.begin(), order.end(), gen);

  const int workers =
      worker_budget > 0 ? worker_budget : omp_get_max_threads();

#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (int pos = 0; pos < total; ++pos) {
    const int idx = order[pos];
    try {
      results[idx].value = fn(points[idx]);
      results[idx].ok = true;
    } catch (const std::exception& e) {
      results[idx].ok = false;
      results[idx].error = e.what();
    } catch (...) {
      results[idx].ok = false;
      results[idx].error = "unknown failure";
    }
  }
  return results;
}

}  // namespace ssb
