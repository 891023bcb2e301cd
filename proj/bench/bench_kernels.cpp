// Timing comparison of the OpenMP kernels against their serial references.
// Usage: bench_kernels [n] [d] [k] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "maxaffine/datagen.hpp"
#include "maxaffine/objective.hpp"

using namespace maxaffine;
using Clock = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_ms(Fn fn, int repeats) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const long n = argc > 1 ? std::atol(argv[1]) : 200000;
  const int d = argc > 2 ? std::atoi(argv[2]) : 100;
  const int k = argc > 3 ? std::atoi(argv[3]) : 4;
  const int repeats = argc > 4 ? std::atoi(argv[4]) : 5;

  ModelParams truth = gen_truth_orthonormal(k, d, 7);
  Dataset data = gen_dataset(truth, CovariateLaw::standard_gaussian(d), n, 0.1, 11);
  ModelParams point = truth;
  point.blocks.array() += 0.05;  // off the optimum so residuals are nonzero

  std::printf("n=%ld d=%d k=%d threads=%d repeats=%d (best-of timings)\n", n, d, k,
              omp_get_max_threads(), repeats);

  volatile double sink = 0.0;
  const double loss_serial_ms = time_ms([&] { sink = loss_serial(point, data); }, repeats);
  const double loss_par_ms = time_ms([&] { sink = loss(point, data); }, repeats);
  std::printf("loss       serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              loss_serial_ms, loss_par_ms, loss_serial_ms / loss_par_ms);

  Gradient g;
  const double grad_serial_ms = time_ms([&] { g = gradient_serial(point, data); }, repeats);
  const double grad_par_ms = time_ms([&] { g = gradient(point, data); }, repeats);
  std::printf("gradient   serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              grad_serial_ms, grad_par_ms, grad_serial_ms / grad_par_ms);

  Partition part;
  const double assign_serial_ms = time_ms([&] { part = assign_cells_serial(point, data); }, repeats);
  const double assign_par_ms = time_ms([&] { part = assign_cells(point, data); }, repeats);
  std::printf("assign     serial %8.2f ms   parallel %8.2f ms   speedup %.2fx\n",
              assign_serial_ms, assign_par_ms, assign_serial_ms / assign_par_ms);

  (void)sink;
  return 0;
}
