// Times the OpenMP kernels against their serial references.
// Usage: bench_kernels [points] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "extcalc/kernels.hpp"
#include "extcalc/random.hpp"

using namespace extcalc;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  const int dim = 4;

  SplitMix64 rng(7);
  std::vector<Expression> roots;
  for (int i = 0; i < 32; ++i) {
    RandomExpressionOptions o;
    o.dim = dim;
    o.max_depth = 5;
    roots.push_back(random_expression(o, rng));
  }
  Tape tape(roots);
  std::vector<ResidualGroup> groups;
  for (std::size_t i = 0; i + 1 < roots.size(); i += 2) groups.push_back({{i, i + 1}, {1.0, -1.0}});
  std::vector<Point> points;
  for (std::size_t i = 0; i < count; ++i) points.push_back(draw_point(unit_box(dim), rng));

  volatile double sink = 0;
  const double eval_ser = best_of(repeats, [&] { sink = sink + evaluate_batch_serial(tape, points).values[0]; });
  const double eval_par = best_of(repeats, [&] { sink = sink + evaluate_batch(tape, points).values[0]; });
  const double scan_ser = best_of(repeats, [&] { sink = sink + scan_residuals_serial(tape, groups, points).max_scaled[0]; });
  const double scan_par = best_of(repeats, [&] { sink = sink + scan_residuals(tape, groups, points).max_scaled[0]; });

  std::printf("threads: %d  points: %zu  roots: %zu  tape: %zu instructions\n", omp_get_max_threads(), count,
              roots.size(), tape.size());
  std::printf("%-16s %12s %12s %9s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup");
  std::printf("%-16s %12.3f %12.3f %9.2f\n", "evaluate_batch", eval_ser * 1e3, eval_par * 1e3, eval_ser / eval_par);
  std::printf("%-16s %12.3f %12.3f %9.2f\n", "scan_residuals", scan_ser * 1e3, scan_par * 1e3, scan_ser / scan_par);
  return 0;
}
