// Times the serial pair-sweep KDE against the OpenMP row kernel on ensembles
// drawn from the 2D mixture target, and checks the two agree bitwise.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "bdls/kde.hpp"
#include "bdls/targets.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  if (argc > 1) {
    sizes.clear();
    for (int i = 1; i < argc; ++i) sizes.push_back(std::strtoull(argv[i], nullptr, 10));
  }
  const auto mixture = bdls::example2_mixture();
  const bdls::GaussianKernel kernel(0.1, 2);

  std::printf("threads %d\n", omp_get_max_threads());
  std::printf("%8s %12s %12s %9s %s\n", "N", "serial_s", "parallel_s", "speedup", "bitwise");
  for (auto n : sizes) {
    const auto ens = bdls::exact_sample(mixture, n, 42);
    std::vector<double> a, b;
    const int reps = n <= 2000 ? 5 : 2;
    const double ts = best_of(reps, [&] { a = bdls::kde_all_points_serial(kernel, ens); });
    const double tp = best_of(reps, [&] { b = bdls::kde_all_points_parallel(kernel, ens); });
    std::printf("%8zu %12.4f %12.4f %9.2f %s\n", n, ts, tp, ts / tp, a == b ? "yes" : "NO");
  }
  return 0;
}
