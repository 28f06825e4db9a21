#include "bdls/kde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <omp.h>

namespace bdls {

namespace {

void require_nonempty(const Ensemble& e) {
  if (e.size() == 0) throw std::invalid_argument("kde: empty ensemble");
}

void require_dim(const GaussianKernel& k, const Ensemble& e) {
  if (k.dim() != e.dim()) throw std::invalid_argument("kde: kernel/ensemble dimension mismatch");
}

// Squared distance between rows a and b with the axis count fixed at compile
// time for D > 0. Same arithmetic as DomainGeometry::squared_distance.
template <std::size_t D, bool Torus>
inline double pair_r2(const double* a, const double* b, std::size_t d, const double* period) {
  const std::size_t dims = D > 0 ? D : d;
  double r2 = 0.0;
  for (std::size_t k = 0; k < dims; ++k) {
    double diff = a[k] - b[k];
    if constexpr (Torus) diff -= period[k] * std::round(diff / period[k]);
    r2 += diff * diff;
  }
  return r2;
}

template <std::size_t D, bool Torus>
void pair_sweep(const GaussianKernel& k, const Ensemble& e, std::vector<double>& sum) {
  const std::size_t n = e.size();
  const std::size_t d = e.dim();
  const double* x = e.positions().data();
  const double* period = e.geometry().period().data();
  const double cutoff = k.cutoff_squared_distance();
  // Row j receives i < j terms from earlier outer iterations, then its own
  // self term, then j' > j terms: ascending order overall.
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x + i * d;
    sum[i] += k.from_squared_distance(pair_r2<D, Torus>(xi, xi, d, period));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = pair_r2<D, Torus>(xi, x + j * d, d, period);
      if (r2 < cutoff) {
        const double kij = k.from_squared_distance(r2);
        sum[i] += kij;
        sum[j] += kij;
      }
    }
  }
}

template <std::size_t D, bool Torus>
void row_sweep(const GaussianKernel& k, const Ensemble& e, std::vector<double>& out) {
  const auto n = static_cast<std::ptrdiff_t>(e.size());
  const std::size_t d = e.dim();
  const double* x = e.positions().data();
  const double* period = e.geometry().period().data();
  const double cutoff = k.cutoff_squared_distance();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* xi = x + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double r2 = pair_r2<D, Torus>(xi, x + static_cast<std::size_t>(j) * d, d, period);
      if (r2 < cutoff) s += k.from_squared_distance(r2);
    }
    out[static_cast<std::size_t>(i)] = s;
  }
}

using SweepFn = void (*)(const GaussianKernel&, const Ensemble&, std::vector<double>&);

template <std::size_t D, bool Torus>
struct PairTag {
  static void run(const GaussianKernel& k, const Ensemble& e, std::vector<double>& v) {
    pair_sweep<D, Torus>(k, e, v);
  }
};

template <std::size_t D, bool Torus>
struct RowTag {
  static void run(const GaussianKernel& k, const Ensemble& e, std::vector<double>& v) {
    row_sweep<D, Torus>(k, e, v);
  }
};

template <template <std::size_t, bool> class Tag>
SweepFn select(const Ensemble& e) {
  const bool torus = e.geometry().kind() == DomainGeometry::Kind::torus;
  switch (e.dim()) {
    case 1: return torus ? &Tag<1, true>::run : &Tag<1, false>::run;
    case 2: return torus ? &Tag<2, true>::run : &Tag<2, false>::run;
    default: return torus ? &Tag<0, true>::run : &Tag<0, false>::run;
  }
}

}  // namespace

GaussianKernel::GaussianKernel(double width, std::size_t dim) : width_(width), dim_(dim) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw std::invalid_argument("kernel: width must be positive");
  if (dim == 0) throw std::invalid_argument("kernel: dimension must be positive");
  const double h2 = width * width;
  norm_ = std::pow(2.0 * std::numbers::pi * h2, -0.5 * static_cast<double>(dim));
  inv_two_h2_ = 0.5 / h2;
  cutoff_r2_ = kTruncation / inv_two_h2_;
}

double GaussianKernel::from_squared_distance(double r2) const {
  const double t = r2 * inv_two_h2_;
  return t < kTruncation ? norm_ * std::exp(-t) : 0.0;
}

double GaussianKernel::operator()(const DomainGeometry& geometry, std::span<const double> x,
                                  std::span<const double> y) const {
  return from_squared_distance(geometry.squared_distance(x, y));
}

double kernel_eval(const GaussianKernel& k, const DomainGeometry& geometry,
                   std::span<const double> x, std::span<const double> y) {
  return k(geometry, x, y);
}

double kde_at_point(const GaussianKernel& k, const Ensemble& ensemble, std::span<const double> x) {
  require_nonempty(ensemble);
  require_dim(k, ensemble);
  const auto& g = ensemble.geometry();
  double s = 0.0;
  for (std::size_t j = 0; j < ensemble.size(); ++j)
    s += k.from_squared_distance(g.squared_distance(x, ensemble.particle(j)));
  return s / static_cast<double>(ensemble.size());
}

std::vector<double> kde_all_points_serial(const GaussianKernel& k, const Ensemble& ensemble) {
  require_nonempty(ensemble);
  require_dim(k, ensemble);
  std::vector<double> sum(ensemble.size(), 0.0);
  select<PairTag>(ensemble)(k, ensemble, sum);
  const double n = static_cast<double>(ensemble.size());
  for (auto& s : sum) s /= n;
  return sum;
}

std::vector<double> kde_all_points_parallel(const GaussianKernel& k, const Ensemble& ensemble) {
  require_nonempty(ensemble);
  require_dim(k, ensemble);
  std::vector<double> sum(ensemble.size(), 0.0);
  select<RowTag>(ensemble)(k, ensemble, sum);
  const double n = static_cast<double>(ensemble.size());
  for (auto& s : sum) s /= n;
  return sum;
}

std::vector<double> kde_all_points(const GaussianKernel& k, const Ensemble& ensemble) {
  // The pair sweep does half the work and wins unless several threads are
  // available to split rows.
  if (omp_in_parallel() || omp_get_max_threads() < 2) return kde_all_points_serial(k, ensemble);
  return kde_all_points_parallel(k, ensemble);
}

}  // namespace bdls
