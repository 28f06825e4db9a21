#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bdls/ensemble.hpp"
#include "bdls/geometry.hpp"

namespace bdls {

// K(x, y) = (2 pi h^2)^(-d/2) exp(-|x - y|^2 / (2 h^2)). On a torus the
// distance is the per-axis minimal image; the normalization stays Euclidean.
// The kernel is truncated to zero once |x - y|^2 / (2 h^2) reaches
// kTruncation, where it is below 5e-18 of its peak.
class GaussianKernel {
 public:
  static constexpr double kTruncation = 40.0;

  GaussianKernel(double width, std::size_t dim);

  double width() const { return width_; }
  std::size_t dim() const { return dim_; }
  double peak() const { return norm_; }

  double from_squared_distance(double r2) const;
  double operator()(const DomainGeometry& geometry, std::span<const double> x,
                    std::span<const double> y) const;

  // Squared distances at or beyond this give a kernel value of zero.
  double cutoff_squared_distance() const { return cutoff_r2_; }

 private:
  double width_;
  std::size_t dim_;
  double norm_;
  double inv_two_h2_;
  double cutoff_r2_;
};

double kernel_eval(const GaussianKernel& k, const DomainGeometry& geometry,
                   std::span<const double> x, std::span<const double> y);

// (1/N) sum_j K(x, x_j), self term included when x is a member.
double kde_at_point(const GaussianKernel& k, const Ensemble& ensemble, std::span<const double> x);

// Element i equals kde_at_point at particle i. Every element is summed in
// ascending j, so all variants below agree bitwise.
std::vector<double> kde_all_points(const GaussianKernel& k, const Ensemble& ensemble);

// Serial reference: single sweep over i < j pairs, each kernel value
// evaluated once and credited to both ends.
std::vector<double> kde_all_points_serial(const GaussianKernel& k, const Ensemble& ensemble);

// OpenMP kernel: rows partitioned across threads, each row summed
// independently over all j.
std::vector<double> kde_all_points_parallel(const GaussianKernel& k, const Ensemble& ensemble);

}  // namespace bdls
