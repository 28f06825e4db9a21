#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bdls {

// Shape of the space particles live in. Torus axes are periodic on
// [lower, lower + period); box axes are confined to [lower, upper] by
// reflection (or clamping when reflection is off). Infinite bounds are
// allowed on box axes.
class DomainGeometry {
 public:
  enum class Kind { euclidean, torus, box };

  static DomainGeometry euclidean(std::size_t dim);
  static DomainGeometry torus(std::vector<double> lower, std::vector<double> period);
  static DomainGeometry box(std::vector<double> lower, std::vector<double> upper,
                            std::vector<bool> reflect);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& period() const { return period_; }

  // Maps a point back into the domain in place: wrap for torus, reflect
  // (x -> 2b - x) for box axes.
  void project(std::span<double> x) const;

  bool contains(std::span<const double> x) const;

  // Displacement a - b; on the torus each axis uses the minimal image.
  double displacement(std::size_t axis, double a, double b) const {
    double d = a - b;
    if (kind_ == Kind::torus) {
      const double p = period_[axis];
      // std::round is odd-symmetric, so displacement(a,b) == -displacement(b,a)
      d -= p * std::round(d / p);
    }
    return d;
  }
  double squared_distance(std::span<const double> a, std::span<const double> b) const {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = displacement(k, a[k], b[k]);
      r2 += d * d;
    }
    return r2;
  }

  std::string describe() const;

 private:
  Kind kind_ = Kind::euclidean;
  std::size_t dim_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> period_;
  std::vector<bool> reflect_;
};

// Scalar helpers, exposed for tests.
double wrap_periodic(double x, double lower, double period);
double reflect_into(double x, double lower, double upper);

}  // namespace bdls
