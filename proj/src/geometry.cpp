#include "bdls/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bdls {

double wrap_periodic(double x, double lower, double period) {
  double y = x - period * std::floor((x - lower) / period);
  // floor can leave y == lower + period through rounding
  if (y >= lower + period) y = lower;
  if (y < lower) y = lower;
  return y;
}

double reflect_into(double x, double lower, double upper) {
  const bool lo_finite = std::isfinite(lower);
  const bool hi_finite = std::isfinite(upper);
  if (lo_finite && hi_finite) {
    if (x >= lower && x <= upper) return x;
    // fold onto [lower, lower + 2w) then mirror the upper half
    const double w = upper - lower;
    double y = std::fmod(x - lower, 2.0 * w);
    if (y < 0.0) y += 2.0 * w;
    if (y > w) y = 2.0 * w - y;
    return lower + y;
  }
  if (lo_finite && x < lower) return 2.0 * lower - x;
  if (hi_finite && x > upper) return 2.0 * upper - x;
  return x;
}

DomainGeometry DomainGeometry::euclidean(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("geometry: dimension must be positive");
  DomainGeometry g;
  g.kind_ = Kind::euclidean;
  g.dim_ = dim;
  g.lower_.assign(dim, -std::numeric_limits<double>::infinity());
  g.upper_.assign(dim, std::numeric_limits<double>::infinity());
  g.period_.assign(dim, 0.0);
  g.reflect_.assign(dim, false);
  return g;
}

DomainGeometry DomainGeometry::torus(std::vector<double> lower, std::vector<double> period) {
  if (lower.empty() || lower.size() != period.size())
    throw std::invalid_argument("geometry: torus lower/period size mismatch");
  for (std::size_t a = 0; a < period.size(); ++a) {
    if (!(period[a] > 0.0) || !std::isfinite(period[a]) || !std::isfinite(lower[a]))
      throw std::invalid_argument("geometry: torus period must be finite and positive on axis " +
                                  std::to_string(a));
  }
  DomainGeometry g;
  g.kind_ = Kind::torus;
  g.dim_ = lower.size();
  g.upper_.resize(g.dim_);
  for (std::size_t a = 0; a < g.dim_; ++a) g.upper_[a] = lower[a] + period[a];
  g.lower_ = std::move(lower);
  g.period_ = std::move(period);
  g.reflect_.assign(g.dim_, false);
  return g;
}

DomainGeometry DomainGeometry::box(std::vector<double> lower, std::vector<double> upper,
                                   std::vector<bool> reflect) {
  if (lower.empty() || lower.size() != upper.size() || lower.size() != reflect.size())
    throw std::invalid_argument("geometry: box bound sizes mismatch");
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (std::isfinite(lower[a]) && std::isfinite(upper[a]) && !(lower[a] < upper[a]))
      throw std::invalid_argument("geometry: box requires lower < upper on axis " +
                                  std::to_string(a));
  }
  DomainGeometry g;
  g.kind_ = Kind::box;
  g.dim_ = lower.size();
  g.lower_ = std::move(lower);
  g.upper_ = std::move(upper);
  g.period_.assign(g.dim_, 0.0);
  g.reflect_ = std::move(reflect);
  return g;
}

void DomainGeometry::project(std::span<double> x) const {
  switch (kind_) {
    case Kind::euclidean:
      return;
    case Kind::torus:
      for (std::size_t a = 0; a < dim_; ++a) x[a] = wrap_periodic(x[a], lower_[a], period_[a]);
      return;
    case Kind::box:
      for (std::size_t a = 0; a < dim_; ++a) {
        if (reflect_[a])
          x[a] = reflect_into(x[a], lower_[a], upper_[a]);
        else
          x[a] = std::clamp(x[a], lower_[a], upper_[a]);
      }
      return;
  }
}

bool DomainGeometry::contains(std::span<const double> x) const {
  if (x.size() != dim_) return false;
  for (std::size_t a = 0; a < dim_; ++a) {
    if (!std::isfinite(x[a])) return false;
    if (kind_ == Kind::torus) {
      if (x[a] < lower_[a] || x[a] >= upper_[a]) return false;
    } else if (x[a] < lower_[a] || x[a] > upper_[a]) {
      return false;
    }
  }
  return true;
}

std::string DomainGeometry::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::euclidean: os << "euclidean(" << dim_ << ")"; break;
    case Kind::torus:
      os << "torus(" << dim_ << "; lower=" << lower_[0] << ", period=" << period_[0] << ")";
      break;
    case Kind::box: os << "box(" << dim_ << ")"; break;
  }
  return os.str();
}

}  // namespace bdls
