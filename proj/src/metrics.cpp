#include "bdls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bdls {

std::string to_string(ReferenceSource s) {
  switch (s) {
    case ReferenceSource::closed_form: return "closed-form";
    case ReferenceSource::quadrature: return "fine-grid quadrature";
    case ReferenceSource::exact_sampler: return "exact-sampler estimate";
  }
  return "?";
}

ObservableSpec ObservableSpec::mean(std::size_t axis, std::string label) {
  ObservableSpec o;
  o.kind = Kind::coordinate_mean;
  o.axis = axis;
  o.label = label.empty() ? "mean_x" + std::to_string(axis + 1) : std::move(label);
  return o;
}

ObservableSpec ObservableSpec::variance(std::size_t axis, std::string label) {
  ObservableSpec o;
  o.kind = Kind::coordinate_variance;
  o.axis = axis;
  o.label = label.empty() ? "var_x" + std::to_string(axis + 1) : std::move(label);
  return o;
}

ObservableSpec ObservableSpec::indicator(std::vector<double> lower, std::vector<double> upper,
                                         std::string label) {
  if (lower.size() != upper.size()) throw std::invalid_argument("indicator: bound size mismatch");
  ObservableSpec o;
  o.kind = Kind::indicator_box;
  o.box_lower = std::move(lower);
  o.box_upper = std::move(upper);
  o.label = label.empty() ? "indicator" : std::move(label);
  return o;
}

ObservableSpec ObservableSpec::quadratic_form(std::vector<double> coefficients, std::string label) {
  ObservableSpec o;
  o.kind = Kind::quadratic;
  o.coefficients = std::move(coefficients);
  o.label = label.empty() ? "quadratic" : std::move(label);
  return o;
}

double empirical_estimate(const Ensemble& ensemble, const ObservableSpec& obs) {
  const std::size_t n = ensemble.size();
  if (n == 0) throw std::invalid_argument("empirical_estimate: empty ensemble");
  const double inv_n = 1.0 / static_cast<double>(n);
  switch (obs.kind) {
    case ObservableSpec::Kind::coordinate_mean: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += ensemble.at(i, obs.axis);
      return s * inv_n;
    }
    case ObservableSpec::Kind::coordinate_variance: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += ensemble.at(i, obs.axis);
      const double mean = s * inv_n;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = ensemble.at(i, obs.axis) - mean;
        v += d * d;
      }
      return v * inv_n;
    }
    case ObservableSpec::Kind::indicator_box: {
      if (obs.box_lower.size() != ensemble.dim())
        throw std::invalid_argument("empirical_estimate: indicator box dimension mismatch");
      std::size_t inside = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = ensemble.particle(i);
        bool in = true;
        for (std::size_t a = 0; a < p.size(); ++a)
          in = in && p[a] >= obs.box_lower[a] && p[a] <= obs.box_upper[a];
        inside += in ? 1 : 0;
      }
      return static_cast<double>(inside) * inv_n;
    }
    case ObservableSpec::Kind::quadratic: {
      if (obs.coefficients.size() != ensemble.dim())
        throw std::invalid_argument("empirical_estimate: quadratic coefficient count mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = ensemble.particle(i);
        double f = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) f += obs.coefficients[a] * p[a] * p[a];
        s += f;
      }
      return s * inv_n;
    }
  }
  return 0.0;
}

double mse_over_runs(std::span<const double> runs, double reference) {
  if (runs.empty()) throw std::invalid_argument("mse_over_runs: no runs");
  if (runs.size() < 2) throw std::invalid_argument("mse_over_runs: need at least two runs");
  double s = 0.0;
  for (double r : runs) s += (r - reference) * (r - reference);
  return s / static_cast<double>(runs.size());
}

Occupancy mode_occupancy(const Ensemble& ensemble, const std::vector<std::vector<double>>& centers,
                         double radius, std::span<const std::size_t> axes) {
  if (centers.empty()) throw std::invalid_argument("mode_occupancy: no centers");
  if (!(radius > 0.0)) throw std::invalid_argument("mode_occupancy: radius must be positive");
  std::vector<std::size_t> all_axes;
  if (axes.empty()) {
    for (std::size_t a = 0; a < ensemble.dim(); ++a) all_axes.push_back(a);
    axes = all_axes;
  }
  for (const auto& c : centers)
    if (c.size() != axes.size()) throw std::invalid_argument("mode_occupancy: center dimension");

  const auto& g = ensemble.geometry();
  Occupancy occ;
  occ.counts.assign(centers.size(), 0);
  const double r2max = radius * radius;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto p = ensemble.particle(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      double r2 = 0.0;
      for (std::size_t j = 0; j < axes.size(); ++j) {
        const double d = g.displacement(axes[j], p[axes[j]], centers[k][j]);
        r2 += d * d;
      }
      if (r2 < best) {
        best = r2;
        best_k = k;
      }
    }
    if (best <= r2max)
      ++occ.counts[best_k];
    else
      ++occ.unassigned_count;
  }
  const double n = static_cast<double>(ensemble.size());
  for (auto c : occ.counts) occ.fractions.push_back(static_cast<double>(c) / n);
  occ.unassigned = static_cast<double>(occ.unassigned_count) / n;
  return occ;
}

std::vector<double> kde_marginal_curve(const Ensemble& ensemble, std::size_t axis,
                                       std::span<const double> points, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde_marginal_curve: bandwidth must be positive");
  if (ensemble.size() == 0) throw std::invalid_argument("kde_marginal_curve: empty ensemble");
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bandwidth *
                             static_cast<double>(ensemble.size()));
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      const double z = (points[p] - ensemble.at(i, axis)) / bandwidth;
      s += std::exp(-0.5 * z * z);
    }
    out[p] = s * norm;
  }
  return out;
}

double rule_of_thumb_bandwidth(const Ensemble& ensemble, std::size_t axis) {
  const double var = empirical_estimate(ensemble, ObservableSpec::variance(axis));
  const double sd = std::sqrt(var);
  const double n = static_cast<double>(ensemble.size());
  const double h = 1.06 * sd * std::pow(n, -0.2);
  // coincident particles: fall back to a tiny positive width
  return h > 0.0 ? h : 1e-3;
}

double fit_exponential_rate(std::span<const double> times, std::span<const double> kl, double hi,
                            double lo, std::size_t min_points) {
  if (times.size() != kl.size()) throw std::invalid_argument("fit_exponential_rate: size mismatch");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(kl[i] >= lo && kl[i] <= hi)) continue;
    const double y = std::log(kl[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
    ++m;
  }
  if (m < min_points)
    throw std::runtime_error("fit_exponential_rate: only " + std::to_string(m) +
                             " samples inside the fit window");
  const double mm = static_cast<double>(m);
  const double denom = mm * stt - st * st;
  if (!(denom > 0.0)) throw std::runtime_error("fit_exponential_rate: degenerate time samples");
  return -(mm * sty - st * sy) / denom;
}

Moments torus_moments(const TargetDensity& target, std::size_t cells) {
  const auto& g = target.geometry();
  if (target.dim() != 1 || g.kind() != DomainGeometry::Kind::torus)
    throw std::invalid_argument("torus_moments: one-dimensional torus target required");
  const double a = g.lower()[0];
  const double dx = g.period()[0] / static_cast<double>(cells);
  std::vector<double> l(cells), x(cells);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cells; ++i) {
    x[i] = a + (static_cast<double>(i) + 0.5) * dx;
    l[i] = eval_log_pi(target, std::span<const double>(&x[i], 1));
    mx = std::max(mx, l[i]);
  }
  double z = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double w = std::exp(l[i] - mx);
    z += w;
    s1 += w * x[i];
  }
  Moments m;
  m.mean = s1 / z;
  double s2 = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double d = x[i] - m.mean;
    s2 += std::exp(l[i] - mx) * d * d;
  }
  m.variance = s2 / z;
  return m;
}

double mixture_mean(const GaussianMixture2D& m, std::size_t axis) {
  double s = 0.0;
  for (const auto& c : m.components()) s += c.weight * c.mean[axis];
  return s;
}

double mixture_quadratic(const GaussianMixture2D& m, std::span<const double> coefficients) {
  double s = 0.0;
  for (const auto& c : m.components())
    for (std::size_t a = 0; a < 2; ++a)
      s += c.weight * coefficients[a] * (c.mean[a] * c.mean[a] + c.variance[a]);
  return s;
}

double mixture_box_probability(const GaussianMixture2D& m, std::span<const double> lower,
                               std::span<const double> upper) {
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  double s = 0.0;
  for (const auto& c : m.components()) {
    double p = c.weight;
    for (std::size_t a = 0; a < 2; ++a) {
      const double sd = std::sqrt(c.variance[a]);
      p *= cdf((upper[a] - c.mean[a]) / sd) - cdf((lower[a] - c.mean[a]) / sd);
    }
    s += p;
  }
  return s;
}

}  // namespace bdls
