#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace oracle {

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, double rel_step) {
  std::vector<double> p(x.begin(), x.end()), g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x[k]));
    p[k] = x[k] + h;
    const double fp = f(p);
    p[k] = x[k] - h;
    const double fm = f(p);
    p[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, std::abs(a[k] - b[k]));
    scale = std::max(scale, std::abs(b[k]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

double kde(std::span<const double> points, std::size_t d, std::span<const double> period,
           double h, std::span<const double> x, double truncation) {
  const std::size_t n = points.size() / d;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      double diff = x[a] - points[j * d + a];
      if (!period.empty()) {
        const double p = period[a];
        diff = std::fmod(diff, p);
        if (diff > p / 2) diff -= p;
        if (diff < -p / 2) diff += p;
      }
      r2 += diff * diff;
    }
    const double t = r2 / (2 * h * h);
    if (t < truncation) s += std::exp(-t) / std::pow(2 * std::numbers::pi * h * h, d / 2.0);
  }
  return s / static_cast<double>(n);
}

double example1_potential(double x) { return 2.5 * std::cos(2 * x) + 0.5 * std::sin(x); }

double mixture_density_example2(double x, double y) {
  struct C {
    double mx, my, vx, vy;
  };
  const C cs[4] = {{0, 8, 1.2, 0.01}, {0, 2, 1.2, 0.01}, {-3, 5, 0.01, 2}, {3, 5, 0.01, 2}};
  double s = 0.0;
  for (const auto& c : cs)
    s += 0.25 * std::exp(-0.5 * ((x - c.mx) * (x - c.mx) / c.vx + (y - c.my) * (y - c.my) / c.vy)) /
         (2 * std::numbers::pi * std::sqrt(c.vx * c.vy));
  return s;
}

std::vector<double> bde_interpolation(std::span<const double> rho0, std::span<const double> pi,
                                      double dx, double t) {
  std::vector<double> out(rho0.size());
  const double e = std::exp(-t);
  double mass = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = pi[i] * std::pow(rho0[i] / pi[i], e);
    mass += out[i] * dx;
  }
  for (auto& v : out) v /= mass;
  return out;
}

Moments periodic_moments(const std::function<double(double)>& V, double a, double b,
                         std::size_t n) {
  const double dx = (b - a) / static_cast<double>(n);
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a + static_cast<double>(i) * dx;
    const double w = std::exp(-V(x));
    z += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / z;
  return {mean, m2 / z - mean * mean};
}

void ula_move(std::span<double> x, std::span<const double> grad, double dt,
              bdls::RngStream& rng) {
  for (std::size_t a = 0; a < x.size(); ++a)
    x[a] = x[a] + dt * grad[a] + std::sqrt(2 * dt) * rng.normal();
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * i / static_cast<double>(n - 1);
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double bayes_log_posterior(std::span<const double> data, std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double R = *hi - *lo;
  const double M = std::accumulate(data.begin(), data.end(), 0.0) / data.size();
  const double kappa = 4 / (R * R), alpha = 2, g = 0.02, hp = 100 * g / (alpha * R * R);
  const double w[3] = {x[0], x[1], 1 - x[0] - x[1]};
  const double mu[3] = {x[2], x[3], x[4]};
  const double lam[3] = {x[5], x[6], x[7]};
  const double beta = x[8];
  double lp = 0.0;
  for (double y : data) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
      s += w[k] * std::sqrt(lam[k]) * std::exp(-lam[k] * (y - mu[k]) * (y - mu[k]) / 2);
    lp += std::log(s);
  }
  for (int k = 0; k < 3; ++k) {
    lp += -kappa * (mu[k] - M) * (mu[k] - M) / 2;
    lp += alpha * std::log(beta) + (alpha - 1) * std::log(lam[k]) - beta * lam[k];
  }
  lp += (g - 1) * std::log(beta) - hp * beta;
  return lp;
}

}  // namespace oracle
