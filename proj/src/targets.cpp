#include "bdls/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "bdls/csv.hpp"
#include "bdls/ensemble.hpp"
#include "bdls/rng.hpp"

namespace bdls {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> a) {
  double mx = kNegInf;
  for (double v : a) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : a) s += std::exp(v - mx);
  return mx + std::log(s);
}

void require_weights(std::span<const double> w, const char* who) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(who) + ": weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": weights must sum to 1");
}

}  // namespace

double eval_log_pi(const TargetDensity& target, std::span<const double> x) {
  if (x.size() != target.dim())
    throw std::invalid_argument("eval_log_pi: point has wrong dimension");
  const double v = target.log_unnormalized(x);
  if (!std::isfinite(v)) throw DomainError(target.name() + ": non-finite log-density", -1);
  return v;
}

void eval_grad_log_pi(const TargetDensity& target, std::span<const double> x,
                      std::span<double> grad) {
  if (x.size() != target.dim() || grad.size() != target.dim())
    throw std::invalid_argument("eval_grad_log_pi: point has wrong dimension");
  target.grad_log_unnormalized(x, grad);
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (!std::isfinite(grad[k]))
      throw DomainError(target.name() + ": non-finite gradient in coordinate " +
                            std::to_string(k),
                        static_cast<std::ptrdiff_t>(k));
  }
}

std::vector<double> eval_grad_log_pi(const TargetDensity& target, std::span<const double> x) {
  std::vector<double> g(target.dim());
  eval_grad_log_pi(target, x, g);
  return g;
}

// --- 1D torus targets ---------------------------------------------------

TorusMultimodal1D::TorusMultimodal1D()
    : TargetDensity(DomainGeometry::torus({-2.0 * kPi}, {4.0 * kPi})) {}

double TorusMultimodal1D::log_unnormalized(std::span<const double> x) const {
  return -(2.5 * std::cos(2.0 * x[0]) + 0.5 * std::sin(x[0]));
}

void TorusMultimodal1D::grad_log_unnormalized(std::span<const double> x,
                                              std::span<double> grad) const {
  grad[0] = 5.0 * std::sin(2.0 * x[0]) - 0.5 * std::cos(x[0]);
}

DoubleWellTorus1D::DoubleWellTorus1D(double epsilon)
    : TargetDensity(DomainGeometry::torus({-1.0}, {2.0})), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("double well: epsilon must be positive");
}

double DoubleWellTorus1D::log_unnormalized(std::span<const double> x) const {
  const double c = std::cos(kPi * x[0]);
  return -c * c / epsilon_;
}

void DoubleWellTorus1D::grad_log_unnormalized(std::span<const double> x,
                                              std::span<double> grad) const {
  grad[0] = kPi * std::sin(2.0 * kPi * x[0]) / epsilon_;
}

UniformTorus::UniformTorus(std::size_t dim, double side)
    : TargetDensity(DomainGeometry::torus(std::vector<double>(dim, 0.0),
                                          std::vector<double>(dim, side))),
      side_(side) {}

double UniformTorus::log_unnormalized(std::span<const double>) const { return 0.0; }

void UniformTorus::grad_log_unnormalized(std::span<const double>, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
}

// --- Gaussian mixture ---------------------------------------------------

GaussianMixture2D::GaussianMixture2D(std::vector<GaussianComponent> components)
    : TargetDensity(DomainGeometry::euclidean(2)), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("gaussian mixture: no components");
  std::vector<double> w;
  for (const auto& c : components_) {
    w.push_back(c.weight);
    for (double s : c.variance)
      if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("gaussian mixture: variances must be positive");
  }
  require_weights(w, "gaussian mixture");
  for (const auto& c : components_) {
    log_norm_.push_back(std::log(c.weight) - std::log(2.0 * kPi) -
                        0.5 * (std::log(c.variance[0]) + std::log(c.variance[1])));
  }
}

double GaussianMixture2D::component_log_terms(std::span<const double> x,
                                              std::span<double> out) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const double dx = x[0] - c.mean[0];
    const double dy = x[1] - c.mean[1];
    out[i] = log_norm_[i] - 0.5 * (dx * dx / c.variance[0] + dy * dy / c.variance[1]);
  }
  return log_sum_exp(out);
}

double GaussianMixture2D::density(std::span<const double> x) const {
  return std::exp(log_unnormalized(x));
}

double GaussianMixture2D::log_unnormalized(std::span<const double> x) const {
  std::vector<double> terms(components_.size());
  return component_log_terms(x, terms);
}

void GaussianMixture2D::grad_log_unnormalized(std::span<const double> x,
                                              std::span<double> grad) const {
  std::vector<double> terms(components_.size());
  const double lse = component_log_terms(x, terms);
  grad[0] = grad[1] = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double r = std::exp(terms[i] - lse);
    const auto& c = components_[i];
    grad[0] -= r * (x[0] - c.mean[0]) / c.variance[0];
    grad[1] -= r * (x[1] - c.mean[1]) / c.variance[1];
  }
}

GaussianMixture2D example2_mixture() {
  return GaussianMixture2D({
      {0.25, {0.0, 8.0}, {1.2, 0.01}},
      {0.25, {0.0, 2.0}, {1.2, 0.01}},
      {0.25, {-3.0, 5.0}, {0.01, 2.0}},
      {0.25, {3.0, 5.0}, {0.01, 2.0}},
  });
}

GaussianMixture2D example2_initial() { return GaussianMixture2D({{1.0, {0.0, 8.0}, {0.3, 0.3}}}); }

// --- Bayesian mixture posterior -----------------------------------------

GmmParams example3_true_params() {
  return {{0.2, 0.6, 0.2}, {-5.0, 1.0, 6.0}, {1.0, 1.0, 1.0}};
}

std::vector<double> generate_synthetic_dataset(const GmmParams& params, std::size_t n,
                                               std::uint64_t seed) {
  require_weights(params.weight, "synthetic dataset");
  for (double l : params.precision)
    if (!(l > 0.0) || !std::isfinite(l))
      throw std::invalid_argument("synthetic dataset: precisions must be positive");
  RngStream rng(seed, 0);
  std::discrete_distribution<std::size_t> pick(params.weight.begin(), params.weight.end());
  std::vector<double> y(n);
  for (auto& v : y) {
    const std::size_t k = pick(rng.engine());
    v = params.mean[k] + rng.normal() / std::sqrt(params.precision[k]);
  }
  return y;
}

std::vector<double> read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("dataset: cannot open " + path.string());
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || !std::isfinite(v))
      throw std::runtime_error("dataset: " + path.string() + ":" + std::to_string(lineno) +
                               ": expected one real per line, got '" + t + "'");
    out.push_back(v);
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("dataset: cannot write " + path.string());
  for (double v : values) os << format_real(v) << '\n';
}

namespace {

DomainGeometry bayes_geometry() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return DomainGeometry::box({0.0, 0.0, -inf, -inf, -inf, 0.0, 0.0, 0.0, 0.0},
                             {1.0, 1.0, inf, inf, inf, inf, inf, inf, inf},
                             std::vector<bool>(BayesGmmPosterior::kDim, true));
}

}  // namespace

BayesGmmPosterior::BayesGmmPosterior(std::vector<double> data)
    : TargetDensity(bayes_geometry()), data_(std::move(data)) {
  if (data_.size() < 2) throw std::invalid_argument("bayes gmm: need at least two data points");
  const auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) throw std::invalid_argument("bayes gmm: data range must be positive");
  m_ = std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
  kappa_ = 4.0 / (range * range);
  h_prior_ = 100.0 * g_ / (alpha_ * range * range);
}

namespace {

[[noreturn]] void throw_nonpositive_mixture(std::size_t datum) {
  throw DomainError("bayes gmm: mixture density is not positive at data point " +
                        std::to_string(datum) + " (w1 + w2 too far above 1)",
                    -1);
}

}  // namespace

void BayesGmmPosterior::check_point(std::span<const double> x) const {
  if (x.size() != kDim) throw std::invalid_argument("bayes gmm: expected a 9-dimensional point");
  for (std::size_t k = 0; k < kDim; ++k)
    if (!std::isfinite(x[k]))
      throw DomainError("bayes gmm: non-finite coordinate " + std::to_string(k),
                        static_cast<std::ptrdiff_t>(k));
  for (std::size_t k : {w1, w2})
    if (x[k] < 0.0)
      throw DomainError("bayes gmm: negative weight in coordinate " + std::to_string(k),
                        static_cast<std::ptrdiff_t>(k));
  for (std::size_t k : {lambda1, lambda2, lambda3, beta})
    if (!(x[k] > 0.0))
      throw DomainError("bayes gmm: log-density undefined at zero in coordinate " +
                            std::to_string(k),
                        static_cast<std::ptrdiff_t>(k));
}

bool BayesGmmPosterior::in_support(std::span<const double> x) const {
  if (x.size() != kDim) return false;
  for (double v : x)
    if (!std::isfinite(v)) return false;
  if (x[w1] < 0.0 || x[w2] < 0.0) return false;
  for (std::size_t k : {lambda1, lambda2, lambda3, beta})
    if (!(x[k] > 0.0)) return false;
  const double w3 = 1.0 - x[w1] - x[w2];
  if (w3 >= 0.0) return true;
  const std::array<double, 3> w{x[w1], x[w2], w3};
  std::array<double, 3> c{};
  for (double y : data_) {
    double cmax = kNegInf;
    for (std::size_t k = 0; k < 3; ++k) {
      const double d = y - x[mu1 + k];
      c[k] = 0.5 * std::log(x[lambda1 + k]) - 0.5 * x[lambda1 + k] * d * d;
      cmax = std::max(cmax, c[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += w[k] * std::exp(c[k] - cmax);
    if (!(sum > 0.0)) return false;
  }
  return true;
}

double BayesGmmPosterior::log_unnormalized(std::span<const double> x) const {
  check_point(x);
  const std::array<double, 3> w{x[w1], x[w2], 1.0 - x[w1] - x[w2]};
  const std::array<double, 3> mu{x[mu1], x[mu2], x[mu3]};
  const std::array<double, 3> lam{x[lambda1], x[lambda2], x[lambda3]};
  const double b = x[beta];

  double lp = (3.0 * alpha_ + g_ - 1.0) * std::log(b) - b * h_prior_;
  std::array<double, 3> half_log_lam{};
  for (std::size_t k = 0; k < 3; ++k) {
    lp += (alpha_ - 1.0) * std::log(lam[k]) - 0.5 * kappa_ * (mu[k] - m_) * (mu[k] - m_) -
          b * lam[k];
    half_log_lam[k] = 0.5 * std::log(lam[k]);
  }
  std::array<double, 3> c{};
  for (std::size_t i = 0; i < data_.size(); ++i) {
    double cmax = kNegInf;
    for (std::size_t k = 0; k < 3; ++k) {
      const double d = data_[i] - mu[k];
      c[k] = half_log_lam[k] - 0.5 * lam[k] * d * d;
      cmax = std::max(cmax, c[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += w[k] * std::exp(c[k] - cmax);
    if (!(sum > 0.0)) throw_nonpositive_mixture(i);
    lp += cmax + std::log(sum);
  }
  return lp;
}

void BayesGmmPosterior::grad_log_unnormalized(std::span<const double> x,
                                              std::span<double> grad) const {
  check_point(x);
  const std::array<double, 3> w{x[w1], x[w2], 1.0 - x[w1] - x[w2]};
  const std::array<double, 3> mu{x[mu1], x[mu2], x[mu3]};
  const std::array<double, 3> lam{x[lambda1], x[lambda2], x[lambda3]};
  const double b = x[beta];

  std::array<double, 3> half_log_lam{};
  for (std::size_t k = 0; k < 3; ++k) half_log_lam[k] = 0.5 * std::log(lam[k]);

  std::array<double, 3> dmu{}, dlam{}, c{}, q{}, d{};
  double dw1 = 0.0, dw2 = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    double cmax = kNegInf;
    for (std::size_t k = 0; k < 3; ++k) {
      d[k] = data_[i] - mu[k];
      c[k] = half_log_lam[k] - 0.5 * lam[k] * d[k] * d[k];
      cmax = std::max(cmax, c[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      q[k] = std::exp(c[k] - cmax);
      sum += w[k] * q[k];
    }
    if (!(sum > 0.0)) throw_nonpositive_mixture(i);
    const double inv = 1.0 / sum;
    for (std::size_t k = 0; k < 3; ++k) {
      const double r = w[k] * q[k] * inv;  // responsibility
      dmu[k] += r * lam[k] * d[k];
      dlam[k] += r * (0.5 / lam[k] - 0.5 * d[k] * d[k]);
    }
    dw1 += (q[0] - q[2]) * inv;
    dw2 += (q[1] - q[2]) * inv;
  }

  grad[w1] = dw1;
  grad[w2] = dw2;
  double sum_lam = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    grad[mu1 + k] = dmu[k] - kappa_ * (mu[k] - m_);
    grad[lambda1 + k] = dlam[k] + (alpha_ - 1.0) / lam[k] - b;
    sum_lam += lam[k];
  }
  grad[beta] = (3.0 * alpha_ + g_ - 1.0) / b - (h_prior_ + sum_lam);
}

// --- exact samplers -----------------------------------------------------

namespace {

template <typename Fn>
void draw_mixture(const GaussianMixture2D& mixture, std::size_t n, std::uint64_t seed, Fn&& fn) {
  RngStream rng(seed, 0);
  std::vector<double> w;
  for (const auto& c : mixture.components()) w.push_back(c.weight);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick(rng.engine());
    const auto& c = mixture.components()[k];
    const double x = c.mean[0] + std::sqrt(c.variance[0]) * rng.normal();
    const double y = c.mean[1] + std::sqrt(c.variance[1]) * rng.normal();
    fn(i, k, x, y);
  }
}

}  // namespace

Ensemble exact_sample(const GaussianMixture2D& mixture, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("exact_sample: n must be positive");
  Ensemble ens(mixture.geometry(), n);
  draw_mixture(mixture, n, seed, [&](std::size_t i, std::size_t, double x, double y) {
    ens.at(i, 0) = x;
    ens.at(i, 1) = y;
  });
  return ens;
}

std::vector<std::size_t> exact_sample_labels(const GaussianMixture2D& mixture, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<std::size_t> labels(n);
  draw_mixture(mixture, n, seed,
               [&](std::size_t i, std::size_t k, double, double) { labels[i] = k; });
  return labels;
}

Ensemble sample_gaussian(const DomainGeometry& geometry, std::span<const double> mean,
                         std::span<const double> variance, std::size_t n, RngStream& rng) {
  const std::size_t d = geometry.dim();
  if (mean.size() != d || variance.size() != d)
    throw std::invalid_argument("sample_gaussian: mean/variance dimension mismatch");
  for (double v : variance)
    if (!(v >= 0.0)) throw std::invalid_argument("sample_gaussian: negative variance");
  Ensemble ens(geometry, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto p = ens.particle(i);
    for (std::size_t a = 0; a < d; ++a) p[a] = mean[a] + std::sqrt(variance[a]) * rng.normal();
    geometry.project(p);
  }
  return ens;
}

}  // namespace bdls
