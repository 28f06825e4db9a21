#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdls/geometry.hpp"

namespace bdls {

class Ensemble;
class RngStream;

// Raised when a target is evaluated where its log-density is not finite.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, std::ptrdiff_t coordinate)
      : std::runtime_error(what), coordinate_(coordinate) {}
  // Offending coordinate, or -1 when no single coordinate is to blame.
  std::ptrdiff_t coordinate() const { return coordinate_; }

 private:
  std::ptrdiff_t coordinate_;
};

// Unnormalized target pi = exp(-V) / Z. Implementations return -V with V
// exactly as written; Z is never computed.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual std::string name() const = 0;
  virtual double log_unnormalized(std::span<const double> x) const = 0;
  virtual void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const = 0;
  // False where the density vanishes inside the geometry (log-density -inf).
  virtual bool in_support(std::span<const double>) const { return true; }

  const DomainGeometry& geometry() const { return geometry_; }
  std::size_t dim() const { return geometry_.dim(); }

 protected:
  explicit TargetDensity(DomainGeometry g) : geometry_(std::move(g)) {}

 private:
  DomainGeometry geometry_;
};

// Checked evaluation: throws DomainError on a non-finite result.
double eval_log_pi(const TargetDensity& target, std::span<const double> x);
std::vector<double> eval_grad_log_pi(const TargetDensity& target, std::span<const double> x);
void eval_grad_log_pi(const TargetDensity& target, std::span<const double> x,
                      std::span<double> grad);

// V(x) = 2.5 cos(2x) + 0.5 sin(x) on the torus [-2pi, 2pi).
class TorusMultimodal1D final : public TargetDensity {
 public:
  TorusMultimodal1D();
  std::string name() const override { return "torus-multimodal-1d"; }
  double log_unnormalized(std::span<const double> x) const override;
  void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const override;
};

// V(x) = cos^2(pi x) / epsilon on the torus [-1, 1).
class DoubleWellTorus1D final : public TargetDensity {
 public:
  explicit DoubleWellTorus1D(double epsilon);
  std::string name() const override { return "double-well-torus-1d"; }
  double epsilon() const { return epsilon_; }
  double log_unnormalized(std::span<const double> x) const override;
  void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const override;

 private:
  double epsilon_;
};

// Uniform measure on [0, L)^d.
class UniformTorus final : public TargetDensity {
 public:
  UniformTorus(std::size_t dim, double side);
  std::string name() const override { return "uniform-torus"; }
  double side() const { return side_; }
  double log_unnormalized(std::span<const double> x) const override;
  void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const override;

 private:
  double side_;
};

struct GaussianComponent {
  double weight = 1.0;
  std::array<double, 2> mean{};
  std::array<double, 2> variance{1.0, 1.0};  // diagonal covariance
};

// Sum_i w_i N(m_i, diag(s_i)) on R^2.
class GaussianMixture2D final : public TargetDensity {
 public:
  explicit GaussianMixture2D(std::vector<GaussianComponent> components);
  std::string name() const override { return "gaussian-mixture-2d"; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  // Normalized density (the mixture constants are known in closed form).
  double density(std::span<const double> x) const;
  double log_unnormalized(std::span<const double> x) const override;
  void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const override;

 private:
  // per-component log(w_i) - log(2 pi sqrt(det))
  double component_log_terms(std::span<const double> x, std::span<double> out) const;
  std::vector<GaussianComponent> components_;
  std::vector<double> log_norm_;
};

// Four-component mixture with equal weights and the square layout of modes.
GaussianMixture2D example2_mixture();
// Initial law N(m0, Sigma0) of the same example, as a one-component mixture.
GaussianMixture2D example2_initial();

// Three-component univariate mixture parameters: weights, means, precisions.
struct GmmParams {
  std::array<double, 3> weight{};
  std::array<double, 3> mean{};
  std::array<double, 3> precision{};
};

GmmParams example3_true_params();

std::vector<double> generate_synthetic_dataset(const GmmParams& params, std::size_t n,
                                               std::uint64_t seed);
std::vector<double> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, std::span<const double> values);

// Posterior over x = (w1, w2, mu1, mu2, mu3, lambda1, lambda2, lambda3, beta)
// for a three-component Gaussian mixture with a data-dependent conjugate-style
// prior. w3 = 1 - w1 - w2 is used as is, so off the simplex it may be
// negative; the log-density is undefined (DomainError) wherever the mixture
// sum at some data point is not positive.
class BayesGmmPosterior final : public TargetDensity {
 public:
  static constexpr std::size_t kDim = 9;
  enum Index : std::size_t { w1 = 0, w2, mu1, mu2, mu3, lambda1, lambda2, lambda3, beta };

  explicit BayesGmmPosterior(std::vector<double> data);
  std::string name() const override { return "bayes-gmm-posterior"; }

  const std::vector<double>& data() const { return data_; }
  double prior_mean() const { return m_; }
  double prior_kappa() const { return kappa_; }
  double prior_alpha() const { return alpha_; }
  double prior_g() const { return g_; }
  double prior_h() const { return h_prior_; }

  double log_unnormalized(std::span<const double> x) const override;
  void grad_log_unnormalized(std::span<const double> x, std::span<double> grad) const override;
  bool in_support(std::span<const double> x) const override;

 private:
  void check_point(std::span<const double> x) const;
  std::vector<double> data_;
  double m_ = 0.0;
  double kappa_ = 0.0;
  double alpha_ = 2.0;
  double g_ = 0.02;
  double h_prior_ = 0.0;
};

// n exact draws from a Gaussian mixture; reproducible under seed.
Ensemble exact_sample(const GaussianMixture2D& mixture, std::size_t n, std::uint64_t seed);
// Component index of each draw, same stream and order as exact_sample.
std::vector<std::size_t> exact_sample_labels(const GaussianMixture2D& mixture, std::size_t n,
                                             std::uint64_t seed);

// n draws from N(mean, diag(variance)) projected into the geometry (wrapped
// on a torus).
Ensemble sample_gaussian(const DomainGeometry& geometry, std::span<const double> mean,
                         std::span<const double> variance, std::size_t n, RngStream& rng);

}  // namespace bdls
