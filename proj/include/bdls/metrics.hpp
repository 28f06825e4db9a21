#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bdls/ensemble.hpp"
#include "bdls/targets.hpp"

namespace bdls {

enum class ReferenceSource { closed_form, quadrature, exact_sampler };
std::string to_string(ReferenceSource s);

struct ObservableSpec {
  enum class Kind { coordinate_mean, coordinate_variance, indicator_box, quadratic };

  Kind kind = Kind::coordinate_mean;
  std::string label;
  std::size_t axis = 0;
  std::vector<double> box_lower, box_upper;  // indicator_box
  std::vector<double> coefficients;          // quadratic: sum_a c_a x_a^2
  double reference = 0.0;
  ReferenceSource source = ReferenceSource::closed_form;

  static ObservableSpec mean(std::size_t axis, std::string label = {});
  static ObservableSpec variance(std::size_t axis, std::string label = {});
  static ObservableSpec indicator(std::vector<double> lower, std::vector<double> upper,
                                 std::string label = {});
  static ObservableSpec quadratic_form(std::vector<double> coefficients, std::string label = {});
};

// (1/N) sum f(x_i); the variance kind uses sum (x - mean)^2 / N.
double empirical_estimate(const Ensemble& ensemble, const ObservableSpec& obs);

// Mean squared deviation of per-run estimates from the reference.
double mse_over_runs(std::span<const double> runs, double reference);

struct Occupancy {
  std::vector<double> fractions;
  std::vector<std::size_t> counts;
  double unassigned = 0.0;
  std::size_t unassigned_count = 0;
};

// Each particle goes to its nearest center if that center lies within
// radius, otherwise it is unassigned. `axes` selects the coordinates compared
// with the centers (all coordinates when empty).
Occupancy mode_occupancy(const Ensemble& ensemble, const std::vector<std::vector<double>>& centers,
                         double radius, std::span<const std::size_t> axes = {});

// 1D Gaussian KDE of one coordinate evaluated on `points`.
std::vector<double> kde_marginal_curve(const Ensemble& ensemble, std::size_t axis,
                                       std::span<const double> points, double bandwidth);

// 1.06 * sd * N^(-1/5)
double rule_of_thumb_bandwidth(const Ensemble& ensemble, std::size_t axis);

// Least-squares slope of -log KL over the samples with lo <= KL <= hi.
// Throws if fewer than `min_points` samples qualify.
double fit_exponential_rate(std::span<const double> times, std::span<const double> kl, double hi,
                            double lo, std::size_t min_points = 10);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of the coordinate under a 1D torus target, by midpoint
// quadrature on `cells` cells of its interval.
Moments torus_moments(const TargetDensity& target, std::size_t cells = 100000);

// Closed-form expectations under a Gaussian mixture.
double mixture_mean(const GaussianMixture2D& m, std::size_t axis);
double mixture_quadratic(const GaussianMixture2D& m, std::span<const double> coefficients);
double mixture_box_probability(const GaussianMixture2D& m, std::span<const double> lower,
                               std::span<const double> upper);

}  // namespace bdls
