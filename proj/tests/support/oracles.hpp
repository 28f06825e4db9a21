#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bdls/ensemble.hpp"
#include "bdls/rng.hpp"
#include "bdls/targets.hpp"

// Reference computations written directly from the defining formulas, kept
// separate from the library code they check.
namespace oracle {

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> x, double rel_step = 1e-6);

// max_k |a_k - b_k| / max_k |b_k|, or the absolute difference when b is zero.
double relative_error(std::span<const double> a, std::span<const double> b);

// Gaussian kernel average over points (row-major, dim d). period empty means
// Euclidean distance. Terms with r^2/(2h^2) >= truncation are dropped.
double kde(std::span<const double> points, std::size_t d, std::span<const double> period,
           double h, std::span<const double> x, double truncation = 40.0);

double example1_potential(double x);
double mixture_density_example2(double x, double y);

// pi (rho0/pi)^exp(-t), renormalized with cell width dx.
std::vector<double> bde_interpolation(std::span<const double> rho0, std::span<const double> pi,
                                      double dx, double t);

// Mean and variance of a periodic density exp(-V) on [a, b) by the
// trapezoid rule on n intervals.
struct Moments {
  double mean;
  double variance;
};
Moments periodic_moments(const std::function<double(double)>& V, double a, double b,
                         std::size_t n);

// Plain Euler-Maruyama step for one particle with the same draw order as the
// sampler: one normal per axis, then wrap or reflect.
void ula_move(std::span<double> x, std::span<const double> grad, double dt, bdls::RngStream& rng);

double normal_cdf(double x, double mean, double sd);
// Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

std::vector<double> linspace(double a, double b, std::size_t n);

std::string read_file(const std::filesystem::path& p);

// Unnormalized posterior of the three-component mixture written as the
// product of prior and likelihood factors, evaluated in log space.
double bayes_log_posterior(std::span<const double> data, std::span<const double> x);

}  // namespace oracle
