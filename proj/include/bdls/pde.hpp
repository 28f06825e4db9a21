#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdls/targets.hpp"
#include "bdls/tridiagonal.hpp"

namespace bdls {

// Uniform periodic partition of [a, b) into n cells; values live at cell
// centers a + (i + 1/2) dx.
struct Grid1D {
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 500;

  double dx() const { return (b - a) / static_cast<double>(n); }
  double center(std::size_t i) const { return a + (static_cast<double>(i) + 0.5) * dx(); }
  bool operator==(const Grid1D&) const = default;
};

// Grid covering the torus of a one-dimensional target.
Grid1D grid_for(const TargetDensity& target, std::size_t cells);

class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, std::size_t cell)
      : std::runtime_error(what), cell_(cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

struct GridDensity {
  Grid1D grid;
  std::vector<double> values;

  double mass() const;
  // Throws if any value is negative or non-finite.
  void check_nonnegative() const;
  void normalize();
};

// exp(log pi) at cell centers, renormalized to unit mass.
GridDensity discretize_target(const TargetDensity& target, const Grid1D& grid);

// Periodized N(mean, variance) sampled at cell centers, renormalized.
GridDensity gaussian_density(const Grid1D& grid, double mean, double variance);

// sigma restricted to [lo, hi] and renormalized; zero elsewhere.
GridDensity restrict_density(const GridDensity& sigma, double lo, double hi);

// sum rho_i log(rho_i / sigma_i) dx with 0 log 0 = 0; +inf if rho > 0 where
// sigma = 0.
double kl_divergence_grid(const GridDensity& rho, const GridDensity& sigma);

double sup_distance(const GridDensity& p, const GridDensity& q);

// Implicit Euler for d rho/dt = div(grad rho + rho grad V) in flux form.
// Edge (i, i+1) carries rates exp(+-(log pi_{i+1} - log pi_i)/2) / dx^2, a
// reversible jump process whose stationary law is the discretized target,
// so pi is an exact fixed point and mass is conserved.
class FokkerPlanckStepper {
 public:
  FokkerPlanckStepper(const TargetDensity& target, const Grid1D& grid, double tau);
  void step(GridDensity& rho) const;
  double tau() const { return tau_; }

 private:
  Grid1D grid_;
  double tau_;
  std::unique_ptr<CyclicTridiagonal> system_;
};

// Exact per-cell solution of d rho/dt = -rho (log rho - log pi) over tau,
// i.e. rho <- pi (rho/pi)^exp(-tau), followed by renormalization.
class BirthDeathStepper {
 public:
  BirthDeathStepper(const TargetDensity& target, const Grid1D& grid, double tau);
  void step(GridDensity& rho) const;

 private:
  Grid1D grid_;
  double decay_;
  std::vector<double> log_pi_;
};

// One-shot convenience forms.
GridDensity fpe_step(const GridDensity& rho, const TargetDensity& target, double tau);
GridDensity bde_substep(const GridDensity& rho, const TargetDensity& target, double tau);
GridDensity bdl_fpe_step(const GridDensity& rho, const TargetDensity& target, double tau);

// Closed form of the pure birth-death flow: pi (rho0/pi)^exp(-t), renormalized.
GridDensity bde_closed_form(const GridDensity& rho0, const GridDensity& pi, double t);

enum class Dynamics { fpe, bde, bdl_fpe };
std::string to_string(Dynamics d);
Dynamics parse_dynamics(const std::string& s);

struct PdeConfig {
  std::size_t cells = 500;
  double tau = 5e-3;
  double final_time = 10.0;
  Dynamics dynamics = Dynamics::bdl_fpe;
  // Plain Fokker-Planck steps are used for t < fpe_warmup.
  double fpe_warmup = 0.0;
  std::vector<double> snapshot_times;

  void validate() const;
};

struct PdeRun {
  std::vector<double> times;
  std::vector<double> kl;
  std::vector<GridDensity> snapshots;
  std::vector<double> snapshot_times;
  GridDensity final_density;
};

// Marches the chosen dynamics from rho0, recording KL(rho_t | pi) at every step.
PdeRun run_pde(const PdeConfig& config, const TargetDensity& target, const GridDensity& rho0);

}  // namespace bdls
