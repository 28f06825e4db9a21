#include "bdls/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bdls {

namespace {

std::vector<double> log_pi_at_centers(const TargetDensity& target, const Grid1D& grid) {
  if (target.dim() != 1) throw std::invalid_argument("pde: target must be one-dimensional");
  std::vector<double> l(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.center(i);
    l[i] = eval_log_pi(target, std::span<const double>(&x, 1));
  }
  return l;
}

void check_grid(const TargetDensity& target, const Grid1D& grid) {
  const auto& g = target.geometry();
  if (target.dim() != 1 || g.kind() != DomainGeometry::Kind::torus)
    throw std::invalid_argument("pde: target must live on a one-dimensional torus");
  const double tol = 1e-12 * std::max(1.0, std::abs(grid.b - grid.a));
  if (std::abs(g.lower()[0] - grid.a) > tol || std::abs(g.upper()[0] - grid.b) > tol)
    throw std::invalid_argument("pde: grid interval does not match the target's torus");
  if (grid.n < 16) throw std::invalid_argument("pde: need at least 16 cells");
}

void check_same_grid(const GridDensity& p, const GridDensity& q) {
  if (!(p.grid == q.grid) || p.values.size() != q.values.size())
    throw std::invalid_argument("pde: densities live on different grids");
}

}  // namespace

Grid1D grid_for(const TargetDensity& target, std::size_t cells) {
  const auto& g = target.geometry();
  if (target.dim() != 1 || g.kind() != DomainGeometry::Kind::torus)
    throw std::invalid_argument("pde: target must live on a one-dimensional torus");
  return {g.lower()[0], g.upper()[0], cells};
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx();
}

void GridDensity::check_nonnegative() const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw PositivityError("density is negative or non-finite at cell " + std::to_string(i), i);
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw std::runtime_error("density has no mass to normalize");
  for (auto& v : values) v /= m;
}

GridDensity discretize_target(const TargetDensity& target, const Grid1D& grid) {
  check_grid(target, grid);
  const auto l = log_pi_at_centers(target, grid);
  const double mx = *std::max_element(l.begin(), l.end());
  GridDensity d{grid, std::vector<double>(grid.n)};
  for (std::size_t i = 0; i < grid.n; ++i) d.values[i] = std::exp(l[i] - mx);
  if (!(d.mass() > 0.0)) throw std::runtime_error("discretize_target: density vanishes on grid");
  d.normalize();
  return d;
}

GridDensity gaussian_density(const Grid1D& grid, double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_density: variance must be positive");
  const double period = grid.b - grid.a;
  const double sd = std::sqrt(variance);
  const int images = static_cast<int>(std::ceil(10.0 * sd / period)) + 1;
  GridDensity d{grid, std::vector<double>(grid.n, 0.0)};
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.center(i);
    double s = 0.0;
    for (int k = -images; k <= images; ++k) {
      const double z = (x - mean + k * period) / sd;
      s += std::exp(-0.5 * z * z);
    }
    d.values[i] = s;
  }
  d.normalize();
  return d;
}

GridDensity restrict_density(const GridDensity& sigma, double lo, double hi) {
  GridDensity d = sigma;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double x = d.grid.center(i);
    if (x < lo || x > hi) d.values[i] = 0.0;
  }
  d.normalize();
  return d;
}

double kl_divergence_grid(const GridDensity& rho, const GridDensity& sigma) {
  check_same_grid(rho, sigma);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double p = rho.values[i];
    if (p == 0.0) continue;
    const double q = sigma.values[i];
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    s += p * std::log(p / q);
  }
  return s * rho.grid.dx();
}

double sup_distance(const GridDensity& p, const GridDensity& q) {
  check_same_grid(p, q);
  double m = 0.0;
  for (std::size_t i = 0; i < p.values.size(); ++i)
    m = std::max(m, std::abs(p.values[i] - q.values[i]));
  return m;
}

FokkerPlanckStepper::FokkerPlanckStepper(const TargetDensity& target, const Grid1D& grid,
                                         double tau)
    : grid_(grid), tau_(tau) {
  check_grid(target, grid);
  if (!(tau > 0.0)) throw std::invalid_argument("fpe: tau must be positive");
  const std::size_t n = grid.n;
  const auto l = log_pi_at_centers(target, grid);
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  // up[i]: rate i -> i+1, down[i]: rate i -> i-1
  std::vector<double> up(n), down(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t next = (i + 1) % n;
    const double half = 0.5 * (l[next] - l[i]);
    up[i] = std::exp(half) * inv_dx2;
    down[next] = std::exp(-half) * inv_dx2;
  }
  std::vector<double> lower(n), diag(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    diag[i] = 1.0 + tau * (up[i] + down[i]);
    lower[i] = -tau * up[prev];
    upper[i] = -tau * down[next];
  }
  system_ = std::make_unique<CyclicTridiagonal>(std::move(lower), std::move(diag),
                                                std::move(upper));
}

void FokkerPlanckStepper::step(GridDensity& rho) const {
  if (!(rho.grid == grid_)) throw std::invalid_argument("fpe: density grid mismatch");
  std::vector<double> next(grid_.n);
  system_->solve(rho.values, next);
  rho.values = std::move(next);
  rho.check_nonnegative();
  rho.normalize();
}

BirthDeathStepper::BirthDeathStepper(const TargetDensity& target, const Grid1D& grid, double tau)
    : grid_(grid), decay_(std::exp(-tau)) {
  if (!(tau > 0.0)) throw std::invalid_argument("bde: tau must be positive");
  const auto pi = discretize_target(target, grid);
  log_pi_.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) log_pi_[i] = std::log(pi.values[i]);
}

void BirthDeathStepper::step(GridDensity& rho) const {
  if (!(rho.grid == grid_)) throw std::invalid_argument("bde: density grid mismatch");
  const std::size_t n = grid_.n;
  std::vector<double> u(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rho.values[i];
    if (!(v > 0.0) || !std::isfinite(v))
      throw PositivityError("bde: density must be strictly positive, cell " + std::to_string(i) +
                                " holds " + std::to_string(v),
                            i);
    u[i] = log_pi_[i] + decay_ * (std::log(v) - log_pi_[i]);
    mx = std::max(mx, u[i]);
  }
  for (std::size_t i = 0; i < n; ++i) rho.values[i] = std::exp(u[i] - mx);
  rho.normalize();
  for (std::size_t i = 0; i < n; ++i)
    if (!(rho.values[i] > 0.0))
      throw PositivityError("bde: density underflowed at cell " + std::to_string(i), i);
}

GridDensity fpe_step(const GridDensity& rho, const TargetDensity& target, double tau) {
  GridDensity out = rho;
  FokkerPlanckStepper(target, rho.grid, tau).step(out);
  return out;
}

GridDensity bde_substep(const GridDensity& rho, const TargetDensity& target, double tau) {
  GridDensity out = rho;
  BirthDeathStepper(target, rho.grid, tau).step(out);
  return out;
}

GridDensity bdl_fpe_step(const GridDensity& rho, const TargetDensity& target, double tau) {
  return bde_substep(fpe_step(rho, target, tau), target, tau);
}

GridDensity bde_closed_form(const GridDensity& rho0, const GridDensity& pi, double t) {
  check_same_grid(rho0, pi);
  const double e = std::exp(-t);
  GridDensity d = rho0;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    d.values[i] = pi.values[i] * std::pow(rho0.values[i] / pi.values[i], e);
  d.normalize();
  return d;
}

std::string to_string(Dynamics d) {
  switch (d) {
    case Dynamics::fpe: return "fpe";
    case Dynamics::bde: return "bde";
    case Dynamics::bdl_fpe: return "bdl-fpe";
  }
  return "?";
}

Dynamics parse_dynamics(const std::string& s) {
  if (s == "fpe") return Dynamics::fpe;
  if (s == "bde") return Dynamics::bde;
  if (s == "bdl-fpe") return Dynamics::bdl_fpe;
  throw std::invalid_argument("unknown dynamics '" + s + "' (expected fpe, bde or bdl-fpe)");
}

void PdeConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("pde config: tau must be positive");
  if (cells < 16) throw std::invalid_argument("pde config: cells must be at least 16");
  if (!(final_time >= 0.0)) throw std::invalid_argument("pde config: final_time must be >= 0");
  if (!(fpe_warmup >= 0.0)) throw std::invalid_argument("pde config: fpe_warmup must be >= 0");
}

PdeRun run_pde(const PdeConfig& config, const TargetDensity& target, const GridDensity& rho0) {
  config.validate();
  const Grid1D grid = grid_for(target, config.cells);
  if (!(rho0.grid == grid)) throw std::invalid_argument("run_pde: initial density grid mismatch");
  rho0.check_nonnegative();

  const GridDensity pi = discretize_target(target, grid);
  const FokkerPlanckStepper fpe(target, grid, config.tau);
  const BirthDeathStepper bde(target, grid, config.tau);

  const auto steps = static_cast<std::size_t>(std::llround(config.final_time / config.tau));
  const auto warm = static_cast<std::size_t>(std::llround(config.fpe_warmup / config.tau));

  PdeRun run;
  GridDensity rho = rho0;
  std::vector<double> pending = config.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snap = 0;
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * config.tau;
    run.times.push_back(t);
    run.kl.push_back(kl_divergence_grid(rho, pi));
    while (next_snap < pending.size() && pending[next_snap] <= t + 0.5 * config.tau) {
      run.snapshots.push_back(rho);
      run.snapshot_times.push_back(t);
      ++next_snap;
    }
  };
  record(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (k <= warm) {
      fpe.step(rho);
    } else {
      switch (config.dynamics) {
        case Dynamics::fpe: fpe.step(rho); break;
        case Dynamics::bde: bde.step(rho); break;
        case Dynamics::bdl_fpe:
          fpe.step(rho);
          bde.step(rho);
          break;
      }
    }
    record(k);
  }
  run.final_density = std::move(rho);
  return run;
}

}  // namespace bdls
