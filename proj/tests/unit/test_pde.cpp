#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "../support/oracles.hpp"
#include "bdls/pde.hpp"
#include "bdls/tridiagonal.hpp"

using namespace bdls;

namespace {

std::size_t local_maxima(const GridDensity& d) {
  const std::size_t n = d.values.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (d.values[i] > d.values[(i + n - 1) % n] && d.values[i] > d.values[(i + 1) % n]) ++count;
  return count;
}

// A maximum shared by two neighbouring cells is reported once, at the left cell.
std::vector<double> maxima_locations(const GridDensity& d) {
  const std::size_t n = d.values.size();
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    if (d.values[i] > d.values[(i + n - 1) % n] && d.values[i] >= d.values[(i + 1) % n])
      out.push_back(d.grid.center(i));
  return out;
}

}  // namespace

TEST_CASE("discretized targets") {
  UniformTorus u(1, 8.0);
  const auto du = discretize_target(u, grid_for(u, 64));
  for (double v : du.values) CHECK(v == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  CHECK(du.mass() == doctest::Approx(1.0).epsilon(1e-14));

  TorusMultimodal1D t;
  CHECK(local_maxima(discretize_target(t, grid_for(t, 500))) == 4);

  DoubleWellTorus1D dw(0.25);
  const auto m = maxima_locations(discretize_target(dw, grid_for(dw, 500)));
  REQUIRE(m.size() == 2);
  CHECK(std::abs(m[0] + 0.5) < 0.003);
  CHECK(std::abs(m[1] - 0.5) < 0.003);

  CHECK_THROWS(grid_for(example2_mixture(), 100));
}

TEST_CASE("fpe keeps the discretized target fixed") {
  std::vector<std::unique_ptr<TargetDensity>> targets;
  targets.push_back(std::make_unique<TorusMultimodal1D>());
  targets.push_back(std::make_unique<DoubleWellTorus1D>(0.125));
  targets.push_back(std::make_unique<UniformTorus>(1, 4.0));
  for (const auto& t : targets) {
    const auto pi = discretize_target(*t, grid_for(*t, 500));
    CHECK(sup_distance(fpe_step(pi, *t, 5e-3), pi) < 1e-8);
    CHECK(sup_distance(bde_substep(pi, *t, 5e-3), pi) < 1e-12);
    CHECK(sup_distance(bdl_fpe_step(pi, *t, 5e-3), pi) < 1e-8);
  }
}

TEST_CASE("fpe conserves mass and positivity") {
  UniformTorus u(1, 4.0);
  const auto grid = grid_for(u, 200);
  auto rho = gaussian_density(grid, 1.3, 0.05);
  FokkerPlanckStepper fpe(u, grid, 5e-3);
  for (int k = 0; k < 100; ++k) {
    fpe.step(rho);
    CHECK(std::abs(rho.mass() - 1.0) < 1e-12);
    for (double v : rho.values) REQUIRE(v >= 0.0);
  }
}

TEST_CASE("heat equation relaxes to uniform") {
  UniformTorus u(1, 8.0);
  const auto grid = grid_for(u, 500);
  GridDensity rho = gaussian_density(grid, 2.0, 0.1);
  PdeConfig c;
  c.dynamics = Dynamics::fpe;
  c.final_time = 50.0;
  const auto run = run_pde(c, u, rho);
  double sup = 0.0;
  for (double v : run.final_density.values) sup = std::max(sup, std::abs(v - 1.0 / 8.0));
  CHECK(sup < 1e-6);
}

TEST_CASE("bde substep") {
  TorusMultimodal1D t;
  const auto grid = grid_for(t, 500);
  const auto pi = discretize_target(t, grid);
  auto scaled = pi;
  for (auto& v : scaled.values) v *= 3.0;
  CHECK(sup_distance(bde_substep(scaled, t, 0.37), pi) < 1e-14);

  auto zero = gaussian_density(grid, 0.0, 0.2);
  zero.values[17] = 0.0;
  try {
    bde_substep(zero, t, 5e-3);
    FAIL("expected a positivity error");
  } catch (const PositivityError& e) {
    CHECK(e.cell() == 17);
  }
}

TEST_CASE("bde substeps follow the closed-form interpolation") {
  TorusMultimodal1D t;
  const auto grid = grid_for(t, 500);
  const auto pi = discretize_target(t, grid);
  auto rho = gaussian_density(grid, 1.0, 2.0);
  const auto rho0 = rho;
  BirthDeathStepper bde(t, grid, 5e-3);
  for (int k = 1; k <= 400; ++k) {
    bde.step(rho);
    if (k % 100 == 0) {
      const auto ref = oracle::bde_interpolation(rho0.values, pi.values, grid.dx(), k * 5e-3);
      double sup = 0.0;
      for (std::size_t i = 0; i < ref.size(); ++i) sup = std::max(sup, std::abs(ref[i] - rho.values[i]));
      CHECK(sup <= 1e-9);
      CHECK(sup_distance(bde_closed_form(rho0, pi, k * 5e-3), rho) <= 1e-9);
    }
  }
}

TEST_CASE("kl divergence on the grid") {
  UniformTorus u(1, 4.0);
  const auto grid = grid_for(u, 400);
  const auto pi = discretize_target(u, grid);
  CHECK(kl_divergence_grid(pi, pi) == 0.0);
  const auto half = restrict_density(pi, 0.0, 2.0);
  CHECK(kl_divergence_grid(half, pi) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::isinf(kl_divergence_grid(pi, half)));

  DoubleWellTorus1D dw(0.25);
  const auto g2 = grid_for(dw, 500);
  const auto pdw = discretize_target(dw, g2);
  const auto left = restrict_density(pdw, -1.0, 0.0);
  CHECK(kl_divergence_grid(left, pdw) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("kl is non-increasing and bde converges") {
  TorusMultimodal1D t;
  const auto grid = grid_for(t, 500);
  const auto rho0 = gaussian_density(grid, 0.0, 0.2);
  for (auto d : {Dynamics::fpe, Dynamics::bde, Dynamics::bdl_fpe}) {
    PdeConfig c;
    c.dynamics = d;
    c.final_time = 10.0;
    const auto run = run_pde(c, t, rho0);
    for (std::size_t k = 1; k < run.kl.size(); ++k) CHECK(run.kl[k] <= run.kl[k - 1] + 1e-8);
    for (double v : run.final_density.values) CHECK(v > 0.0);
    CHECK(std::abs(run.final_density.mass() - 1.0) < 1e-9);
    if (d == Dynamics::bde) CHECK(run.kl.back() < 1e-3 * run.kl.front());
  }
}

TEST_CASE("splitting order changes a step by O(tau^2)") {
  TorusMultimodal1D t;
  const auto grid = grid_for(t, 500);
  const auto rho0 = gaussian_density(grid, 0.0, 0.5);
  std::vector<double> gaps;
  for (double tau : {0.02, 0.01, 0.005}) {
    const auto a = bdl_fpe_step(rho0, t, tau);
    const auto b = fpe_step(bde_substep(rho0, t, tau), t, tau);
    gaps.push_back(sup_distance(a, b));
  }
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    const double ratio = gaps[k - 1] / gaps[k];
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("refining grid and step converges") {
  TorusMultimodal1D t;
  std::vector<double> kl;
  for (std::size_t n : {125u, 250u, 500u, 1000u}) {
    PdeConfig c;
    c.cells = n;
    c.tau = 5e-3 * 500.0 / static_cast<double>(n);
    c.final_time = 1.0;
    c.dynamics = Dynamics::bdl_fpe;
    const auto grid = grid_for(t, n);
    kl.push_back(run_pde(c, t, gaussian_density(grid, 0.0, 0.2)).kl.back());
  }
  for (std::size_t k = 2; k < kl.size(); ++k)
    CHECK(std::abs(kl[k] - kl[k - 1]) < std::abs(kl[k - 1] - kl[k - 2]));
}

TEST_CASE("run_pde records snapshots and validates") {
  TorusMultimodal1D t;
  const auto grid = grid_for(t, 500);
  PdeConfig c;
  c.final_time = 1.0;
  c.snapshot_times = {0.0, 0.5, 1.0};
  const auto run = run_pde(c, t, gaussian_density(grid, 0.0, 0.2));
  CHECK(run.times.size() == 201);
  REQUIRE(run.snapshot_times.size() == 3);
  CHECK(run.snapshot_times[1] == doctest::Approx(0.5));
  c.tau = 0.0;
  CHECK_THROWS(c.validate());
  c.tau = 5e-3;
  c.cells = 8;
  CHECK_THROWS(c.validate());
  CHECK(parse_dynamics("bdl-fpe") == Dynamics::bdl_fpe);
  CHECK_THROWS(parse_dynamics("sde"));
}

TEST_CASE("cyclic tridiagonal solve") {
  const std::size_t n = 9;
  std::vector<double> lo(n), di(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = -0.3 - 0.01 * i;
    up[i] = -0.4 + 0.02 * i;
    di[i] = 2.0 + 0.1 * i;
  }
  CyclicTridiagonal a(lo, di, up);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(1.0 + i);
  const auto b = a.multiply(x);
  // Dense product written out with the corner entries.
  for (std::size_t i = 0; i < n; ++i) {
    const double ref = di[i] * x[i] + lo[i] * x[(i + n - 1) % n] + up[i] * x[(i + 1) % n];
    CHECK(b[i] == doctest::Approx(ref).epsilon(1e-14));
  }
  const auto y = a.solve(b);
  for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-12));
}
