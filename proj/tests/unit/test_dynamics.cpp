#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/oracles.hpp"
#include "bdls/dynamics.hpp"
#include "bdls/metrics.hpp"

using namespace bdls;

namespace {

Ensemble example1_initial(std::size_t n, std::uint64_t seed) {
  TorusMultimodal1D t;
  RngStream rng(seed, 99);
  const std::vector<double> mean{0.0}, var{0.2};
  return sample_gaussian(t.geometry(), mean, var, n, rng);
}

// Local maxima of exp(-V) on a fine grid of the example 1 torus.
std::vector<std::vector<double>> example1_modes() {
  const double a = -2 * std::numbers::pi, p = 4 * std::numbers::pi;
  const std::size_t n = 20000;
  std::vector<std::vector<double>> modes;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a + p * i / n;
    const double l = a + p * ((i + n - 1) % n) / n, r = a + p * ((i + 1) % n) / n;
    const double v = oracle::example1_potential(x);
    if (v < oracle::example1_potential(l) && v < oracle::example1_potential(r)) modes.push_back({x});
  }
  return modes;
}

}  // namespace

TEST_CASE("zero drift and zero noise leave particles in place") {
  UniformTorus t(2, 5.0);
  Ensemble e(t.geometry(), std::vector<double>{0.5, 1.5, 4.9, 0.1, 2.0, 2.0});
  const auto before = e;
  StreamBank streams(1, e.size());
  ula_step(e, t, 0.1, streams, 0.0);
  CHECK(e == before);
  tamed_ula_step(e, t, 0.1, streams, 0.0);
  CHECK(e == before);
}

TEST_CASE("one ula step matches a hand computed update") {
  TorusMultimodal1D t;
  Ensemble e(t.geometry(), std::vector<double>{0.7});
  StreamBank streams(2024, 1);
  ula_step(e, t, 0.03, streams);

  RngStream rng(2024, 0);
  std::vector<double> x{0.7};
  const std::vector<double> g{5 * std::sin(1.4) - 0.5 * std::cos(0.7)};
  oracle::ula_move(x, g, 0.03, rng);
  CHECK(e.at(0, 0) == doctest::Approx(x[0]).epsilon(1e-15));
  CHECK(e.at(0, 0) == doctest::Approx(1.3599861336587327).epsilon(1e-14));
}

TEST_CASE("free diffusion variance grows like 2t") {
  UniformTorus t(1, 1e6);
  const std::size_t n = 10000;
  Ensemble e(t.geometry(), std::vector<double>(n, 5e5));
  StreamBank streams(77, n);
  for (int s = 0; s < 100; ++s) ula_step(e, t, 0.01, streams);
  double m = 0.0, v = 0.0;
  for (std::size_t i = 0; i < n; ++i) m += e.at(i, 0) - 5e5;
  m /= n;
  for (std::size_t i = 0; i < n; ++i) v += (e.at(i, 0) - 5e5 - m) * (e.at(i, 0) - 5e5 - m);
  v /= n;
  CHECK(std::abs(v - 2.0) < 0.1);
}

TEST_CASE("tamed drift") {
  std::vector<double> d(1);
  tamed_drift(std::vector<double>{0.0}, 0.01, d);
  CHECK(d[0] == 0.0);
  tamed_drift(std::vector<double>{1000.0}, 0.01, d);
  CHECK(d[0] == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
  std::vector<double> d3(3);
  tamed_drift(std::vector<double>{3e8, -4e8, 0.0}, 1.0, d3);
  CHECK(std::hypot(d3[0], d3[1], d3[2]) < 1.0);
}

TEST_CASE("negative precision proposals are reflected back") {
  BayesGmmPosterior post(generate_synthetic_dataset(example3_true_params(), 200, 7));
  std::vector<double> x{0.2, 0.6, -5, 1, 6, -0.3, 1, 1, -0.1};
  post.geometry().project(x);
  CHECK(x[BayesGmmPosterior::lambda1] == doctest::Approx(0.3));
  CHECK(x[BayesGmmPosterior::beta] == doctest::Approx(0.1));
  std::vector<double> w{1.2, -0.05, 0, 0, 0, 1, 1, 1, 1};
  post.geometry().project(w);
  CHECK(w[0] == doctest::Approx(0.8));
  CHECK(w[1] == doctest::Approx(0.05));
}

TEST_CASE("bayes posterior runs stay in the box and in the support") {
  BayesGmmPosterior post(generate_synthetic_dataset(example3_true_params(), 200, 7));
  SamplerConfig c;
  c.particles = 20;
  c.dt = 1e-3;
  c.iterations = 200;
  c.kernel_width = 1.1;
  c.stepper = StepperKind::tamed_ula;
  c.seed = 5;
  std::vector<double> pos;
  for (int i = 0; i < 20; ++i) {
    const double w1 = 0.45 + 0.001 * i;
    pos.insert(pos.end(), {w1, 0.5, 3.5, 4.0, 4.5, 1.0, 1.0, 1.0, 1.0});
  }
  const auto r = run_sampler(post, c, Ensemble(post.geometry(), pos));
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(post.in_support(r.final_ensemble.particle(i)));
    CHECK(post.geometry().contains(r.final_ensemble.particle(i)));
  }
}

TEST_CASE("non-finite gradients name the particle") {
  BayesGmmPosterior post(generate_synthetic_dataset(example3_true_params(), 50, 7));
  std::vector<double> pos;
  for (int i = 0; i < 4; ++i) pos.insert(pos.end(), {0.3, 0.3, 0, 1, 2, 1, 1, 1, 1});
  pos[2 * 9 + BayesGmmPosterior::lambda3] = 0.0;
  Ensemble e(post.geometry(), pos);
  StreamBank streams(1, 4);
  try {
    ula_step(e, post, 0.01, streams);
    FAIL("expected a step error");
  } catch (const StepError& err) {
    CHECK(err.particle() == 2);
  }
}

TEST_CASE("rates on a single snapshot") {
  TorusMultimodal1D t;
  GaussianKernel k(0.5, 1);
  Ensemble one(t.geometry(), std::vector<double>{0.4});
  const auto r1 = compute_rates(one, t, k);
  CHECK(r1.centered == std::vector<double>{0.0});

  const std::vector<double> pts{-1.0, 0.0, 1.0};
  Ensemble e(t.geometry(), pts);
  const auto r = compute_rates(e, t, k);
  const std::vector<double> period{4 * std::numbers::pi};
  double mean = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<double> x{pts[i]};
    const double raw = std::log(oracle::kde(pts, 1, period, 0.5, x)) + oracle::example1_potential(pts[i]);
    CHECK(r.raw[i] == doctest::Approx(raw).epsilon(1e-13));
    mean += r.raw[i] / 3;
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.centered[i] == r.raw[i] - mean);
}

TEST_CASE("centred rates sum to zero") {
  TorusMultimodal1D t;
  GaussianKernel k(0.05, 1);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto e = example1_initial(200, s);
    const auto r = compute_rates(e, t, k);
    double sum = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      sum += r.centered[i];
      peak = std::max(peak, std::abs(r.raw[i]));
    }
    CHECK(std::abs(sum) <= 1e-10 * 200 * peak);
  }
}

TEST_CASE("zero rates produce no events") {
  TorusMultimodal1D t;
  auto e = example1_initial(50, 1);
  const auto before = e;
  RateVector r{std::vector<double>(50, 0.3), std::vector<double>(50, 0.0)};
  RngStream rng(1, 5);
  EventLog log;
  CHECK(birth_death_sweep(e, r, 0.1, rng, &log) == 0);
  CHECK(log.events.empty());
  CHECK(e == before);
}

TEST_CASE("a certain kill copies the partner") {
  const auto g = DomainGeometry::euclidean(1);
  RateVector r{{20.0, -20.0}, {20.0, -20.0}};
  std::size_t hits = 0;
  const std::size_t trials = 1000000;
  RngStream rng(8, 1);
  for (std::size_t k = 0; k < trials; ++k) {
    Ensemble e(g, std::vector<double>{1.0, 2.0});
    birth_death_sweep(e, r, 1.0, rng);
    hits += e.at(0, 0) == 2.0 ? 1 : 0;
    REQUIRE(e.size() == 2);
  }
  CHECK(static_cast<double>(hits) / trials >= 0.999999);
}

TEST_CASE("event frequency follows one minus exp of the rate") {
  const auto g = DomainGeometry::euclidean(1);
  const double b = 0.7, dt = 0.5;
  RateVector r{{b, 0.0}, {b, 0.0}};
  std::size_t hits = 0;
  const std::size_t trials = 200000;
  RngStream rng(9, 1);
  for (std::size_t k = 0; k < trials; ++k) {
    Ensemble e(g, std::vector<double>{1.0, 2.0});
    hits += birth_death_sweep(e, r, dt, rng);
  }
  const double p = 1 - std::exp(-b * dt);
  CHECK(std::abs(static_cast<double>(hits) / trials - p) < 4 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("events pair one kill with one duplicate and keep N") {
  TorusMultimodal1D t;
  SamplerConfig c;
  c.iterations = 300;
  c.seed = 3;
  const auto r = run_sampler(t, c, example1_initial(100, 3));
  CHECK_FALSE(r.events.events.empty());
  for (const auto& ev : r.events.events) {
    CHECK(ev.killed != ev.duplicated);
    CHECK(ev.killed < 100);
    CHECK(ev.duplicated < 100);
    CHECK(ev.rate != 0.0);
  }
  CHECK(r.final_ensemble.size() == 100);
  CHECK(r.final_ensemble.all_in_domain());
}

TEST_CASE("disabling birth-death reduces to parallel ULA") {
  TorusMultimodal1D t;
  SamplerConfig c;
  c.particles = 64;
  c.birth_death = false;
  c.seed = 12;
  c.iterations = 0;
  auto a = example1_initial(64, 2);
  auto b = a;
  SamplerStreams sa(12, 64);
  StreamBank sb(12, 64);
  bdls_iteration(a, t, GaussianKernel(0.05, 1), c, sa);
  ula_step(b, t, c.dt, sb);
  CHECK(a == b);

  c.iterations = 50;
  const auto init = example1_initial(64, 4);
  const auto run = run_sampler(t, c, init);
  auto ref = init;
  StreamBank streams(12, 64);
  std::vector<double> g(1);
  for (int j = 0; j < 50; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      auto x = ref.particle(i);
      const double v = x[0];
      g[0] = 5 * std::sin(2 * v) - 0.5 * std::cos(v);
      oracle::ula_move(x, g, c.dt, streams[i]);
      ref.geometry().project(x);
    }
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(run.final_ensemble.at(i, 0) == doctest::Approx(ref.at(i, 0)).epsilon(1e-12));
}

TEST_CASE("run_sampler bookkeeping") {
  TorusMultimodal1D t;
  SamplerConfig c;
  c.iterations = 0;
  const auto init = example1_initial(100, 1);
  const auto r0 = run_sampler(t, c, init);
  CHECK(r0.final_ensemble == init);
  CHECK(r0.trajectory.size() == 1);

  c.iterations = 120;
  c.snapshot_every = 50;
  c.seed = 44;
  const auto a = run_sampler(t, c, init);
  const auto b = run_sampler(t, c, init);
  REQUIRE(a.trajectory.size() == 4);
  CHECK(a.trajectory[1].iteration == 50);
  CHECK(a.trajectory[3].iteration == 120);
  for (std::size_t s = 0; s < a.trajectory.size(); ++s)
    CHECK(a.trajectory[s].ensemble == b.trajectory[s].ensemble);
  CHECK(a.events.events.size() == b.events.events.size());

  c.particles = 50;
  CHECK_THROWS(run_sampler(t, c, init));
}

TEST_CASE("sampler config validation") {
  SamplerConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = -0.1;
  CHECK_THROWS(c.validate());
  c.dt = 0.1;
  c.particles = 1;
  CHECK_THROWS(c.validate());
  c.birth_death = false;
  CHECK_NOTHROW(c.validate());
  c.birth_death = true;
  c.particles = 10;
  c.kernel_width = 0.0;
  CHECK_THROWS(c.validate());
  CHECK(parse_stepper("tamed-ula") == StepperKind::tamed_ula);
  CHECK_THROWS(parse_stepper("mala"));
}

TEST_CASE("example 1 run reaches every mode") {
  TorusMultimodal1D t;
  const auto modes = example1_modes();
  REQUIRE(modes.size() == 4);
  SamplerConfig c;
  c.iterations = 1000;
  c.seed = 6;
  const auto init = example1_initial(100, 6);
  const auto before = mode_occupancy(init, modes, std::numbers::pi / 2);
  std::size_t empty_before = 0;
  for (double f : before.fractions) empty_before += f == 0.0 ? 1 : 0;
  CHECK(empty_before >= 2);
  const auto r = run_sampler(t, c, init);
  const auto occ = mode_occupancy(r.final_ensemble, modes, std::numbers::pi / 2);
  for (double f : occ.fractions) CHECK(f > 0.0);
}

TEST_CASE("no systematic transport at equilibrium") {
  const auto mix = example2_mixture();
  auto e = exact_sample(mix, 10000, 31);
  SamplerConfig c;
  c.particles = 10000;
  c.dt = 1e-3;
  c.kernel_width = 0.1;
  c.seed = 31;
  SamplerStreams streams(31, 10000);
  const GaussianKernel k(0.1, 2);
  std::vector<double> counts;
  double flux = 0.0;
  for (std::uint64_t j = 1; j <= 10; ++j) {
    EventLog log;
    const auto rep = bdls_iteration(e, mix, k, c, streams, &log, j);
    double s = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < 10000; ++i) {
      s += rep.rates.centered[i];
      peak = std::max(peak, std::abs(rep.rates.raw[i]));
    }
    CHECK(std::abs(s) <= 1e-10 * 10000 * peak);
    counts.push_back(static_cast<double>(rep.events));
    for (const auto& ev : log.events) {
      // Signed flux into the upper half plane y > 5.
      const bool dup_up = e.at(ev.killed, 1) > 5;
      flux += dup_up ? 1 : -1;
    }
  }
  double mean = 0.0;
  for (double v : counts) mean += v / counts.size();
  CHECK(mean < 0.05 * 10000);
  for (double v : counts) CHECK(std::abs(v - mean) < 0.5 * mean + 20);
  double total = 0.0;
  for (double v : counts) total += v;
  CHECK(std::abs(flux) < 4 * std::sqrt(total) + 1);
}

TEST_CASE("seeded streams are reproducible") {
  RngStream a(5, 3), b(5, 3), c(5, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differ |= x != c.normal();
  }
  CHECK(differ);
  CHECK(derive_seed(1, "bdls", 0) == derive_seed(1, "bdls", 0));
  CHECK(derive_seed(1, "bdls", 0) != derive_seed(1, "ula", 0));
  CHECK(derive_seed(1, "bdls", 0) != derive_seed(1, "bdls", 1));
  CHECK(derive_seed(1, "bdls", 0) != derive_seed(2, "bdls", 0));
  for (int i = 0; i < 1000; ++i) CHECK(a.index(7) < 7);
}
