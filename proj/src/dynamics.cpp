#include "bdls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>

#include "bdls/csv.hpp"

namespace bdls {

namespace {

constexpr std::uint64_t kBirthDeathStream = 1ULL << 40;

enum class Drift { plain, tamed };

// Keeps the error from the lowest particle index so that failures are
// reported identically regardless of thread count.
class FirstError {
 public:
  void record(std::size_t particle, std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!error_ || particle < particle_) {
      particle_ = particle;
      error_ = std::move(e);
    }
  }
  void rethrow() const {
    if (!error_) return;
    try {
      std::rethrow_exception(error_);
    } catch (const std::exception& ex) {
      throw StepError("particle " + std::to_string(particle_) + ": " + ex.what(), particle_);
    }
  }

 private:
  std::mutex mu_;
  std::size_t particle_ = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error_;
};

void langevin_step(Ensemble& ensemble, const TargetDensity& target, double dt,
                   StreamBank& streams, double noise_scale, Drift drift) {
  if (!(dt > 0.0)) throw std::invalid_argument("langevin step: dt must be positive");
  if (streams.size() < ensemble.size())
    throw std::invalid_argument("langevin step: fewer streams than particles");
  const std::size_t d = ensemble.dim();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ensemble.size());
  const double noise = std::sqrt(2.0 * dt) * noise_scale;
  const auto& geometry = ensemble.geometry();
  FirstError failure;

#pragma omp parallel
  {
    std::vector<double> grad(d), step(d), previous(d);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      auto x = ensemble.particle(i);
      try {
        eval_grad_log_pi(target, x, grad);
      } catch (...) {
        failure.record(i, std::current_exception());
        continue;
      }
      if (drift == Drift::tamed) {
        tamed_drift(grad, dt, step);
      } else {
        for (std::size_t a = 0; a < d; ++a) step[a] = dt * grad[a];
      }
      auto& rng = streams[i];
      std::copy(x.begin(), x.end(), previous.begin());
      for (std::size_t a = 0; a < d; ++a) x[a] += step[a] + noise * rng.normal();
      geometry.project(x);
      if (!target.in_support(x)) std::copy(previous.begin(), previous.end(), x.begin());
    }
  }
  failure.rethrow();
}

}  // namespace

std::string to_string(StepperKind k) { return k == StepperKind::ula ? "ula" : "tamed-ula"; }

StepperKind parse_stepper(const std::string& s) {
  if (s == "ula") return StepperKind::ula;
  if (s == "tamed-ula") return StepperKind::tamed_ula;
  throw std::invalid_argument("unknown stepper '" + s + "' (expected ula or tamed-ula)");
}

void SamplerConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("sampler config: dt must be positive");
  if (particles == 0) throw std::invalid_argument("sampler config: particles must be positive");
  if (birth_death && particles < 2)
    throw std::invalid_argument("sampler config: particles must be at least 2 with birth-death");
  if (birth_death && (!(kernel_width > 0.0) || !std::isfinite(kernel_width)))
    throw std::invalid_argument("sampler config: kernel_width must be positive");
}

void EventLog::write_csv(const std::filesystem::path& path) const {
  CsvTable t;
  t.header = {"iteration", "killed", "duplicated", "rate"};
  for (const auto& e : events)
    t.add_row({std::to_string(e.iteration), std::to_string(e.killed),
               std::to_string(e.duplicated), format_real(e.rate)});
  t.write(path);
}

SamplerStreams::SamplerStreams(std::uint64_t seed, std::size_t particles)
    : diffusion(seed, particles, 0), birth_death(seed, kBirthDeathStream) {}

void ula_step(Ensemble& ensemble, const TargetDensity& target, double dt, StreamBank& streams,
              double noise_scale) {
  langevin_step(ensemble, target, dt, streams, noise_scale, Drift::plain);
}

void tamed_ula_step(Ensemble& ensemble, const TargetDensity& target, double dt,
                    StreamBank& streams, double noise_scale) {
  langevin_step(ensemble, target, dt, streams, noise_scale, Drift::tamed);
}

void tamed_drift(std::span<const double> grad, double dt, std::span<double> drift) {
  double norm2 = 0.0;
  for (double g : grad) norm2 += g * g;
  const double scale = dt / (1.0 + dt * std::sqrt(norm2));
  for (std::size_t a = 0; a < grad.size(); ++a) drift[a] = scale * grad[a];
}

RateVector compute_rates(const Ensemble& ensemble, const TargetDensity& target,
                         const GaussianKernel& kernel) {
  const std::size_t n = ensemble.size();
  const auto kde = kde_all_points(kernel, ensemble);
  RateVector r;
  r.raw.resize(n);
  r.centered.resize(n);
  FirstError failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      if (!(kde[i] > 0.0)) throw std::runtime_error("kernel density estimate underflowed to 0");
      r.raw[i] = std::log(kde[i]) - eval_log_pi(target, ensemble.particle(i));
    } catch (...) {
      failure.record(i, std::current_exception());
    }
  }
  failure.rethrow();
  double sum = 0.0;
  for (double b : r.raw) sum += b;
  const double mean = sum / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) r.centered[i] = r.raw[i] - mean;
  return r;
}

std::size_t birth_death_sweep(Ensemble& ensemble, const RateVector& rates, double dt,
                              RngStream& rng, EventLog* log, std::uint64_t iteration) {
  const std::size_t n = ensemble.size();
  if (n < 2) throw std::invalid_argument("birth-death sweep: needs at least two particles");
  if (rates.centered.size() != n)
    throw std::invalid_argument("birth-death sweep: rate vector size does not match ensemble");
  std::size_t events = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = rates.centered[i];
    if (b == 0.0) continue;
    const double p = -std::expm1(-std::abs(b) * dt);  // 1 - exp(-|b| dt)
    if (rng.uniform() >= p) continue;
    std::size_t other = rng.index(n - 1);
    if (other >= i) ++other;
    std::size_t killed, duplicated;
    if (b > 0.0) {
      killed = i;
      duplicated = other;
    } else {
      killed = other;
      duplicated = i;
    }
    ensemble.copy_particle(duplicated, killed);
    ++events;
    if (log) log->events.push_back({iteration, killed, duplicated, b});
  }
  return events;
}

IterationReport bdls_iteration(Ensemble& ensemble, const TargetDensity& target,
                               const GaussianKernel& kernel, const SamplerConfig& config,
                               SamplerStreams& streams, EventLog* log,
                               std::uint64_t iteration) {
  const std::size_t n = ensemble.size();
  if (config.stepper == StepperKind::tamed_ula)
    tamed_ula_step(ensemble, target, config.dt, streams.diffusion);
  else
    ula_step(ensemble, target, config.dt, streams.diffusion);

  IterationReport report;
  if (config.birth_death) {
    report.rates = compute_rates(ensemble, target, kernel);
    report.events = birth_death_sweep(ensemble, report.rates, config.dt, streams.birth_death,
                                      log, iteration);
  }
  if (ensemble.size() != n) throw std::logic_error("population size changed during iteration");
  ensemble.advance_generation();
  return report;
}

SamplerResult run_sampler(const TargetDensity& target, const SamplerConfig& config,
                          Ensemble initial, const IterationObserver& observer) {
  config.validate();
  if (initial.size() != config.particles)
    throw std::invalid_argument("run_sampler: initial ensemble has " +
                                std::to_string(initial.size()) + " particles, config expects " +
                                std::to_string(config.particles));
  if (initial.dim() != target.dim())
    throw std::invalid_argument("run_sampler: initial ensemble dimension mismatch");

  SamplerStreams streams(config.seed, config.particles);
  const GaussianKernel kernel(config.birth_death ? config.kernel_width : 1.0, target.dim());
  SamplerResult result{{}, {}, std::move(initial)};
  Ensemble& ens = result.final_ensemble;
  result.trajectory.push_back({0, ens});
  EventLog* log = config.record_events ? &result.events : nullptr;

  for (std::uint64_t j = 1; j <= config.iterations; ++j) {
    const auto report = bdls_iteration(ens, target, kernel, config, streams, log, j);
    if (observer) observer(j, ens, report);
    const bool last = j == config.iterations;
    if (last || (config.snapshot_every > 0 && j % config.snapshot_every == 0))
      result.trajectory.push_back({j, ens});
  }
  return result;
}

}  // namespace bdls
