#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdls/ensemble.hpp"
#include "bdls/kde.hpp"
#include "bdls/rng.hpp"
#include "bdls/targets.hpp"

namespace bdls {

enum class StepperKind { ula, tamed_ula };

std::string to_string(StepperKind k);
StepperKind parse_stepper(const std::string& s);

struct SamplerConfig {
  std::size_t particles = 100;
  double dt = 0.03;
  std::size_t iterations = 0;
  double kernel_width = 0.05;
  std::uint64_t seed = 0;
  StepperKind stepper = StepperKind::ula;
  bool birth_death = true;
  // 0 records only the initial and final ensembles.
  std::size_t snapshot_every = 0;
  bool record_events = true;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Raw rates beta_i = log KDE(x_i) + V(x_i) and their centered version.
struct RateVector {
  std::vector<double> raw;
  std::vector<double> centered;
};

struct BirthDeathEvent {
  std::uint64_t iteration = 0;
  std::size_t killed = 0;
  std::size_t duplicated = 0;
  double rate = 0.0;  // centered rate of the particle whose clock fired
};

struct EventLog {
  std::vector<BirthDeathEvent> events;
  void write_csv(const std::filesystem::path& path) const;
};

class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, std::size_t particle)
      : std::runtime_error(what), particle_(particle) {}
  std::size_t particle() const { return particle_; }

 private:
  std::size_t particle_;
};

// Per-slot diffusion streams plus one stream for the birth-death sweep.
struct SamplerStreams {
  SamplerStreams(std::uint64_t seed, std::size_t particles);
  StreamBank diffusion;
  RngStream birth_death;
};

// x <- x + dt grad log pi(x) + sqrt(2 dt) xi, then projection into the domain.
// A proposal outside the target's support is rejected and x is kept.
// noise_scale multiplies xi (1 for the sampler; 0 gives the pure drift map).
void ula_step(Ensemble& ensemble, const TargetDensity& target, double dt, StreamBank& streams,
              double noise_scale = 1.0);

// Same with the drift dt g / (1 + dt |g|), whose norm is always below 1.
void tamed_ula_step(Ensemble& ensemble, const TargetDensity& target, double dt,
                    StreamBank& streams, double noise_scale = 1.0);

void tamed_drift(std::span<const double> grad, double dt, std::span<double> drift);

// Rates on a single frozen snapshot of all positions.
RateVector compute_rates(const Ensemble& ensemble, const TargetDensity& target,
                         const GaussianKernel& kernel);

// Sequential sweep over i in index order. Returns the number of events.
std::size_t birth_death_sweep(Ensemble& ensemble, const RateVector& rates, double dt,
                              RngStream& rng, EventLog* log = nullptr,
                              std::uint64_t iteration = 0);

struct IterationReport {
  std::size_t events = 0;
  RateVector rates;  // empty when birth-death is disabled
};

// One diffusion step for every particle, rates on the moved snapshot, then
// the birth-death sweep.
IterationReport bdls_iteration(Ensemble& ensemble, const TargetDensity& target,
                               const GaussianKernel& kernel, const SamplerConfig& config,
                               SamplerStreams& streams, EventLog* log = nullptr,
                               std::uint64_t iteration = 0);

struct Snapshot {
  std::uint64_t iteration = 0;
  Ensemble ensemble;
};

struct SamplerResult {
  std::vector<Snapshot> trajectory;
  EventLog events;
  Ensemble final_ensemble;
};

// Called after every iteration j = 1..J.
using IterationObserver =
    std::function<void(std::uint64_t iteration, const Ensemble&, const IterationReport&)>;

SamplerResult run_sampler(const TargetDensity& target, const SamplerConfig& config,
                          Ensemble initial, const IterationObserver& observer = {});

}  // namespace bdls
