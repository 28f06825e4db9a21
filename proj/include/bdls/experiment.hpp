#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdls/dynamics.hpp"
#include "bdls/pde.hpp"

namespace bdls {

enum class ExperimentId {
  example1,
  example1_wide,
  example2,
  example3,
  double_well_rate,
  uniform_torus,
  bde_oracle
};

std::string to_string(ExperimentId id);
ExperimentId parse_experiment(const std::string& s);
const std::vector<ExperimentId>& all_experiments();
std::string describe(ExperimentId id);

// Parse or validation failure. line() is 0 when the problem is not tied to a
// particular line of the file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct StudyConfig {
  std::vector<std::size_t> particle_counts;  // particle-count sweep (example1)
  double init_mean = 0.0;                    // 1D Gaussian initial law
  double init_variance = 0.2;
  std::vector<double> epsilons;  // double-well barrier scales
  std::vector<double> sides;     // uniform-torus side lengths
  double occupancy_radius = 3.0;
  // Observables and occupancy are recorded every record_every iterations
  // (0: initial and final ensembles only).
  std::size_t record_every = 0;
  std::string dataset;  // example3 data file; empty generates a synthetic set
  std::size_t dataset_size = 200;
  std::uint64_t dataset_seed = 7;
  double occupied_threshold = 0.02;  // example3: a mode counts as occupied above this
  double fit_lo = 1e-10;             // KL window of exponential-rate fits
  double fit_hi = 1e-4;
  std::vector<double> check_times;  // bde-oracle comparison times
  std::size_t kl_stride = 1;        // kl_decay.csv keeps every kl_stride-th step
};

struct ExperimentSpec {
  ExperimentId id = ExperimentId::example1;
  std::uint64_t seed = 1;
  std::size_t seed_count = 1;
  std::vector<std::string> methods;  // subset of {ula, bdls}
  std::filesystem::path output;      // empty: $BDLS_OUTPUT_ROOT/<id> or results/<id>
  std::size_t threads = 0;           // 0 keeps the OpenMP default
  SamplerConfig sampler;
  PdeConfig pde;
  std::vector<Dynamics> dynamics;  // PDE dynamics to march
  StudyConfig study;
};

ExperimentSpec default_spec(ExperimentId id);

// INI text with [experiment], [sampler], [pde] and [study] sections. The
// [run] section written into manifests is accepted and ignored.
ExperimentSpec load_config(const std::filesystem::path& path);
ExperimentSpec parse_config(std::istream& in, const std::string& source = "<config>");

// Throws ConfigError naming the offending field.
void validate(const ExperimentSpec& spec);

// Every resolved field as INI text. Parsing the text back yields the same spec.
std::string render_config(const ExperimentSpec& spec);

std::filesystem::path resolve_output(const ExperimentSpec& spec);

struct CellFailure {
  std::string cell;
  std::string message;
};

struct RunSummary {
  std::filesystem::path output;
  std::vector<std::string> files;
  std::vector<CellFailure> failures;
};

// Runs every (method, seed) cell of the experiment and writes CSV artifacts
// plus manifest.ini into resolve_output(spec). A failing cell is recorded in
// the manifest and does not stop the others.
RunSummary run_experiment(const ExperimentSpec& spec);

// Summary tables of an artifact directory.
void report(const std::filesystem::path& dir, std::ostream& os);

}  // namespace bdls
