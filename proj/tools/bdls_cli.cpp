#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bdls/experiment.hpp"

namespace {

struct Overrides {
  std::string out;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> snapshot_every;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--out", o.out, "Artifact directory (overrides [experiment] output)");
  cmd->add_option("--seeds", o.seeds, "Number of seeds per method")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "OpenMP threads (0 keeps the default)");
  cmd->add_option("--snapshot-every", o.snapshot_every, "Snapshot interval in iterations");
}

bdls::ExperimentSpec resolve(const std::string& path, const Overrides& o) {
  auto spec = bdls::load_config(path);
  if (!o.out.empty()) spec.output = o.out;
  if (o.seeds) spec.seed_count = *o.seeds;
  if (o.threads) spec.threads = *o.threads;
  if (o.snapshot_every) spec.sampler.snapshot_every = *o.snapshot_every;
  bdls::validate(spec);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bdls: birth-death accelerated Langevin sampler experiments"};
  app.set_version_flag("--version", std::string(BDLS_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string artifact_dir;
  Overrides run_overrides, validate_overrides;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config,--config", config, "Config file (INI)")->required();
  add_overrides(run, run_overrides);

  auto* list = app.add_subcommand("list-experiments", "Print the known experiment ids");

  auto* check = app.add_subcommand("validate", "Parse a config and print the resolved values");
  check->add_option("config,--config", config, "Config file (INI)")->required();
  add_overrides(check, validate_overrides);

  auto* rep = app.add_subcommand("report", "Print summary tables of an artifact directory");
  rep->add_option("dir", artifact_dir, "Artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (auto id : bdls::all_experiments())
        std::cout << bdls::to_string(id) << "\t" << bdls::describe(id) << "\n";
      return 0;
    }
    if (check->parsed()) {
      const auto spec = resolve(config, validate_overrides);
      std::cout << bdls::render_config(spec);
      return 0;
    }
    if (run->parsed()) {
      const auto spec = resolve(config, run_overrides);
      std::cerr << "running " << bdls::to_string(spec.id) << " into "
                << bdls::resolve_output(spec).string() << "\n";
      const auto summary = bdls::run_experiment(spec);
      for (const auto& f : summary.files) std::cout << (summary.output / f).string() << "\n";
      for (const auto& f : summary.failures)
        std::cerr << "cell " << f.cell << " failed: " << f.message << "\n";
      return summary.failures.empty() ? 0 : 3;
    }
    if (rep->parsed()) {
      bdls::report(artifact_dir, std::cout);
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const bdls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
