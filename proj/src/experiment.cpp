#include "bdls/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <omp.h>

#include "bdls/csv.hpp"
#include "bdls/metrics.hpp"

namespace bdls {

namespace pt = boost::property_tree;

// ---------------------------------------------------------------------------
// Experiment ids

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::example1: return "example1";
    case ExperimentId::example1_wide: return "example1-wide";
    case ExperimentId::example2: return "example2";
    case ExperimentId::example3: return "example3";
    case ExperimentId::double_well_rate: return "double-well-rate";
    case ExperimentId::uniform_torus: return "uniform-torus";
    case ExperimentId::bde_oracle: return "bde-oracle";
  }
  return "?";
}

const std::vector<ExperimentId>& all_experiments() {
  static const std::vector<ExperimentId> ids{
      ExperimentId::example1,         ExperimentId::example1_wide, ExperimentId::example2,
      ExperimentId::example3,         ExperimentId::double_well_rate,
      ExperimentId::uniform_torus,    ExperimentId::bde_oracle};
  return ids;
}

ExperimentId parse_experiment(const std::string& s) {
  for (auto id : all_experiments())
    if (to_string(id) == s) return id;
  std::string known;
  for (auto id : all_experiments()) known += (known.empty() ? "" : ", ") + to_string(id);
  throw ConfigError("unknown experiment id '" + s + "' (known: " + known + ")");
}

std::string describe(ExperimentId id) {
  switch (id) {
    case ExperimentId::example1:
      return "1D torus target: KL decay of fpe/bde/bdl-fpe and MSE of mean/variance vs N";
    case ExperimentId::example1_wide:
      return "example1 started from the wide initial law N(0, 4)";
    case ExperimentId::example2:
      return "2D four-mode Gaussian mixture: occupancy and observable errors vs iteration";
    case ExperimentId::example3:
      return "Bayesian 3-component GMM posterior: permutation-mode occupancy in (mu1, mu2)";
    case ExperimentId::double_well_rate:
      return "double-well torus: fitted KL decay rates of fpe and bdl-fpe across epsilon";
    case ExperimentId::uniform_torus:
      return "uniform torus: fpe KL decay rate against the (2 pi / L)^2 spectral gap";
    case ExperimentId::bde_oracle:
      return "pure birth-death PDE against its closed-form solution";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Defaults

ExperimentSpec default_spec(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  s.seed = 1;
  s.pde = PdeConfig{};
  switch (id) {
    case ExperimentId::example1:
    case ExperimentId::example1_wide:
      s.seed_count = 20;
      s.methods = {"ula", "bdls"};
      s.sampler.particles = 100;
      s.sampler.dt = 0.03;
      s.sampler.iterations = 2000;
      s.sampler.kernel_width = 0.05;
      s.sampler.snapshot_every = 500;
      s.pde.final_time = 10.0;
      s.pde.snapshot_times = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
      s.dynamics = {Dynamics::fpe, Dynamics::bde, Dynamics::bdl_fpe};
      s.study.particle_counts = {25, 50, 100, 200, 400};
      s.study.init_mean = 0.0;
      s.study.init_variance = id == ExperimentId::example1 ? 0.2 : 4.0;
      break;
    case ExperimentId::example2:
      s.seed_count = 5;
      s.methods = {"ula", "bdls"};
      s.sampler.particles = 1000;
      s.sampler.dt = 1e-3;
      s.sampler.iterations = 200000;
      s.sampler.kernel_width = 0.1;
      s.sampler.snapshot_every = 10000;
      s.study.record_every = 400;
      s.study.occupancy_radius = 3.0;
      break;
    case ExperimentId::example3:
      s.seed_count = 3;
      s.methods = {"ula", "bdls"};
      s.sampler.particles = 2000;
      s.sampler.dt = 1.5e-6;
      s.sampler.iterations = 200000;
      s.sampler.kernel_width = 1.1;
      s.sampler.stepper = StepperKind::tamed_ula;
      s.sampler.snapshot_every = 20000;
      s.study.record_every = 1000;
      s.study.occupancy_radius = 1.5;
      break;
    case ExperimentId::double_well_rate:
      s.pde.final_time = 400.0;
      s.pde.fpe_warmup = 1.0;
      s.dynamics = {Dynamics::fpe, Dynamics::bdl_fpe};
      s.study.epsilons = {0.25, 0.125};
      s.study.kl_stride = 10;
      break;
    case ExperimentId::uniform_torus:
      s.pde.final_time = 40.0;
      s.dynamics = {Dynamics::fpe};
      s.study.sides = {4.0, 8.0};
      s.study.init_mean = 0.0;
      s.study.init_variance = 0.25;
      break;
    case ExperimentId::bde_oracle:
      s.pde.final_time = 5.0;
      s.dynamics = {Dynamics::bde};
      s.study.check_times = {0.5, 1.0, 2.0, 5.0};
      s.study.init_mean = 0.0;
      s.study.init_variance = 0.2;
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out;
}

double to_real(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(field + ": expected a real number, got '" + t + "'");
  return v;
}

std::uint64_t to_u64(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(field + ": expected a nonnegative integer, got '" + t + "'");
  return v;
}

std::size_t to_count(const std::string& text, const std::string& field) {
  return static_cast<std::size_t>(to_u64(text, field));
}

bool to_bool(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(field + ": expected true or false, got '" + t + "'");
}

std::vector<std::string> to_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(trim(part));
  return out;
}

std::vector<double> to_reals(const std::string& text, const std::string& field) {
  std::vector<double> out;
  for (const auto& s : to_list(text)) out.push_back(to_real(s, field));
  return out;
}

std::vector<std::size_t> to_counts(const std::string& text, const std::string& field) {
  std::vector<std::size_t> out;
  for (const auto& s : to_list(text)) out.push_back(to_count(s, field));
  return out;
}

std::string reals(const std::vector<double>& v) {
  return join<double>(v, [](const double& x) { return format_real(x); });
}

std::string counts(const std::vector<std::size_t>& v) {
  return join<std::size_t>(v, [](const std::size_t& x) { return std::to_string(x); });
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentSpec&, const std::string& value, const std::string& name)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

const std::vector<Field>& fields() {
  using S = ExperimentSpec;
  using V = const std::string&;
  static const std::vector<Field> table{
      {"experiment", "id", [](S&, V, V) {}, [](const S& s) { return to_string(s.id); }},
      {"experiment", "seed", [](S& s, V v, V n) { s.seed = to_u64(v, n); },
       [](const S& s) { return std::to_string(s.seed); }},
      {"experiment", "seeds", [](S& s, V v, V n) { s.seed_count = to_count(v, n); },
       [](const S& s) { return std::to_string(s.seed_count); }},
      {"experiment", "methods", [](S& s, V v, V) { s.methods = to_list(v); },
       [](const S& s) {
         return join<std::string>(s.methods, [](const std::string& m) { return m; });
       }},
      {"experiment", "output", [](S& s, V v, V) { s.output = trim(v); },
       [](const S& s) { return s.output.string(); }},
      {"experiment", "threads", [](S& s, V v, V n) { s.threads = to_count(v, n); },
       [](const S& s) { return std::to_string(s.threads); }},

      {"sampler", "particles", [](S& s, V v, V n) { s.sampler.particles = to_count(v, n); },
       [](const S& s) { return std::to_string(s.sampler.particles); }},
      {"sampler", "dt", [](S& s, V v, V n) { s.sampler.dt = to_real(v, n); },
       [](const S& s) { return format_real(s.sampler.dt); }},
      {"sampler", "iterations", [](S& s, V v, V n) { s.sampler.iterations = to_count(v, n); },
       [](const S& s) { return std::to_string(s.sampler.iterations); }},
      {"sampler", "kernel_width", [](S& s, V v, V n) { s.sampler.kernel_width = to_real(v, n); },
       [](const S& s) { return format_real(s.sampler.kernel_width); }},
      {"sampler", "stepper",
       [](S& s, V v, V n) {
         try {
           s.sampler.stepper = parse_stepper(trim(v));
         } catch (const std::exception& e) {
           throw ConfigError(n + ": " + e.what());
         }
       },
       [](const S& s) { return to_string(s.sampler.stepper); }},
      {"sampler", "snapshot_every",
       [](S& s, V v, V n) { s.sampler.snapshot_every = to_count(v, n); },
       [](const S& s) { return std::to_string(s.sampler.snapshot_every); }},
      {"sampler", "record_events", [](S& s, V v, V n) { s.sampler.record_events = to_bool(v, n); },
       [](const S& s) { return std::string(s.sampler.record_events ? "true" : "false"); }},

      {"pde", "cells", [](S& s, V v, V n) { s.pde.cells = to_count(v, n); },
       [](const S& s) { return std::to_string(s.pde.cells); }},
      {"pde", "tau", [](S& s, V v, V n) { s.pde.tau = to_real(v, n); },
       [](const S& s) { return format_real(s.pde.tau); }},
      {"pde", "final_time", [](S& s, V v, V n) { s.pde.final_time = to_real(v, n); },
       [](const S& s) { return format_real(s.pde.final_time); }},
      {"pde", "fpe_warmup", [](S& s, V v, V n) { s.pde.fpe_warmup = to_real(v, n); },
       [](const S& s) { return format_real(s.pde.fpe_warmup); }},
      {"pde", "dynamics",
       [](S& s, V v, V n) {
         s.dynamics.clear();
         for (const auto& d : to_list(v)) {
           try {
             s.dynamics.push_back(parse_dynamics(d));
           } catch (const std::exception& e) {
             throw ConfigError(n + ": " + e.what());
           }
         }
       },
       [](const S& s) {
         return join<Dynamics>(s.dynamics, [](const Dynamics& d) { return to_string(d); });
       }},
      {"pde", "snapshot_times", [](S& s, V v, V n) { s.pde.snapshot_times = to_reals(v, n); },
       [](const S& s) { return reals(s.pde.snapshot_times); }},

      {"study", "particle_counts",
       [](S& s, V v, V n) { s.study.particle_counts = to_counts(v, n); },
       [](const S& s) { return counts(s.study.particle_counts); }},
      {"study", "init_mean", [](S& s, V v, V n) { s.study.init_mean = to_real(v, n); },
       [](const S& s) { return format_real(s.study.init_mean); }},
      {"study", "init_variance", [](S& s, V v, V n) { s.study.init_variance = to_real(v, n); },
       [](const S& s) { return format_real(s.study.init_variance); }},
      {"study", "epsilons", [](S& s, V v, V n) { s.study.epsilons = to_reals(v, n); },
       [](const S& s) { return reals(s.study.epsilons); }},
      {"study", "sides", [](S& s, V v, V n) { s.study.sides = to_reals(v, n); },
       [](const S& s) { return reals(s.study.sides); }},
      {"study", "occupancy_radius",
       [](S& s, V v, V n) { s.study.occupancy_radius = to_real(v, n); },
       [](const S& s) { return format_real(s.study.occupancy_radius); }},
      {"study", "record_every", [](S& s, V v, V n) { s.study.record_every = to_count(v, n); },
       [](const S& s) { return std::to_string(s.study.record_every); }},
      {"study", "dataset", [](S& s, V v, V) { s.study.dataset = trim(v); },
       [](const S& s) { return s.study.dataset; }},
      {"study", "dataset_size", [](S& s, V v, V n) { s.study.dataset_size = to_count(v, n); },
       [](const S& s) { return std::to_string(s.study.dataset_size); }},
      {"study", "dataset_seed", [](S& s, V v, V n) { s.study.dataset_seed = to_u64(v, n); },
       [](const S& s) { return std::to_string(s.study.dataset_seed); }},
      {"study", "occupied_threshold",
       [](S& s, V v, V n) { s.study.occupied_threshold = to_real(v, n); },
       [](const S& s) { return format_real(s.study.occupied_threshold); }},
      {"study", "fit_lo", [](S& s, V v, V n) { s.study.fit_lo = to_real(v, n); },
       [](const S& s) { return format_real(s.study.fit_lo); }},
      {"study", "fit_hi", [](S& s, V v, V n) { s.study.fit_hi = to_real(v, n); },
       [](const S& s) { return format_real(s.study.fit_hi); }},
      {"study", "check_times", [](S& s, V v, V n) { s.study.check_times = to_reals(v, n); },
       [](const S& s) { return reals(s.study.check_times); }},
      {"study", "kl_stride", [](S& s, V v, V n) { s.study.kl_stride = to_count(v, n); },
       [](const S& s) { return std::to_string(s.study.kl_stride); }},
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

// Line of `key` inside `[section]`, or of the section header when key is
// empty; 0 when not found.
std::size_t locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      current = trim(t.substr(1, t.find(']') == std::string::npos ? t.size() - 1 : t.find(']') - 1));
      if (key.empty() && current == section) return number;
      continue;
    }
    const auto eq = t.find('=');
    if (current == section && !key.empty() && eq != std::string::npos && trim(t.substr(0, eq)) == key)
      return number;
  }
  return 0;
}

std::string at_line(const std::string& source, std::size_t line) {
  return line > 0 ? source + ":" + std::to_string(line) + ": " : source + ": ";
}

bool is_particle_experiment(ExperimentId id) {
  return id == ExperimentId::example1 || id == ExperimentId::example1_wide ||
         id == ExperimentId::example2 || id == ExperimentId::example3;
}

bool has_pde(ExperimentId id) {
  return id != ExperimentId::example2 && id != ExperimentId::example3;
}

}  // namespace

ExperimentSpec parse_config(std::istream& in, const std::string& source) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  pt::ptree tree;
  try {
    std::istringstream stream(text);
    pt::read_ini(stream, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(at_line(source, e.line()) + e.message(), e.line());
  }

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(at_line(source, locate(text, "", section)) + "key '" + section +
                            "' appears outside any section",
                        locate(text, "", section));
    if (section == "run") continue;
    const bool known_section =
        section == "experiment" || section == "sampler" || section == "pde" || section == "study";
    if (!known_section) {
      const auto line = locate(text, section, "");
      throw ConfigError(at_line(source, line) + "unknown section [" + section + "]", line);
    }
    for (const auto& [key, value] : body) {
      if (!find_field(section, key)) {
        const auto line = locate(text, section, key);
        throw ConfigError(at_line(source, line) + "unknown key '" + key + "' in [" + section + "]",
                          line);
      }
    }
  }

  const auto id_text = tree.get_optional<std::string>("experiment.id");
  if (!id_text) throw ConfigError(source + ": missing required key [experiment] id");
  ExperimentSpec spec;
  try {
    spec = default_spec(parse_experiment(trim(*id_text)));
  } catch (const ConfigError& e) {
    const auto line = locate(text, "experiment", "id");
    throw ConfigError(at_line(source, line) + e.what(), line);
  }

  for (const auto& [section, body] : tree) {
    if (section == "run") continue;
    for (const auto& [key, value] : body) {
      try {
        find_field(section, key)->set(spec, value.data(), section + "." + key);
      } catch (const ConfigError& e) {
        const auto line = locate(text, section, key);
        throw ConfigError(at_line(source, line) + e.what(), line);
      }
    }
  }
  try {
    validate(spec);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void validate(const ExperimentSpec& s) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + " " + why);
  };
  if (s.seed_count == 0) fail("experiment.seeds", "must be at least 1");
  if (is_particle_experiment(s.id)) {
    if (s.methods.empty()) fail("experiment.methods", "must name at least one method");
    for (const auto& m : s.methods)
      if (m != "ula" && m != "bdls")
        fail("experiment.methods", "contains unknown method '" + m + "' (expected ula or bdls)");
    auto sorted = s.methods;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      fail("experiment.methods", "lists a method twice");
    if (s.seed_count < 2 && (s.id == ExperimentId::example1 || s.id == ExperimentId::example1_wide))
      fail("experiment.seeds", "must be at least 2 for mean squared errors");
  }
  if (!(s.sampler.dt > 0.0) || !std::isfinite(s.sampler.dt)) fail("sampler.dt", "must be positive");
  if (s.sampler.particles < 2) fail("sampler.particles", "must be at least 2");
  if (!(s.sampler.kernel_width > 0.0) || !std::isfinite(s.sampler.kernel_width))
    fail("sampler.kernel_width", "must be positive");
  if (s.pde.cells < 16) fail("pde.cells", "must be at least 16");
  if (!(s.pde.tau > 0.0) || !std::isfinite(s.pde.tau)) fail("pde.tau", "must be positive");
  if (!(s.pde.final_time >= 0.0) || !std::isfinite(s.pde.final_time))
    fail("pde.final_time", "must be nonnegative");
  if (!(s.pde.fpe_warmup >= 0.0)) fail("pde.fpe_warmup", "must be nonnegative");
  for (double t : s.pde.snapshot_times)
    if (!(t >= 0.0)) fail("pde.snapshot_times", "must be nonnegative");
  if (has_pde(s.id) && s.dynamics.empty()) fail("pde.dynamics", "must name at least one dynamics");
  if (s.id == ExperimentId::bde_oracle &&
      (s.dynamics.size() != 1 || s.dynamics[0] != Dynamics::bde))
    fail("pde.dynamics", "must be exactly 'bde' for bde-oracle");
  if (s.id == ExperimentId::example1 || s.id == ExperimentId::example1_wide) {
    if (s.study.particle_counts.empty()) fail("study.particle_counts", "must not be empty");
    for (auto n : s.study.particle_counts)
      if (n < 2) fail("study.particle_counts", "entries must be at least 2");
  }
  if (!(s.study.init_variance > 0.0)) fail("study.init_variance", "must be positive");
  for (double e : s.study.epsilons)
    if (!(e > 0.0)) fail("study.epsilons", "entries must be positive");
  if (s.id == ExperimentId::double_well_rate && s.study.epsilons.empty())
    fail("study.epsilons", "must not be empty");
  for (double l : s.study.sides)
    if (!(l > 0.0)) fail("study.sides", "entries must be positive");
  if (s.id == ExperimentId::uniform_torus && s.study.sides.empty())
    fail("study.sides", "must not be empty");
  if (!(s.study.occupancy_radius > 0.0)) fail("study.occupancy_radius", "must be positive");
  if (s.study.dataset.empty() && s.id == ExperimentId::example3 && s.study.dataset_size == 0)
    fail("study.dataset_size", "must be positive");
  if (!(s.study.occupied_threshold >= 0.0 && s.study.occupied_threshold <= 1.0))
    fail("study.occupied_threshold", "must lie in [0, 1]");
  if (!(s.study.fit_lo > 0.0 && s.study.fit_lo < s.study.fit_hi))
    fail("study.fit_lo", "must be positive and below study.fit_hi");
  for (double t : s.study.check_times)
    if (!(t >= 0.0 && t <= s.pde.final_time)) fail("study.check_times", "must lie in [0, final_time]");
  if (s.study.kl_stride == 0) fail("study.kl_stride", "must be at least 1");
}

std::string render_config(const ExperimentSpec& spec) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      os << (section.empty() ? "" : "\n") << "[" << f.section << "]\n";
      section = f.section;
    }
    os << f.key << " = " << f.get(spec) << "\n";
  }
  return os.str();
}

std::filesystem::path resolve_output(const ExperimentSpec& spec) {
  if (!spec.output.empty()) return spec.output;
  const char* root = std::getenv("BDLS_OUTPUT_ROOT");
  const std::filesystem::path base = root && *root ? root : "results";
  return base / to_string(spec.id);
}

// ---------------------------------------------------------------------------
// Running

namespace {

constexpr std::uint64_t kInitStream = std::uint64_t{1} << 41;

class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  std::filesystem::path path(const std::string& name) {
    const auto p = dir_ / name;
    std::filesystem::create_directories(p.parent_path());
    files_.push_back(name);
    return p;
  }
  void table(const std::string& name, const CsvTable& t) { t.write(path(name)); }
  const std::filesystem::path& dir() const { return dir_; }
  std::vector<std::string> files() const {
    auto f = files_;
    std::sort(f.begin(), f.end());
    return f;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

struct Bookkeeping {
  std::vector<std::string> cells;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<CellFailure> failures;
};

template <class Fn>
void for_each_cell(std::size_t count, Fn&& fn) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
    fn(static_cast<std::size_t>(i));
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// ----- PDE helpers ---------------------------------------------------------

struct PdeCell {
  std::string column;
  std::string label;
  std::optional<PdeRun> run;
  std::string error;
};

void write_kl_table(Artifacts& out, const std::vector<PdeCell>& cells, std::size_t stride) {
  CsvTable t;
  t.header = {"t"};
  const PdeRun* first = nullptr;
  for (const auto& c : cells)
    if (c.run) {
      t.header.push_back(c.column);
      if (!first) first = &*c.run;
    }
  if (!first) return;
  const std::size_t n = first->times.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k % stride != 0 && k + 1 != n) continue;
    std::vector<std::string> row{format_real(first->times[k])};
    for (const auto& c : cells)
      if (c.run) row.push_back(k < c.run->kl.size() ? format_real(c.run->kl[k]) : "");
    t.add_row(std::move(row));
  }
  out.table("kl_decay.csv", t);
}

void write_pde_snapshots(Artifacts& out, const std::vector<PdeCell>& cells, const GridDensity& pi) {
  CsvTable t;
  t.header = {"t", "x", "pi"};
  const PdeRun* first = nullptr;
  for (const auto& c : cells)
    if (c.run) {
      t.header.push_back(c.column);
      if (!first) first = &*c.run;
    }
  if (!first || first->snapshots.empty()) return;
  for (std::size_t s = 0; s < first->snapshot_times.size(); ++s) {
    for (std::size_t i = 0; i < pi.grid.n; ++i) {
      std::vector<std::string> row{format_real(first->snapshot_times[s]),
                                   format_real(pi.grid.center(i)), format_real(pi.values[i])};
      for (const auto& c : cells)
        if (c.run) row.push_back(format_real(c.run->snapshots[s].values[i]));
      t.add_row(std::move(row));
    }
  }
  out.table("pde_snapshots.csv", t);
}

void collect_pde_failures(const std::vector<PdeCell>& cells, Bookkeeping& book) {
  for (const auto& c : cells) {
    book.cells.push_back(c.label);
    if (!c.run) book.failures.push_back({c.label, c.error});
  }
}

void run_pde_cells(std::vector<PdeCell>& cells,
                   const std::function<PdeRun(std::size_t)>& body) {
  for_each_cell(cells.size(), [&](std::size_t i) {
    try {
      cells[i].run = body(i);
    } catch (const std::exception& e) {
      cells[i].error = one_line(e.what());
    }
  });
}

// ----- particle helpers ----------------------------------------------------

struct ParticleCell {
  std::string method;
  std::size_t particles = 0;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  std::string label;
  bool keep = false;

  bool ok = false;
  std::string error;
  std::vector<std::uint64_t> iterations;
  std::vector<std::vector<double>> estimates;  // [record][observable]
  std::vector<std::vector<double>> occupancy;  // [record][mode], unassigned last
  std::optional<SamplerResult> kept;
};

struct Recording {
  std::vector<ObservableSpec> observables;
  std::vector<std::vector<double>> centers;
  std::vector<std::size_t> axes;
  double radius = 1.0;
  std::size_t every = 0;
};

SamplerConfig cell_config(const ExperimentSpec& spec, const ParticleCell& cell) {
  SamplerConfig c = spec.sampler;
  c.particles = cell.particles;
  c.seed = cell.seed;
  c.birth_death = cell.method == "bdls";
  c.record_events = cell.keep && spec.sampler.record_events && c.birth_death;
  if (!cell.keep) c.snapshot_every = 0;
  return c;
}

void run_particle_cell(ParticleCell& cell, const TargetDensity& target, const SamplerConfig& config,
                       Ensemble initial, const Recording& rec) {
  auto record = [&](std::uint64_t j, const Ensemble& e) {
    cell.iterations.push_back(j);
    std::vector<double> est;
    for (const auto& o : rec.observables) est.push_back(empirical_estimate(e, o));
    cell.estimates.push_back(std::move(est));
    if (!rec.centers.empty()) {
      const auto occ = mode_occupancy(e, rec.centers, rec.radius, rec.axes);
      auto f = occ.fractions;
      f.push_back(occ.unassigned);
      cell.occupancy.push_back(std::move(f));
    }
  };
  record(0, initial);
  auto result = run_sampler(target, config, std::move(initial),
                            [&](std::uint64_t j, const Ensemble& e, const IterationReport&) {
                              if ((rec.every > 0 && j % rec.every == 0) || j == config.iterations)
                                record(j, e);
                            });
  if (cell.keep) cell.kept = std::move(result);
  cell.ok = true;
}

void run_particle_cells(std::vector<ParticleCell>& cells,
                        const std::function<void(ParticleCell&)>& body, Bookkeeping& book) {
  for_each_cell(cells.size(), [&](std::size_t i) {
    try {
      body(cells[i]);
    } catch (const std::exception& e) {
      cells[i].ok = false;
      cells[i].error = one_line(e.what());
      cells[i].kept.reset();
    }
  });
  for (const auto& c : cells) {
    book.cells.push_back(c.label);
    book.seeds.emplace_back(c.label, c.seed);
    if (!c.ok) book.failures.push_back({c.label, c.error});
  }
}

void write_kept(Artifacts& out, const ParticleCell& cell, const std::string& stem) {
  if (!cell.kept) return;
  {
    std::ofstream os(out.path("snapshots/" + stem + ".csv"));
    for (const auto& s : cell.kept->trajectory) write_snapshot_csv(os, s.ensemble, s.iteration);
  }
  if (cell.method == "bdls") cell.kept->events.write_csv(out.path("events/" + stem + ".csv"));
}

// Seed-averaged absolute errors and occupancy per (method, iteration).
void write_series(Artifacts& out, const ExperimentSpec& spec,
                  const std::vector<ParticleCell>& cells, const Recording& rec,
                  const std::vector<std::string>& mode_labels) {
  CsvTable err, occ;
  err.header = {"iteration", "method", "observable", "value", "seeds"};
  occ.header = {"iteration", "method", "mode", "fraction", "seeds"};
  for (const auto& method : spec.methods) {
    std::vector<const ParticleCell*> ok;
    for (const auto& c : cells)
      if (c.method == method && c.ok) ok.push_back(&c);
    if (ok.empty()) continue;
    const std::string seeds = std::to_string(ok.size());
    const auto& iters = ok.front()->iterations;
    for (std::size_t r = 0; r < iters.size(); ++r) {
      const std::string it = std::to_string(iters[r]);
      for (std::size_t o = 0; o < rec.observables.size(); ++o) {
        double s = 0.0;
        for (const auto* c : ok) s += std::abs(c->estimates[r][o] - rec.observables[o].reference);
        err.add_row({it, method, rec.observables[o].label,
                     format_real(s / static_cast<double>(ok.size())), seeds});
      }
      if (!rec.centers.empty()) {
        for (std::size_t m = 0; m < mode_labels.size(); ++m) {
          double s = 0.0;
          for (const auto* c : ok) s += c->occupancy[r][m];
          occ.add_row({it, method, mode_labels[m], format_real(s / static_cast<double>(ok.size())),
                       seeds});
        }
      }
    }
  }
  if (!rec.observables.empty()) out.table("abs_error_vs_iter.csv", err);
  if (!rec.centers.empty()) out.table("occupancy.csv", occ);
}

void write_references(Artifacts& out, const std::vector<ObservableSpec>& obs) {
  CsvTable t;
  t.header = {"observable", "value", "source"};
  for (const auto& o : obs) t.add_row({o.label, format_real(o.reference), to_string(o.source)});
  out.table("references.csv", t);
}

// ----- experiments ---------------------------------------------------------

void run_example1(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  const TorusMultimodal1D target;
  const Grid1D grid = grid_for(target, spec.pde.cells);
  const GridDensity rho0 = gaussian_density(grid, spec.study.init_mean, spec.study.init_variance);

  std::vector<PdeCell> pde;
  for (auto d : spec.dynamics) pde.push_back({to_string(d), "pde:" + to_string(d), {}, {}});
  run_pde_cells(pde, [&](std::size_t i) {
    PdeConfig c = spec.pde;
    c.dynamics = spec.dynamics[i];
    return run_pde(c, target, rho0);
  });
  collect_pde_failures(pde, book);
  write_kl_table(out, pde, spec.study.kl_stride);
  write_pde_snapshots(out, pde, discretize_target(target, grid));

  const Moments ref = torus_moments(target);
  Recording rec;
  rec.observables = {ObservableSpec::mean(0, "mean"), ObservableSpec::variance(0, "variance")};
  rec.observables[0].reference = ref.mean;
  rec.observables[1].reference = ref.variance;
  for (auto& o : rec.observables) o.source = ReferenceSource::quadrature;
  write_references(out, rec.observables);

  std::vector<ParticleCell> cells;
  for (auto n : spec.study.particle_counts)
    for (const auto& m : spec.methods)
      for (std::size_t k = 0; k < spec.seed_count; ++k) {
        ParticleCell c;
        c.method = m;
        c.particles = n;
        c.seed_index = k;
        c.label = m + ":N" + std::to_string(n) + ":seed" + std::to_string(k);
        c.seed = derive_seed(spec.seed, m + ":N" + std::to_string(n), k);
        c.keep = k == 0 && n == spec.sampler.particles;
        cells.push_back(std::move(c));
      }
  const std::vector<double> mean{spec.study.init_mean};
  const std::vector<double> var{spec.study.init_variance};
  run_particle_cells(
      cells,
      [&](ParticleCell& c) {
        RngStream init(c.seed, kInitStream);
        run_particle_cell(c, target, cell_config(spec, c),
                          sample_gaussian(target.geometry(), mean, var, c.particles, init), rec);
      },
      book);

  CsvTable est, mse;
  est.header = {"N", "method", "seed_index", "seed", "mean", "variance"};
  mse.header = {"N", "method", "metric", "value", "seeds"};
  for (auto n : spec.study.particle_counts)
    for (const auto& m : spec.methods) {
      std::vector<double> means, vars;
      for (const auto& c : cells) {
        if (c.particles != n || c.method != m || !c.ok) continue;
        means.push_back(c.estimates.back()[0]);
        vars.push_back(c.estimates.back()[1]);
        est.add_row({std::to_string(n), m, std::to_string(c.seed_index), std::to_string(c.seed),
                     format_real(means.back()), format_real(vars.back())});
      }
      if (means.size() < 2) continue;
      const std::string seeds = std::to_string(means.size());
      mse.add_row({std::to_string(n), m, "mean", format_real(mse_over_runs(means, ref.mean)), seeds});
      mse.add_row(
          {std::to_string(n), m, "variance", format_real(mse_over_runs(vars, ref.variance)), seeds});
    }
  out.table("estimates.csv", est);
  out.table("mse_vs_N.csv", mse);
  for (const auto& c : cells) write_kept(out, c, c.method + "_N" + std::to_string(c.particles));
}

void run_example2(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  const GaussianMixture2D target = example2_mixture();
  const GaussianMixture2D initial = example2_initial();

  Recording rec;
  rec.every = spec.study.record_every;
  rec.radius = spec.study.occupancy_radius;
  for (const auto& c : target.components()) rec.centers.push_back({c.mean[0], c.mean[1]});
  const std::vector<double> lo{-5.0, 1.2}, hi{5.0, 2.8}, q{1.0 / 3.0, 1.0 / 5.0};
  rec.observables = {ObservableSpec::mean(0, "E[x]"), ObservableSpec::mean(1, "E[y]"),
                     ObservableSpec::indicator(lo, hi, "E[chi]"),
                     ObservableSpec::quadratic_form(q, "E[x^2/3+y^2/5]")};
  rec.observables[0].reference = mixture_mean(target, 0);
  rec.observables[1].reference = mixture_mean(target, 1);
  rec.observables[2].reference = mixture_box_probability(target, lo, hi);
  rec.observables[3].reference = mixture_quadratic(target, q);
  write_references(out, rec.observables);

  std::vector<ParticleCell> cells;
  for (const auto& m : spec.methods)
    for (std::size_t k = 0; k < spec.seed_count; ++k) {
      ParticleCell c;
      c.method = m;
      c.particles = spec.sampler.particles;
      c.seed_index = k;
      c.label = m + ":seed" + std::to_string(k);
      c.seed = derive_seed(spec.seed, m, k);
      c.keep = k == 0;
      cells.push_back(std::move(c));
    }
  run_particle_cells(
      cells,
      [&](ParticleCell& c) {
        run_particle_cell(c, target, cell_config(spec, c),
                          exact_sample(initial, c.particles, mix64(c.seed ^ kInitStream)), rec);
      },
      book);

  write_series(out, spec, cells, rec, {"m1", "m2", "m3", "m4", "unassigned"});

  CsvTable marg;
  marg.header = {"method", "axis", "point", "density"};
  for (const auto& c : cells) {
    if (!c.kept) continue;
    const Ensemble& e = c.kept->final_ensemble;
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const double a = axis == 0 ? -6.0 : -1.0;
      const double b = axis == 0 ? 6.0 : 11.0;
      std::vector<double> pts(241);
      for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(pts.size() - 1);
      const auto dens = kde_marginal_curve(e, axis, pts, rule_of_thumb_bandwidth(e, axis));
      for (std::size_t i = 0; i < pts.size(); ++i)
        marg.add_row({c.method, axis == 0 ? "x" : "y", format_real(pts[i]), format_real(dens[i])});
    }
  }
  out.table("marginals.csv", marg);
  for (const auto& c : cells) write_kept(out, c, c.method);
}

Ensemble example3_initial(const BayesGmmPosterior& target, std::size_t n, RngStream& rng) {
  Ensemble e(target.geometry(), n);
  using P = BayesGmmPosterior;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = e.particle(i);
    double g[3];
    for (double& v : g) v = -std::log1p(-rng.uniform());
    const double s = g[0] + g[1] + g[2];
    x[P::w1] = g[0] / s;
    x[P::w2] = g[1] / s;
    for (std::size_t k = 0; k < 3; ++k) x[P::mu1 + k] = 3.0 + 4.0 * rng.uniform();
    for (std::size_t k = 0; k < 3; ++k) x[P::lambda1 + k] = 0.5 + 2.0 * rng.uniform();
    x[P::beta] = 0.5 + rng.uniform();
  }
  return e;
}

void run_example3(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  std::vector<double> data =
      spec.study.dataset.empty()
          ? generate_synthetic_dataset(example3_true_params(), spec.study.dataset_size,
                                       spec.study.dataset_seed)
          : read_dataset(spec.study.dataset);
  write_dataset(out.path("dataset.txt"), data);
  const BayesGmmPosterior target(std::move(data));

  Recording rec;
  rec.every = spec.study.record_every;
  rec.radius = spec.study.occupancy_radius;
  rec.axes = {BayesGmmPosterior::mu1, BayesGmmPosterior::mu2};
  std::vector<std::string> labels;
  const auto truth = example3_true_params().mean;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      if (a != b) {
        rec.centers.push_back({truth[a], truth[b]});
        labels.push_back("(" + format_real(truth[a]) + ";" + format_real(truth[b]) + ")");
      }
  labels.push_back("unassigned");

  std::vector<ParticleCell> cells;
  for (const auto& m : spec.methods)
    for (std::size_t k = 0; k < spec.seed_count; ++k) {
      ParticleCell c;
      c.method = m;
      c.particles = spec.sampler.particles;
      c.seed_index = k;
      c.label = m + ":seed" + std::to_string(k);
      c.seed = derive_seed(spec.seed, m, k);
      c.keep = k == 0;
      cells.push_back(std::move(c));
    }
  run_particle_cells(
      cells,
      [&](ParticleCell& c) {
        RngStream init(c.seed, kInitStream);
        run_particle_cell(c, target, cell_config(spec, c),
                          example3_initial(target, c.particles, init), rec);
      },
      book);
  write_series(out, spec, cells, rec, labels);

  CsvTable occupied;
  occupied.header = {"method", "seed_index", "seed", "modes_occupied"};
  for (const auto& c : cells) {
    if (!c.ok) continue;
    std::size_t count = 0;
    const auto& last = c.occupancy.back();
    for (std::size_t m = 0; m + 1 < last.size(); ++m)
      count += last[m] >= spec.study.occupied_threshold ? 1 : 0;
    occupied.add_row(
        {c.method, std::to_string(c.seed_index), std::to_string(c.seed), std::to_string(count)});
  }
  out.table("modes_occupied.csv", occupied);
  for (const auto& c : cells) write_kept(out, c, c.method);
}

void write_rates(Artifacts& out, const std::string& param, const std::vector<PdeCell>& cells,
                 const std::vector<double>& params, const std::vector<Dynamics>& dyn,
                 const ExperimentSpec& spec, Bookkeeping& book,
                 const std::function<double(double, Dynamics)>& predicted) {
  CsvTable t;
  t.header = {param, "dynamics", "rate", "predicted", "fit_lo", "fit_hi"};
  for (std::size_t p = 0; p < params.size(); ++p)
    for (std::size_t d = 0; d < dyn.size(); ++d) {
      const auto& cell = cells[p * dyn.size() + d];
      if (!cell.run) continue;
      double rate = std::numeric_limits<double>::quiet_NaN();
      try {
        rate = fit_exponential_rate(cell.run->times, cell.run->kl, spec.study.fit_hi,
                                    spec.study.fit_lo);
      } catch (const std::exception& e) {
        book.failures.push_back({"fit:" + cell.label, one_line(e.what())});
      }
      t.add_row({format_real(params[p]), to_string(dyn[d]), format_real(rate),
                 format_real(predicted(params[p], dyn[d])), format_real(spec.study.fit_lo),
                 format_real(spec.study.fit_hi)});
    }
  out.table("rates.csv", t);
}

void run_double_well(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  const auto& eps = spec.study.epsilons;
  std::vector<PdeCell> cells;
  for (double e : eps)
    for (auto d : spec.dynamics) {
      const std::string name = to_string(d) + "_eps=" + format_real(e);
      cells.push_back({name, "pde:" + name, {}, {}});
    }
  run_pde_cells(cells, [&](std::size_t i) {
    const DoubleWellTorus1D target(eps[i / spec.dynamics.size()]);
    const Grid1D grid = grid_for(target, spec.pde.cells);
    const GridDensity rho0 = restrict_density(discretize_target(target, grid), -1.0, 0.0);
    PdeConfig c = spec.pde;
    c.dynamics = spec.dynamics[i % spec.dynamics.size()];
    c.snapshot_times.clear();
    return run_pde(c, target, rho0);
  });
  collect_pde_failures(cells, book);
  write_kl_table(out, cells, spec.study.kl_stride);
  write_rates(out, "epsilon", cells, eps, spec.dynamics, spec, book,
              [](double, Dynamics) { return std::numeric_limits<double>::quiet_NaN(); });
}

void run_uniform_torus(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  const auto& sides = spec.study.sides;
  std::vector<PdeCell> cells;
  for (double l : sides)
    for (auto d : spec.dynamics) {
      const std::string name = to_string(d) + "_L=" + format_real(l);
      cells.push_back({name, "pde:" + name, {}, {}});
    }
  run_pde_cells(cells, [&](std::size_t i) {
    const UniformTorus target(1, sides[i / spec.dynamics.size()]);
    const Grid1D grid = grid_for(target, spec.pde.cells);
    PdeConfig c = spec.pde;
    c.dynamics = spec.dynamics[i % spec.dynamics.size()];
    c.snapshot_times.clear();
    return run_pde(c, target,
                   gaussian_density(grid, spec.study.init_mean, spec.study.init_variance));
  });
  collect_pde_failures(cells, book);
  write_kl_table(out, cells, spec.study.kl_stride);
  // KL is quadratic in the slowest Fourier mode, so it decays at twice the gap.
  write_rates(out, "side", cells, sides, spec.dynamics, spec, book, [](double l, Dynamics d) {
    const double gap = std::pow(2.0 * std::numbers::pi / l, 2);
    return d == Dynamics::fpe ? 2.0 * gap : std::numeric_limits<double>::quiet_NaN();
  });
}

void run_bde_oracle(const ExperimentSpec& spec, Artifacts& out, Bookkeeping& book) {
  const TorusMultimodal1D target;
  const Grid1D grid = grid_for(target, spec.pde.cells);
  const GridDensity rho0 = gaussian_density(grid, spec.study.init_mean, spec.study.init_variance);
  const GridDensity pi = discretize_target(target, grid);
  std::vector<PdeCell> cells{{"bde", "pde:bde", {}, {}}};
  run_pde_cells(cells, [&](std::size_t) {
    PdeConfig c = spec.pde;
    c.dynamics = Dynamics::bde;
    c.snapshot_times = spec.study.check_times;
    return run_pde(c, target, rho0);
  });
  collect_pde_failures(cells, book);
  write_kl_table(out, cells, spec.study.kl_stride);
  if (!cells[0].run) return;
  const PdeRun& run = *cells[0].run;
  CsvTable t;
  t.header = {"t", "sup_error", "kl"};
  for (std::size_t s = 0; s < run.snapshots.size(); ++s) {
    const double time = run.snapshot_times[s];
    const GridDensity exact = bde_closed_form(rho0, pi, time);
    t.add_row({format_real(time), format_real(sup_distance(run.snapshots[s], exact)),
               format_real(kl_divergence_grid(run.snapshots[s], pi))});
  }
  out.table("bde_oracle.csv", t);
}

void write_manifest(Artifacts& out, const ExperimentSpec& spec, const Bookkeeping& book) {
  std::ofstream os(out.path("manifest.ini"));
  os << render_config(spec);
  os << "\n[run]\n";
  os << "version = " << BDLS_VERSION << "\n";
  os << "experiment = " << to_string(spec.id) << "\n";
  os << "cells = " << book.cells.size() << "\n";
  os << "failures = " << book.failures.size() << "\n";
  auto seeds = book.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (const auto& [label, seed] : seeds) os << "seed." << label << " = " << seed << "\n";
  auto failures = book.failures;
  std::sort(failures.begin(), failures.end(),
            [](const CellFailure& a, const CellFailure& b) { return a.cell < b.cell; });
  for (const auto& f : failures) os << "failed." << f.cell << " = " << f.message << "\n";
}

}  // namespace

RunSummary run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.threads > 0) omp_set_num_threads(static_cast<int>(spec.threads));
  omp_set_max_active_levels(1);

  Artifacts out(resolve_output(spec));
  Bookkeeping book;
  switch (spec.id) {
    case ExperimentId::example1:
    case ExperimentId::example1_wide: run_example1(spec, out, book); break;
    case ExperimentId::example2: run_example2(spec, out, book); break;
    case ExperimentId::example3: run_example3(spec, out, book); break;
    case ExperimentId::double_well_rate: run_double_well(spec, out, book); break;
    case ExperimentId::uniform_torus: run_uniform_torus(spec, out, book); break;
    case ExperimentId::bde_oracle: run_bde_oracle(spec, out, book); break;
  }
  write_manifest(out, spec, book);
  return {out.dir(), out.files(), book.failures};
}

// ---------------------------------------------------------------------------
// Report

namespace {

void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return;
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  for (const auto& r : rows) {
    os << " ";
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
      os << " " << std::left << std::setw(static_cast<int>(width[c])) << r[c];
    os << "\n";
  }
}

std::string short_real(const std::string& text) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc()) return text;
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

void report_kl(const CsvTable& t, std::ostream& os) {
  os << "KL decay (kl_decay.csv)\n";
  std::vector<std::vector<std::string>> rows{{"column", "KL(t=0)", "KL(final)", "t(KL<=1e-2)"}};
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    std::string first_hit = "-";
    for (const auto& r : t.rows) {
      double v = 0.0;
      std::from_chars(r[c].data(), r[c].data() + r[c].size(), v);
      if (v <= 1e-2) {
        first_hit = short_real(r[0]);
        break;
      }
    }
    rows.push_back({t.header[c], short_real(t.rows.front()[c]), short_real(t.rows.back()[c]),
                    first_hit});
  }
  print_table(os, rows);
}

void report_mse(const CsvTable& t, std::ostream& os) {
  os << "MSE vs N (mse_vs_N.csv)\n";
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> pivot;
  std::vector<std::string> methods;
  for (const auto& r : t.rows) {
    pivot[{r[2], r[0]}][r[1]] = r[3];
    if (std::find(methods.begin(), methods.end(), r[1]) == methods.end()) methods.push_back(r[1]);
  }
  std::vector<std::vector<std::string>> rows{{"metric", "N"}};
  for (const auto& m : methods) rows[0].push_back(m);
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [k, v] : pivot) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return std::stoull(a.second) < std::stoull(b.second);
  });
  for (const auto& k : keys) {
    std::vector<std::string> row{k.first, k.second};
    for (const auto& m : methods) {
      auto it = pivot[k].find(m);
      row.push_back(it == pivot[k].end() ? "-" : short_real(it->second));
    }
    rows.push_back(std::move(row));
  }
  print_table(os, rows);
}

void report_last_iteration(const CsvTable& t, const std::string& title, std::ostream& os) {
  os << title << "\n";
  std::uint64_t last = 0;
  for (const auto& r : t.rows) last = std::max<std::uint64_t>(last, std::stoull(r[0]));
  std::vector<std::vector<std::string>> rows{{t.header[1], t.header[2], t.header[3]}};
  for (const auto& r : t.rows)
    if (std::stoull(r[0]) == last) rows.push_back({r[1], r[2], short_real(r[3])});
  os << "  iteration " << last << "\n";
  print_table(os, rows);
}

void report_plain(const CsvTable& t, const std::string& title, std::ostream& os) {
  os << title << "\n";
  std::vector<std::vector<std::string>> rows{t.header};
  for (const auto& r : t.rows) {
    std::vector<std::string> row;
    for (const auto& v : r) row.push_back(short_real(v));
    rows.push_back(std::move(row));
  }
  print_table(os, rows);
}

}  // namespace

void report(const std::filesystem::path& dir, std::ostream& os) {
  const auto manifest = dir / "manifest.ini";
  if (!std::filesystem::exists(manifest))
    throw std::runtime_error("no manifest.ini in " + dir.string());
  pt::ptree tree;
  pt::read_ini(manifest.string(), tree);
  os << "experiment " << tree.get<std::string>("experiment.id", "?") << " (" << dir.string()
     << ")\n";
  os << "version " << tree.get<std::string>("run.version", "?") << ", cells "
     << tree.get<std::string>("run.cells", "0") << ", failures "
     << tree.get<std::string>("run.failures", "0") << "\n";
  if (const auto run = tree.get_child_optional("run"))
    for (const auto& [key, value] : *run)
      if (key.rfind("failed.", 0) == 0) os << "  " << key << ": " << value.data() << "\n";

  auto has = [&](const char* name) { return std::filesystem::exists(dir / name); };
  auto read = [&](const char* name) { return CsvTable::read(dir / name); };
  if (has("kl_decay.csv")) report_kl(read("kl_decay.csv"), os);
  if (has("rates.csv")) report_plain(read("rates.csv"), "Fitted KL decay rates (rates.csv)", os);
  if (has("bde_oracle.csv"))
    report_plain(read("bde_oracle.csv"), "Solver vs closed form (bde_oracle.csv)", os);
  if (has("mse_vs_N.csv")) report_mse(read("mse_vs_N.csv"), os);
  if (has("abs_error_vs_iter.csv"))
    report_last_iteration(read("abs_error_vs_iter.csv"),
                          "Seed-averaged absolute errors (abs_error_vs_iter.csv)", os);
  if (has("occupancy.csv"))
    report_last_iteration(read("occupancy.csv"), "Mode occupancy (occupancy.csv)", os);
  if (has("modes_occupied.csv"))
    report_plain(read("modes_occupied.csv"), "Occupied modes per run (modes_occupied.csv)", os);
}

}  // namespace bdls
