// crackid: measurement synthesis, breaking-line identification and checks.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 check failed.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crackid/config.hpp"
#include "crackid/driver.hpp"
#include "crackid/errors.hpp"
#include "crackid/io.hpp"
#include "crackid/svg.hpp"

namespace fs = std::filesystem;
using namespace crackid;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, config_error = 2, solver_failure = 3, check_failed = 4 };

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<double> eps;
  std::optional<std::string> load_case;
};

class Manifest {
 public:
  Manifest(std::string subcommand, const Common& common) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["config"] = common.config;
    doc_["out"] = common.out;
    doc_["version"] = kVersion;
    doc_["timings"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
  }

  void parameters(const ExperimentConfig& c) {
    auto& p = doc_["parameters"];
    for (const auto& [key, value] : c.entries()) p[key] = value;
  }
  void timing(const std::string& what, double seconds) { doc_["timings"][what] = seconds; }
  void output(const fs::path& path) { doc_["outputs"].push_back(path.filename().string()); }
  nlohmann::json& operator[](const std::string& key) { return doc_[key]; }

  void write(const fs::path& dir) const {
    std::ofstream os(dir / "manifest.json");
    os << doc_.dump(2) << '\n';
  }

 private:
  nlohmann::json doc_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExperimentConfig load(const Common& common) {
  ExperimentConfig c;
  if (!common.config.empty()) {
    if (!fs::exists(common.config)) throw ConfigError("config file not found: " + common.config);
    c = load_config(common.config);
  }
  if (common.eps) c.eps = *common.eps;
  if (common.load_case) c.load_case = *common.load_case;
  c.validate();
  return c;
}

fs::path prepare_out(const Common& common) {
  fs::path dir(common.out);
  fs::create_directories(dir);
  return dir;
}

template <class F>
void write_file(Manifest& manifest, const fs::path& path, F&& body) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  body(os);
  manifest.output(path);
}

int cmd_measure(const Common& common) {
  const auto config = load(common);
  const auto dir = prepare_out(common);
  Manifest manifest("measure", common);
  manifest.parameters(config);
  Stopwatch clock;
  const auto run = synthesize_measurement(config);
  manifest.timing("solve", clock.seconds());

  write_file(manifest, dir / "measurement.txt", [&](std::ostream& os) { write_measurement(os, run.data); });
  write_file(manifest, dir / "deformed.svg",
             [&](std::ostream& os) { write_deformed_svg(os, run.mesh, run.vi.z.values, run.vi.active); });
  manifest["pdas"] = {{"iterations", run.vi.report.iterations},
                      {"contact_nodes", run.vi.active.contact_count()},
                      {"active_sizes", run.vi.report.active_sizes},
                      {"cycle_broken", run.vi.report.cycle_broken}};
  std::cout << "PDAS converged in " << run.vi.report.iterations << " iterations, "
            << run.vi.active.contact_count() << " contact nodes\n";
  manifest.timing("total", clock.seconds());
  manifest.write(dir);
  return ok;
}

int cmd_identify(const Common& common, const std::string& measurement_path, bool dump_gradients) {
  const auto config = load(common);
  const auto dir = prepare_out(common);
  const fs::path mpath = measurement_path.empty() ? dir / "measurement.txt" : fs::path(measurement_path);
  Measurement data;
  try {
    data = load_measurement(mpath);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (data.load_case != config.load_case) {
    std::cerr << "warning: measurement load case '" << data.load_case << "' differs from '"
              << config.load_case << "'\n";
  }

  Manifest manifest("identify", common);
  manifest.parameters(config);
  manifest["measurement"] = mpath.string();
  Stopwatch clock;
  std::ofstream gradients;
  IdentifyHooks hooks;
  if (dump_gradients) {
    gradients.open(dir / "gradients.csv");
    gradients << "n,s_H,D3,Lambda2\n";
    hooks.gradients = &gradients;
    manifest.output(dir / "gradients.csv");
  }
  const auto log = identify(config, data, hooks);
  manifest.timing("identify", clock.seconds());

  write_file(manifest, dir / "iterations.csv", [&](std::ostream& os) { log.write_csv(os); });
  for (const auto& [n, psi] : log.snapshots) {
    std::ostringstream name;
    name << "interface_n" << std::setw(3) << std::setfill('0') << n << ".txt";
    write_file(manifest, dir / name.str(), [&](std::ostream& os) { write_interface(os, psi); });
  }
  write_file(manifest, dir / "ratios.svg", [&](std::ostream& os) { write_ratios_svg(os, log); });
  write_file(manifest, dir / "interfaces.svg",
             [&](std::ostream& os) { write_interfaces_svg(os, log, config.truth()); });

  manifest["min_J_ratio"] = log.min_J_ratio();
  manifest["min_shape_error_ratio"] = log.min_shape_error_ratio();
  manifest["clamp_events"] = log.clamp_log.size();
  manifest["failure"] = log.failure;
  std::cout << "iterations " << log.records.size() << ", min J ratio " << log.min_J_ratio()
            << ", min shape-error ratio " << log.min_shape_error_ratio() << '\n';
  manifest.timing("total", clock.seconds());
  manifest.write(dir);
  if (!log.failure.empty()) {
    std::cerr << "error: " << log.failure << '\n';
    return solver_failure;
  }
  return ok;
}

int cmd_gradient_check(const Common& common, bool corrupt) {
  const auto config = load(common);
  const auto dir = prepare_out(common);
  Manifest manifest("gradient-check", common);
  manifest.parameters(config);
  Stopwatch clock;
  const auto run = synthesize_measurement(config);
  const auto report = gradient_check(config, run.data, config.initial_interface(), {corrupt, 0.05});
  manifest.timing("check", clock.seconds());

  write_file(manifest, dir / "gradient_check.csv", [&](std::ostream& os) {
    os << "node,s,analytic,boundary_form";
    for (std::size_t i = 0; i < report.steps.size(); ++i) os << ",fd_" << format_double(report.steps[i]);
    os << ",relative_error\n";
    for (const auto& r : report.rows) {
      os << r.node << ',' << format_double(r.s) << ',' << format_double(r.analytic) << ','
         << format_double(r.boundary);
      for (double fd : r.fd) os << ',' << format_double(fd);
      os << ',' << format_double(r.relative_error) << '\n';
    }
  });
  std::cout << std::left << std::setw(6) << "node" << std::setw(8) << "s" << std::setw(16) << "analytic";
  for (double step : report.steps) std::cout << std::setw(16) << ("fd@" + format_double(step));
  std::cout << "rel.err\n";
  for (const auto& r : report.rows) {
    std::cout << std::setw(6) << r.node << std::setw(8) << r.s << std::setw(16) << r.analytic;
    for (double fd : r.fd) std::cout << std::setw(16) << fd;
    std::cout << r.relative_error << (r.relative_error <= report.tolerance ? "" : "  FAIL") << '\n';
  }
  const bool pass = report.passed();
  manifest["passed"] = pass;
  manifest.timing("total", clock.seconds());
  manifest.write(dir);
  std::cout << (pass ? "gradient check passed\n" : "gradient check FAILED\n");
  return pass ? ok : check_failed;
}

int cmd_laws_check(const Common& common, std::size_t samples) {
  const auto config = load(common);
  const auto dir = prepare_out(common);
  Manifest manifest("laws-check", common);
  manifest.parameters(config);
  Stopwatch clock;
  try {
    const auto r = laws::smooth_law_bounds_check(config.laws, config.eps, samples);
    std::cout << "samples " << r.samples << "\n"
              << "max |alpha_f'|          " << r.max_friction_slope << " (bound " << config.laws.friction_bound << ")\n"
              << "max |alpha_f''|         " << r.max_friction_curvature << " (bound "
              << config.laws.friction_bound / config.laws.friction_smoothing << ")\n"
              << "max |beta + [s]^-/eps|  " << r.max_beta_deviation << " (bound 1)\n"
              << "max beta'               " << r.max_beta_slope << " (bound " << 1.0 / config.eps << ")\n"
              << "all bounds hold\n";
    manifest["passed"] = true;
    manifest["report"] = {{"samples", r.samples},
                          {"max_friction_slope", r.max_friction_slope},
                          {"max_friction_curvature", r.max_friction_curvature},
                          {"max_beta_deviation", r.max_beta_deviation},
                          {"max_beta_slope", r.max_beta_slope}};
    manifest.timing("total", clock.seconds());
    manifest.write(dir);
    return ok;
  } catch (const BoundViolated& e) {
    std::cout << "bound violated at s = " << e.s() << ": " << e.what() << '\n';
    manifest["passed"] = false;
    manifest["violation"] = {{"s", e.s()}, {"what", e.what()}};
    manifest.timing("total", clock.seconds());
    manifest.write(dir);
    return check_failed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("CRACKID_THREADS")) {
    set_thread_limit(std::atoi(threads));
  }

  CLI::App app{"Cohesive crack interface identification from boundary measurements"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "experiment config (INI)");
    if (config_required) opt->required();
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--eps", common.eps, "penalty parameter override");
    sub->add_option("--load-case", common.load_case, "load case override")
        ->check(CLI::IsMember({"contact", "stretch"}));
  };

  auto* measure = app.add_subcommand("measure", "synthesise the boundary measurement (PDAS on the true interface)");
  add_common(measure, true);

  std::string measurement_path;
  bool dump_gradients = false;
  auto* ident = app.add_subcommand("identify", "run the breaking-line identification");
  add_common(ident, true);
  ident->add_option("--measurement", measurement_path, "measurement file (default <out>/measurement.txt)");
  ident->add_flag("--dump-gradients", dump_gradients, "write gradients.csv (n,s_H,D3,Lambda2)");

  bool corrupt = false;
  auto* gcheck = app.add_subcommand("gradient-check", "volumetric shape derivative vs finite differences");
  add_common(gcheck, true);
  gcheck->add_flag("--corrupt-d3-sign", corrupt)->group("");

  std::size_t samples = 10000;
  auto* lcheck = app.add_subcommand("laws-check", "sampled bounds of the smooth interface laws");
  add_common(lcheck, false);
  lcheck->add_option("--samples", samples, "number of samples (>= 1000)")->check(CLI::Range(1000, 100000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*measure) return cmd_measure(common);
    if (*ident) return cmd_identify(common, measurement_path, dump_gradients);
    if (*gcheck) return cmd_gradient_check(common, corrupt);
    if (*lcheck) return cmd_laws_check(common, samples);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver_failure;
  }
  return ok;
}
