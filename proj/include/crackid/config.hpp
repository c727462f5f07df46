#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "crackid/fem.hpp"
#include "crackid/geometry.hpp"
#include "crackid/laws.hpp"
#include "crackid/shape.hpp"
#include "crackid/solvers.hpp"

namespace crackid {

/// All parameters of one measurement + identification experiment.
struct ExperimentConfig {
  // [material]
  double young = 73000.0;
  double poisson = 0.34;
  // [laws]
  CohesiveParams laws;
  // [penalty]
  double eps = 1e-8;
  // [geometry]
  std::string true_interface = "kink";  ///< kink: min(0.3, x/3 + 0.1); flat: 0.25
  double h_measure = 0.01;
  double h_identify = 0.01 * 8.0 / 7.0;
  int coarse_nodes = 11;
  double initial_height = 0.25;
  // [algorithm]
  std::string load_case = "contact";
  int n_max = 200;
  double rho = -1.0;  ///< negative means 1/mu
  bool zero_curvature = false;
  bool single_endpoint_factor = false;
  int snapshot_every = 10;
  double early_stop = 0.0;  ///< stop when max|Lambda2| < early_stop * h; 0 disables
  PdasOptions pdas;
  PenaltyOptions penalty;
  std::vector<double> fd_steps = {1e-3, 1e-4};  ///< gradient-check steps in units of h

  IsotropicElasticity elasticity() const;
  double rho_value() const;
  LoadCase load() const;
  ShapeOptions shape_options() const;
  InterfaceGraph truth() const;
  InterfaceGraph initial_interface() const;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  /// Flat (section.key, value) listing of every parameter.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Reads an INI-style file; missing keys keep their defaults, unknown keys
/// are an error.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const ExperimentConfig& config);

}  // namespace crackid
