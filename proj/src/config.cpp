#include "crackid/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "crackid/errors.hpp"
#include "crackid/io.hpp"

namespace crackid {

IsotropicElasticity ExperimentConfig::elasticity() const {
  return IsotropicElasticity::from_young(young, poisson);
}

double ExperimentConfig::rho_value() const { return rho < 0.0 ? 1.0 / elasticity().mu : rho; }

LoadCase ExperimentConfig::load() const { return LoadCase::parse(load_case, elasticity().mu); }

ShapeOptions ExperimentConfig::shape_options() const {
  return {rho_value(), zero_curvature, single_endpoint_factor};
}

InterfaceGraph ExperimentConfig::truth() const {
  if (true_interface == "kink") {
    return InterfaceGraph::sampled(static_cast<std::size_t>(coarse_nodes),
                                   [](double x) { return std::min(0.3, x / 3.0 + 0.1); });
  }
  if (true_interface == "flat") return InterfaceGraph::constant(static_cast<std::size_t>(coarse_nodes), 0.25);
  throw ConfigError("unknown true_interface '" + true_interface + "' (expected kink|flat)");
}

InterfaceGraph ExperimentConfig::initial_interface() const {
  return InterfaceGraph::constant(static_cast<std::size_t>(coarse_nodes), initial_height);
}

void ExperimentConfig::validate() const {
  try {
    (void)elasticity();
    laws.validate();
    PenaltyParams{eps}.validate();
    (void)load();
    (void)truth();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(h_measure > 0.0) || !(h_identify > 0.0)) throw ConfigError("mesh sizes must be positive");
  if (h_measure == h_identify) {
    throw ConfigError("h_measure and h_identify must differ (same mesh for data and inversion)");
  }
  if (coarse_nodes < 3) throw ConfigError("coarse_nodes must be >= 3");
  if (!(initial_height > 0.0 && initial_height < kDomainHeight)) {
    throw ConfigError("initial_height must lie in (0, 0.5)");
  }
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  if (snapshot_every < 1) throw ConfigError("snapshot_every must be >= 1");
  if (pdas.max_outer < 1 || penalty.max_iterations < 1) throw ConfigError("iteration limits must be >= 1");
  if (!(pdas.c_scale > 0.0)) throw ConfigError("pdas_c_scale must be > 0");
  if (!(penalty.tolerance > 0.0)) throw ConfigError("penalty_tolerance must be > 0");
  if (early_stop < 0.0) throw ConfigError("early_stop must be >= 0");
  if (fd_steps.empty()) throw ConfigError("fd_steps must not be empty");
  for (double s : fd_steps) {
    if (!(s > 0.0)) throw ConfigError("fd_steps must be positive");
  }
}

namespace {

namespace pt = boost::property_tree;

double as_double(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const FormatError&) {
    throw ConfigError(key + ": not a number '" + text + "'");
  }
}

int as_int(const std::string& key, const std::string& text) {
  const double x = as_double(key, text);
  if (x != static_cast<int>(x)) throw ConfigError(key + ": not an integer '" + text + "'");
  return static_cast<int>(x);
}

bool as_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": not a boolean '" + text + "'");
}

std::vector<double> as_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(as_double(key, item.substr(b, e - b + 1)));
  }
  return out;
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  const auto f = format_double;
  return {
      {"material.young", f(young)},
      {"material.poisson", f(poisson)},
      {"laws.friction_bound", f(laws.friction_bound)},
      {"laws.friction_smoothing", f(laws.friction_smoothing)},
      {"laws.toughness", f(laws.toughness)},
      {"laws.cohesion_length", f(laws.cohesion_length)},
      {"laws.exponent", f(laws.exponent)},
      {"penalty.eps", f(eps)},
      {"geometry.true_interface", true_interface},
      {"geometry.h_measure", f(h_measure)},
      {"geometry.h_identify", f(h_identify)},
      {"geometry.coarse_nodes", std::to_string(coarse_nodes)},
      {"geometry.initial_height", f(initial_height)},
      {"algorithm.load_case", load_case},
      {"algorithm.n_max", std::to_string(n_max)},
      {"algorithm.rho", rho < 0.0 ? "auto" : f(rho)},
      {"algorithm.curvature", zero_curvature ? "zero" : "coarse"},
      {"algorithm.single_endpoint_factor", single_endpoint_factor ? "true" : "false"},
      {"algorithm.snapshot_every", std::to_string(snapshot_every)},
      {"algorithm.early_stop", f(early_stop)},
      {"algorithm.pdas_c_scale", f(pdas.c_scale)},
      {"algorithm.pdas_max_outer", std::to_string(pdas.max_outer)},
      {"algorithm.penalty_max_iterations", std::to_string(penalty.max_iterations)},
      {"algorithm.penalty_tolerance", f(penalty.tolerance)},
      {"algorithm.fd_steps", list_text(fd_steps)},
  };
}

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  ExperimentConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"material.young", [&](auto& k, auto& v) { c.young = as_double(k, v); }},
      {"material.poisson", [&](auto& k, auto& v) { c.poisson = as_double(k, v); }},
      {"laws.friction_bound", [&](auto& k, auto& v) { c.laws.friction_bound = as_double(k, v); }},
      {"laws.friction_smoothing", [&](auto& k, auto& v) { c.laws.friction_smoothing = as_double(k, v); }},
      {"laws.toughness", [&](auto& k, auto& v) { c.laws.toughness = as_double(k, v); }},
      {"laws.cohesion_length", [&](auto& k, auto& v) { c.laws.cohesion_length = as_double(k, v); }},
      {"laws.exponent", [&](auto& k, auto& v) { c.laws.exponent = as_double(k, v); }},
      {"penalty.eps", [&](auto& k, auto& v) { c.eps = as_double(k, v); }},
      {"geometry.true_interface", [&](auto&, auto& v) { c.true_interface = v; }},
      {"geometry.h_measure", [&](auto& k, auto& v) { c.h_measure = as_double(k, v); }},
      {"geometry.h_identify", [&](auto& k, auto& v) { c.h_identify = as_double(k, v); }},
      {"geometry.coarse_nodes", [&](auto& k, auto& v) { c.coarse_nodes = as_int(k, v); }},
      {"geometry.initial_height", [&](auto& k, auto& v) { c.initial_height = as_double(k, v); }},
      {"algorithm.load_case", [&](auto&, auto& v) { c.load_case = v; }},
      {"algorithm.n_max", [&](auto& k, auto& v) { c.n_max = as_int(k, v); }},
      {"algorithm.rho", [&](auto& k, auto& v) { c.rho = v == "auto" ? -1.0 : as_double(k, v); }},
      {"algorithm.curvature",
       [&](auto& k, auto& v) {
         if (v != "zero" && v != "coarse") throw ConfigError(k + ": expected coarse|zero");
         c.zero_curvature = v == "zero";
       }},
      {"algorithm.single_endpoint_factor", [&](auto& k, auto& v) { c.single_endpoint_factor = as_bool(k, v); }},
      {"algorithm.snapshot_every", [&](auto& k, auto& v) { c.snapshot_every = as_int(k, v); }},
      {"algorithm.early_stop", [&](auto& k, auto& v) { c.early_stop = as_double(k, v); }},
      {"algorithm.pdas_c_scale", [&](auto& k, auto& v) { c.pdas.c_scale = as_double(k, v); }},
      {"algorithm.pdas_max_outer", [&](auto& k, auto& v) { c.pdas.max_outer = as_int(k, v); }},
      {"algorithm.penalty_max_iterations", [&](auto& k, auto& v) { c.penalty.max_iterations = as_int(k, v); }},
      {"algorithm.penalty_tolerance", [&](auto& k, auto& v) { c.penalty.tolerance = as_double(k, v); }},
      {"algorithm.fd_steps", [&](auto& k, auto& v) { c.fd_steps = as_list(k, v); }},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(full, value.data());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(is);
}

void write_config(std::ostream& os, const ExperimentConfig& config) {
  std::string section;
  bool first = true;
  for (const auto& [key, value] : config.entries()) {
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      os << (first ? "" : "\n") << '[' << section << "]\n";
      first = false;
    }
    os << key.substr(dot + 1) << " = " << value << '\n';
  }
}

}  // namespace crackid
