#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "crackid/geometry.hpp"

namespace crackid {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

/// "# interface v1" followed by one "s psi" pair per line.
void write_interface(std::ostream& os, const InterfaceGraph& psi);
InterfaceGraph read_interface(std::istream& is);
void save_interface(const std::filesystem::path& path, const InterfaceGraph& psi);
InterfaceGraph load_interface(const std::filesystem::path& path);

/// Boundary trace of the displacement at the observation vertices.
struct Measurement {
  struct Sample {
    Vec2 x;
    Vec2 u;
    bool operator==(const Sample&) const = default;
  };

  double h = 0.0;
  std::string load_case;
  std::vector<Sample> samples;

  bool operator==(const Measurement&) const = default;
};

/// "# measurement v1", "# h <h>", "# load_case <id>", then "x1 x2 u1 u2" lines.
void write_measurement(std::ostream& os, const Measurement& m);
Measurement read_measurement(std::istream& is);
void save_measurement(const std::filesystem::path& path, const Measurement& m);
Measurement load_measurement(const std::filesystem::path& path);

}  // namespace crackid
