#include "crackid/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crackid/errors.hpp"

namespace crackid {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return x;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

void expect_header(std::istream& is, std::string_view header) {
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw FormatError("expected header '" + std::string(header) + "'");
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write " + path.string());
  return os;
}

}  // namespace

void write_interface(std::ostream& os, const InterfaceGraph& psi) {
  os << "# interface v1\n";
  for (std::size_t k = 0; k < psi.size(); ++k) {
    os << format_double(psi.s()[k]) << ' ' << format_double(psi.psi()[k]) << '\n';
  }
}

InterfaceGraph read_interface(std::istream& is) {
  expect_header(is, "# interface v1");
  std::vector<double> s, psi;
  for (std::string line; std::getline(is, line);) {
    const auto w = split(line);
    if (w.empty() || w[0].starts_with('#')) continue;
    if (w.size() != 2) throw FormatError("interface line needs 's psi': '" + line + "'");
    s.push_back(parse_double(w[0]));
    psi.push_back(parse_double(w[1]));
  }
  try {
    return InterfaceGraph(std::move(s), std::move(psi));
  } catch (const InvalidInterface& e) {
    throw FormatError(std::string("invalid interface file: ") + e.what());
  }
}

void save_interface(const std::filesystem::path& path, const InterfaceGraph& psi) {
  auto os = open_out(path);
  write_interface(os, psi);
}

InterfaceGraph load_interface(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_interface(is);
}

void write_measurement(std::ostream& os, const Measurement& m) {
  os << "# measurement v1\n";
  os << "# h " << format_double(m.h) << '\n';
  os << "# load_case " << m.load_case << '\n';
  for (const auto& s : m.samples) {
    os << format_double(s.x.x()) << ' ' << format_double(s.x.y()) << ' ' << format_double(s.u.x())
       << ' ' << format_double(s.u.y()) << '\n';
  }
}

Measurement read_measurement(std::istream& is) {
  expect_header(is, "# measurement v1");
  Measurement m;
  bool have_h = false, have_case = false;
  for (std::string line; std::getline(is, line);) {
    const auto w = split(line);
    if (w.empty()) continue;
    if (w[0] == "#") {
      if (w.size() == 3 && w[1] == "h") {
        m.h = parse_double(w[2]);
        have_h = true;
      } else if (w.size() == 3 && w[1] == "load_case") {
        m.load_case = w[2];
        have_case = true;
      }
      continue;
    }
    if (w.size() != 4) throw FormatError("measurement line needs 'x1 x2 u1 u2': '" + line + "'");
    m.samples.push_back({{parse_double(w[0]), parse_double(w[1])}, {parse_double(w[2]), parse_double(w[3])}});
  }
  if (!have_h || !have_case) throw FormatError("measurement header lacks h or load_case");
  return m;
}

void save_measurement(const std::filesystem::path& path, const Measurement& m) {
  auto os = open_out(path);
  write_measurement(os, m);
}

Measurement load_measurement(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_measurement(is);
}

}  // namespace crackid
