#include "crackid/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace crackid {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;  // data window
  double left, top, width, height;  // pixels

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + (y1 - y) / (y1 - y0) * height; }
};

void open_svg(std::ostream& os, double w, double h) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  os << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width)
     << "\" height=\"" << num(f.height) << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(f.left + f.width / 2) << "\" y=\"" << num(f.top + f.height + 35)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n";
  os << "<text x=\"" << num(f.left - 45) << "\" y=\"" << num(f.top + f.height / 2)
     << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << num(f.left - 45) << ' '
     << num(f.top + f.height / 2) << ")\">" << ylabel << "</text>\n";
}

void tick(std::ostream& os, double x, double y, const std::string& label, bool vertical_axis) {
  if (vertical_axis) {
    os << "<text x=\"" << num(x - 6) << "\" y=\"" << num(y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
  } else {
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y + 16)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
  }
}

void polyline(std::ostream& os, const std::vector<std::pair<double, double>>& pts, const std::string& color,
              double width, const std::string& extra = "") {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width) << '"' << extra
     << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
  }
  os << "\"/>\n";
}

int status_rank(NodeStatus s) {
  switch (s) {
    case NodeStatus::contact: return 2;
    case NodeStatus::cohesive: return 1;
    case NodeStatus::open: break;
  }
  return 0;
}

}  // namespace

void write_deformed_svg(std::ostream& os, const BrokenMesh& mesh, const Vector& z, const ActiveSet& active) {
  std::vector<Vec2> cur(mesh.vertices.size());
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    cur[i] = mesh.vertices[i] + Vec2(z[2 * i], z[2 * i + 1]);
    x0 = std::min(x0, cur[i].x());
    x1 = std::max(x1, cur[i].x());
    y0 = std::min(y0, cur[i].y());
    y1 = std::max(y1, cur[i].y());
  }
  const double scale = 800.0 / std::max(x1 - x0, y1 - y0);
  const Frame f{x0, x1, y0, y1, 20, 20, (x1 - x0) * scale, (y1 - y0) * scale};
  open_svg(os, f.width + 40, f.height + 80);

  std::vector<int> fill(mesh.triangles.size(), 0);
  for (const auto& e : mesh.interface_edges) {
    int rank = 0;
    if (!active.status.empty()) {
      rank = std::max(status_rank(active.status[e.node0]), status_rank(active.status[e.node1]));
    }
    fill[e.tri_plus] = std::max(fill[e.tri_plus], rank);
    fill[e.tri_minus] = std::max(fill[e.tri_minus], rank);
  }
  static const char* colors[] = {"none", "#f4a261", "#d62828"};
  os << "<g stroke=\"#555\" stroke-width=\"0.3\">\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t].v;
    os << "<polygon fill=\"" << colors[fill[t]] << "\" points=\"";
    for (int a = 0; a < 3; ++a) os << (a ? " " : "") << num(f.px(cur[v[a]].x())) << ',' << num(f.py(cur[v[a]].y()));
    os << "\"/>\n";
  }
  os << "</g>\n";
  const double ly = f.top + f.height + 30;
  os << "<rect x=\"20\" y=\"" << num(ly) << "\" width=\"14\" height=\"14\" fill=\"" << colors[2] << "\"/>\n"
     << "<text x=\"40\" y=\"" << num(ly + 12) << "\" font-size=\"13\">contact</text>\n"
     << "<rect x=\"120\" y=\"" << num(ly) << "\" width=\"14\" height=\"14\" fill=\"" << colors[1] << "\"/>\n"
     << "<text x=\"140\" y=\"" << num(ly + 12) << "\" font-size=\"13\">cohesion</text>\n";
  os << "</svg>\n";
}

void write_ratios_svg(std::ostream& os, const IterationLog& log) {
  const double n_last = log.records.empty() ? 1.0 : std::max(1, log.records.back().n);
  double lo = 1.0;
  for (const auto& r : log.records) {
    if (r.J_ratio > 0.0) lo = std::min(lo, r.J_ratio);
    if (r.shape_error_ratio > 0.0) lo = std::min(lo, r.shape_error_ratio);
  }
  double hi = 1.0;
  for (const auto& r : log.records) hi = std::max({hi, r.J_ratio, r.shape_error_ratio});
  const double d0 = std::floor(std::log10(lo)), d1 = std::ceil(std::log10(hi) + 1e-12);
  const Frame f{0.0, n_last, d0, std::max(d1, d0 + 1), 80, 20, 600, 360};
  open_svg(os, 720, 440);
  axes(os, f, "iteration n", "ratio (log10)");
  for (int d = static_cast<int>(f.y0); d <= static_cast<int>(f.y1); ++d) {
    tick(os, f.left, f.py(d), "1e" + std::to_string(d), true);
  }
  for (int k = 0; k <= 4; ++k) {
    const double n = n_last * k / 4.0;
    tick(os, f.px(n), f.top + f.height, num(n), false);
  }
  std::vector<std::pair<double, double>> pj, ps;
  for (const auto& r : log.records) {
    if (r.J_ratio > 0.0) pj.emplace_back(f.px(r.n), f.py(std::log10(r.J_ratio)));
    if (r.shape_error_ratio > 0.0) ps.emplace_back(f.px(r.n), f.py(std::log10(r.shape_error_ratio)));
  }
  polyline(os, pj, "#1d3557", 1.5);
  polyline(os, ps, "#e63946", 1.5, " stroke-dasharray=\"6 3\"");
  os << "<text x=\"" << num(f.left + f.width - 150) << "\" y=\"40\" font-size=\"13\" fill=\"#1d3557\">J ratio</text>\n"
     << "<text x=\"" << num(f.left + f.width - 150) << "\" y=\"58\" font-size=\"13\" fill=\"#e63946\">shape error ratio</text>\n";
  os << "</svg>\n";
}

void write_interfaces_svg(std::ostream& os, const IterationLog& log, const InterfaceGraph& truth,
                          const std::vector<int>& selection) {
  const Frame f{0.0, 1.0, 0.0, kDomainHeight, 80, 20, 800, 400};
  open_svg(os, 920, 480);
  axes(os, f, "x1", "x2");
  for (int k = 0; k <= 4; ++k) {
    tick(os, f.px(k / 4.0), f.top + f.height, num(k / 4.0), false);
    tick(os, f.left, f.py(k * kDomainHeight / 4.0), num(k * kDomainHeight / 4.0), true);
  }
  auto curve = [&](const InterfaceGraph& g) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < g.size(); ++k) pts.emplace_back(f.px(g.s()[k]), f.py(g.psi()[k]));
    return pts;
  };
  polyline(os, curve(truth), "black", 3.0);
  static const char* palette[] = {"#264653", "#2a9d8f", "#8ab17d", "#e9c46a", "#f4a261", "#e76f51"};
  std::size_t drawn = 0;
  for (int n : selection) {
    const auto it = std::find_if(log.snapshots.begin(), log.snapshots.end(),
                                 [&](const auto& s) { return s.first == n; });
    if (it == log.snapshots.end()) continue;
    const char* color = palette[drawn % 6];
    os << "<g data-iteration=\"" << n << "\">\n";
    polyline(os, curve(it->second), color, 1.5);
    os << "</g>\n";
    os << "<text x=\"" << num(f.left + f.width - 90) << "\" y=\"" << num(f.top + 18 + 16.0 * drawn)
       << "\" font-size=\"12\" fill=\"" << color << "\">n = " << n << "</text>\n";
    ++drawn;
  }
  os << "</svg>\n";
}

}  // namespace crackid
