#include "crackid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "crackid/errors.hpp"

namespace crackid {

InterfaceGraph::InterfaceGraph(std::vector<double> s, std::vector<double> psi)
    : s_(std::move(s)), psi_(std::move(psi)) {
  if (s_.size() != psi_.size() || s_.size() < 2) {
    throw InvalidInterface("interface graph needs at least two (s, psi) nodes");
  }
  if (s_.front() != 0.0 || s_.back() != 1.0) {
    throw InvalidInterface("interface graph must start at s = 0 and end at s = 1");
  }
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (k > 0 && !(s_[k] > s_[k - 1])) {
      throw InvalidInterface("interface nodes must be strictly increasing in s");
    }
    if (!(psi_[k] > 0.0 && psi_[k] < kDomainHeight)) {
      std::ostringstream msg;
      msg << "interface height " << psi_[k] << " at s = " << s_[k] << " outside (0, 0.5)";
      throw InvalidInterface(msg.str());
    }
  }
}

InterfaceGraph InterfaceGraph::constant(std::size_t nodes, double value) {
  return sampled(nodes, [value](double) { return value; });
}

InterfaceGraph InterfaceGraph::sampled(std::size_t nodes, const std::function<double(double)>& f) {
  if (nodes < 2) throw InvalidInterface("interface graph needs at least two nodes");
  std::vector<double> s(nodes), psi(nodes);
  const double n = static_cast<double>(nodes - 1);
  for (std::size_t k = 0; k < nodes; ++k) {
    s[k] = static_cast<double>(k) / n;
    psi[k] = f(s[k]);
  }
  s.back() = 1.0;
  return InterfaceGraph(std::move(s), std::move(psi));
}

double InterfaceGraph::operator()(double x) const {
  if (x <= s_.front()) return psi_.front();
  if (x >= s_.back()) return psi_.back();
  const auto it = std::upper_bound(s_.begin(), s_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
  const double t = (x - s_[k]) / (s_[k + 1] - s_[k]);
  return (1.0 - t) * psi_[k] + t * psi_[k + 1];
}

double InterfaceGraph::spacing() const {
  double H = 0.0;
  for (std::size_t k = 1; k < s_.size(); ++k) H = std::max(H, s_[k] - s_[k - 1]);
  return H;
}

double InterfaceGraph::length() const {
  double len = 0.0;
  for (std::size_t k = 1; k < s_.size(); ++k) {
    len += std::hypot(s_[k] - s_[k - 1], psi_[k] - psi_[k - 1]);
  }
  return len;
}

double InterfaceGraph::min_height() const { return *std::min_element(psi_.begin(), psi_.end()); }
double InterfaceGraph::max_height() const { return *std::max_element(psi_.begin(), psi_.end()); }

InterfaceGraph true_interface(std::size_t nodes) {
  return InterfaceGraph::sampled(nodes, [](double x) { return std::min(0.3, x / 3.0 + 0.1); });
}

std::vector<double> coarse_curvature(const InterfaceGraph& psi) {
  const auto s = psi.s();
  const auto y = psi.psi();
  std::vector<double> kappa(psi.size(), 0.0);
  for (std::size_t k = 1; k + 1 < psi.size(); ++k) {
    const double hm = s[k] - s[k - 1];
    const double hp = s[k + 1] - s[k];
    const double d1 = (y[k + 1] - y[k - 1]) / (hp + hm);
    const double d2 = 2.0 * ((y[k + 1] - y[k]) / hp - (y[k] - y[k - 1]) / hm) / (hp + hm);
    kappa[k] = -d2 / std::pow(1.0 + d1 * d1, 1.5);
  }
  return kappa;
}

bool BrokenMesh::is_dirichlet(int vertex) const {
  const double x = vertices[static_cast<std::size_t>(vertex)].x();
  return x == columns.front() || x == columns.back();
}

double BrokenMesh::triangle_area(int t) const {
  const auto& tri = triangles[static_cast<std::size_t>(t)].v;
  const Vec2 e1 = vertices[tri[1]] - vertices[tri[0]];
  const Vec2 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

std::vector<double> column_grid(const InterfaceGraph& psi, double h) {
  const auto s = psi.s();
  std::vector<double> xs;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double len = s[k + 1] - s[k];
    const int n = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
    for (int j = 0; j < n; ++j) xs.push_back(s[k] + len * j / n);
  }
  xs.push_back(1.0);
  return xs;
}

int layer_count(double h) {
  return std::max(2, static_cast<int>(std::ceil(0.25 / h - 1e-9)));
}

BrokenMesh build_mesh(const InterfaceGraph& psi, double h) {
  if (!(h > 0.0)) throw InvalidInterface("mesh size h must be positive");
  const double margin = std::min(psi.min_height(), kDomainHeight - psi.max_height());
  if (margin < 2.0 * h * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "breaking line comes within " << margin << " of the outer boundary (needs >= 2h = "
        << 2.0 * h << ")";
    throw InterfaceTooClose(msg.str());
  }

  BrokenMesh mesh;
  mesh.h = h;
  mesh.columns = column_grid(psi, h);
  mesh.layers = layer_count(h);
  const int nc = static_cast<int>(mesh.columns.size()) - 1;
  const int n = mesh.layers;
  const int per_column = n + 1;
  const int block = (nc + 1) * per_column;

  auto lower = [&](int i, int j) { return i * per_column + j; };
  auto upper = [&](int i, int j) { return block + i * per_column + j; };

  mesh.vertices.resize(2 * static_cast<std::size_t>(block));
  mesh.vertex_side.resize(mesh.vertices.size());
  for (int i = 0; i <= nc; ++i) {
    const double x = mesh.columns[i];
    const double y = psi(x);
    for (int j = 0; j <= n; ++j) {
      const double t = static_cast<double>(j) / n;
      mesh.vertices[lower(i, j)] = Vec2(x, j == n ? y : y * t);
      mesh.vertex_side[lower(i, j)] = Side::minus;
      mesh.vertices[upper(i, j)] = Vec2(x, j == n ? kDomainHeight : y + (kDomainHeight - y) * t);
      mesh.vertex_side[upper(i, j)] = Side::plus;
    }
  }

  mesh.triangles.reserve(4 * static_cast<std::size_t>(nc) * n);
  for (Side side : {Side::minus, Side::plus}) {
    auto vid = [&](int i, int j) { return side == Side::minus ? lower(i, j) : upper(i, j); };
    for (int i = 0; i < nc; ++i) {
      for (int j = 0; j < n; ++j) {
        const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
        mesh.triangles.push_back({{a, b, c}, side});
        mesh.triangles.push_back({{a, c, d}, side});
      }
    }
  }
  const double min_area = 1e-6 * h * h;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.triangle_area(static_cast<int>(t)) < min_area) {
      throw DegenerateElement("triangle " + std::to_string(t) + " has area below 1e-6 h^2");
    }
  }

  for (int i = 0; i < nc; ++i) {
    mesh.neumann_edges.push_back({lower(i, 0), lower(i + 1, 0)});
    mesh.neumann_edges.push_back({upper(i, n), upper(i + 1, n)});
  }
  mesh.observation_edges = mesh.neumann_edges;
  for (int col : {0, nc}) {
    for (int j = 0; j < n; ++j) {
      mesh.dirichlet_edges.push_back({lower(col, j), lower(col, j + 1)});
      mesh.dirichlet_edges.push_back({upper(col, j), upper(col, j + 1)});
    }
  }

  for (int i = 0; i <= nc; ++i) {
    mesh.interface_nodes.push_back({upper(i, 0), lower(i, n), mesh.columns[i], 0.0});
  }
  const int plus_offset = 2 * nc * n;
  for (int i = 0; i < nc; ++i) {
    InterfaceEdge e;
    e.node0 = i;
    e.node1 = i + 1;
    e.tri_minus = 2 * (i * n + (n - 1)) + 1;
    e.tri_plus = plus_offset + 2 * (i * n);
    const Vec2 d = mesh.vertices[lower(i + 1, n)] - mesh.vertices[lower(i, n)];
    e.length = d.norm();
    e.tangent = d / e.length;
    e.normal = Vec2(-e.tangent.y(), e.tangent.x());
    mesh.interface_edges.push_back(e);
    mesh.interface_nodes[i].weight += 0.5 * e.length;
    mesh.interface_nodes[i + 1].weight += 0.5 * e.length;
  }
  return mesh;
}

std::vector<InterfaceFrameEntry> interface_frame(const BrokenMesh& mesh) {
  std::vector<InterfaceFrameEntry> frame;
  frame.reserve(mesh.interface_edges.size());
  for (const auto& e : mesh.interface_edges) frame.push_back({e.normal, e.tangent, e.length});
  return frame;
}

int connected_components(const BrokenMesh& mesh) {
  const std::size_t nt = mesh.triangles.size();
  std::vector<std::size_t> parent(nt);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  struct Key {
    int a, b;
    std::size_t t;
  };
  std::vector<Key> keys;
  keys.reserve(3 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangles[t].v;
    for (int k = 0; k < 3; ++k) {
      const int a = v[k], b = v[(k + 1) % 3];
      keys.push_back({std::min(a, b), std::max(a, b), t});
    }
  }
  std::sort(keys.begin(), keys.end(),
            [](const Key& l, const Key& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
  for (std::size_t k = 1; k < keys.size(); ++k) {
    if (keys[k].a == keys[k - 1].a && keys[k].b == keys[k - 1].b) {
      parent[find(keys[k].t)] = find(keys[k - 1].t);
    }
  }
  int components = 0;
  for (std::size_t t = 0; t < nt; ++t) components += find(t) == t ? 1 : 0;
  return components;
}

void write_mesh(std::ostream& os, const BrokenMesh& mesh) {
  os.precision(17);
  os << "# mesh v1 h " << mesh.h << "\n";
  os << "vertices " << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << i << ' ' << mesh.vertices[i].x() << ' ' << mesh.vertices[i].y() << ' '
       << static_cast<int>(mesh.vertex_side[i]) << "\n";
  }
  os << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << t << ' ' << tri.v[0] << ' ' << tri.v[1] << ' ' << tri.v[2] << ' '
       << static_cast<int>(tri.side) << "\n";
  }
  os << "interface " << mesh.interface_edges.size() << "\n";
  for (const auto& e : mesh.interface_edges) {
    const auto& n0 = mesh.interface_nodes[e.node0];
    const auto& n1 = mesh.interface_nodes[e.node1];
    os << n0.plus << ' ' << n1.plus << ' ' << n0.minus << ' ' << n1.minus << ' ' << e.tri_plus
       << ' ' << e.tri_minus << "\n";
  }
}

}  // namespace crackid
