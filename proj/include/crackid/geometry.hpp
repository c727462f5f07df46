#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace crackid {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Height of the hold-all rectangle (0,1) x (0,kDomainHeight).
inline constexpr double kDomainHeight = 0.5;

/// Breaking line x2 = psi(x1) given by its values on a coarse grid, linearly
/// interpolated in between.
class InterfaceGraph {
 public:
  InterfaceGraph() = default;
  /// Throws InvalidInterface unless s starts at 0, ends at 1, increases
  /// strictly, and every psi lies in (0, 0.5).
  InterfaceGraph(std::vector<double> s, std::vector<double> psi);

  static InterfaceGraph constant(std::size_t nodes, double value);
  static InterfaceGraph sampled(std::size_t nodes, const std::function<double(double)>& f);

  std::size_t size() const { return s_.size(); }
  std::span<const double> s() const { return s_; }
  std::span<const double> psi() const { return psi_; }
  double operator()(double x) const;

  /// Largest coarse spacing H.
  double spacing() const;
  /// Length of the polyline through the nodes.
  double length() const;
  double min_height() const;
  double max_height() const;

  bool operator==(const InterfaceGraph&) const = default;

 private:
  std::vector<double> s_;
  std::vector<double> psi_;
};

/// The reference breaking line min(0.3, x1/3 + 0.1) on `nodes` equidistant
/// points (exact whenever 0.6 is a grid point).
InterfaceGraph true_interface(std::size_t nodes = 11);

/// Curvature div_tau(nu) of the graph at its nodes for the upward normal;
/// zero at both end nodes.
std::vector<double> coarse_curvature(const InterfaceGraph& psi);

enum class Side : std::int8_t { minus = -1, plus = 1 };

struct Triangle {
  std::array<int, 3> v;
  Side side;
};

struct Edge {
  int a;
  int b;
};

/// A duplicated vertex on the breaking line.
struct InterfaceNode {
  int plus;
  int minus;
  double x;
  double weight;  ///< half the length of the adjacent interface edges
};

/// Matched pair of coincident edges on the two faces of the breaking line.
struct InterfaceEdge {
  int node0;  ///< index into interface_nodes (left end)
  int node1;
  int tri_plus;
  int tri_minus;
  Vec2 normal;   ///< unit, from the minus side into the plus side
  Vec2 tangent;  ///< unit, positive x1 component
  double length;
};

/// Conforming triangulation of the rectangle cut along the breaking line.
/// Vertex layout: the minus block (below the line) followed by the plus
/// block; each block is column-major with `layers + 1` vertices per column.
struct BrokenMesh {
  std::vector<Vec2> vertices;
  std::vector<Side> vertex_side;
  std::vector<Triangle> triangles;
  std::vector<Edge> dirichlet_edges;
  std::vector<Edge> neumann_edges;
  std::vector<Edge> observation_edges;
  std::vector<InterfaceNode> interface_nodes;
  std::vector<InterfaceEdge> interface_edges;
  std::vector<double> columns;
  int layers = 0;
  double h = 0.0;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t dof_count() const { return 2 * vertices.size(); }
  bool is_dirichlet(int vertex) const;
  double triangle_area(int t) const;
};

/// Column abscissae: each coarse segment of psi is split into ceil(len/h)
/// equal columns, so coarse nodes are always mesh lines.
std::vector<double> column_grid(const InterfaceGraph& psi, double h);

/// Number of vertical layers on each side of the breaking line.
int layer_count(double h);

BrokenMesh build_mesh(const InterfaceGraph& psi, double h);

struct InterfaceFrameEntry {
  Vec2 normal;
  Vec2 tangent;
  double length;
};

std::vector<InterfaceFrameEntry> interface_frame(const BrokenMesh& mesh);

/// Connected components of the triangle adjacency graph (edges shared by
/// two triangles); the broken mesh has exactly two.
int connected_components(const BrokenMesh& mesh);

/// Debug listing: "vertices N" then "i x y side", "triangles M" then
/// "i a b c side", then the interface pairs.
void write_mesh(std::ostream& os, const BrokenMesh& mesh);

}  // namespace crackid
