#include "crackid/fem.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include "crackid/errors.hpp"

namespace crackid {

LameParameters lame_from_young(double young, double poisson) {
  if (!(poisson < 0.5) || !(poisson > -1.0)) {
    std::ostringstream msg;
    msg << "Poisson ratio " << poisson << " outside (-1, 0.5)";
    throw InvalidPoisson(msg.str());
  }
  const double mu = young / (2.0 * (1.0 + poisson));
  return {mu, 2.0 * mu * poisson / (1.0 - 2.0 * poisson)};
}

IsotropicElasticity IsotropicElasticity::from_young(double young, double poisson) {
  const auto lame = lame_from_young(young, poisson);
  return {young, poisson, lame.mu, lame.lambda};
}

Eigen::Matrix3d IsotropicElasticity::voigt() const {
  Eigen::Matrix3d d;
  d << lambda + 2.0 * mu, lambda, 0.0,
       lambda, lambda + 2.0 * mu, 0.0,
       0.0, 0.0, mu;
  return d;
}

double jump(const BrokenMesh& mesh, const Vector& u, int node, JumpComponent c) {
  const auto& n = mesh.interface_nodes[static_cast<std::size_t>(node)];
  const int comp = static_cast<int>(c);
  return u[2 * n.plus + comp] - u[2 * n.minus + comp];
}

std::vector<double> jumps(const BrokenMesh& mesh, const Vector& u, JumpComponent c) {
  std::vector<double> out(mesh.interface_nodes.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = jump(mesh, u, static_cast<int>(k), c);
  return out;
}

namespace {

Eigen::Matrix<double, 3, 2> hat_gradients(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  Eigen::Matrix<double, 3, 2> g;
  g << p1.y() - p2.y(), p2.x() - p1.x(),
       p2.y() - p0.y(), p0.x() - p2.x(),
       p0.y() - p1.y(), p1.x() - p0.x();
  return g / det;
}

}  // namespace

Eigen::Matrix<double, 3, 2> shape_gradients(const BrokenMesh& mesh, int t) {
  const auto& v = mesh.triangles[static_cast<std::size_t>(t)].v;
  return hat_gradients(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]);
}

Mat2 field_gradient(const BrokenMesh& mesh, int t, const Vector& u) {
  const auto& v = mesh.triangles[static_cast<std::size_t>(t)].v;
  const auto g = shape_gradients(mesh, t);
  Mat2 grad = Mat2::Zero();
  for (int a = 0; a < 3; ++a) {
    const Vec2 ua(u[2 * v[a]], u[2 * v[a] + 1]);
    grad += ua * g.row(a);
  }
  return grad;
}

ElementMatrix element_stiffness(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                                const IsotropicElasticity& elast) {
  const double area =
      0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
  if (!(area > 0.0)) throw DegenerateElement("element with nonpositive area");
  const auto g = hat_gradients(p0, p1, p2);
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  for (int a = 0; a < 3; ++a) {
    b(0, 2 * a) = g(a, 0);
    b(1, 2 * a + 1) = g(a, 1);
    b(2, 2 * a) = g(a, 1);
    b(2, 2 * a + 1) = g(a, 0);
  }
  return area * b.transpose() * elast.voigt() * b;
}

Vector assemble_traction(const BrokenMesh& mesh, const BoundaryLoad& g) {
  return assemble_traction(mesh, mesh.neumann_edges, g);
}

Vector assemble_traction(const BrokenMesh& mesh, std::span<const Edge> edges, const BoundaryLoad& g) {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  const double offset = 0.5 / std::sqrt(3.0);
  for (const auto& e : edges) {
    const Vec2& pa = mesh.vertices[e.a];
    const Vec2& pb = mesh.vertices[e.b];
    const double len = (pb - pa).norm();
    for (double t : {0.5 - offset, 0.5 + offset}) {
      const Vec2 load = g((1.0 - t) * pa + t * pb) * (0.5 * len);
      for (int c = 0; c < 2; ++c) {
        f[2 * e.a + c] += (1.0 - t) * load[c];
        f[2 * e.b + c] += t * load[c];
      }
    }
  }
  return f;
}

SparseMatrix assemble_boundary_mass(const BrokenMesh& mesh, std::span<const Edge> edges) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(8 * edges.size());
  for (const auto& e : edges) {
    const double len = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
    const double diag = len / 3.0, off = len / 6.0;
    for (int c = 0; c < 2; ++c) {
      trip.emplace_back(2 * e.a + c, 2 * e.a + c, diag);
      trip.emplace_back(2 * e.b + c, 2 * e.b + c, diag);
      trip.emplace_back(2 * e.a + c, 2 * e.b + c, off);
      trip.emplace_back(2 * e.b + c, 2 * e.a + c, off);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.dof_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

namespace {

// Adds w * J_a * J_b to the triplet list, J_k = u(plus_k) - u(minus_k).
void add_jump_product(std::vector<Eigen::Triplet<double>>& trip, const InterfaceNode& na,
                      const InterfaceNode& nb, int comp, double w) {
  const int pa = 2 * na.plus + comp, ma = 2 * na.minus + comp;
  const int pb = 2 * nb.plus + comp, mb = 2 * nb.minus + comp;
  trip.emplace_back(pa, pb, w);
  trip.emplace_back(pa, mb, -w);
  trip.emplace_back(ma, pb, -w);
  trip.emplace_back(ma, mb, w);
}

}  // namespace

SparseMatrix assemble_interface_linear(const BrokenMesh& mesh, std::span<const double> edge_weights,
                                       JumpComponent c, MassLumping lumping) {
  const int comp = static_cast<int>(c);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
    const double w = edge_weights[e];
    if (w == 0.0) continue;
    const auto& edge = mesh.interface_edges[e];
    const auto& n0 = mesh.interface_nodes[edge.node0];
    const auto& n1 = mesh.interface_nodes[edge.node1];
    const double len = edge.length;
    if (lumping == MassLumping::lumped) {
      add_jump_product(trip, n0, n0, comp, w * len / 2.0);
      add_jump_product(trip, n1, n1, comp, w * len / 2.0);
    } else {
      add_jump_product(trip, n0, n0, comp, w * len / 3.0);
      add_jump_product(trip, n1, n1, comp, w * len / 3.0);
      add_jump_product(trip, n0, n1, comp, w * len / 6.0);
      add_jump_product(trip, n1, n0, comp, w * len / 6.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.dof_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_interface_nodal(const BrokenMesh& mesh, std::span<const double> node_weights,
                                      JumpComponent c) {
  const int comp = static_cast<int>(c);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < mesh.interface_nodes.size(); ++k) {
    const double w = node_weights[k];
    if (w == 0.0) continue;
    const auto& node = mesh.interface_nodes[k];
    add_jump_product(trip, node, node, comp, w * node.weight);
  }
  const auto n = static_cast<Eigen::Index>(mesh.dof_count());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

DofMap::DofMap(std::size_t dof_count, const std::vector<bool>& fixed,
               const std::vector<std::pair<int, int>>& ties)
    : index_(dof_count, 0) {
  // Union-find over ties; a class is fixed if any member is.
  std::vector<int> parent(dof_count);
  for (std::size_t i = 0; i < dof_count; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& [a, b] : ties) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<bool> root_fixed(dof_count, false);
  for (std::size_t i = 0; i < dof_count; ++i) {
    if (fixed[i]) root_fixed[find(static_cast<int>(i))] = true;
  }
  std::vector<int> root_index(dof_count, -1);
  int next = 0;
  for (std::size_t i = 0; i < dof_count; ++i) {
    const int r = find(static_cast<int>(i));
    if (root_fixed[r]) {
      index_[i] = -1;
      continue;
    }
    if (root_index[r] < 0) root_index[r] = next++;
    index_[i] = root_index[r];
  }
  reduced_size_ = static_cast<std::size_t>(next);
}

DofMap DofMap::dirichlet(const BrokenMesh& mesh, const std::vector<std::pair<int, int>>& ties) {
  std::vector<bool> fixed(mesh.dof_count(), false);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.is_dirichlet(static_cast<int>(v))) fixed[2 * v] = fixed[2 * v + 1] = true;
  }
  return DofMap(mesh.dof_count(), fixed, ties);
}

SparseMatrix DofMap::reduce(const SparseMatrix& a) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    const int rc = index_[static_cast<std::size_t>(col)];
    if (rc < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const int rr = index_[static_cast<std::size_t>(it.row())];
      if (rr >= 0) trip.emplace_back(rr, rc, it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(reduced_size_);
  SparseMatrix r(n, n);
  r.setFromTriplets(trip.begin(), trip.end());
  return r;
}

Vector DofMap::reduce(const Vector& f) const {
  Vector r = Vector::Zero(static_cast<Eigen::Index>(reduced_size_));
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (index_[i] >= 0) r[index_[i]] += f[static_cast<Eigen::Index>(i)];
  }
  return r;
}

Vector DofMap::expand(const Vector& x) const {
  Vector full = Vector::Zero(static_cast<Eigen::Index>(index_.size()));
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (index_[i] >= 0) full[static_cast<Eigen::Index>(i)] = x[index_[i]];
  }
  return full;
}

namespace {

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double r = (a * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

Vector solve_cg(const SparseMatrix& a, const Vector& b, const Vector& guess,
                const LinearSolverOptions& options, LinearSolveReport& report) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(options.tolerance * 0.5);
  cg.setMaxIterations(options.max_cg_iterations);
  cg.compute(a);
  const Vector x = cg.solveWithGuess(b, guess);
  report.used_cg = true;
  report.cg_iterations += static_cast<int>(cg.iterations());
  report.residual = relative_residual(a, x, b);
  if (report.residual > options.tolerance) {
    std::ostringstream msg;
    msg << "conjugate gradient stopped at relative residual " << report.residual << " after "
        << cg.iterations() << " iterations";
    throw MaxIterations(msg.str());
  }
  return x;
}

}  // namespace

Vector solve_spd(const SparseMatrix& a, const Vector& b, const LinearSolverOptions& options,
                 LinearSolveReport* report) {
  LinearSolveReport local;
  LinearSolveReport& rep = report ? *report : local;
  rep = {};
  if (a.rows() == 0) return Vector();
  if (b.norm() == 0.0) return Vector::Zero(b.size());
  if (options.iterative_only) return solve_cg(a, b, Vector::Zero(b.size()), options, rep);

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  ldlt.compute(a);
  if (ldlt.info() != Eigen::Success) throw NotPositiveDefinite("sparse LDL^T factorization failed");
  const Vector d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (d.minCoeff() <= 1e-13 * dmax) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (pivot ratio " << d.minCoeff() / dmax << ")";
    throw NotPositiveDefinite(msg.str());
  }
  Vector x = ldlt.solve(b);
  rep.residual = relative_residual(a, x, b);
  for (int step = 0; step < 3 && rep.residual > 0.01 * options.tolerance; ++step) {
    x += ldlt.solve(b - a * x);
    rep.residual = relative_residual(a, x, b);
    rep.refinement_steps = step + 1;
  }
  if (rep.residual > options.tolerance) return solve_cg(a, b, x, options, rep);
  return x;
}

DofField solve(const SparseSymSystem& system, const LinearSolverOptions& options,
               LinearSolveReport* report) {
  return DofField(system.map.expand(solve_spd(system.matrix, system.rhs, options, report)));
}

void write_coordinate(std::ostream& os, const SparseMatrix& a) {
  os.precision(17);
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace crackid
