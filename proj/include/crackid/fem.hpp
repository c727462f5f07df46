#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "crackid/geometry.hpp"

namespace crackid {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using ElementMatrix = Eigen::Matrix<double, 6, 6>;

struct LameParameters {
  double mu;
  double lambda;
};

/// mu = E/(2(1+nu)), lambda = 2 mu nu/(1-2nu). Throws InvalidPoisson unless
/// -1 < nu < 0.5.
LameParameters lame_from_young(double young, double poisson);

/// Plane-strain isotropic Hooke law sigma = 2 mu eps + lambda tr(eps) I.
struct IsotropicElasticity {
  double young = 73000.0;
  double poisson = 0.34;
  double mu = 0.0;
  double lambda = 0.0;

  static IsotropicElasticity from_young(double young, double poisson);

  Mat2 stress(const Mat2& strain) const {
    return 2.0 * mu * strain + lambda * strain.trace() * Mat2::Identity();
  }
  /// Voigt matrix acting on (eps11, eps22, 2 eps12).
  Eigen::Matrix3d voigt() const;
};

/// Nodal vector field with two components per mesh vertex, dof 2v + c.
struct DofField {
  Vector values;

  DofField() = default;
  explicit DofField(Vector v) : values(std::move(v)) {}
  static DofField zero(const BrokenMesh& mesh) { return DofField(Vector::Zero(mesh.dof_count())); }

  Vec2 at(int vertex) const { return {values[2 * vertex], values[2 * vertex + 1]}; }
};

/// Component of the jump plus-minus: 0 is [[u]]_1, 1 is [[u]]_2.
enum class JumpComponent : int { first = 0, second = 1 };

/// [[u]]_c at interface node k.
double jump(const BrokenMesh& mesh, const Vector& u, int node, JumpComponent c);
std::vector<double> jumps(const BrokenMesh& mesh, const Vector& u, JumpComponent c);

/// Gradients of the three P1 hat functions (rows) of triangle t.
Eigen::Matrix<double, 3, 2> shape_gradients(const BrokenMesh& mesh, int t);

/// Constant gradient (d u_i / d x_j) of a P1 field on triangle t.
Mat2 field_gradient(const BrokenMesh& mesh, int t, const Vector& u);

inline Mat2 strain_of(const Mat2& grad) { return 0.5 * (grad + grad.transpose()); }

ElementMatrix element_stiffness(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                                const IsotropicElasticity& elast);

/// Global stiffness; element matrices are computed in parallel and scattered
/// in triangle order, so the result does not depend on the thread count.
SparseMatrix assemble_stiffness(const BrokenMesh& mesh, const IsotropicElasticity& elast);

namespace serial {
SparseMatrix assemble_stiffness(const BrokenMesh& mesh, const IsotropicElasticity& elast);
}

using BoundaryLoad = std::function<Vec2(const Vec2&)>;

/// Edge-wise two-point Gauss quadrature of g . phi over the Neumann edges.
Vector assemble_traction(const BrokenMesh& mesh, const BoundaryLoad& g);
Vector assemble_traction(const BrokenMesh& mesh, std::span<const Edge> edges, const BoundaryLoad& g);

/// Consistent P1 mass of both displacement components on the given edges.
SparseMatrix assemble_boundary_mass(const BrokenMesh& mesh, std::span<const Edge> edges);

enum class MassLumping { consistent, lumped };

/// Jump-mass matrix: quadratic form sum_e w_e int_e [[u]]_c^2.
SparseMatrix assemble_interface_linear(const BrokenMesh& mesh, std::span<const double> edge_weights,
                                       JumpComponent c,
                                       MassLumping lumping = MassLumping::consistent);

/// Nodal jump-mass: quadratic form sum_k w_k l_k [[u]]_c(k)^2 with l_k the
/// node's interface weight.
SparseMatrix assemble_interface_nodal(const BrokenMesh& mesh, std::span<const double> node_weights,
                                      JumpComponent c);

/// Maps full dofs to the unknowns of a reduced system. Fixed dofs map to -1
/// and carry zero; tied dofs share one unknown.
class DofMap {
 public:
  DofMap() = default;
  /// `ties` pairs (a, b) force u_a = u_b.
  DofMap(std::size_t dof_count, const std::vector<bool>& fixed,
         const std::vector<std::pair<int, int>>& ties = {});

  static DofMap dirichlet(const BrokenMesh& mesh,
                          const std::vector<std::pair<int, int>>& ties = {});

  std::size_t full_size() const { return index_.size(); }
  std::size_t reduced_size() const { return reduced_size_; }
  int operator[](std::size_t dof) const { return index_[dof]; }

  SparseMatrix reduce(const SparseMatrix& a) const;
  Vector reduce(const Vector& f) const;
  Vector expand(const Vector& x) const;

 private:
  std::vector<int> index_;
  std::size_t reduced_size_ = 0;
};

struct SparseSymSystem {
  SparseMatrix matrix;
  Vector rhs;
  DofMap map;
};

struct LinearSolverOptions {
  double tolerance = 1e-10;
  int max_cg_iterations = 20000;
  bool iterative_only = false;
};

struct LinearSolveReport {
  double residual = 0.0;
  int refinement_steps = 0;
  int cg_iterations = 0;
  bool used_cg = false;
};

/// Solves A x = b for symmetric positive definite A by sparse LDL^T with
/// iterative refinement, falling back to diagonally preconditioned CG.
/// Throws NotPositiveDefinite or MaxIterations.
Vector solve_spd(const SparseMatrix& a, const Vector& b, const LinearSolverOptions& options = {},
                 LinearSolveReport* report = nullptr);

/// Reduces, solves, expands; fixed dofs come back as exact zeros.
DofField solve(const SparseSymSystem& system, const LinearSolverOptions& options = {},
               LinearSolveReport* report = nullptr);

/// Caps the OpenMP team used by the assembly kernels (<= 0 leaves it alone).
void set_thread_limit(int threads);
int thread_limit();

/// Coordinate listing "i j value" of the stored entries.
void write_coordinate(std::ostream& os, const SparseMatrix& a);

}  // namespace crackid
