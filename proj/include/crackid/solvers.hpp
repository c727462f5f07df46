#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crackid/fem.hpp"
#include "crackid/geometry.hpp"
#include "crackid/laws.hpp"

namespace crackid {

/// Boundary traction g = (0, (1 - a x1)(4 x2 - 1) mu) on the Neumann edges;
/// a = 7/4 for the contact case, 5/4 for the stretching case.
class LoadCase {
 public:
  enum class Kind { zero, contact, stretch };

  LoadCase() = default;
  LoadCase(Kind kind, double mu) : kind_(kind), mu_(mu) {}
  /// Accepts "zero", "contact", "stretch"; throws ConfigError otherwise.
  static LoadCase parse(std::string_view id, double mu);

  Kind kind() const { return kind_; }
  std::string id() const;
  double slope() const;
  Vec2 traction(const Vec2& x) const;
  /// d g_i / d x_j
  Mat2 traction_gradient(const Vec2& x) const;
  BoundaryLoad function() const;

 private:
  Kind kind_ = Kind::zero;
  double mu_ = 0.0;
};

/// Stiffness and traction vector of one mesh, shared by the state, VI and
/// adjoint solves.
struct StateOperator {
  SparseMatrix stiffness;
  Vector traction;
};

StateOperator assemble_state(const BrokenMesh& mesh, const IsotropicElasticity& elast,
                             const LoadCase& load);

enum class NodeStatus { open, cohesive, contact };

struct ActiveSet {
  std::vector<NodeStatus> status;
  std::vector<double> multiplier;  ///< lambda per interface node, <= 0

  std::size_t contact_count() const;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<std::size_t> active_sizes;
  bool cycle_broken = false;
  bool damped = false;
};

struct PdasOptions {
  int max_outer = 50;
  /// Complementarity constant c = c_scale * mu / h.
  double c_scale = 1.0;
};

struct VIResult {
  DofField z;
  ActiveSet active;
  SolveReport report;
};

/// Non-penetration VI with lagged friction sign and cohesion indicator,
/// solved by a primal-dual active set loop on the normal jump.
VIResult solve_vi_pdas(const BrokenMesh& mesh, const CohesiveParams& laws,
                       const IsotropicElasticity& elast, const StateOperator& op,
                       const PdasOptions& options = {});
VIResult solve_vi_pdas(const BrokenMesh& mesh, const CohesiveParams& laws,
                       const IsotropicElasticity& elast, const LoadCase& load,
                       const PdasOptions& options = {});

struct PenaltyOptions {
  int max_iterations = 60;
  double tolerance = 1e-10;
};

struct PenaltyResult {
  DofField u;
  SolveReport report;
  std::size_t penetration_count = 0;
};

/// Penalised state equation: semismooth Newton on the penetration set with
/// lagged friction and cohesion; damped Newton when the sets cycle.
PenaltyResult solve_penalty_state(const BrokenMesh& mesh, const CohesiveParams& laws,
                                  const IsotropicElasticity& elast, const StateOperator& op,
                                  double eps, const PenaltyOptions& options = {});
PenaltyResult solve_penalty_state(const BrokenMesh& mesh, const CohesiveParams& laws,
                                  const IsotropicElasticity& elast, const LoadCase& load,
                                  double eps, const PenaltyOptions& options = {});

/// Full residual of the penalised state equation (Dirichlet rows included).
Vector penalty_residual(const BrokenMesh& mesh, const CohesiveParams& laws, const StateOperator& op,
                        const Vector& u, double eps);

struct AdjointResult {
  DofField v;
  SolveReport report;
};

/// Linear adjoint: (K + jump mass with weight beta_h'([[u]]_2)) v = M_O (u - z).
/// `z` holds observed displacements at the observation vertices (full dof layout).
AdjointResult solve_adjoint(const BrokenMesh& mesh, const IsotropicElasticity& elast,
                            const StateOperator& op, const Vector& u, const Vector& z, double eps);
AdjointResult solve_adjoint(const BrokenMesh& mesh, const CohesiveParams& laws,
                            const IsotropicElasticity& elast, const Vector& u, const Vector& z,
                            double eps);

/// Adjoint system matrix before Dirichlet elimination.
SparseMatrix adjoint_matrix(const BrokenMesh& mesh, const StateOperator& op, const Vector& u,
                            double eps);

/// beta_h([[u]]_2) per interface node, the penalty estimate of lambda.
std::vector<double> recover_multiplier(const BrokenMesh& mesh, const Vector& u, double eps);

/// Interface force sum_k l_k (a1_k B1_k + a2_k B2_k) for per-node law values.
Vector interface_force(const BrokenMesh& mesh, std::span<const double> first,
                       std::span<const double> second);

/// sqrt(sum_k l_k f_k^2), the nodal-quadrature L2 norm over the breaking line.
double interface_l2(const BrokenMesh& mesh, std::span<const double> nodal);

}  // namespace crackid
