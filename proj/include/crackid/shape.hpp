#pragma once

#include <span>
#include <vector>

#include "crackid/fem.hpp"
#include "crackid/geometry.hpp"
#include "crackid/laws.hpp"
#include "crackid/solvers.hpp"

namespace crackid {

struct ShapeOptions {
  double rho = 0.0;  ///< perimeter weight
  /// Drop the curvature term of D3.
  bool zero_curvature = false;
  /// Apply the (2 x1 - 1) endpoint factor once instead of twice.
  bool single_endpoint_factor = false;
};

/// Per fine interface edge pieces of the boundary gradient.
struct EdgeGradient {
  double stress_jump = 0.0;  ///< [[sigma(u) : eps(v)]]
  double p_f = 0.0;          ///< edge mean of the nodal p_f
  double p_c = 0.0;
  double dpf_normal = 0.0;   ///< nu . grad p_f
  double dpc_normal = 0.0;
};

struct BoundaryGradient {
  std::vector<double> s;          ///< coarse nodes
  std::vector<double> d3;         ///< D3 per coarse node (endpoints included)
  std::vector<double> weight;     ///< sum_e L_e nu_2 hat_k(mid_e), so dJ ~ sum_k weight d3 Lambda2
  std::vector<double> curvature;  ///< kappa used in D3
  Vec2 d1_left = Vec2::Zero();    ///< D1 at x1 = 0
  Vec2 d1_right = Vec2::Zero();   ///< D1 at x1 = 1
  Vec2 normal_left = Vec2::UnitY();
  Vec2 normal_right = Vec2::UnitY();
  std::vector<EdgeGradient> edges;
};

BoundaryGradient boundary_gradient(const BrokenMesh& mesh, const InterfaceGraph& psi,
                                   const Vector& u, const Vector& v, const CohesiveParams& laws,
                                   const IsotropicElasticity& elast, double eps,
                                   const ShapeOptions& options);

struct VelocityField {
  std::vector<double> s;
  std::vector<double> lambda2;
  double scale = 0.0;          ///< k
  bool zero_gradient = false;  ///< unscaled field below 1e-30
};

/// Lambda2 = -k D3 inside, (k/sqrt h)(2x1-1) nu.D1 at the ends, with
/// k = 0.1 h / max|unscaled|.
VelocityField descent_velocity(const BoundaryGradient& grad, double h, const ShapeOptions& options);

struct ClampEvent {
  std::size_t node;
  double requested;
  double applied;
};

struct UpdateResult {
  InterfaceGraph psi;
  std::vector<ClampEvent> clamped;
};

/// psi + Lambda2 nodewise, clamped to [2h, 0.5 - 2h].
UpdateResult update_interface(const InterfaceGraph& psi, const VelocityField& vel, double h);

/// Vertex velocities (0, Lambda2(x1) w(x2)), w = x2/psi below the line and
/// (0.5-x2)/(0.5-psi) above; `lambda2` lives on the coarse nodes of psi.
std::vector<Vec2> volumetric_extension(const BrokenMesh& mesh, const InterfaceGraph& psi,
                                       std::span<const double> lambda2);

/// Bulk part sum_T |T|(div L sigma(u):eps(v) - sigma(u):(grad v grad L) -
/// sigma(v):(grad u grad L)). Parallel over triangles.
double volume_shape_term(const BrokenMesh& mesh, const IsotropicElasticity& elast, const Vector& u,
                         const Vector& v, std::span<const Vec2> velocity);

namespace serial {
double volume_shape_term(const BrokenMesh& mesh, const IsotropicElasticity& elast, const Vector& u,
                         const Vector& v, std::span<const Vec2> velocity);
}

struct ShapeDerivativeTerms {
  double perimeter = 0.0;    ///< rho int div_tau L
  double volume = 0.0;       ///< -(bulk term)
  double interface = 0.0;    ///< -int (p_f + p_c) div_tau L
  double neumann = 0.0;      ///< + int d(g . v)
  double observation = 0.0;  ///< 1/2 int |u - z|^2 div_tau L on the observation edges

  double total() const { return perimeter + volume + interface + neumann + observation; }
};

struct DerivativeInputs {
  const BrokenMesh& mesh;
  const InterfaceGraph& psi;
  const Vector& u;
  const Vector& v;
  const Vector& z;
  const CohesiveParams& laws;
  const IsotropicElasticity& elast;
  const LoadCase& load;
  double eps;
  double rho;
};

/// Derivative of the discrete objective along the mesh motion generated by
/// the coarse velocity `lambda2` (volumetrically extended), with u and v the
/// penalised state and adjoint on `mesh`.
ShapeDerivativeTerms directional_derivative_volumetric(const DerivativeInputs& in,
                                                       std::span<const double> lambda2);

/// Boundary-form counterpart sum_k weight_k d3_k lambda2_k over the interior
/// coarse nodes.
double boundary_form(const BoundaryGradient& grad, std::span<const double> lambda2);

}  // namespace crackid
