#include "crackid/shape.hpp"

#include <algorithm>
#include <cmath>

#include "crackid/errors.hpp"

namespace crackid {

namespace {

struct NodalLaw {
  double friction;  ///< alpha_f'([[u]]_1)
  double normal;    ///< (alpha_c' + beta)([[u]]_2)
  double beta_prime;
};

NodalLaw nodal_law(const BrokenMesh& mesh, const Vector& u, std::size_t k, const CohesiveParams& laws,
                   double eps) {
  const double s1 = jump(mesh, u, static_cast<int>(k), JumpComponent::first);
  const double s2 = jump(mesh, u, static_cast<int>(k), JumpComponent::second);
  return {laws::friction_discrete_prime(s1, laws),
          laws::cohesion_discrete_prime(s2, laws) + laws::beta_discrete(s2, eps),
          laws::beta_discrete_prime(s2, eps)};
}

// Hat function of coarse node k evaluated at x.
double coarse_hat(std::span<const double> s, std::size_t k, double x) {
  if (k > 0 && x >= s[k - 1] && x <= s[k]) return (x - s[k - 1]) / (s[k] - s[k - 1]);
  if (k + 1 < s.size() && x >= s[k] && x <= s[k + 1]) return (s[k + 1] - x) / (s[k + 1] - s[k]);
  return 0.0;
}

double interpolate(std::span<const double> s, std::span<const double> f, double x) {
  if (x <= s.front()) return f.front();
  if (x >= s.back()) return f.back();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const auto k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double t = (x - s[k]) / (s[k + 1] - s[k]);
  return (1.0 - t) * f[k] + t * f[k + 1];
}

void check_adjacent(const BrokenMesh& mesh, const InterfaceEdge& e) {
  const auto nt = static_cast<int>(mesh.triangles.size());
  if (e.tri_plus < 0 || e.tri_plus >= nt || e.tri_minus < 0 || e.tri_minus >= nt ||
      mesh.triangles[e.tri_plus].side != Side::plus ||
      mesh.triangles[e.tri_minus].side != Side::minus) {
    throw MissingAdjacentTriangle("interface edge without a triangle on both faces");
  }
}

// ([[grad u^T sigma(v) + grad v^T sigma(u)]] tau) on the given edge.
Vec2 endpoint_flux(const BrokenMesh& mesh, const InterfaceEdge& e, const IsotropicElasticity& elast,
                   const Vector& u, const Vector& v) {
  auto side = [&](int t) {
    const Mat2 gu = field_gradient(mesh, t, u);
    const Mat2 gv = field_gradient(mesh, t, v);
    const Mat2 m = gu.transpose() * elast.stress(strain_of(gv)) +
                   gv.transpose() * elast.stress(strain_of(gu));
    return Vec2(m * e.tangent);
  };
  return side(e.tri_plus) - side(e.tri_minus);
}

}  // namespace

BoundaryGradient boundary_gradient(const BrokenMesh& mesh, const InterfaceGraph& psi,
                                   const Vector& u, const Vector& v, const CohesiveParams& laws,
                                   const IsotropicElasticity& elast, double eps,
                                   const ShapeOptions& options) {
  if (mesh.interface_edges.empty()) throw MissingAdjacentTriangle("mesh has no interface");
  const std::size_t nn = mesh.interface_nodes.size();
  std::vector<NodalLaw> law(nn);
  std::vector<double> p(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    law[k] = nodal_law(mesh, u, k, laws, eps);
    p[k] = law[k].friction * jump(mesh, v, static_cast<int>(k), JumpComponent::first) +
           law[k].normal * jump(mesh, v, static_cast<int>(k), JumpComponent::second);
  }

  BoundaryGradient out;
  out.s.assign(psi.s().begin(), psi.s().end());
  const std::size_t nh = out.s.size();
  out.curvature = options.zero_curvature ? std::vector<double>(nh, 0.0) : coarse_curvature(psi);
  out.edges.reserve(mesh.interface_edges.size());

  std::vector<double> field_sum(nh, 0.0), p_sum(nh, 0.0), w_sum(nh, 0.0);
  out.weight.assign(nh, 0.0);
  for (const auto& e : mesh.interface_edges) {
    check_adjacent(mesh, e);
    const Mat2 gu_p = field_gradient(mesh, e.tri_plus, u), gu_m = field_gradient(mesh, e.tri_minus, u);
    const Mat2 gv_p = field_gradient(mesh, e.tri_plus, v), gv_m = field_gradient(mesh, e.tri_minus, v);
    const Mat2 du = gu_p - gu_m, dv = gv_p - gv_m;
    const Vec2& nu = e.normal;
    const Vec2& tau = e.tangent;
    const auto& l0 = law[e.node0];
    const auto& l1 = law[e.node1];
    const double vj0 = jump(mesh, v, e.node0, JumpComponent::second);
    const double vj1 = jump(mesh, v, e.node1, JumpComponent::second);

    EdgeGradient g;
    g.stress_jump = elast.stress(strain_of(gu_p)).cwiseProduct(strain_of(gv_p)).sum() -
                    elast.stress(strain_of(gu_m)).cwiseProduct(strain_of(gv_m)).sum();
    g.p_f = 0.5 * (l0.friction * jump(mesh, v, e.node0, JumpComponent::first) +
                   l1.friction * jump(mesh, v, e.node1, JumpComponent::first));
    g.p_c = 0.5 * (l0.normal * vj0 + l1.normal * vj1);
    g.dpf_normal = tau.dot(dv * nu) * 0.5 * (l0.friction + l1.friction);
    g.dpc_normal = nu.dot(dv * nu) * 0.5 * (l0.normal + l1.normal) +
                   nu.dot(du * nu) * 0.5 * (l0.beta_prime * vj0 + l1.beta_prime * vj1);
    out.edges.push_back(g);

    const double mid = 0.5 * (mesh.interface_nodes[e.node0].x + mesh.interface_nodes[e.node1].x);
    const double edge_field = g.stress_jump - g.dpf_normal - g.dpc_normal;
    for (std::size_t k = 0; k < nh; ++k) {
      const double hat = coarse_hat(out.s, k, mid);
      if (hat == 0.0) continue;
      const double w = e.length * hat;
      field_sum[k] += w * edge_field;
      p_sum[k] += w * (g.p_f + g.p_c);
      w_sum[k] += w;
      out.weight[k] += w * nu.y();
    }
  }
  out.d3.assign(nh, 0.0);
  for (std::size_t k = 0; k < nh; ++k) {
    if (w_sum[k] == 0.0) continue;
    const double pbar = p_sum[k] / w_sum[k];
    out.d3[k] = field_sum[k] / w_sum[k] + out.curvature[k] * (options.rho - pbar);
  }

  const auto& first = mesh.interface_edges.front();
  const auto& last = mesh.interface_edges.back();
  out.d1_left = endpoint_flux(mesh, first, elast, u, v) * (2.0 * out.s.front() - 1.0);
  out.d1_right = endpoint_flux(mesh, last, elast, u, v) * (2.0 * out.s.back() - 1.0);
  out.normal_left = first.normal;
  out.normal_right = last.normal;
  return out;
}

VelocityField descent_velocity(const BoundaryGradient& grad, double h, const ShapeOptions& options) {
  VelocityField vel;
  vel.s = grad.s;
  const std::size_t nh = grad.s.size();
  vel.lambda2.assign(nh, 0.0);
  for (std::size_t k = 1; k + 1 < nh; ++k) vel.lambda2[k] = -grad.d3[k];
  auto endpoint = [&](double x, const Vec2& nu, const Vec2& d1) {
    const double factor = options.single_endpoint_factor ? 1.0 : (2.0 * x - 1.0);
    return factor * nu.dot(d1) / std::sqrt(h);
  };
  vel.lambda2.front() = endpoint(grad.s.front(), grad.normal_left, grad.d1_left);
  vel.lambda2.back() = endpoint(grad.s.back(), grad.normal_right, grad.d1_right);

  double norm = 0.0;
  for (double l : vel.lambda2) norm = std::max(norm, std::abs(l));
  if (!(norm >= 1e-30)) {
    std::fill(vel.lambda2.begin(), vel.lambda2.end(), 0.0);
    vel.zero_gradient = true;
    return vel;
  }
  vel.scale = 0.1 * h / norm;
  for (double& l : vel.lambda2) l *= vel.scale;
  return vel;
}

UpdateResult update_interface(const InterfaceGraph& psi, const VelocityField& vel, double h) {
  const auto s = psi.s();
  const auto old = psi.psi();
  if (vel.lambda2.size() != s.size()) {
    throw InvalidInterface("velocity and interface have different node counts");
  }
  const double lo = 2.0 * h, hi = kDomainHeight - 2.0 * h;
  UpdateResult out;
  std::vector<double> next(old.size());
  for (std::size_t k = 0; k < old.size(); ++k) {
    const double requested = old[k] + vel.lambda2[k];
    next[k] = std::clamp(requested, lo, hi);
    if (next[k] != requested) out.clamped.push_back({k, requested, next[k]});
  }
  out.psi = InterfaceGraph(std::vector<double>(s.begin(), s.end()), std::move(next));
  return out;
}

std::vector<Vec2> volumetric_extension(const BrokenMesh& mesh, const InterfaceGraph& psi,
                                       std::span<const double> lambda2) {
  std::vector<Vec2> out(mesh.vertices.size(), Vec2::Zero());
  const auto s = psi.s();
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec2& p = mesh.vertices[i];
    const double y = psi(p.x());
    const double w = mesh.vertex_side[i] == Side::minus ? p.y() / y
                                                         : (kDomainHeight - p.y()) / (kDomainHeight - y);
    out[i] = Vec2(0.0, interpolate(s, lambda2, p.x()) * w);
  }
  return out;
}

ShapeDerivativeTerms directional_derivative_volumetric(const DerivativeInputs& in,
                                                       std::span<const double> lambda2) {
  const BrokenMesh& mesh = in.mesh;
  const auto vel = volumetric_extension(mesh, in.psi, lambda2);
  ShapeDerivativeTerms out;

  out.volume = -volume_shape_term(mesh, in.elast, in.u, in.v, vel);

  // Moving interface nodes only change the nodal quadrature weights.
  const std::size_t nn = mesh.interface_nodes.size();
  std::vector<double> p(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    const auto law = nodal_law(mesh, in.u, k, in.laws, in.eps);
    p[k] = law.friction * jump(mesh, in.v, static_cast<int>(k), JumpComponent::first) +
           law.normal * jump(mesh, in.v, static_cast<int>(k), JumpComponent::second);
  }
  double length_rate = 0.0;
  for (const auto& e : mesh.interface_edges) {
    const int a = mesh.interface_nodes[e.node0].minus, b = mesh.interface_nodes[e.node1].minus;
    const double dl = e.tangent.dot(vel[b] - vel[a]);
    length_rate += dl;
    out.interface -= dl * 0.5 * (p[e.node0] + p[e.node1]);
  }
  out.perimeter = in.rho * length_rate;

  // Traction: derivative of the two-point Gauss rule under the motion.
  const double offset = 0.5 / std::sqrt(3.0);
  for (const auto& e : mesh.neumann_edges) {
    const Vec2& pa = mesh.vertices[e.a];
    const Vec2& pb = mesh.vertices[e.b];
    const Vec2 d = pb - pa;
    const double len = d.norm();
    const double dl = d.dot(vel[e.b] - vel[e.a]) / len;
    if (dl == 0.0 && vel[e.a].isZero() && vel[e.b].isZero()) continue;
    const Vec2 va(in.v[2 * e.a], in.v[2 * e.a + 1]);
    const Vec2 vb(in.v[2 * e.b], in.v[2 * e.b + 1]);
    for (double t : {0.5 - offset, 0.5 + offset}) {
      const Vec2 x = (1.0 - t) * pa + t * pb;
      const Vec2 lx = (1.0 - t) * vel[e.a] + t * vel[e.b];
      const Vec2 vq = (1.0 - t) * va + t * vb;
      const Vec2 dg = in.load.traction(x) * dl + in.load.traction_gradient(x) * lx * len;
      out.neumann += 0.5 * vq.dot(dg);
    }
  }

  // Observation misfit: only the edge lengths move (z sits on fixed nodes).
  for (const auto& e : mesh.observation_edges) {
    const Vec2 d = mesh.vertices[e.b] - mesh.vertices[e.a];
    const double dl = d.dot(vel[e.b] - vel[e.a]) / d.norm();
    if (dl == 0.0) continue;
    const Vec2 ra(in.u[2 * e.a] - in.z[2 * e.a], in.u[2 * e.a + 1] - in.z[2 * e.a + 1]);
    const Vec2 rb(in.u[2 * e.b] - in.z[2 * e.b], in.u[2 * e.b + 1] - in.z[2 * e.b + 1]);
    out.observation += 0.5 * dl * (ra.squaredNorm() + ra.dot(rb) + rb.squaredNorm()) / 3.0;
  }
  return out;
}

double boundary_form(const BoundaryGradient& grad, std::span<const double> lambda2) {
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < grad.d3.size(); ++k) sum += grad.weight[k] * grad.d3[k] * lambda2[k];
  return sum;
}

}  // namespace crackid
