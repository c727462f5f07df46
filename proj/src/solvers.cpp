#include "crackid/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crackid/errors.hpp"

namespace crackid {

LoadCase LoadCase::parse(std::string_view id, double mu) {
  if (id == "zero") return {Kind::zero, mu};
  if (id == "contact") return {Kind::contact, mu};
  if (id == "stretch") return {Kind::stretch, mu};
  throw ConfigError("unknown load case '" + std::string(id) + "' (expected contact|stretch|zero)");
}

std::string LoadCase::id() const {
  switch (kind_) {
    case Kind::contact: return "contact";
    case Kind::stretch: return "stretch";
    case Kind::zero: break;
  }
  return "zero";
}

double LoadCase::slope() const {
  switch (kind_) {
    case Kind::contact: return 7.0 / 4.0;
    case Kind::stretch: return 5.0 / 4.0;
    case Kind::zero: break;
  }
  return 0.0;
}

Vec2 LoadCase::traction(const Vec2& x) const {
  if (kind_ == Kind::zero) return Vec2::Zero();
  return {0.0, (1.0 - slope() * x.x()) * (4.0 * x.y() - 1.0) * mu_};
}

Mat2 LoadCase::traction_gradient(const Vec2& x) const {
  Mat2 g = Mat2::Zero();
  if (kind_ == Kind::zero) return g;
  g(1, 0) = -slope() * (4.0 * x.y() - 1.0) * mu_;
  g(1, 1) = 4.0 * (1.0 - slope() * x.x()) * mu_;
  return g;
}

BoundaryLoad LoadCase::function() const {
  return [load = *this](const Vec2& x) { return load.traction(x); };
}

StateOperator assemble_state(const BrokenMesh& mesh, const IsotropicElasticity& elast,
                             const LoadCase& load) {
  return {assemble_stiffness(mesh, elast), assemble_traction(mesh, load.function())};
}

std::size_t ActiveSet::contact_count() const {
  return static_cast<std::size_t>(std::count(status.begin(), status.end(), NodeStatus::contact));
}

Vector interface_force(const BrokenMesh& mesh, std::span<const double> first,
                       std::span<const double> second) {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  for (std::size_t k = 0; k < mesh.interface_nodes.size(); ++k) {
    const auto& n = mesh.interface_nodes[k];
    const double a1 = n.weight * first[k];
    const double a2 = n.weight * second[k];
    f[2 * n.plus] += a1;
    f[2 * n.minus] -= a1;
    f[2 * n.plus + 1] += a2;
    f[2 * n.minus + 1] -= a2;
  }
  return f;
}

double interface_l2(const BrokenMesh& mesh, std::span<const double> nodal) {
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh.interface_nodes.size(); ++k) {
    sum += mesh.interface_nodes[k].weight * nodal[k] * nodal[k];
  }
  return std::sqrt(sum);
}

namespace {

// Below this magnitude a lagged friction sign keeps its previous value.
constexpr double kSignFloor = 1e-14;

/// Friction sign and cohesion indicator frozen during one linear solve.
struct LaggedLaws {
  std::vector<int> friction_sign;
  std::vector<bool> cohesive;

  bool operator==(const LaggedLaws&) const = default;
};

LaggedLaws lag_laws(const BrokenMesh& mesh, const Vector& u, const CohesiveParams& laws,
                    const LaggedLaws* previous) {
  const std::size_t n = mesh.interface_nodes.size();
  LaggedLaws out{std::vector<int>(n, 0), std::vector<bool>(n, false)};
  for (std::size_t k = 0; k < n; ++k) {
    const double s1 = jump(mesh, u, static_cast<int>(k), JumpComponent::first);
    const double s2 = jump(mesh, u, static_cast<int>(k), JumpComponent::second);
    if (std::abs(s1) < kSignFloor) {
      out.friction_sign[k] = previous ? previous->friction_sign[k] : 0;
    } else {
      out.friction_sign[k] = s1 > 0.0 ? 1 : -1;
    }
    out.cohesive[k] = laws::cohesion_discrete_prime(s2, laws) != 0.0;
  }
  return out;
}

Vector lagged_force(const BrokenMesh& mesh, const CohesiveParams& laws, const LaggedLaws& lag) {
  const std::size_t n = mesh.interface_nodes.size();
  std::vector<double> a1(n), a2(n);
  const double cohesion = laws.toughness / laws.cohesion_length;
  for (std::size_t k = 0; k < n; ++k) {
    a1[k] = laws.friction_bound * lag.friction_sign[k];
    a2[k] = lag.cohesive[k] ? cohesion : 0.0;
  }
  return interface_force(mesh, a1, a2);
}

bool is_fixed_node(const BrokenMesh& mesh, std::size_t k) {
  return mesh.is_dirichlet(mesh.interface_nodes[k].minus);
}

}  // namespace

VIResult solve_vi_pdas(const BrokenMesh& mesh, const CohesiveParams& laws,
                       const IsotropicElasticity& elast, const LoadCase& load,
                       const PdasOptions& options) {
  return solve_vi_pdas(mesh, laws, elast, assemble_state(mesh, elast, load), options);
}

VIResult solve_vi_pdas(const BrokenMesh& mesh, const CohesiveParams& laws,
                       const IsotropicElasticity& elast, const StateOperator& op,
                       const PdasOptions& options) {
  const std::size_t nn = mesh.interface_nodes.size();
  const double c = options.c_scale * elast.mu / mesh.h;
  const double fnorm = op.traction.norm();

  std::vector<bool> active(nn, false), before_previous;
  LaggedLaws lag = lag_laws(mesh, Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count())), laws, nullptr);
  VIResult result;
  bool cycle_broken = false;

  for (int it = 1; it <= options.max_outer; ++it) {
    std::vector<std::pair<int, int>> ties;
    for (std::size_t k = 0; k < nn; ++k) {
      if (active[k]) {
        const auto& n = mesh.interface_nodes[k];
        ties.emplace_back(2 * n.plus + 1, 2 * n.minus + 1);
      }
    }
    const DofMap map = DofMap::dirichlet(mesh, ties);
    const Vector rhs = op.traction - lagged_force(mesh, laws, lag);
    const SparseSymSystem system{map.reduce(op.stiffness), map.reduce(rhs), map};
    DofField z = solve(system);

    const Vector r = rhs - op.stiffness * z.values;
    std::vector<double> lambda(nn, 0.0);
    for (std::size_t k = 0; k < nn; ++k) {
      if (active[k]) lambda[k] = r[2 * mesh.interface_nodes[k].plus + 1] / mesh.interface_nodes[k].weight;
    }

    std::vector<bool> next(nn, false);
    for (std::size_t k = 0; k < nn; ++k) {
      if (is_fixed_node(mesh, k)) continue;
      const double gap = jump(mesh, z.values, static_cast<int>(k), JumpComponent::second);
      next[k] = lambda[k] + c * gap < 0.0;
    }
    const LaggedLaws next_lag = lag_laws(mesh, z.values, laws, &lag);

    result.report.active_sizes.push_back(static_cast<std::size_t>(std::count(active.begin(), active.end(), true)));
    if (next == active && next_lag == lag) {
      result.z = std::move(z);
      result.active.multiplier = std::move(lambda);
      result.active.status.resize(nn);
      for (std::size_t k = 0; k < nn; ++k) {
        const double gap = jump(mesh, result.z.values, static_cast<int>(k), JumpComponent::second);
        if (active[k]) {
          result.active.status[k] = NodeStatus::contact;
        } else if (laws::cohesion_discrete_prime(gap, laws) != 0.0) {
          result.active.status[k] = NodeStatus::cohesive;
        } else {
          result.active.status[k] = NodeStatus::open;
        }
      }
      result.report.iterations = it;
      result.report.residual = fnorm > 0.0 ? map.reduce(r).norm() / fnorm : map.reduce(r).norm();
      result.report.cycle_broken = cycle_broken;
      return result;
    }
    if (!cycle_broken && next == before_previous && next != active) {
      // Period two: keep the larger set once.
      for (std::size_t k = 0; k < nn; ++k) next[k] = next[k] || active[k];
      cycle_broken = true;
    }
    before_previous = active;
    active = std::move(next);
    lag = next_lag;
  }
  std::ostringstream msg;
  msg << "primal-dual active set did not settle after " << options.max_outer << " iterations";
  throw NoConvergence(msg.str());
}

Vector penalty_residual(const BrokenMesh& mesh, const CohesiveParams& laws, const StateOperator& op,
                        const Vector& u, double eps) {
  const std::size_t nn = mesh.interface_nodes.size();
  std::vector<double> a1(nn), a2(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    const double s1 = jump(mesh, u, static_cast<int>(k), JumpComponent::first);
    const double s2 = jump(mesh, u, static_cast<int>(k), JumpComponent::second);
    a1[k] = laws::friction_discrete_prime(s1, laws);
    a2[k] = laws::cohesion_discrete_prime(s2, laws) + laws::beta_discrete(s2, eps);
  }
  return op.stiffness * u + interface_force(mesh, a1, a2) - op.traction;
}

PenaltyResult solve_penalty_state(const BrokenMesh& mesh, const CohesiveParams& laws,
                                  const IsotropicElasticity& elast, const LoadCase& load,
                                  double eps, const PenaltyOptions& options) {
  return solve_penalty_state(mesh, laws, elast, assemble_state(mesh, elast, load), eps, options);
}

PenaltyResult solve_penalty_state(const BrokenMesh& mesh, const CohesiveParams& laws,
                                  const IsotropicElasticity&, const StateOperator& op, double eps,
                                  const PenaltyOptions& options) {
  if (!(eps > 0.0)) throw ConfigError("penalty parameter eps must be > 0");
  const std::size_t nn = mesh.interface_nodes.size();
  const DofMap map = DofMap::dirichlet(mesh);
  const double fnorm = op.traction.norm();
  auto relative = [&](const Vector& r) {
    const double n = map.reduce(r).norm();
    return fnorm > 0.0 ? n / fnorm : n;
  };
  auto penetration_of = [&](const Vector& u) {
    std::vector<bool> p(nn);
    for (std::size_t k = 0; k < nn; ++k) {
      p[k] = jump(mesh, u, static_cast<int>(k), JumpComponent::second) < 0.0;
    }
    return p;
  };
  auto jacobian = [&](const std::vector<bool>& pen) {
    std::vector<double> w(nn);
    for (std::size_t k = 0; k < nn; ++k) w[k] = pen[k] ? 1.0 / eps : 0.0;
    return SparseMatrix(op.stiffness + assemble_interface_nodal(mesh, w, JumpComponent::second));
  };

  PenaltyResult result;
  Vector u = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  std::vector<bool> pen(nn, false), before_previous;
  LaggedLaws lag = lag_laws(mesh, u, laws, nullptr);
  bool damped = false;

  for (int it = 1; it <= options.max_iterations; ++it) {
    if (!damped) {
      // On a fixed penetration set the penalty term is linear, so one Newton
      // step is a linear solve with the lagged interface force on the right.
      const Vector rhs = op.traction - lagged_force(mesh, laws, lag);
      u = solve(SparseSymSystem{map.reduce(jacobian(pen)), map.reduce(rhs), map}).values;
      const auto next = penetration_of(u);
      const LaggedLaws next_lag = lag_laws(mesh, u, laws, &lag);
      result.report.active_sizes.push_back(static_cast<std::size_t>(std::count(next.begin(), next.end(), true)));
      if (next == pen && next_lag == lag) {
        result.report.iterations = it;
        result.report.residual = relative(penalty_residual(mesh, laws, op, u, eps));
        if (result.report.residual <= options.tolerance) {
          result.u = DofField(u);
          result.penetration_count = result.report.active_sizes.back();
          return result;
        }
        damped = true;
      } else if (next == before_previous) {
        damped = true;
      }
      before_previous = pen;
      pen = next;
      lag = next_lag;
      continue;
    }

    // Damped semismooth Newton on the full residual.
    const Vector r = penalty_residual(mesh, laws, op, u, eps);
    const double r0 = relative(r);
    if (r0 <= options.tolerance) {
      result.u = DofField(u);
      result.report.iterations = it;
      result.report.residual = r0;
      result.report.damped = true;
      result.penetration_count = static_cast<std::size_t>(std::count(pen.begin(), pen.end(), true));
      return result;
    }
    pen = penetration_of(u);
    const Vector step = map.expand(solve_spd(map.reduce(jacobian(pen)), map.reduce(Vector(-r))));
    double t = 1.0;
    while (true) {
      const Vector trial = u + t * step;
      if (relative(penalty_residual(mesh, laws, op, trial, eps)) < r0) {
        u = trial;
        break;
      }
      t *= 0.5;
      if (t < std::ldexp(1.0, -20)) {
        throw LineSearchFailed("penalty Newton line search fell below step 2^-20");
      }
    }
    result.report.active_sizes.push_back(static_cast<std::size_t>(std::count(pen.begin(), pen.end(), true)));
  }
  std::ostringstream msg;
  msg << "penalty state solve did not converge in " << options.max_iterations << " iterations";
  throw NoConvergence(msg.str());
}

SparseMatrix adjoint_matrix(const BrokenMesh& mesh, const StateOperator& op, const Vector& u,
                            double eps) {
  const std::size_t nn = mesh.interface_nodes.size();
  std::vector<double> w(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    // The r-integral of beta_h'(r s) over (0,1) equals beta_h'(s).
    w[k] = laws::beta_discrete_prime(jump(mesh, u, static_cast<int>(k), JumpComponent::second), eps);
  }
  return op.stiffness + assemble_interface_nodal(mesh, w, JumpComponent::second);
}

AdjointResult solve_adjoint(const BrokenMesh& mesh, const IsotropicElasticity&,
                            const StateOperator& op, const Vector& u, const Vector& z, double eps) {
  const DofMap map = DofMap::dirichlet(mesh);
  const SparseMatrix mo = assemble_boundary_mass(mesh, mesh.observation_edges);
  const Vector rhs = mo * (u - z);
  const SparseMatrix a = adjoint_matrix(mesh, op, u, eps);
  LinearSolveReport lin;
  AdjointResult result;
  result.v = solve(SparseSymSystem{map.reduce(a), map.reduce(rhs), map}, {}, &lin);
  result.report.iterations = 1;
  result.report.residual = lin.residual;
  return result;
}

AdjointResult solve_adjoint(const BrokenMesh& mesh, const CohesiveParams&,
                            const IsotropicElasticity& elast, const Vector& u, const Vector& z,
                            double eps) {
  const StateOperator op{assemble_stiffness(mesh, elast), Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()))};
  return solve_adjoint(mesh, elast, op, u, z, eps);
}

std::vector<double> recover_multiplier(const BrokenMesh& mesh, const Vector& u, double eps) {
  std::vector<double> lambda(mesh.interface_nodes.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    lambda[k] = laws::beta_discrete(jump(mesh, u, static_cast<int>(k), JumpComponent::second), eps);
  }
  return lambda;
}

}  // namespace crackid
