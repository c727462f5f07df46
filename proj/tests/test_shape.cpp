#include <cmath>

#include <doctest.h>

#include "crackid/errors.hpp"
#include "crackid/shape.hpp"

using namespace crackid;

namespace {

const IsotropicElasticity kElast = IsotropicElasticity::from_young(73000.0, 0.34);

InterfaceGraph bumpy() {
  return InterfaceGraph::sampled(11, [](double x) { return 0.25 + 0.05 * std::sin(3.0 * x); });
}

}  // namespace

TEST_CASE("zero fields leave only the perimeter term") {
  const auto psi = bumpy();
  const auto mesh = build_mesh(psi, 0.04);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  ShapeOptions opt;
  opt.rho = 0.3;
  const auto grad = boundary_gradient(mesh, psi, zero, zero, CohesiveParams{}, kElast, 1e-8, opt);
  const auto kappa = coarse_curvature(psi);
  for (std::size_t k = 1; k + 1 < psi.size(); ++k) CHECK(grad.d3[k] == doctest::Approx(0.3 * kappa[k]));
  CHECK(grad.d1_left.norm() == 0.0);
  CHECK(grad.d1_right.norm() == 0.0);

  opt.zero_curvature = true;
  const auto flat = boundary_gradient(mesh, psi, zero, zero, CohesiveParams{}, kElast, 1e-8, opt);
  for (double d : flat.d3) CHECK(d == 0.0);
  const auto vel = descent_velocity(flat, 0.04, opt);
  CHECK(vel.zero_gradient);
  for (double l : vel.lambda2) CHECK(l == 0.0);
}

TEST_CASE("descent velocity normalisation") {
  BoundaryGradient g;
  g.s = {0.0, 0.25, 0.5, 0.75, 1.0};
  g.d3 = {0.0, 2.0, -4.0, 1.0, 0.0};
  g.weight = {0.0, 0.25, 0.25, 0.25, 0.0};
  g.curvature.assign(5, 0.0);
  const double h = 0.01;
  const auto vel = descent_velocity(g, h, ShapeOptions{});
  REQUIRE(vel.lambda2.size() == 5);
  CHECK(vel.lambda2[0] == 0.0);
  CHECK(vel.lambda2[4] == 0.0);
  CHECK(vel.lambda2[2] == doctest::Approx(0.1 * h));
  CHECK(vel.lambda2[1] == doctest::Approx(-0.05 * h));
  CHECK(vel.lambda2[3] == doctest::Approx(-0.025 * h));
  CHECK(vel.scale == doctest::Approx(0.1 * h / 4.0));

  g.d1_left = {0.0, 8.0};  // nu = e2 at the end
  const auto with_end = descent_velocity(g, h, ShapeOptions{});
  const double end = -8.0 / std::sqrt(h);
  CHECK(with_end.lambda2[0] == doctest::Approx(0.1 * h * (end > 0 ? 1 : -1)));
  ShapeOptions single;
  single.single_endpoint_factor = true;
  const auto once = descent_velocity(g, h, single);
  CHECK(std::abs(once.lambda2[0]) == doctest::Approx(0.1 * h));
}

TEST_CASE("update clamps to the margin") {
  const double h = 0.01;
  const auto psi = InterfaceGraph::constant(5, 0.25);
  VelocityField vel;
  vel.s = {0.0, 0.25, 0.5, 0.75, 1.0};
  vel.lambda2 = {0.0, -0.3, 0.3, 1e-3, 0.0};
  const auto r = update_interface(psi, vel, h);
  CHECK(r.psi.psi()[1] == doctest::Approx(2 * h));
  CHECK(r.psi.psi()[2] == doctest::Approx(0.5 - 2 * h));
  CHECK(r.psi.psi()[3] == doctest::Approx(0.251));
  REQUIRE(r.clamped.size() == 2);
  CHECK(r.clamped[0].node == 1);
  CHECK(r.clamped[0].requested == doctest::Approx(-0.05));
  CHECK(r.clamped[1].applied == doctest::Approx(0.5 - 2 * h));

  VelocityField still = vel;
  std::fill(still.lambda2.begin(), still.lambda2.end(), 0.0);
  CHECK(update_interface(psi, still, h).psi == psi);
}

TEST_CASE("update next to the top of the band") {
  const double h = 0.01;
  const auto psi = InterfaceGraph::constant(3, 0.25 - 1e-3);
  VelocityField vel{{0.0, 0.5, 1.0}, {0.0, 0.1 * h, 0.0}, 1.0, false};
  const auto r = update_interface(psi, vel, h);
  CHECK(r.clamped.empty());
  CHECK(r.psi.psi()[1] == doctest::Approx(0.25));
}

TEST_CASE("volumetric extension") {
  const auto psi = bumpy();
  const auto mesh = build_mesh(psi, 0.04);
  std::vector<double> l(psi.size(), 0.0);
  for (const auto& v : volumetric_extension(mesh, psi, l)) CHECK(v.norm() == 0.0);

  l[3] = 1.0;
  const auto vel = volumetric_extension(mesh, psi, l);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec2& p = mesh.vertices[i];
    CHECK(vel[i].x() == 0.0);
    if (p.y() == 0.0 || p.y() == 0.5 || std::abs(p.x() - 0.3) >= 0.1) CHECK(vel[i].y() == doctest::Approx(0.0));
  }
  for (const auto& n : mesh.interface_nodes) {
    CHECK(vel[n.plus].y() == doctest::Approx(std::max(0.0, 1.0 - std::abs(n.x - 0.3) / 0.1)));
    CHECK(vel[n.minus].y() == vel[n.plus].y());
  }
}

TEST_CASE("derivative is linear in the velocity and vanishes at zero") {
  const auto psi = bumpy();
  const auto mesh = build_mesh(psi, 0.04);
  const auto load = LoadCase::parse("contact", kElast.mu);
  const CohesiveParams laws;
  Vector u(static_cast<Eigen::Index>(mesh.dof_count())), v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = 1e-4 * std::sin(0.37 * static_cast<double>(i));
    v[i] = 1e-4 * std::cos(0.11 * static_cast<double>(i));
  }
  const Vector z = Vector::Zero(u.size());
  const DerivativeInputs in{mesh, psi, u, v, z, laws, kElast, load, 1e-8, 1.0 / kElast.mu};

  std::vector<double> zero(psi.size(), 0.0), a(psi.size(), 0.0), b(psi.size(), 0.0), ab(psi.size());
  CHECK(directional_derivative_volumetric(in, zero).total() == 0.0);
  a[2] = 1.0;
  a[5] = -0.5;
  b[7] = 2.0;
  for (std::size_t k = 0; k < ab.size(); ++k) ab[k] = 2.0 * a[k] + 3.0 * b[k];
  const double da = directional_derivative_volumetric(in, a).total();
  const double db = directional_derivative_volumetric(in, b).total();
  const double dab = directional_derivative_volumetric(in, ab).total();
  CHECK(dab == doctest::Approx(2.0 * da + 3.0 * db).epsilon(1e-10));
}

TEST_CASE("serial and parallel bulk terms agree") {
  const auto psi = bumpy();
  const auto mesh = build_mesh(psi, 0.02);
  Vector u(static_cast<Eigen::Index>(mesh.dof_count())), v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = std::sin(0.3 * static_cast<double>(i));
    v[i] = std::cos(0.7 * static_cast<double>(i));
  }
  std::vector<double> l(psi.size(), 0.01);
  const auto vel = volumetric_extension(mesh, psi, l);
  CHECK(volume_shape_term(mesh, kElast, u, v, vel) == serial::volume_shape_term(mesh, kElast, u, v, vel));
}
