#include <cmath>

#include <doctest.h>

#include "crackid/errors.hpp"
#include "crackid/fem.hpp"
#include "crackid/shape.hpp"
#include "crackid/solvers.hpp"

using namespace crackid;

namespace {

SparseMatrix dense_to_sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

Eigen::MatrixXd dense_assembly(const BrokenMesh& mesh, const IsotropicElasticity& elast) {
  const auto n = static_cast<Eigen::Index>(mesh.dof_count());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : mesh.triangles) {
    const ElementMatrix ke = element_stiffness(mesh.vertices[t.v[0]], mesh.vertices[t.v[1]],
                                               mesh.vertices[t.v[2]], elast);
    for (int a = 0; a < 3; ++a)
      for (int ca = 0; ca < 2; ++ca)
        for (int b = 0; b < 3; ++b)
          for (int cb = 0; cb < 2; ++cb) k(2 * t.v[a] + ca, 2 * t.v[b] + cb) += ke(2 * a + ca, 2 * b + cb);
  }
  return k;
}

bool bitwise_equal(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.nonZeros() != b.nonZeros() || a.rows() != b.rows()) return false;
  const Eigen::MatrixXd da = a, db = b;
  return (da.array() == db.array()).all();
}

}  // namespace

TEST_CASE("Lame parameters") {
  const auto l = lame_from_young(73000.0, 0.34);
  CHECK(l.mu == doctest::Approx(73000.0 / 2.68));
  CHECK(l.lambda == doctest::Approx(2.0 * l.mu * 0.34 / 0.32));
  CHECK(lame_from_young(1.0, 0.0).lambda == 0.0);
  CHECK_THROWS_AS(lame_from_young(1.0, 0.5), InvalidPoisson);
  CHECK_THROWS_AS(lame_from_young(1.0, -1.0), InvalidPoisson);
  CHECK_NOTHROW(lame_from_young(1.0, -0.1));
}

TEST_CASE("reference element stiffness") {
  IsotropicElasticity e;
  e.mu = 1.0;
  e.lambda = 0.0;
  ElementMatrix expected;
  expected << 1.5, 0.5, -1, -0.5, -0.5, 0,  //
      0.5, 1.5, 0, -0.5, -0.5, -1,          //
      -1, 0, 1, 0, 0, 0,                    //
      -0.5, -0.5, 0, 0.5, 0.5, 0,           //
      -0.5, -0.5, 0, 0.5, 0.5, 0,           //
      0, -1, 0, 0, 0, 1;
  const ElementMatrix k = element_stiffness({0, 0}, {1, 0}, {0, 1}, e);
  CHECK((k - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(element_stiffness({0, 0}, {0, 1}, {1, 0}, e), DegenerateElement);
}

TEST_CASE("element stiffness annihilates rigid motions") {
  const auto e = IsotropicElasticity::from_young(73000.0, 0.34);
  const Vec2 p[3] = {{0.1, 0.2}, {0.4, 0.25}, {0.2, 0.6}};
  const ElementMatrix k = element_stiffness(p[0], p[1], p[2], e);
  Eigen::Matrix<double, 6, 1> tx, ty, rot;
  for (int a = 0; a < 3; ++a) {
    tx.segment<2>(2 * a) << 1, 0;
    ty.segment<2>(2 * a) << 0, 1;
    rot.segment<2>(2 * a) << -p[a].y(), p[a].x();
  }
  const double scale = k.cwiseAbs().maxCoeff();
  CHECK((k * tx).norm() < 1e-12 * scale);
  CHECK((k * ty).norm() < 1e-12 * scale);
  CHECK((k * rot).norm() < 1e-12 * scale);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("sparse assembly matches dense oracle") {
  const auto mesh = build_mesh(InterfaceGraph::constant(2, 0.25), 0.125);
  const auto e = IsotropicElasticity::from_young(73000.0, 0.34);
  const Eigen::MatrixXd dense = dense_assembly(mesh, e);
  const Eigen::MatrixXd sparse = assemble_stiffness(mesh, e);
  CHECK((dense - sparse).cwiseAbs().maxCoeff() < 1e-9 * dense.cwiseAbs().maxCoeff());
}

TEST_CASE("traction assembly") {
  const auto mesh = build_mesh(InterfaceGraph::constant(2, 0.25), 0.125);
  SUBCASE("constant load integrates to total force") {
    const Vector f = assemble_traction(mesh, [](const Vec2&) { return Vec2(0.0, 2.0); });
    double fy = 0.0, fx = 0.0;
    for (Eigen::Index i = 0; i < f.size(); i += 2) {
      fx += f[i];
      fy += f[i + 1];
    }
    CHECK(fx == doctest::Approx(0.0));
    CHECK(fy == doctest::Approx(4.0));  // bottom + top, length 1 each
  }
  SUBCASE("linear load on one edge") {
    const Edge e = mesh.neumann_edges.front();
    const Vector f = assemble_traction(mesh, std::span<const Edge>(&e, 1),
                                       [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    const Vec2 a = mesh.vertices[e.a], b = mesh.vertices[e.b];
    const double len = (b - a).norm();
    CHECK(f[2 * e.a] == doctest::Approx(len * (2 * a.x() + b.x()) / 6.0));
    CHECK(f[2 * e.b] == doctest::Approx(len * (a.x() + 2 * b.x()) / 6.0));
  }
  SUBCASE("load cases") {
    const double mu = 10.0;
    const auto c = LoadCase::parse("contact", mu);
    CHECK(c.traction({0.0, 0.0}).y() == doctest::Approx(-mu));
    CHECK(c.traction({1.0, 0.5}).y() == doctest::Approx(-0.75 * mu));
    CHECK(LoadCase::parse("stretch", mu).traction({1.0, 0.0}).y() == doctest::Approx(0.25 * mu));
    CHECK(LoadCase::parse("zero", mu).traction({0.3, 0.5}).norm() == 0.0);
    CHECK_THROWS_AS(LoadCase::parse("shear", mu), ConfigError);
  }
}

TEST_CASE("dof map") {
  std::vector<bool> fixed = {true, false, false, false, true};
  const DofMap map(5, fixed, {{1, 3}});
  CHECK(map.reduced_size() == 2);
  CHECK(map[0] == -1);
  CHECK(map[1] == map[3]);
  Vector x(2);
  x << 3.0, 4.0;
  const Vector full = map.expand(x);
  CHECK(full[0] == 0.0);
  CHECK(full[4] == 0.0);
  CHECK(full[1] == full[3]);
  Vector f(5);
  f << 1, 2, 3, 4, 5;
  const Vector r = map.reduce(f);
  CHECK(r.sum() == doctest::Approx(9.0));
}

TEST_CASE("spd solve") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  Vector b(3);
  b << 1, 2, 3;
  const Vector x = solve_spd(dense_to_sparse(a), b);
  CHECK((a * x - b).norm() < 1e-12);

  LinearSolverOptions cg;
  cg.iterative_only = true;
  LinearSolveReport rep;
  const Vector y = solve_spd(dense_to_sparse(a), b, cg, &rep);
  CHECK(rep.used_cg);
  CHECK((a * y - b).norm() < 1e-8);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(solve_spd(dense_to_sparse(indefinite), Vector::Ones(2)), NotPositiveDefinite);
}

TEST_CASE("jumps are plus minus minus") {
  const auto mesh = build_mesh(InterfaceGraph::constant(2, 0.25), 0.125);
  Vector u = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  const auto& n = mesh.interface_nodes[3];
  u[2 * n.plus + 1] = 0.7;
  u[2 * n.minus + 1] = 0.2;
  u[2 * n.plus] = -0.1;
  CHECK(jump(mesh, u, 3, JumpComponent::second) == doctest::Approx(0.5));
  CHECK(jump(mesh, u, 3, JumpComponent::first) == doctest::Approx(-0.1));
}

TEST_CASE("parallel kernels equal the serial reference") {
  const auto mesh = build_mesh(true_interface(), 0.02);
  const auto e = IsotropicElasticity::from_young(73000.0, 0.34);
  const SparseMatrix ref = serial::assemble_stiffness(mesh, e);
  for (int threads : {1, 2, 4, 8}) {
    set_thread_limit(threads);
    CHECK(bitwise_equal(assemble_stiffness(mesh, e), ref));
  }

  Vector u(static_cast<Eigen::Index>(mesh.dof_count())), v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = std::sin(0.37 * static_cast<double>(i));
    v[i] = std::cos(0.11 * static_cast<double>(i));
  }
  std::vector<double> lambda2(11);
  for (std::size_t k = 0; k < lambda2.size(); ++k) lambda2[k] = 0.01 * std::sin(static_cast<double>(k));
  const auto vel = volumetric_extension(mesh, true_interface(), lambda2);
  set_thread_limit(1);
  const double s = serial::volume_shape_term(mesh, e, u, v, vel);
  for (int threads : {1, 3, 8}) {
    set_thread_limit(threads);
    const double p = volume_shape_term(mesh, e, u, v, vel);
    CHECK(p == s);
  }
  set_thread_limit(0);
}
