// Element-parallel kernels and their serial references. Parallel versions
// fill per-element arrays and reduce in element order, so results are
// bitwise identical to the serial versions for any thread count.

#include <vector>

#include <omp.h>

#include "crackid/errors.hpp"
#include "crackid/fem.hpp"
#include "crackid/shape.hpp"

namespace crackid {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(const BrokenMesh& mesh, std::size_t t, const ElementMatrix& ke, Triplets& trip) {
  const auto& v = mesh.triangles[t].v;
  for (int a = 0; a < 3; ++a) {
    for (int ca = 0; ca < 2; ++ca) {
      for (int b = 0; b < 3; ++b) {
        for (int cb = 0; cb < 2; ++cb) {
          trip.emplace_back(2 * v[a] + ca, 2 * v[b] + cb, ke(2 * a + ca, 2 * b + cb));
        }
      }
    }
  }
}

SparseMatrix from_triplets(const BrokenMesh& mesh, const Triplets& trip) {
  const auto n = static_cast<Eigen::Index>(mesh.dof_count());
  SparseMatrix k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

ElementMatrix triangle_stiffness(const BrokenMesh& mesh, std::size_t t,
                                 const IsotropicElasticity& elast) {
  const auto& v = mesh.triangles[t].v;
  return element_stiffness(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]], elast);
}

// |T| (div L sigma(u):eps(v) - sigma(u):(grad v grad L) - sigma(v):(grad u grad L)),
// the derivative of the bulk bilinear form under the mesh motion x + s L(x).
double triangle_shape_term(const BrokenMesh& mesh, int t, const IsotropicElasticity& elast,
                           const Vector& u, const Vector& v, std::span<const Vec2> velocity) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)].v;
  const auto g = shape_gradients(mesh, t);
  Mat2 grad_l = Mat2::Zero();
  for (int a = 0; a < 3; ++a) grad_l += velocity[tri[a]] * g.row(a);
  const Mat2 grad_u = field_gradient(mesh, t, u);
  const Mat2 grad_v = field_gradient(mesh, t, v);
  const Mat2 sigma_u = elast.stress(strain_of(grad_u));
  const Mat2 sigma_v = elast.stress(strain_of(grad_v));
  const double value = grad_l.trace() * sigma_u.cwiseProduct(strain_of(grad_v)).sum() -
                       sigma_u.cwiseProduct(grad_v * grad_l).sum() -
                       sigma_v.cwiseProduct(grad_u * grad_l).sum();
  return mesh.triangle_area(t) * value;
}

}  // namespace

SparseMatrix assemble_stiffness(const BrokenMesh& mesh, const IsotropicElasticity& elast) {
  const auto nt = static_cast<std::ptrdiff_t>(mesh.triangles.size());
  std::vector<ElementMatrix> elements(mesh.triangles.size());
  bool degenerate = false;
#pragma omp parallel for schedule(static) reduction(|| : degenerate)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    try {
      elements[static_cast<std::size_t>(t)] = triangle_stiffness(mesh, static_cast<std::size_t>(t), elast);
    } catch (const DegenerateElement&) {
      degenerate = true;
    }
  }
  if (degenerate) throw DegenerateElement("element with nonpositive area");
  Triplets trip;
  trip.reserve(36 * mesh.triangles.size());
  for (std::size_t t = 0; t < elements.size(); ++t) scatter(mesh, t, elements[t], trip);
  return from_triplets(mesh, trip);
}

double volume_shape_term(const BrokenMesh& mesh, const IsotropicElasticity& elast, const Vector& u,
                         const Vector& v, std::span<const Vec2> velocity) {
  const auto nt = static_cast<std::ptrdiff_t>(mesh.triangles.size());
  std::vector<double> terms(mesh.triangles.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    terms[static_cast<std::size_t>(t)] = triangle_shape_term(mesh, static_cast<int>(t), elast, u, v, velocity);
  }
  double sum = 0.0;
  for (double x : terms) sum += x;
  return sum;
}

namespace serial {

SparseMatrix assemble_stiffness(const BrokenMesh& mesh, const IsotropicElasticity& elast) {
  Triplets trip;
  trip.reserve(36 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    scatter(mesh, t, triangle_stiffness(mesh, t, elast), trip);
  }
  return from_triplets(mesh, trip);
}

double volume_shape_term(const BrokenMesh& mesh, const IsotropicElasticity& elast, const Vector& u,
                         const Vector& v, std::span<const Vec2> velocity) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    sum += triangle_shape_term(mesh, static_cast<int>(t), elast, u, v, velocity);
  }
  return sum;
}

}  // namespace serial

void set_thread_limit(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_limit() { return omp_get_max_threads(); }

}  // namespace crackid
