// Serial reference against the OpenMP kernels on the identification mesh.
#include <cmath>

#include <benchmark/benchmark.h>

#include "crackid/fem.hpp"
#include "crackid/shape.hpp"

using namespace crackid;

namespace {

const IsotropicElasticity kElast = IsotropicElasticity::from_young(73000.0, 0.34);

BrokenMesh mesh_for(benchmark::State& state) {
  return build_mesh(true_interface(), 1.0 / static_cast<double>(state.range(0)));
}

void stiffness_serial(benchmark::State& state) {
  const auto mesh = mesh_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(serial::assemble_stiffness(mesh, kElast));
  state.counters["triangles"] = static_cast<double>(mesh.triangles.size());
}

void stiffness_parallel(benchmark::State& state) {
  const auto mesh = mesh_for(state);
  set_thread_limit(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh, kElast));
  set_thread_limit(0);
  state.counters["triangles"] = static_cast<double>(mesh.triangles.size());
}

struct VolumeInputs {
  BrokenMesh mesh;
  Vector u, v;
  std::vector<Vec2> velocity;
};

VolumeInputs volume_inputs(benchmark::State& state) {
  VolumeInputs in{mesh_for(state), {}, {}, {}};
  const auto n = static_cast<Eigen::Index>(in.mesh.dof_count());
  in.u.resize(n);
  in.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    in.u[i] = std::sin(0.3 * static_cast<double>(i));
    in.v[i] = std::cos(0.7 * static_cast<double>(i));
  }
  const std::vector<double> lambda(11, 0.01);
  in.velocity = volumetric_extension(in.mesh, true_interface(), lambda);
  return in;
}

void volume_serial(benchmark::State& state) {
  const auto in = volume_inputs(state);
  for (auto _ : state) benchmark::DoNotOptimize(serial::volume_shape_term(in.mesh, kElast, in.u, in.v, in.velocity));
}

void volume_parallel(benchmark::State& state) {
  const auto in = volume_inputs(state);
  set_thread_limit(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(volume_shape_term(in.mesh, kElast, in.u, in.v, in.velocity));
  set_thread_limit(0);
}

}  // namespace

BENCHMARK(stiffness_serial)->Args({50, 1})->Args({100, 1})->Args({200, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(stiffness_parallel)->ArgsProduct({{50, 100, 200}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(volume_serial)->Args({50, 1})->Args({100, 1})->Args({200, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(volume_parallel)->ArgsProduct({{50, 100, 200}, {1, 2, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
