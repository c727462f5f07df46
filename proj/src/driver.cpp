#include "crackid/driver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "crackid/errors.hpp"

namespace crackid {

MeasurementRun synthesize_measurement(const ExperimentConfig& config) {
  const auto elast = config.elasticity();
  MeasurementRun run;
  run.mesh = build_mesh(config.truth(), config.h_measure);
  run.vi = solve_vi_pdas(run.mesh, config.laws, elast, config.load(), config.pdas);
  run.data = boundary_trace(run.mesh, run.vi.z.values, config.h_measure, config.load_case);
  return run;
}

namespace {

std::vector<int> observation_vertices(const BrokenMesh& mesh) {
  std::vector<int> ids;
  for (const auto& e : mesh.observation_edges) {
    ids.push_back(e.a);
    ids.push_back(e.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const Vec2& pa = mesh.vertices[a];
    const Vec2& pb = mesh.vertices[b];
    return std::tie(pa.y(), pa.x()) < std::tie(pb.y(), pb.x());
  });
  return ids;
}

}  // namespace

Measurement boundary_trace(const BrokenMesh& mesh, const Vector& z, double h, const std::string& load_case) {
  Measurement m;
  m.h = h;
  m.load_case = load_case;
  for (int v : observation_vertices(mesh)) {
    m.samples.push_back({mesh.vertices[v], Vec2(z[2 * v], z[2 * v + 1])});
  }
  return m;
}

Vector interpolate_measurement(const BrokenMesh& mesh, const Measurement& m) {
  Vector z = Vector::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
  for (int v : observation_vertices(mesh)) {
    const Vec2& p = mesh.vertices[v];
    const Measurement::Sample* left = nullptr;
    const Measurement::Sample* right = nullptr;
    for (const auto& s : m.samples) {
      if (std::abs(s.x.y() - p.y()) > 1e-12) continue;
      if (s.x.x() <= p.x() && (!left || s.x.x() > left->x.x())) left = &s;
      if (s.x.x() >= p.x() && (!right || s.x.x() < right->x.x())) right = &s;
    }
    if (!left || !right) {
      throw FormatError("measurement does not cover observation point x1 = " + std::to_string(p.x()));
    }
    const double span = right->x.x() - left->x.x();
    const double t = span > 0.0 ? (p.x() - left->x.x()) / span : 0.0;
    const Vec2 u = (1.0 - t) * left->u + t * right->u;
    z[2 * v] = u.x();
    z[2 * v + 1] = u.y();
  }
  return z;
}

double misfit(const BrokenMesh& mesh, const Vector& u, const Vector& z) {
  double sum = 0.0;
  for (const auto& e : mesh.observation_edges) {
    const double len = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
    const Vec2 ra(u[2 * e.a] - z[2 * e.a], u[2 * e.a + 1] - z[2 * e.a + 1]);
    const Vec2 rb(u[2 * e.b] - z[2 * e.b], u[2 * e.b + 1] - z[2 * e.b + 1]);
    sum += len * (ra.squaredNorm() + ra.dot(rb) + rb.squaredNorm()) / 3.0;
  }
  return 0.5 * sum;
}

double objective(const BrokenMesh& mesh, const Vector& u, const Vector& z, double rho,
                 const InterfaceGraph& psi) {
  return misfit(mesh, u, z) + rho * psi.length();
}

double shape_error(const InterfaceGraph& a, const InterfaceGraph& b) {
  double err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    err = std::max(err, std::abs(a(x) - b(x)));
  }
  return err;
}

StateEvaluation evaluate_state(const ExperimentConfig& config, const InterfaceGraph& psi,
                               const Measurement& m) {
  const auto elast = config.elasticity();
  StateEvaluation ev;
  ev.mesh = build_mesh(psi, config.h_identify);
  ev.op = assemble_state(ev.mesh, elast, config.load());
  ev.z = interpolate_measurement(ev.mesh, m);
  ev.state = solve_penalty_state(ev.mesh, config.laws, elast, ev.op, config.eps, config.penalty);
  ev.J = objective(ev.mesh, ev.state.u.values, ev.z, config.rho_value(), psi);
  return ev;
}

double IterationLog::min_J_ratio() const {
  double m = records.empty() ? 1.0 : records.front().J_ratio;
  for (const auto& r : records) m = std::min(m, r.J_ratio);
  return m;
}

double IterationLog::min_shape_error_ratio() const {
  double m = records.empty() ? 1.0 : records.front().shape_error_ratio;
  for (const auto& r : records) m = std::min(m, r.shape_error_ratio);
  return m;
}

void IterationLog::write_csv(std::ostream& os) const {
  os << "n,J,J_ratio,shape_error_ratio,pdas_na,penalty_iters,clamped\n";
  for (const auto& r : records) {
    os << r.n << ',' << format_double(r.J) << ',' << format_double(r.J_ratio) << ','
       << format_double(r.shape_error_ratio) << ',' << r.penetration << ',' << r.penalty_iterations
       << ',' << r.clamped << '\n';
  }
}

IterationLog identify(const ExperimentConfig& config, const Measurement& m, const IdentifyHooks& hooks) {
  const auto elast = config.elasticity();
  const auto truth = config.truth();
  const auto options = config.shape_options();
  InterfaceGraph psi = config.initial_interface();
  const double e0 = shape_error(psi, truth);

  IterationLog log;
  double j0 = 0.0;
  for (int n = 0; n <= config.n_max; ++n) {
    if (n % config.snapshot_every == 0) log.snapshots.emplace_back(n, psi);
    log.final_interface = psi;
    IterationRecord rec;
    rec.n = n;
    try {
      const auto ev = evaluate_state(config, psi, m);
      rec.J = ev.J;
      if (n == 0) j0 = ev.J;
      rec.J_ratio = j0 > 0.0 ? ev.J / j0 : 1.0;
      rec.shape_error_ratio = e0 > 0.0 ? shape_error(psi, truth) / e0 : 0.0;
      rec.penetration = ev.state.penetration_count;
      rec.penalty_iterations = ev.state.report.iterations;

      bool stop = n == config.n_max;
      if (!stop) {
        const auto& u = ev.state.u.values;
        const auto adj = solve_adjoint(ev.mesh, elast, ev.op, u, ev.z, config.eps);
        const auto grad = boundary_gradient(ev.mesh, psi, u, adj.v.values, config.laws, elast,
                                            config.eps, options);
        const auto vel = descent_velocity(grad, config.h_identify, options);
        if (hooks.gradients) {
          for (std::size_t k = 0; k < grad.s.size(); ++k) {
            *hooks.gradients << n << ',' << format_double(grad.s[k]) << ',' << format_double(grad.d3[k])
                             << ',' << format_double(vel.lambda2[k]) << '\n';
          }
        }
        for (double l : vel.lambda2) rec.max_velocity = std::max(rec.max_velocity, std::abs(l));
        auto upd = update_interface(psi, vel, config.h_identify);
        rec.clamped = upd.clamped.size();
        log.clamp_log.insert(log.clamp_log.end(), upd.clamped.begin(), upd.clamped.end());
        psi = std::move(upd.psi);
        stop = vel.zero_gradient || rec.max_velocity < config.early_stop * config.h_identify;
      }
      log.records.push_back(rec);
      if (hooks.on_iteration) hooks.on_iteration(rec);
      if (stop) break;
    } catch (const Error& e) {
      log.failure = "iteration " + std::to_string(n) + ": " + e.what();
      break;
    }
  }
  if (!log.snapshots.empty() && log.snapshots.back().second != log.final_interface) {
    log.snapshots.emplace_back(log.records.empty() ? 0 : log.records.back().n, log.final_interface);
  }
  return log;
}

bool GradientCheckReport::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const GradientCheckRow& r) { return r.relative_error <= tolerance; });
}

GradientCheckReport gradient_check(const ExperimentConfig& config, const Measurement& m,
                                   const InterfaceGraph& psi, const GradientCheckOptions& options) {
  const auto elast = config.elasticity();
  const auto load = config.load();
  const auto ev = evaluate_state(config, psi, m);
  const auto& u = ev.state.u.values;
  const auto adj = solve_adjoint(ev.mesh, elast, ev.op, u, ev.z, config.eps);
  const auto grad = boundary_gradient(ev.mesh, psi, u, adj.v.values, config.laws, elast, config.eps,
                                      config.shape_options());
  const DerivativeInputs in{ev.mesh, psi,   u,    adj.v.values, ev.z,
                            config.laws, elast, load, config.eps, config.rho_value()};

  GradientCheckReport report;
  report.J = ev.J;
  report.tolerance = options.tolerance;
  for (double s : config.fd_steps) report.steps.push_back(s * config.h_identify);
  const double floor = 1e-8 * ev.J / psi.spacing();

  const auto s_nodes = psi.s();
  for (std::size_t k = 1; k + 1 < psi.size(); ++k) {
    std::vector<double> hat(psi.size(), 0.0);
    hat[k] = 1.0;
    auto terms = directional_derivative_volumetric(in, hat);
    if (options.flip_bulk_sign) terms.volume = -terms.volume;

    GradientCheckRow row;
    row.node = k;
    row.s = s_nodes[k];
    row.analytic = terms.total();
    row.boundary = grad.weight[k] * grad.d3[k];
    for (double step : report.steps) {
      std::vector<double> plus(psi.psi().begin(), psi.psi().end()), minus = plus;
      plus[k] += step;
      minus[k] -= step;
      const std::vector<double> sv(s_nodes.begin(), s_nodes.end());
      const double jp = evaluate_state(config, InterfaceGraph(sv, plus), m).J;
      const double jm = evaluate_state(config, InterfaceGraph(sv, minus), m).J;
      row.fd.push_back((jp - jm) / (2.0 * step));
    }
    const auto smallest = std::min_element(report.steps.begin(), report.steps.end()) - report.steps.begin();
    const double fd = row.fd[static_cast<std::size_t>(smallest)];
    row.relative_error = std::abs(row.analytic - fd) / std::max(std::abs(fd), floor);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace crackid
