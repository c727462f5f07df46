#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "crackid/config.hpp"
#include "crackid/io.hpp"

namespace crackid {

struct MeasurementRun {
  BrokenMesh mesh;
  VIResult vi;
  Measurement data;
};

/// Solves the VI on the true interface at h_measure and records the trace
/// of z on the observation boundary.
MeasurementRun synthesize_measurement(const ExperimentConfig& config);

/// Observation-vertex samples of a full displacement vector, sorted bottom
/// then top, by x1.
Measurement boundary_trace(const BrokenMesh& mesh, const Vector& z, double h, const std::string& load_case);

/// Full dof vector holding the measurement interpolated linearly in x1 along
/// the bottom and top edges at the observation vertices of `mesh`.
Vector interpolate_measurement(const BrokenMesh& mesh, const Measurement& m);

/// 1/2 int |u - z|^2 over the observation edges.
double misfit(const BrokenMesh& mesh, const Vector& u, const Vector& z);

/// misfit + rho |Sigma|.
double objective(const BrokenMesh& mesh, const Vector& u, const Vector& z, double rho,
                 const InterfaceGraph& psi);

/// max |a - b| over x1 = 0, 0.001, ..., 1.
double shape_error(const InterfaceGraph& a, const InterfaceGraph& b);

/// Penalised state on the identification mesh of `psi` with its objective.
struct StateEvaluation {
  BrokenMesh mesh;
  StateOperator op;
  Vector z;
  PenaltyResult state;
  double J = 0.0;
};

StateEvaluation evaluate_state(const ExperimentConfig& config, const InterfaceGraph& psi,
                               const Measurement& m);

struct IterationRecord {
  int n = 0;
  double J = 0.0;
  double J_ratio = 1.0;
  double shape_error_ratio = 1.0;
  std::size_t penetration = 0;  ///< penalty active set size
  int penalty_iterations = 0;
  std::size_t clamped = 0;      ///< clamp events of the update leaving iteration n
  double max_velocity = 0.0;
};

struct IterationLog {
  std::vector<IterationRecord> records;
  std::vector<std::pair<int, InterfaceGraph>> snapshots;
  std::vector<ClampEvent> clamp_log;
  InterfaceGraph final_interface;
  std::string failure;  ///< solver error that ended the run early, if any

  double min_J_ratio() const;
  double min_shape_error_ratio() const;
  /// "n,J,J_ratio,shape_error_ratio,pdas_na,penalty_iters,clamped"
  void write_csv(std::ostream& os) const;
};

struct IdentifyHooks {
  /// Receives "n,s_H,D3,Lambda2" rows when set.
  std::ostream* gradients = nullptr;
  std::function<void(const IterationRecord&)> on_iteration;
};

/// Gradient descent on the breaking line starting from the constant
/// initial interface; n_max + 1 records unless stopped early.
IterationLog identify(const ExperimentConfig& config, const Measurement& m, const IdentifyHooks& hooks = {});

struct GradientCheckRow {
  std::size_t node = 0;
  double s = 0.0;
  double analytic = 0.0;
  double boundary = 0.0;      ///< weight * D3 of the boundary form
  std::vector<double> fd;     ///< one per step
  double relative_error = 0.0;  ///< at the smallest step
};

struct GradientCheckReport {
  std::vector<double> steps;  ///< absolute steps
  std::vector<GradientCheckRow> rows;
  double J = 0.0;
  double tolerance = 0.05;

  bool passed() const;
};

struct GradientCheckOptions {
  bool flip_bulk_sign = false;  ///< negative control
  double tolerance = 0.05;
};

/// Volumetric derivative against central differences of J for hat
/// velocities at every interior coarse node of `psi`.
GradientCheckReport gradient_check(const ExperimentConfig& config, const Measurement& m,
                                   const InterfaceGraph& psi, const GradientCheckOptions& options = {});

}  // namespace crackid
