#pragma once

#include <cstddef>
#include <functional>

namespace crackid {

/// Friction and cohesion parameters of the interface.
struct CohesiveParams {
  double friction_bound = 1e-5;      ///< F_b
  double friction_smoothing = 1e-4;  ///< delta, smooth law only
  double toughness = 1e-3;           ///< K_c
  double cohesion_length = 1e-2;     ///< kappa
  double exponent = 1.0;             ///< m

  /// Throws ConfigError when any parameter is out of range.
  void validate() const;
};

struct PenaltyParams {
  double eps = 1e-8;
  void validate() const;
};

namespace laws {

// Smooth Lavrentiev penalty: s/eps below -eps, an exponential blend on
// [-eps, eps), zero above.
double beta_smooth(double s, double eps);
double beta_smooth_prime(double s, double eps);
double beta_smooth_second(double s, double eps);

/// min(0, s) / eps
double beta_discrete(double s, double eps);
/// 1/eps for s < 0, else 0.
double beta_discrete_prime(double s, double eps);

double friction_smooth(double s, const CohesiveParams& p);
double friction_smooth_prime(double s, const CohesiveParams& p);
double friction_smooth_second(double s, const CohesiveParams& p);

double cohesion_smooth(double s, const CohesiveParams& p);
double cohesion_smooth_prime(double s, const CohesiveParams& p);
double cohesion_smooth_second(double s, const CohesiveParams& p);

double friction_discrete(double s, const CohesiveParams& p);
/// F_b sgn(s), sgn(0) = 0.
double friction_discrete_prime(double s, const CohesiveParams& p);
double cohesion_discrete(double s, const CohesiveParams& p);
/// (K_c/kappa) for 0 < |s| < kappa, else 0 (zero at s = 0, like sgn).
double cohesion_discrete_prime(double s, const CohesiveParams& p);

using ScalarLaw = std::function<double(double)>;

struct BoundsReport {
  std::size_t samples = 0;
  double max_friction_slope = 0.0;      ///< max |alpha_f'|, bounded by F_b
  double max_friction_curvature = 0.0;  ///< max |alpha_f''|, bounded by F_b/delta
  double max_beta_deviation = 0.0;      ///< max |beta + [s]^-/eps|, bounded by 1
  double max_beta_slope = 0.0;          ///< max beta', bounded by 1/eps
};

/// Samples s uniformly on [-10 eps, 10 eps] and checks the friction bounds,
/// the penalty approximation bounds and the relaxed complementarity and
/// compliance inequalities. Throws BoundViolated at the first failing s.
/// `beta`/`beta_prime` default to the smooth penalty.
BoundsReport smooth_law_bounds_check(const CohesiveParams& params, double eps,
                                     std::size_t sample_count, ScalarLaw beta = {},
                                     ScalarLaw beta_prime = {});

}  // namespace laws
}  // namespace crackid
