#include "crackid/laws.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crackid/errors.hpp"

namespace crackid {

void CohesiveParams::validate() const {
  if (!(friction_bound >= 0.0)) throw ConfigError("friction bound F_b must be >= 0");
  if (!(friction_smoothing > 0.0)) throw ConfigError("friction smoothing delta must be > 0");
  if (!(toughness >= 0.0)) throw ConfigError("toughness K_c must be >= 0");
  if (!(cohesion_length > 0.0)) throw ConfigError("cohesion length kappa must be > 0");
  if (!(exponent >= 1.0)) throw ConfigError("cohesion exponent m must be >= 1");
}

void PenaltyParams::validate() const {
  if (!(eps > 0.0)) throw ConfigError("penalty parameter eps must be > 0");
}

namespace laws {

namespace {

// Below this exponent the blend and its derivatives underflow to zero; the
// rational prefactors would otherwise turn 0 * inf into NaN next to s = eps.
constexpr double kUnderflowExponent = -700.0;

double blend_exponent(double s, double eps) { return 2.0 * (s + eps) / (s - eps); }

}  // namespace

double beta_smooth(double s, double eps) {
  if (s < -eps) return s / eps;
  if (s >= eps) return 0.0;
  const double phi = blend_exponent(s, eps);
  return phi < kUnderflowExponent ? 0.0 : -std::exp(phi);
}

double beta_smooth_prime(double s, double eps) {
  if (s < -eps) return 1.0 / eps;
  if (s >= eps) return 0.0;
  const double phi = blend_exponent(s, eps);
  if (phi < kUnderflowExponent) return 0.0;
  const double d = s - eps;
  return 4.0 * eps / (d * d) * std::exp(phi);
}

double beta_smooth_second(double s, double eps) {
  if (s < -eps || s >= eps) return 0.0;
  const double phi = blend_exponent(s, eps);
  if (phi < kUnderflowExponent) return 0.0;
  const double d = s - eps;
  return -8.0 * eps * (s + eps) * std::exp(phi) / (d * d * d * d);
}

double beta_discrete(double s, double eps) { return std::min(0.0, s) / eps; }

double beta_discrete_prime(double s, double eps) { return s < 0.0 ? 1.0 / eps : 0.0; }

double friction_smooth(double s, const CohesiveParams& p) {
  return p.friction_bound * std::hypot(p.friction_smoothing, s);
}

double friction_smooth_prime(double s, const CohesiveParams& p) {
  return p.friction_bound * s / std::hypot(p.friction_smoothing, s);
}

double friction_smooth_second(double s, const CohesiveParams& p) {
  const double r = std::hypot(p.friction_smoothing, s);
  return p.friction_bound * p.friction_smoothing * p.friction_smoothing / (r * r * r);
}

double cohesion_smooth(double s, const CohesiveParams& p) {
  return p.toughness * s / (p.cohesion_length + std::pow(std::abs(s), p.exponent));
}

double cohesion_smooth_prime(double s, const CohesiveParams& p) {
  const double a = std::pow(std::abs(s), p.exponent);
  const double d = p.cohesion_length + a;
  return p.toughness * (p.cohesion_length + (1.0 - p.exponent) * a) / (d * d);
}

double cohesion_smooth_second(double s, const CohesiveParams& p) {
  const double m = p.exponent;
  const double abs_s = std::abs(s);
  if (abs_s == 0.0 && m > 1.0) return 0.0;
  const double a = std::pow(abs_s, m);
  const double d = p.cohesion_length + a;
  const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
  return p.toughness * m * std::pow(abs_s, m - 1.0) * sign *
         ((m - 1.0) * a - (m + 1.0) * p.cohesion_length) / (d * d * d);
}

double friction_discrete(double s, const CohesiveParams& p) {
  return p.friction_bound * std::abs(s);
}

double friction_discrete_prime(double s, const CohesiveParams& p) {
  if (s > 0.0) return p.friction_bound;
  if (s < 0.0) return -p.friction_bound;
  return 0.0;
}

double cohesion_discrete(double s, const CohesiveParams& p) {
  return p.toughness / p.cohesion_length * std::min(p.cohesion_length, std::abs(s));
}

double cohesion_discrete_prime(double s, const CohesiveParams& p) {
  const double a = std::abs(s);
  return a > 0.0 && a < p.cohesion_length ? p.toughness / p.cohesion_length : 0.0;
}

BoundsReport smooth_law_bounds_check(const CohesiveParams& params, double eps,
                                     std::size_t sample_count, ScalarLaw beta,
                                     ScalarLaw beta_prime) {
  params.validate();
  if (!(eps > 0.0)) throw ConfigError("penalty parameter eps must be > 0");
  if (sample_count < 1000) throw ConfigError("bounds check needs at least 1000 samples");
  if (!beta) beta = [eps](double s) { return beta_smooth(s, eps); };
  if (!beta_prime) beta_prime = [eps](double s) { return beta_smooth_prime(s, eps); };

  auto fail = [](const char* what, double s) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " violated at s = " << s;
    throw BoundViolated(msg.str(), s);
  };
  // Round-off slack on inequalities whose two sides can coincide exactly.
  constexpr double slack = 1e-12;

  BoundsReport report;
  report.samples = sample_count;
  const double fb = params.friction_bound;
  const double delta = params.friction_smoothing;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(sample_count - 1);

    const double sf = -10.0 * delta + 20.0 * delta * t;
    const double df = std::abs(friction_smooth_prime(sf, params));
    const double d2f = std::abs(friction_smooth_second(sf, params));
    if (df > fb * (1.0 + slack)) fail("|alpha_f'| <= F_b", sf);
    if (d2f > fb / delta * (1.0 + slack)) fail("|alpha_f''| <= F_b/delta", sf);
    report.max_friction_slope = std::max(report.max_friction_slope, df);
    report.max_friction_curvature = std::max(report.max_friction_curvature, d2f);

    const double s = -10.0 * eps + 20.0 * eps * t;
    const double neg = std::max(0.0, -s);
    const double pos = std::max(0.0, s);
    const double b = beta(s);
    const double db = beta_prime(s);
    const double deviation = std::abs(b + neg / eps);
    if (deviation > 1.0 + slack) fail("|beta + [s]^-/eps| <= 1", s);
    if (db < 0.0 || db > (1.0 + slack) / eps) fail("0 <= beta' <= 1/eps", s);
    if (b * pos < -eps * (1.0 + slack)) fail("beta [s]^+ >= -eps", s);
    if (b * neg > -neg * neg / eps + eps + slack * eps) fail("beta [s]^- <= -([s]^-)^2/eps + eps", s);
    report.max_beta_deviation = std::max(report.max_beta_deviation, deviation);
    report.max_beta_slope = std::max(report.max_beta_slope, db);
  }
  return report;
}

}  // namespace laws
}  // namespace crackid
