/**
 * @file orbit.hpp
 * @brief Forward orbits of critical values and the growth conditions on
 *        their derivatives: exposure, Collet-Eckmann, summability and slow
 *        recurrence.
 *
 * Derivatives are spherical: |(R^n)'(v)| is the product of the spherical
 * derivatives along the orbit.
 */
#pragma once

#include <vector>

#include "bctk/rational_map.hpp"

namespace bctk {

enum class OrbitFate { Escapes, Attracted, Bounded };
const char* to_string(OrbitFate f);

struct OrbitRecord {
  SpherePoint start;
  std::vector<SpherePoint> points;     ///< n + 1 points
  std::vector<double> log_derivatives; ///< [k] = log |(R^k)'(start)|, [0] = 0
  OrbitFate fate = OrbitFate::Bounded;
};

OrbitRecord orbit_record(const RationalMap& R, const SpherePoint& z, int n);

struct ExposureReport {
  int critical_index = 0;
  SpherePoint value;
  bool in_julia = false;
  bool exposed = false;
  double min_distance = 0.0;  ///< to Crit along v, ..., R^depth(v)
};

/// One entry per distinct critical value, in critical-point order.
std::vector<ExposureReport> exposed_critical_values(const RationalMap& R, int depth, double tol = 1e-9);

struct LineFit {
  double slope = 0.0, intercept = 0.0, std_error = 0.0;
  int points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct CEReport {
  int critical_index = -1;
  SpherePoint value;
  bool in_julia = false;
  bool exposed = true;
  int depth = 0;
  double lambda_hat = 0.0;
  double std_error = 0.0;
  bool parabolic = false;  ///< orbit tail sits near a cycle of multiplier close to 1
  Verdict verdict = Verdict::Undetermined;
};

/// Growth rate of log |(R^n)'(v)| fitted over n in [depth/2, depth]. Holds if
/// the rate is positive with a margin of three standard errors.
/// Throws NumericError("degenerate-orbit") if the orbit meets Crit.
CEReport check_collet_eckmann_at(const RationalMap& R, const SpherePoint& v, int depth, double tol = 1e-9);
/// Reports for every distinct critical value; non-exposed values are
/// reported undetermined instead of raising.
std::vector<CEReport> check_collet_eckmann(const RationalMap& R, int depth, double tol = 1e-9);

struct SummabilityReport {
  int critical_index = -1;
  SpherePoint value;
  bool in_julia = false;
  bool exposed = true;
  double beta = 1.0;
  int depth = 0;
  double partial_sum = 0.0;  ///< sum over j <= depth of |(R^{j+1})'(v)|^{-beta}
  double tail_bound = 0.0;   ///< geometric extrapolation, +inf when unknown
  double lambda_hat = 0.0;
  Verdict verdict = Verdict::Undetermined;
};

SummabilityReport check_summability_at(const RationalMap& R, const SpherePoint& v, double beta, int depth,
                                       double tol = 1e-9);
std::vector<SummabilityReport> check_summability(const RationalMap& R, double beta, int depth, double tol = 1e-9);

/// Joint verdict over the in-Julia critical values.
Verdict julia_verdict(const std::vector<CEReport>& reports);
Verdict julia_verdict(const std::vector<SummabilityReport>& reports);

struct SlowRecurrenceFit {
  double C1 = 0.0;
  double theta = 0.0;
  double theta_raw = 0.0;  ///< fitted before clamping into (0, 1)
  std::vector<double> min_distance;  ///< [k - 1] = min over R^{-k}(Crit) of dist(xi, v)
  bool degenerate = false;  ///< some distance vanished
  bool complete = true;     ///< false when the preimage budget ran out
  std::size_t nodes = 0;
};

/// Fits dist(R^{-k}(Crit), v) >= C1 theta^k for 1 <= k <= depth. C1 is the
/// lower envelope for the fitted theta.
SlowRecurrenceFit slow_recurrence_fit(const RationalMap& R, const SpherePoint& v, int depth,
                                      std::size_t budget = 1'000'000);

}  // namespace bctk
