/**
 * @file thurston.hpp
 * @brief Thurston's algorithm on a finite marked set for monic centred
 *        polynomials, and the target-value driver that perturbs critical
 *        values onto eventually periodic orbits.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bctk/pullback.hpp"

namespace bctk {

struct PeriodicPoint {
  SpherePoint z;
  int period = 1;
  Complex multiplier;
};

/// Repelling periodic points of exact period <= @p max_period.
std::vector<PeriodicPoint> repelling_periodic_points(const RationalMap& R, int max_period);

struct TargetValue {
  int block = -1;
  SpherePoint v;
  double distance = 0.0;  ///< chordal dist(v, R(c))
  int preperiod = 0;      ///< R^preperiod(v) is periodic
  int period = 1;
  /// v, R(v), ..., R^{preperiod + period - 1}(v), exact preimages where possible.
  std::vector<SpherePoint> orbit;
  double clearance = 0.0;  ///< min over n >= 1 of dist(R^n(v), tilde_ball(Crit ∩ J, 2 delta))
};

struct TargetOptions {
  int max_period = 6;
  std::size_t budget = 200'000;  ///< backward-orbit nodes
  int samples = 256;             ///< boundary samples of the avoided balls
};

/// For every Julia block, a point within chordal delta of the block value on
/// a backward orbit of a repelling cycle whose forward orbit avoids
/// tilde_ball(Crit ∩ J, 2 delta). Throws NumericError("not-found") with the
/// search envelope when some block has no candidate.
std::vector<TargetValue> choose_target_values(const RationalMap& R, double delta, int depth,
                                              const TargetOptions& opt = {});

struct MarkedCritical {
  int index = -1;
  int mu = 2;
};

struct MarkedDynamics {
  int degree = 2;
  std::vector<SpherePoint> marked;
  std::vector<int> sigma;
  std::vector<MarkedCritical> critical;
  std::vector<int> truncated;  ///< indices whose orbit was cut (sigma(i) = i)
  std::string normalization = "monic-centered";

  int infinity_index() const;
  /// Sigma total and in range, distinct points, local degrees consistent
  /// with a polynomial of this degree.
  void validate() const;
};

struct PerturbOptions {
  int max_orbit = 64;
  bool allow_truncation = false;
};

/// Marked set of R~ = xi o R: critical points, the orbits of the targets and
/// of untouched critical points, and infinity. Requires a monic centred
/// polynomial.
MarkedDynamics build_perturbed_dynamics(const RationalMap& R, const std::vector<TargetValue>& targets,
                                        const PerturbOptions& opt = {});

struct ThurstonState {
  std::vector<Complex> positions;  ///< entry at infinity_index is unused
  std::vector<Complex> poly;       ///< ascending, monic, poly[d - 1] = 0
  int k = 0;
  double step_norm = 0.0;
};

/// State at the given positions with Q solved from them.
ThurstonState initial_state(const MarkedDynamics& dyn, const std::vector<Complex>& positions);

/// Q_k o h_{k+1} = h_k o R~ on the marked set.
ThurstonState thurston_step(const ThurstonState& state, const MarkedDynamics& dyn);

struct ThurstonRun {
  bool converged = false;
  int iterations = 0;
  ThurstonState state;
  std::vector<Complex> coefficients;  ///< of Q, ascending
  std::vector<double> history;        ///< step norms
  double residual = 0.0;              ///< max |Q(x_i) - x_sigma(i)|
  int monotone_from = 0;              ///< history non-increasing from here on
  std::optional<RationalMap> Q;
};

ThurstonRun run_thurston(const MarkedDynamics& dyn, const std::vector<Complex>& init, double tol, int max_iter);

struct NonrecurrenceRow {
  int critical_index = -1;
  double min_distance = 0.0;
  int closest_step = 0;
};

struct NonrecurrenceReport {
  Verdict verdict = Verdict::Holds;
  double min_distance = 0.0;  ///< +inf when no critical point lies in J
  int depth = 0;
  std::vector<NonrecurrenceRow> rows;
};

/// Orbits of critical points in the Julia set stay at least @p margin away
/// from every critical point for @p depth steps.
NonrecurrenceReport verify_nonrecurrent(const RationalMap& Q, int depth, double margin);

struct ConnectingRun {
  std::vector<TargetValue> targets;
  MarkedDynamics dynamics;
  ThurstonRun run;
  NonrecurrenceReport nonrecurrence;
  BCReport bc;
};

struct ConnectingOptions {
  int depth = 12;  ///< backward search depth
  double tol = 1e-12;
  int max_iter = 200;
  int verify_depth = 50;
  double margin = 0.05;
  int bc_depth = 6;
  TargetOptions targets;
};

/// Target values, perturbed combinatorics, Thurston run from the true
/// positions and the nonrecurrence check of the limit. BC(delta, 2 delta)
/// is reported alongside.
ConnectingRun connecting_lemma(const RationalMap& R, double delta, const ConnectingOptions& opt = {});

}  // namespace bctk
