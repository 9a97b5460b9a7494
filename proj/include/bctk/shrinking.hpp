/**
 * @file shrinking.hpp
 * @brief Shrinking neighborhoods along backward orbits: the schedule d_j,
 *        the Koebe-type pair inequality, univalent times of critical values
 *        and the radius functions built from them.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bctk/pullback.hpp"

namespace bctk {

struct ShrinkingSchedule {
  std::vector<double> d;  ///< d_0, ..., d_{N-1}
  std::vector<double> D;  ///< D_0 = 1, D_j = prod_{i<j} (1 - d_i), j <= N
  double scale = 0.0;     ///< the constant in front of the weights
  double tail_factor = 1.0;  ///< extrapolated prod_{j>=N} (1 - d_j)
  double residual = 0.0;     ///< |D_N * tail_factor - 1/2|
};

/// @p derivatives[v][j] = |(R^{j+1})'(v)| for each value v and j < N.
/// d_j = scale * eta_{j+1} * max_v derivatives[v][j]^{-beta}, with scale
/// solved so that the product of (1 - d_j), including a geometric tail,
/// equals 1/2. @p eta holds eta_1, ..., eta_N (empty means all ones).
ShrinkingSchedule shrinking_schedule(const std::vector<std::vector<double>>& derivatives, double beta,
                                     const std::vector<double>& eta = {});

/// Univalent map f from a planar domain onto the unit disk.
struct DiskMap {
  std::function<Complex(Complex)> f;
  std::function<Complex(Complex)> df;
  Complex xi;  ///< f(xi) = 0
};

DiskMap mobius_disk_map(Complex a, double rotation);
/// f = (R^n(z) - center) / radius on the univalent pull-back containing xi
/// of the planar disk |w - center| < radius.
DiskMap pullback_disk_map(const RationalMap& R, int n, Complex center, double radius, Complex xi);

enum class KoebeForm { Corrected, Printed };

/// |xi - v| |f'(v)| minus the bound 2 |f(v)| / (1 - |f(v)|). The Printed form
/// uses |1 - f(v)| in place of 1 - |f(v)|.
double koebe_pair_residual(const DiskMap& map, Complex v, KoebeForm form = KoebeForm::Corrected);

struct UnivalentTime {
  int k = 0;
  SpherePoint xi;              ///< element of R^{-k}(c) in the pull-back
  double radius = 0.0;         ///< r with R^k(v) on the boundary of tilde_ball(c, r)
  double dist_xi_v = 0.0;
  double derivative = 0.0;     ///< |(R^{k+1})'(v)|
  int local_degree = 2;        ///< mu_c
  bool certified = false;      ///< false: construction failed, entry flagged
  std::string note;
};

struct UnivalentTimeOptions {
  double r_K = 0.1;
  int samples = 128;
};

/// Times 1 <= k <= depth with dist(R^k(v), c) < r_K whose pull-back of the
/// closed tilde_ball(c, r) to v is univalent.
std::vector<UnivalentTime> univalent_times(const RationalMap& R, const SpherePoint& v, int critical_index,
                                           int depth, const UnivalentTimeOptions& opt = {});

struct RhoConstants {
  double beta = 1.0;
  double C = 1.0;
  double C0 = 1.0;
  double kappa0 = 0.25;
  std::function<double(int)> eta;  ///< eta_j, defaults to 1
};

struct RhoRow {
  double delta = 0.0;
  double rho = 0.0;   ///< +inf when the infimum is over an empty set
  double rho1 = 0.0;  ///< +inf when empty
  double r0 = 0.0;    ///< min(kappa0 / 2 * rho, rho1)
  bool rho_empty = false, rho1_empty = false;
  int truncation_depth = 0;
};

/// Truncated infima over certified univalent times.
std::vector<RhoRow> rho_evaluators(const std::vector<UnivalentTime>& data, const RhoConstants& k,
                                   const std::vector<double>& deltas, int truncation_depth);

}  // namespace bctk
