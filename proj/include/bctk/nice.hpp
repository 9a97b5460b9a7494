/**
 * @file nice.hpp
 * @brief Maximal invariant sets K(V), construction and verification of nice
 *        sets and nice nests, first-entry maps and area ratios.
 *
 * Every statement about K(V) is certified only up to a finite depth N: a
 * point is taken to be in K(V) when R^j(p) avoids V for j = 0, ..., N.
 * Domains are keyed by critical block id and centred at the block's tail
 * critical point.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bctk/pullback.hpp"

namespace bctk {

struct NiceParams {
  std::string kind = "raw";  ///< raw, pre-nice, nice-set, nest-level
  double scale = 0.0;        ///< delta with tilde_ball(c, scale) inside V^c
  double eta = 1.0;          ///< V^c inside tilde_ball(c, eta * scale)
  double delta_prime = 0.0;
  double delta_tilde = 0.0;  ///< scale of the pre-nice base
  double tau = 0.0;
  int ell = 0;
  int level = 0;
  int depth = 0;
  int resolution = 512;
};

struct PullbackViolation {
  int root_block = -1;
  int depth = 0;
  int target_block = -1;
  Relation relation = Relation::Overlap;
  Domain W;
};

struct BoundaryViolation {
  int block = -1;
  SpherePoint z;
  int n = 0;
};

struct NiceReport {
  Verdict verdict = Verdict::Undetermined;
  int depth = 0;
  bool closures_disjoint = true;
  std::size_t pullbacks = 0;
  std::size_t overlaps = 0;  ///< pull-backs neither disjoint from nor inside V
  bool complete = true;
  double pullback_margin = 0.0;  ///< min boundary distance over accepted relations
  double boundary_margin = 0.0;  ///< min over samples and n of dist(R^n(z), V)
  std::optional<PullbackViolation> pullback_witness;
  std::optional<BoundaryViolation> boundary_witness;
};

struct NiceSet {
  std::map<int, Domain> domains;  ///< block id -> V^c
  NiceParams params;
  /// Measured quantities recorded by the construction.
  std::map<std::string, double> diagnostics;
  std::optional<NiceReport> verification;

  bool empty() const { return domains.empty(); }
  /// Block whose domain contains @p p, or -1.
  int block_containing(const SpherePoint& p) const;
  bool contains(const SpherePoint& p) const { return block_containing(p) >= 0; }
  /// Chordal distance to the closure of the union (0 inside).
  double distance_to(const SpherePoint& p) const;
};

/// Construction failure; @p stage names the step, @p evidence the offending
/// component when there is one.
class ConstructionError : public NumericError {
 public:
  ConstructionError(std::string stage, const std::string& what, std::optional<Domain> evidence = {})
      : NumericError("construction-failed", stage + ": " + what), stage_(std::move(stage)),
        evidence_(std::move(evidence)) {}
  const std::string& stage() const { return stage_; }
  const std::optional<Domain>& evidence() const { return evidence_; }

 private:
  std::string stage_;
  std::optional<Domain> evidence_;
};

struct NiceOptions {
  int resolution = 512;  ///< boundary samples of round pieces, power of two
  double kappa0 = 0.25;
  double C0 = 1.0;
  bool check_bc = true;  ///< run check_bc for the hypotheses before building
  int verify_depth = 0;  ///< > 0: verify the result to this depth
  std::size_t max_vertices = 8192;  ///< cap on lifted boundaries
  std::size_t budget = 1'000'000;
  int workers = 1;
};

/// Raw union of tilde_ball(c, delta) over the Julia blocks.
NiceSet tilde_ball_set(const RationalMap& R, double delta, int resolution = 512);

/// True iff R^j(p) avoids V for j = 0, ..., depth.
bool in_KV(const RationalMap& R, const SpherePoint& p, const NiceSet& V, int depth);

/// Components of the complement of K(tilde_ball(Crit ∩ J, delta_tilde))
/// containing the critical points, built as growing unions of pull-backs of
/// the balls of depth <= @p depth. diagnostics: "stabilized_at" (-1 if the
/// last level still added pieces), "absorbed", "bc_nodes".
NiceSet construct_pre_nice(const RationalMap& R, double delta_tilde, int depth, const NiceOptions& opt = {});

struct UVResult {
  Domain U;
  double eta_bound = 0.0;     ///< asserted: U inside B(v, eta_bound * delta_hat)
  double eta_measured = 0.0;  ///< max distance from v to the boundary over delta_hat
  int absorbed = 0;           ///< complement components merged into the ball
};

struct UVOptions {
  double C0 = 1.0;
  double delta_prime = 0.0;  ///< > 0: eta from the lemma formula, else eta = 2
  double eta = 0.0;          ///< > 0 overrides the formula
  int resolution = 512;
  std::size_t max_vertices = 8192;
  std::size_t budget = 1'000'000;
  int workers = 1;
};

/// B(v, delta_hat) together with every complement component of K(base)
/// meeting it, with the bounded complementary pieces filled in.
UVResult construct_u_v(const RationalMap& R, const SpherePoint& v, double delta_hat, const NiceSet& base,
                       int depth, const UVOptions& opt = {});

/// Symmetric nice set with tilde_ball(c, delta) inside V^c inside
/// tilde_ball(c, eta delta). Requires delta' > 8 delta / kappa0.
NiceSet construct_nice_set(const RationalMap& R, double delta, double delta_prime, int depth,
                           const NiceOptions& opt = {});

struct NestReport {
  Verdict verdict = Verdict::Undetermined;
  std::vector<NiceReport> levels;
  bool nested = true;  ///< closure of V_{j+1} inside V_j
  std::size_t pullbacks = 0;
  std::size_t overlaps = 0;  ///< pair-condition failures over all windows
  double margin = 0.0;
};

struct NiceNest {
  NiceSet base;                 ///< pre-nice set at delta0
  std::vector<NiceSet> levels;  ///< V_1, V_2, ...
  int ell = 0;
  bool complete = true;
  std::string failure;  ///< stage and reason when a level could not be built
  std::optional<NestReport> verification;
};

/// Levels V_j, j = 1..levels, with tilde_ball(c, tau^j delta0) inside V_j^c
/// inside tilde_ball(c, eta tau^j delta0). Levels up to ell + 1 use the
/// pre-nice base; later ones use V_{j-ell-1}. @p levels = 0 means 1 when
/// ell = 0 and ell + 3 otherwise.
NiceNest construct_nice_nest(const RationalMap& R, double delta0, double tau, double eta, int ell, int depth,
                             const NiceOptions& opt = {}, int levels = 0);

struct VerifyOptions {
  int boundary_samples = 256;
  std::size_t budget = 1'000'000;
  int workers = 1;
};

/// (a) every pull-back W of V with 1 <= n <= depth is disjoint from the
/// closure of V or has closure inside V; (b) R^n(z) stays off the closure
/// of V for sampled boundary points z and 1 <= n <= depth.
NiceReport verify_nice(const RationalMap& R, const NiceSet& V, int depth, const VerifyOptions& opt = {});

/// Each level nice, consecutive levels nested, and for every window of
/// ell + 1 consecutive levels the pair condition for pull-backs of its
/// first level against every level of the window.
NestReport verify_nest(const RationalMap& R, const std::vector<NiceSet>& levels, int ell, int depth,
                       const VerifyOptions& opt = {});

struct FirstEntry {
  bool stays_out = true;
  int m = -1;
  int block = -1;
  bool certified = false;  ///< landing chain checked univalent
};

/// Least m <= depth with R^m(p) in V. With @p certify the chain of
/// pull-backs of V^block along the orbit is lifted and checked univalent
/// (m >= 1 only).
FirstEntry first_entry_map(const RationalMap& R, const SpherePoint& p, const NiceSet& V, int depth,
                           bool certify = false);

struct AreaBlock {
  int block = -1;
  std::size_t samples = 0;
  std::size_t attempts = 0;
  std::size_t entering = 0;  ///< samples not in K(V) to depth
  double ratio = 0.0;
  double half_width = 0.0;
};

struct AreaReport {
  double xi = 0.0;  ///< max over blocks of the entering fraction
  double psi = 1.0;
  double xi_tilde = 0.0;  ///< min{D^2 xi, 1 - D^-2 psi}
  double psi_tilde = 1.0;
  std::size_t samples = 0;  ///< per block
  double half_width = 0.0;  ///< 95% binomial half-width at the maximizing block
  int depth = 0;
  std::vector<AreaBlock> blocks;
};

/// Monte-Carlo estimate of max over c of |Vhat^c \ K(V)| / |Vhat^c| with
/// points uniform in spherical area. Deterministic given @p seed.
AreaReport area_ratio(const RationalMap& R, const NiceSet& Vhat, const NiceSet& V, int depth, std::size_t samples,
                      std::uint64_t seed, double distortion = 1.0, int workers = 1);

}  // namespace bctk
