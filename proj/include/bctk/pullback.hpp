/**
 * @file pullback.hpp
 * @brief Components of preimages of domains under a rational map, pull-back
 *        trees, and the backward contraction / univalent pull-back checks.
 *
 * Boundaries are lifted by continuing the d inverse branches around the
 * source boundary. The permutation of branches after one lap (monodromy)
 * splits the lifted boundary into closed curves; orientation sorts them into
 * outer boundaries and holes. Every lifted vertex is an exact preimage of a
 * source vertex.
 */
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bctk/domain.hpp"
#include "bctk/rational_map.hpp"

namespace bctk {

struct DiskSpec {
  SpherePoint center;
  double radius = 0.1;  ///< chordal
  int samples = 128;    ///< boundary samples, power of two, >= 64
  void validate() const;
};

struct PullbackComponent {
  Domain domain;
  int covering_degree = 1;
  std::vector<int> critical_indices;  ///< critical points of R inside

  bool univalent() const { return covering_degree == 1 && critical_indices.empty(); }
  const SpherePoint& witness() const { return domain.witness(); }
  double diameter() const { return domain.diameter(); }
};

struct LiftOptions {
  std::size_t max_vertices = 2048;  ///< lifted boundaries are decimated above this
  double separation_floor = 1e-9;
};

/// Components of R^{-1}(source), sorted by witness.
std::vector<PullbackComponent> pullback_components(const RationalMap& R, const Domain& source,
                                                   const LiftOptions& opt = {});

std::vector<PullbackComponent> disk_preimage_components(const RationalMap& R, const DiskSpec& disk,
                                                        const LiftOptions& opt = {});

/// Component of R^{-1}(B(R(c), delta)) containing the critical point c.
/// Requires delta < delta_limit <= 1.
PullbackComponent tilde_ball(const RationalMap& R, int critical_index, double delta, int samples = 128,
                             double delta_limit = 0.5);
/// tilde_ball at the tail critical point of a block.
PullbackComponent tilde_ball_block(const RationalMap& R, int block_id, double delta, int samples = 128,
                                   double delta_limit = 0.5);

struct PullbackNode {
  int parent = -1;
  int depth = 0;
  int rank = 0;  ///< position among the parent's children
  bool pruned = false;
  PullbackComponent comp;
};

struct PullbackTree {
  std::vector<PullbackNode> nodes;
  bool complete = true;

  std::vector<int> leaves() const;
  /// Node indices from the root to @p node.
  std::vector<int> path(int node) const;
};

using PruneFn = std::function<bool(const PullbackComponent&, int depth)>;
using VisitFn = std::function<bool(const PullbackTree&, int node)>;

struct EnumerateOptions {
  int depth = 1;
  PruneFn prune;
  std::size_t budget = 1'000'000;  ///< maximal number of nodes
  int workers = 1;
  bool keep_domains = true;  ///< false: drop boundaries once a level is expanded
  LiftOptions lift;
};

/// Breadth-first tree of successive pull-backs of @p root. Node 0 is the root.
/// @p visit runs on every created node in deterministic order while the
/// node's and its parent's boundaries are still available; returning false
/// prunes the node.
PullbackTree enumerate_pullbacks(const RationalMap& R, const Domain& root, const EnumerateOptions& opt,
                                 const VisitFn& visit = {});

/// Root-to-leaf chains of the tree, in depth-first lexicographic order.
std::vector<std::vector<int>> chains(const PullbackTree& tree);

/// Rebuilds the domains along a root-to-node path by re-lifting.
std::vector<PullbackComponent> rebuild_chain(const RationalMap& R, const Domain& root, const PullbackTree& tree,
                                             int node, const LiftOptions& opt = {});

struct CheckOptions {
  int depth = 12;
  std::size_t budget = 1'000'000;
  int workers = 1;
  int samples = 128;
};

struct ChainWitness {
  int block_id = -1;
  int depth = 0;
  double diameter = 0.0;
  double distance_to_cv = 0.0;
  std::vector<PullbackComponent> chain;  ///< root first
};

struct BCReport {
  Verdict verdict = Verdict::Undetermined;
  double delta = 0.0, delta_prime = 0.0;
  int depth = 0;
  std::size_t nodes = 0;
  bool complete = true;
  double max_near_diameter = 0.0;  ///< over pull-backs within delta of CV
  std::optional<ChainWitness> counterexample;
};

/// Every pull-back W of tilde_ball(c, delta') (1 <= n <= depth) with
/// dist(W, CV) <= delta must have diam(W) < delta.
BCReport check_bc(const RationalMap& R, double delta, double delta_prime, const CheckOptions& opt = {});

struct UPCReport {
  Verdict verdict = Verdict::Undetermined;
  double delta = 0.0, delta_prime = 0.0;
  int depth = 0;
  std::size_t nodes = 0;
  std::size_t witnesses = 0;  ///< sample orbits satisfying the avoidance hypothesis
  bool complete = true;
  std::optional<ChainWitness> counterexample;
};

/// Sampled univalent pull-back check: for sample points z whose orbits avoid
/// tilde_ball(Crit ∩ J, delta) at times 1..n-1 and land in
/// tilde_ball(c, delta') at time n, the pull-back chain must be univalent.
UPCReport check_upc(const RationalMap& R, double delta, double delta_prime, const CheckOptions& opt = {});

struct BCFunctionRow {
  double delta = 0.0;
  double raw_ratio = 1.0;  ///< bisection result
  double ratio = 1.0;      ///< after the monotone correction
};

/// Largest rho in [1, rho_max] with BC(delta, rho delta) holding, for each
/// delta, then made nondecreasing as delta decreases.
std::vector<BCFunctionRow> bc_function_estimate(const RationalMap& R, std::vector<double> deltas,
                                                double rho_max, const CheckOptions& opt = {},
                                                int bisection_steps = 10);

}  // namespace bctk
