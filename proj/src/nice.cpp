#include "bctk/nice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "bctk/parallel.hpp"

namespace bctk {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false, true>;
using BMulti = bg::model::multi_polygon<BPoly>;
using BSeg = bg::model::segment<BPoint>;
using SegTree = bgi::rtree<std::pair<BSeg, std::size_t>, bgi::quadratic<16>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

BPoint bp(Complex z) { return {z.real(), z.imag()}; }
Complex cz(const BPoint& p) { return {p.x(), p.y()}; }

Complex nearest_on_segment(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return a;
  return a + std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0) * ab;
}

/// Chordal distance from p to the nearest point of a closed polyline, the
/// nearest point being chosen in the plane of @p chart.
double ring_distance(const PlanarChart& chart, const std::vector<Complex>& ring, const SpherePoint& p) {
  const Complex z = chart.to_plane(p);
  double best = std::numeric_limits<double>::infinity();
  Complex arg;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex q = nearest_on_segment(z, ring[i], ring[(i + 1) % n]);
    const double d = std::abs(q - z);
    if (d < best) {
      best = d;
      arg = q;
    }
  }
  return chordal_distance(p, chart.to_sphere(arg));
}

/// Chordal distance from p to the boundary of d.
double boundary_distance(const Domain& d, const SpherePoint& p) {
  const Complex z = d.chart().to_plane(p);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return d.distance_to(p);
  double best = ring_distance(d.chart(), d.outer_plane(), p);
  for (const auto& h : d.holes_plane()) best = std::min(best, ring_distance(d.chart(), h, p));
  return best;
}

void append_ring(const PlanarChart& chart, const std::vector<SpherePoint>& pts, BPoly::ring_type& ring) {
  ring.reserve(pts.size() + 1);
  for (const auto& p : pts) ring.push_back(bp(chart.to_plane(p)));
}

BPoly to_bpoly(const PlanarChart& chart, const Domain& d) {
  BPoly poly;
  append_ring(chart, d.outer(), poly.outer());
  for (const auto& h : d.holes()) {
    poly.inners().emplace_back();
    append_ring(chart, h, poly.inners().back());
  }
  bg::correct(poly);
  return poly;
}

std::vector<SpherePoint> ring_points(const PlanarChart& chart, const BPoly::ring_type& ring) {
  std::vector<SpherePoint> out;
  out.reserve(ring.size());
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) out.push_back(chart.to_sphere(cz(ring[i])));
  return out;
}

/// Polygon of @p m containing the chart centre, as a Domain witnessed there.
std::optional<Domain> piece_at_center(const PlanarChart& chart, const BMulti& m, bool keep_holes) {
  for (const auto& poly : m) {
    if (!bg::within(BPoint(0.0, 0.0), poly)) continue;
    std::vector<std::vector<SpherePoint>> holes;
    if (keep_holes)
      for (const auto& h : poly.inners()) holes.push_back(ring_points(chart, h));
    return Domain(chart.center(), ring_points(chart, poly.outer()), std::move(holes));
  }
  return std::nullopt;
}

/// Outer boundary of a domain with a segment index in its own chart.
struct Indexed {
  const Domain* dom = nullptr;
  SegTree tree;

  explicit Indexed(const Domain& d) : dom(&d) {
    const auto& ring = d.outer_plane();
    std::vector<std::pair<BSeg, std::size_t>> segs;
    segs.reserve(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i)
      segs.emplace_back(BSeg(bp(ring[i]), bp(ring[(i + 1) % ring.size()])), i);
    tree = SegTree(segs.begin(), segs.end());
  }

  /// Chordal distance from a point given in this chart to the outer boundary.
  double distance(Complex z) const {
    double best = kInf;
    for (auto it = tree.qbegin(bgi::nearest(bp(z), 1)); it != tree.qend(); ++it) {
      const Complex q = nearest_on_segment(z, cz(it->first.first), cz(it->first.second));
      best = std::min(best, chordal_distance(dom->chart().to_sphere(z), dom->chart().to_sphere(q)));
    }
    return best;
  }

  bool crosses(Complex a, Complex b) const {
    const BSeg s(bp(a), bp(b));
    for (auto it = tree.qbegin(bgi::intersects(s)); it != tree.qend(); ++it) return true;
    return false;
  }
};

/// How the closure of a sits relative to b, outer boundaries only.
RelationReport relate_indexed(const Indexed& a, const Indexed& b) {
  RelationReport rep;
  const Domain& A = *a.dom;
  const Domain& B = *b.dom;
  const double lower = chordal_distance(A.witness(), B.witness()) - A.radius() - B.radius();
  if (lower > 0.05) {
    rep.relation = Relation::Disjoint;
    rep.margin = lower;
    return rep;
  }
  const Indexed* host = &b;
  const Indexed* other = &a;
  if (A.contains(B.chart().center().antipode())) {
    if (B.contains(A.chart().center().antipode())) {
      rep.relation = Relation::Overlap;
      return rep;
    }
    std::swap(host, other);
  }
  const PlanarChart& chart = host->dom->chart();
  std::vector<Complex> pts;
  pts.reserve(other->dom->outer().size());
  for (const auto& p : other->dom->outer()) pts.push_back(chart.to_plane(p));
  bool crossing = false;
  double margin = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    margin = std::min(margin, host->distance(pts[i]));
    if (!crossing && host->crosses(pts[i], pts[(i + 1) % pts.size()])) crossing = true;
  }
  for (const auto& z : host->dom->outer_plane()) {
    const SpherePoint p = chart.to_sphere(z);
    margin = std::min(margin, other->distance(other->dom->chart().to_plane(p)));
  }
  rep.margin = margin;
  if (crossing) {
    rep.relation = Relation::Overlap;
    return rep;
  }
  const bool a_in_b = B.contains(A.outer().front());
  const bool b_in_a = A.contains(B.outer().front());
  if (a_in_b && !b_in_a) rep.relation = Relation::Inside;
  else if (b_in_a && !a_in_b) rep.relation = Relation::Contains;
  else if (!a_in_b && !b_in_a) rep.relation = Relation::Disjoint;
  else rep.relation = Relation::Overlap;
  return rep;
}

struct Candidate {
  Domain dom;
  int depth = 0;
};

/// All pull-backs of @p root of depth 0..depth.
std::vector<Candidate> pullback_candidates(const RationalMap& R, const Domain& root, int depth, std::size_t budget,
                                           int workers, std::size_t max_vertices, bool* complete) {
  EnumerateOptions eo;
  eo.depth = depth;
  eo.budget = budget;
  eo.workers = workers;
  eo.lift.max_vertices = max_vertices;
  const PullbackTree tree = enumerate_pullbacks(R, root, eo);
  if (complete && !tree.complete) *complete = false;
  std::vector<Candidate> out;
  out.reserve(tree.nodes.size());
  for (const auto& n : tree.nodes) out.push_back({n.comp.domain, n.depth});
  return out;
}

double reach_from(const SpherePoint& c, const Domain& d) {
  double r = 0.0;
  for (const auto& p : d.outer()) r = std::max(r, chordal_distance(c, p));
  return r;
}

bool may_meet(const SpherePoint& c, double reach, const Domain& d) {
  return chordal_distance(c, d.witness()) - d.radius() <= reach;
}

struct Criterion {
  int samples = 0;
  int violations = 0;
  double margin = kInf;
};

/// Depth-certified R(boundary of V^c) inside K(base): the orbit of R(z) for
/// sampled boundary points z must avoid base, up to a tolerance.
void record_criterion(const RationalMap& R, const Domain& Vc, const NiceSet& base, int depth, int samples,
                      Criterion& out) {
  const auto& pts = Vc.outer();
  const std::size_t step = std::max<std::size_t>(1, pts.size() / samples);
  for (std::size_t i = 0; i < pts.size(); i += step) {
    ++out.samples;
    SpherePoint q = R(pts[i]);
    double worst = kInf;
    for (int j = 0; j <= depth; ++j) {
      const int b = base.block_containing(q);
      const double m = b >= 0 ? -boundary_distance(base.domains.at(b), q) : base.distance_to(q);
      worst = std::min(worst, m);
      if (j < depth) q = R(q);
    }
    out.margin = std::min(out.margin, worst);
    if (worst < -1e-7) ++out.violations;
  }
}

}  // namespace

int NiceSet::block_containing(const SpherePoint& p) const {
  for (const auto& [b, d] : domains)
    if (d.contains(p)) return b;
  return -1;
}

double NiceSet::distance_to(const SpherePoint& p) const {
  double best = kInf;
  for (const auto& [b, d] : domains) {
    if (d.contains(p)) return 0.0;
    best = std::min(best, boundary_distance(d, p));
  }
  return best;
}

NiceSet tilde_ball_set(const RationalMap& R, double delta, int resolution) {
  NiceSet V;
  V.params.kind = "raw";
  V.params.scale = delta;
  V.params.resolution = resolution;
  for (int b : R.julia_blocks()) V.domains.emplace(b, tilde_ball_block(R, b, delta, resolution).domain);
  return V;
}

bool in_KV(const RationalMap& R, const SpherePoint& p, const NiceSet& V, int depth) {
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  SpherePoint q = p;
  for (int j = 0; j <= depth; ++j) {
    if (V.contains(q)) return false;
    if (j < depth) q = R(q);
  }
  return true;
}

NiceSet construct_pre_nice(const RationalMap& R, double delta_tilde, int depth, const NiceOptions& opt) {
  if (!(delta_tilde > 0.0 && 2.0 * delta_tilde < 1.0)) throw PreconditionError("pre-nice scale must lie in (0, 1/2)");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  NiceSet out;
  out.params.kind = "pre-nice";
  out.params.scale = delta_tilde;
  out.params.eta = 2.0;
  out.params.delta_tilde = delta_tilde;
  out.params.delta_prime = 2.0 * delta_tilde;
  out.params.depth = depth;
  out.params.resolution = opt.resolution;
  const auto blocks = R.julia_blocks();
  if (blocks.empty()) return out;

  if (opt.check_bc && depth >= 1) {
    CheckOptions co;
    co.depth = depth;
    co.budget = opt.budget;
    co.workers = opt.workers;
    const BCReport bc = check_bc(R, delta_tilde, 2.0 * delta_tilde, co);
    out.diagnostics["bc_nodes"] = static_cast<double>(bc.nodes);
    if (bc.verdict == Verdict::Fails) {
      std::ostringstream os;
      os << "backward contraction fails at (" << delta_tilde << ", " << 2.0 * delta_tilde << "), depth "
         << bc.counterexample->depth << ", diameter " << bc.counterexample->diameter;
      throw ConstructionError("pre-nice", os.str(), bc.counterexample->chain.back().domain);
    }
  }

  std::vector<Domain> roots;
  std::vector<Candidate> cands;
  bool complete = true;
  for (int b : blocks) {
    roots.push_back(tilde_ball_block(R, b, delta_tilde, opt.resolution).domain);
    auto more = pullback_candidates(R, roots.back(), depth, opt.budget, opt.workers, opt.max_vertices, &complete);
    cands.insert(cands.end(), more.begin(), more.end());
  }

  int absorbed_total = 0, deepest = 0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const int b = blocks[k];
    const SpherePoint c = R.critical_points()[R.critical_blocks()[b].tail].point;
    const PlanarChart chart(c);
    const Domain big = tilde_ball_block(R, b, 2.0 * delta_tilde, opt.resolution, 1.0).domain;
    const double reach = reach_from(c, big);
    const SpherePoint far = c.antipode();

    BMulti region;
    region.push_back(to_bpoly(chart, roots[k]));
    std::vector<int> pending;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const Domain& d = cands[i].dom;
      if (!may_meet(c, reach, d)) continue;
      if (d.contains(far)) {
        if (relate(d, big).relation != Relation::Disjoint)
          throw ConstructionError("pre-nice", "pull-back wraps around the sphere", d);
        continue;
      }
      pending.push_back(static_cast<int>(i));
    }
    std::vector<BPoly> polys(cands.size());
    for (int i : pending) polys[i] = to_bpoly(chart, cands[i].dom);
    std::vector<int> used;
    bool changed = true;
    while (changed) {
      changed = false;
      const auto env = bg::return_envelope<bg::model::box<BPoint>>(region);
      for (auto it = pending.begin(); it != pending.end();) {
        const BPoly& p = polys[*it];
        if (!bg::intersects(bg::return_envelope<bg::model::box<BPoint>>(p), env) || !bg::intersects(p, region)) {
          ++it;
          continue;
        }
        BMulti merged;
        bg::union_(region, p, merged);
        region = std::move(merged);
        used.push_back(*it);
        deepest = std::max(deepest, cands[*it].depth);
        it = pending.erase(it);
        changed = true;
      }
    }
    absorbed_total += static_cast<int>(used.size());
    auto piece = piece_at_center(chart, region, true);
    if (!piece) throw ConstructionError("pre-nice", "union lost the critical point");
    for (const auto& p : piece->outer()) {
      if (big.contains(p)) continue;
      std::optional<Domain> evidence;
      for (int i : used)
        for (const auto& q : cands[i].dom.outer())
          if (!evidence && !big.contains(q)) evidence = cands[i].dom;
      throw ConstructionError("pre-nice", "region leaves tilde_ball(c, 2 delta)", evidence);
    }
    out.domains.emplace(b, std::move(*piece));
  }
  out.diagnostics["absorbed"] = absorbed_total;
  out.diagnostics["deepest"] = deepest;
  out.diagnostics["stabilized_at"] = deepest < depth ? deepest : -1;
  out.diagnostics["complete"] = complete ? 1.0 : 0.0;
  return out;
}

UVResult construct_u_v(const RationalMap& R, const SpherePoint& v, double delta_hat, const NiceSet& base, int depth,
                       const UVOptions& opt) {
  if (!(delta_hat > 0.0 && delta_hat < 1.0)) throw PreconditionError("delta_hat must lie in (0, 1)");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  UVResult res;
  if (opt.eta > 0.0) {
    res.eta_bound = opt.eta;
  } else if (opt.delta_prime > 0.0) {
    const double mu = R.max_julia_local_degree();
    const double t = opt.C0 * std::pow(base.params.eta * base.params.scale / opt.delta_prime, 1.0 / mu);
    res.eta_bound = 1.0 + std::min(1.0, t);
  } else {
    res.eta_bound = 2.0;
  }
  const PlanarChart chart(v);
  const Domain ball = Domain::disk(v, delta_hat, opt.resolution);
  BMulti region;
  region.push_back(to_bpoly(chart, ball));
  const BPoly ball_poly = region.front();
  const SpherePoint far = v.antipode();

  std::vector<Candidate> used;
  bool complete = true;
  for (const auto& [b, root] : base.domains) {
    for (auto& cand : pullback_candidates(R, root, depth, opt.budget, opt.workers, opt.max_vertices, &complete)) {
      if (!may_meet(v, delta_hat, cand.dom)) continue;
      if (cand.dom.contains(far)) {
        if (relate(cand.dom, ball).relation != Relation::Disjoint)
          throw ConstructionError("u-v", "complement component wraps around the sphere", cand.dom);
        continue;
      }
      const BPoly p = to_bpoly(chart, cand.dom);
      if (!bg::intersects(p, ball_poly)) continue;
      BMulti merged;
      bg::union_(region, p, merged);
      region = std::move(merged);
      used.push_back(std::move(cand));
    }
  }
  res.absorbed = static_cast<int>(used.size());
  auto piece = piece_at_center(chart, region, false);
  if (!piece) throw ConstructionError("u-v", "union lost the critical value");
  res.U = std::move(*piece);
  double far_dist = 0.0;
  for (const auto& p : res.U.outer()) far_dist = std::max(far_dist, chordal_distance(v, p));
  res.eta_measured = far_dist / delta_hat;
  if (res.eta_measured > res.eta_bound) {
    std::optional<Domain> evidence;
    double worst = 0.0;
    for (const auto& c : used) {
      const double r = reach_from(v, c.dom);
      if (r > worst) {
        worst = r;
        evidence = c.dom;
      }
    }
    std::ostringstream os;
    os << "U reaches " << res.eta_measured << " delta_hat, above eta = " << res.eta_bound;
    throw ConstructionError("u-v", os.str(), evidence);
  }
  if (!complete) throw ConstructionError("u-v", "pull-back enumeration exceeded the budget");
  return res;
}

namespace {

/// V^c = component of R^{-1}(U^{R(c)}) containing c for every Julia block,
/// with U built over @p base.
NiceSet build_symmetric(const RationalMap& R, double scale, const NiceSet& base, int depth, const UVOptions& uo,
                        const NiceOptions& opt) {
  NiceSet out;
  out.params.scale = scale;
  out.params.depth = depth;
  out.params.resolution = opt.resolution;
  out.params.delta_tilde = base.params.scale;
  double eta_bound = 0.0, eta_measured = 0.0;
  int absorbed = 0;
  Criterion crit;
  LiftOptions lo;
  lo.max_vertices = opt.max_vertices;
  for (const auto& [b, base_dom] : base.domains) {
    const auto& block = R.critical_blocks()[b];
    const SpherePoint c = R.critical_points()[block.tail].point;
    const UVResult uv = construct_u_v(R, block.value, scale, base, depth, uo);
    eta_bound = uv.eta_bound;
    eta_measured = std::max(eta_measured, uv.eta_measured);
    absorbed += uv.absorbed;
    const auto comps = pullback_components(R, uv.U, lo);
    const PullbackComponent* hit = nullptr;
    for (const auto& comp : comps)
      if (comp.domain.contains(c)) hit = &comp;
    if (!hit) throw ConstructionError("pull-back", "no component of the preimage of U contains c", uv.U);
    Domain Vc = hit->domain.rewitnessed(c);
    const RelationReport rel = relate(Vc, base_dom);
    if (rel.relation != Relation::Inside || !(rel.margin > 0.0))
      throw ConstructionError("closure", "V^c is not compactly inside the base piece", Vc);
    record_criterion(R, Vc, base, depth, 256, crit);
    out.domains.emplace(b, std::move(Vc));
  }
  for (auto i = out.domains.begin(); i != out.domains.end(); ++i)
    for (auto j = std::next(i); j != out.domains.end(); ++j)
      if (relate(i->second, j->second).relation != Relation::Disjoint)
        throw ConstructionError("closure", "closures of two pieces meet", j->second);
  out.params.eta = eta_bound;
  out.diagnostics["eta_bound"] = eta_bound;
  out.diagnostics["eta_measured"] = eta_measured;
  out.diagnostics["absorbed"] = absorbed;
  out.diagnostics["criterion_samples"] = crit.samples;
  out.diagnostics["criterion_violations"] = crit.violations;
  out.diagnostics["criterion_margin"] = crit.margin;
  return out;
}

}  // namespace

NiceSet construct_nice_set(const RationalMap& R, double delta, double delta_prime, int depth, const NiceOptions& opt) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (!(opt.kappa0 > 0.0 && opt.kappa0 < 1.0)) throw PreconditionError("kappa0 must lie in (0, 1)");
  if (!(delta_prime > 8.0 * delta / opt.kappa0)) throw PreconditionError("delta' must exceed 8 delta / kappa0");
  if (!(delta_prime < 1.0)) throw PreconditionError("delta' must be below 1");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  const double hi = std::min(4.0 * delta, 0.25 * opt.kappa0 * delta_prime);
  const double delta_tilde = 0.5 * (2.0 * delta + hi);
  if (R.julia_blocks().empty()) {
    NiceSet out;
    out.params.kind = "nice-set";
    out.params.scale = delta;
    out.params.delta_prime = delta_prime;
    out.params.delta_tilde = delta_tilde;
    out.params.depth = depth;
    out.params.resolution = opt.resolution;
    return out;
  }
  // The (delta, delta') hypothesis is reported; the result is verified instead.
  double bc_holds = -1.0;
  if (opt.check_bc && depth >= 1) {
    CheckOptions co;
    co.depth = depth;
    co.budget = opt.budget;
    co.workers = opt.workers;
    const Verdict v = check_bc(R, delta, delta_prime, co).verdict;
    bc_holds = v == Verdict::Holds ? 1.0 : v == Verdict::Fails ? 0.0 : -1.0;
  }
  const NiceSet base = construct_pre_nice(R, delta_tilde, depth, opt);
  UVOptions uo;
  uo.eta = 1.0 + std::min(1.0, opt.C0 * std::pow(4.0 * delta / delta_prime, 1.0 / R.max_julia_local_degree()));
  uo.resolution = opt.resolution;
  uo.max_vertices = opt.max_vertices;
  uo.budget = opt.budget;
  uo.workers = opt.workers;
  NiceSet out = build_symmetric(R, delta, base, depth, uo, opt);
  out.params.kind = "nice-set";
  out.params.delta_prime = delta_prime;
  out.diagnostics["bc_holds"] = bc_holds;
  out.diagnostics["pre_nice_absorbed"] = base.diagnostics.at("absorbed");
  out.diagnostics["pre_nice_stabilized_at"] = base.diagnostics.at("stabilized_at");
  if (opt.verify_depth > 0) {
    VerifyOptions vo;
    vo.budget = opt.budget;
    vo.workers = opt.workers;
    out.verification = verify_nice(R, out, opt.verify_depth, vo);
  }
  return out;
}

NiceNest construct_nice_nest(const RationalMap& R, double delta0, double tau, double eta, int ell, int depth,
                             const NiceOptions& opt, int levels) {
  if (!(delta0 > 0.0 && 2.0 * delta0 < 1.0)) throw PreconditionError("delta0 must lie in (0, 1/2)");
  if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("tau must lie in (0, 1)");
  if (!(eta > 1.0 && eta < 2.0)) throw PreconditionError("eta must lie in (1, 2)");
  if (!(tau * eta < 1.0)) throw PreconditionError("tau * eta must be below 1");
  if (ell < 0) throw PreconditionError("ell must be >= 0");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  if (levels < 0) throw PreconditionError("levels must be >= 0");
  const int L = levels > 0 ? levels : (ell == 0 ? 1 : ell + 3);
  NiceNest nest;
  nest.ell = ell;
  try {
    nest.base = construct_pre_nice(R, delta0, depth, opt);
  } catch (const ConstructionError& e) {
    nest.complete = false;
    nest.failure = e.what();
    return nest;
  }
  UVOptions uo;
  uo.eta = eta;
  uo.resolution = opt.resolution;
  uo.max_vertices = opt.max_vertices;
  uo.budget = opt.budget;
  uo.workers = opt.workers;
  for (int j = 1; j <= L; ++j) {
    const double scale = std::pow(tau, j) * delta0;
    const NiceSet& base = j <= ell + 1 ? nest.base : nest.levels[j - ell - 2];
    try {
      NiceSet V = build_symmetric(R, scale, base, depth, uo, opt);
      V.params.kind = "nest-level";
      V.params.level = j;
      V.params.tau = tau;
      V.params.ell = ell;
      V.params.eta = eta;
      V.params.delta_tilde = delta0;
      V.diagnostics["base_level"] = j <= ell + 1 ? 0 : j - ell - 1;
      if (!nest.levels.empty()) {
        for (const auto& [b, d] : V.domains) {
          const RelationReport rel = relate(d, nest.levels.back().domains.at(b));
          if (rel.relation != Relation::Inside || !(rel.margin > 0.0))
            throw ConstructionError("nest", "level is not compactly inside the previous one", d);
        }
      }
      if (opt.check_bc && depth >= 1 && 2.0 * scale < 1.0) {
        CheckOptions co;
        co.depth = depth;
        co.budget = opt.budget;
        co.workers = opt.workers;
        const Verdict v = check_bc(R, scale, 2.0 * scale, co).verdict;
        V.diagnostics["bc_holds"] = v == Verdict::Holds ? 1.0 : v == Verdict::Fails ? 0.0 : -1.0;
      }
      nest.levels.push_back(std::move(V));
    } catch (const ConstructionError& e) {
      nest.complete = false;
      nest.failure = "level " + std::to_string(j) + ": " + e.what();
      break;
    }
  }
  if (opt.verify_depth > 0 && !nest.levels.empty()) {
    VerifyOptions vo;
    vo.budget = opt.budget;
    vo.workers = opt.workers;
    nest.verification = verify_nest(R, nest.levels, ell, opt.verify_depth, vo);
  }
  return nest;
}

namespace {

struct PairTally {
  std::size_t pullbacks = 0;
  std::size_t overlaps = 0;
  double margin = kInf;
  bool complete = true;
  std::optional<PullbackViolation> witness;
};

/// Pull-backs W of every piece of @p roots, 1 <= n <= depth, against every
/// piece of every target: closure(W) disjoint from closure(V) or inside V.
void check_pullbacks(const RationalMap& R, const NiceSet& roots, const std::vector<const NiceSet*>& targets,
                     int depth, const VerifyOptions& opt, PairTally& tally) {
  std::vector<std::pair<int, Indexed>> idx;
  for (const NiceSet* t : targets)
    for (const auto& [b, d] : t->domains) idx.emplace_back(b, Indexed(d));
  for (const auto& [rb, root] : roots.domains) {
    EnumerateOptions eo;
    eo.depth = depth;
    eo.budget = opt.budget;
    eo.workers = opt.workers;
    eo.keep_domains = false;
    eo.lift.max_vertices = std::max<std::size_t>(2048, root.outer().size());
    auto visit = [&](const PullbackTree& tree, int id) {
      const auto& node = tree.nodes[id];
      if (node.depth == 0) return true;
      ++tally.pullbacks;
      const Indexed W(node.comp.domain);
      for (const auto& [tb, T] : idx) {
        const RelationReport rel = relate_indexed(W, T);
        if (rel.relation == Relation::Disjoint || rel.relation == Relation::Inside) {
          tally.margin = std::min(tally.margin, rel.margin);
          continue;
        }
        ++tally.overlaps;
        if (!tally.witness) tally.witness = PullbackViolation{rb, node.depth, tb, rel.relation, node.comp.domain};
      }
      return true;
    };
    const PullbackTree tree = enumerate_pullbacks(R, root, eo, visit);
    if (!tree.complete) tally.complete = false;
  }
}

}  // namespace

NiceReport verify_nice(const RationalMap& R, const NiceSet& V, int depth, const VerifyOptions& opt) {
  if (depth < 1) throw PreconditionError("verification depth must be >= 1");
  if (opt.boundary_samples < 1) throw PreconditionError("boundary samples must be >= 1");
  NiceReport rep;
  rep.depth = depth;
  rep.pullback_margin = rep.boundary_margin = kInf;
  for (auto i = V.domains.begin(); i != V.domains.end(); ++i)
    for (auto j = std::next(i); j != V.domains.end(); ++j) {
      const RelationReport rel = relate(i->second, j->second);
      if (rel.relation != Relation::Disjoint || !(rel.margin > 0.0)) {
        rep.closures_disjoint = false;
        rep.pullback_witness = PullbackViolation{i->first, 0, j->first, rel.relation, i->second};
      }
    }
  if (!rep.closures_disjoint) {
    rep.verdict = Verdict::Fails;
    return rep;
  }

  PairTally tally;
  check_pullbacks(R, V, {&V}, depth, opt, tally);
  rep.pullbacks = tally.pullbacks;
  rep.overlaps = tally.overlaps;
  rep.pullback_margin = tally.margin;
  rep.pullback_witness = tally.witness;
  rep.complete = tally.complete;

  for (const auto& [b, d] : V.domains) {
    const auto& pts = d.outer();
    const std::size_t step = std::max<std::size_t>(1, pts.size() / opt.boundary_samples);
    for (std::size_t i = 0; i < pts.size(); i += step) {
      SpherePoint q = pts[i];
      for (int n = 1; n <= depth; ++n) {
        q = R(q);
        const double m = V.distance_to(q);
        rep.boundary_margin = std::min(rep.boundary_margin, m);
        if (m <= 0.0 && !rep.boundary_witness) rep.boundary_witness = BoundaryViolation{b, pts[i], n};
      }
    }
  }
  if (rep.overlaps > 0 || rep.boundary_witness) rep.verdict = Verdict::Fails;
  else rep.verdict = rep.complete ? Verdict::Holds : Verdict::Undetermined;
  return rep;
}

NestReport verify_nest(const RationalMap& R, const std::vector<NiceSet>& levels, int ell, int depth,
                       const VerifyOptions& opt) {
  if (ell < 0) throw PreconditionError("ell must be >= 0");
  NestReport rep;
  rep.margin = kInf;
  bool complete = true, failed = false;
  for (const auto& V : levels) {
    rep.levels.push_back(verify_nice(R, V, depth, opt));
    if (rep.levels.back().verdict == Verdict::Fails) failed = true;
    if (rep.levels.back().verdict == Verdict::Undetermined) complete = false;
  }
  for (std::size_t j = 0; j + 1 < levels.size(); ++j)
    for (const auto& [b, d] : levels[j + 1].domains) {
      const auto it = levels[j].domains.find(b);
      if (it == levels[j].domains.end()) {
        rep.nested = false;
        continue;
      }
      const RelationReport rel = relate(d, it->second);
      if (rel.relation != Relation::Inside || !(rel.margin > 0.0)) rep.nested = false;
    }
  if (ell >= 1) {
    for (std::size_t j0 = 0; j0 + ell < levels.size(); ++j0) {
      std::vector<const NiceSet*> window;
      for (std::size_t j = j0 + 1; j <= j0 + ell; ++j) window.push_back(&levels[j]);
      PairTally tally;
      check_pullbacks(R, levels[j0], window, depth, opt, tally);
      rep.pullbacks += tally.pullbacks;
      rep.overlaps += tally.overlaps;
      rep.margin = std::min(rep.margin, tally.margin);
      if (!tally.complete) complete = false;
    }
  }
  if (failed || !rep.nested || rep.overlaps > 0) rep.verdict = Verdict::Fails;
  else rep.verdict = complete ? Verdict::Holds : Verdict::Undetermined;
  return rep;
}

FirstEntry first_entry_map(const RationalMap& R, const SpherePoint& p, const NiceSet& V, int depth, bool certify) {
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  FirstEntry fe;
  std::vector<SpherePoint> orb{p};
  for (int m = 0; m <= depth; ++m) {
    const int b = V.block_containing(orb.back());
    if (b >= 0) {
      fe.stays_out = false;
      fe.m = m;
      fe.block = b;
      break;
    }
    if (m < depth) orb.push_back(R(orb.back()));
  }
  if (fe.stays_out || !certify) return fe;
  Domain cur = V.domains.at(fe.block);
  fe.certified = true;
  for (int j = fe.m - 1; j >= 0 && fe.certified; --j) {
    const PullbackComponent* hit = nullptr;
    const auto comps = pullback_components(R, cur);
    for (const auto& comp : comps)
      if (comp.domain.contains(orb[j])) hit = &comp;
    if (!hit || !hit->univalent()) {
      fe.certified = false;
      break;
    }
    cur = hit->domain;
  }
  return fe;
}

AreaReport area_ratio(const RationalMap& R, const NiceSet& Vhat, const NiceSet& V, int depth, std::size_t samples,
                      std::uint64_t seed, double distortion, int workers) {
  if (samples == 0) throw PreconditionError("samples must be >= 1");
  if (depth < 0) throw PreconditionError("depth must be >= 0");
  if (!(distortion >= 1.0)) throw PreconditionError("distortion constant must be >= 1");
  AreaReport rep;
  rep.samples = samples;
  rep.depth = depth;
  constexpr std::size_t max_attempts = 1'000'000;
  for (const auto& [b, dom] : Vhat.domains) {
    if (!(std::abs(signed_area(dom.outer_plane())) > 0.0)) throw PreconditionError("zero-area domain");
    const SpherePoint center = dom.witness();
    if (dom.contains(center.antipode())) throw PreconditionError("domain must not contain the antipode of its witness");
    const double reach = reach_from(center, dom);
    if (!(reach < 2.0)) throw PreconditionError("domain reaches the antipode of its witness");
    const PlanarChart chart(center);
    const double rho = chordal_radius_to_plane(reach);
    const double tmax = rho * rho / (1.0 + rho * rho);

    std::vector<char> entering(samples, 0);
    std::vector<std::size_t> attempts(samples, 0);
    parallel_for(samples, workers, [&](std::size_t i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(i),
                        static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32)};
      std::mt19937_64 gen(seq);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t a = 1; a <= max_attempts; ++a) {
        // Uniform in spherical area on the cap: t = s^2 / (1 + s^2) is uniform.
        const double t = u(gen) * tmax;
        const Complex zeta = std::polar(std::sqrt(t / (1.0 - t)), 2.0 * std::numbers::pi * u(gen));
        const SpherePoint p = chart.to_sphere(zeta);
        if (!dom.contains(p)) continue;
        attempts[i] = a;
        entering[i] = in_KV(R, p, V, depth) ? 0 : 1;
        return;
      }
      throw NumericError("numeric-failure", "rejection sampling found no point in the domain");
    });
    AreaBlock ab;
    ab.block = b;
    ab.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
      ab.attempts += attempts[i];
      ab.entering += entering[i];
    }
    ab.ratio = static_cast<double>(ab.entering) / static_cast<double>(samples);
    ab.half_width = 1.96 * std::sqrt(ab.ratio * (1.0 - ab.ratio) / static_cast<double>(samples));
    rep.blocks.push_back(ab);
  }
  for (const auto& ab : rep.blocks)
    if (ab.ratio >= rep.xi) {
      rep.xi = ab.ratio;
      rep.half_width = ab.half_width;
    }
  rep.psi = 1.0 - rep.xi;
  const double D2 = distortion * distortion;
  rep.xi_tilde = std::min(D2 * rep.xi, 1.0 - rep.psi / D2);
  rep.psi_tilde = 1.0 - rep.xi_tilde;
  return rep;
}

}  // namespace bctk
