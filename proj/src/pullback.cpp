#include "bctk/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bctk/parallel.hpp"

namespace bctk {

void DiskSpec::validate() const {
  if (!(radius > 0.0 && radius <= 1.0)) throw PreconditionError("disk radius must lie in (0, 1]");
  if (samples < 64 || (samples & (samples - 1)) != 0)
    throw PreconditionError("disk samples must be a power of two >= 64");
}

namespace {

bool witness_less(const SpherePoint& a, const SpherePoint& b) {
  if (a.is_infinity() != b.is_infinity()) return b.is_infinity();
  const Complex za = a.finite(), zb = b.finite();
  if (za.real() != zb.real()) return za.real() < zb.real();
  return za.imag() < zb.imag();
}

struct SourceCurve {
  const PlanarChart* chart = nullptr;
  const std::vector<SpherePoint>* pts = nullptr;
  const std::vector<Complex>* plane = nullptr;
  std::optional<double> circle;
  bool outer = true;
};

std::pair<Complex, Complex> target_at(const SourceCurve& S, std::size_t i, double s) {
  const std::size_t n = S.pts->size(), j = (i + 1) % n;
  if (s >= 1.0) return (*S.pts)[j].homogeneous();
  const Complex a = (*S.plane)[i], b = (*S.plane)[j];
  Complex zeta;
  if (S.circle) {
    const double th = std::arg(a), dth = std::arg(b / a);
    zeta = std::polar(*S.circle, th + s * dth);
  } else {
    zeta = a + s * (b - a);
  }
  return S.chart->to_homogeneous(zeta);
}

/// Newton on w2 A(x) - w1 B(x) in the canonical chart of z.
bool newton_to(const RationalMap& R, SpherePoint& z, Complex w1, Complex w2) {
  const SpherePoint c = z.canonical();
  const Chart ch = c.chart();
  const Poly& A = R.chart_numerator(ch);
  const Poly& B = R.chart_denominator(ch);
  Complex x = c.value();
  for (int it = 0; it < 40; ++it) {
    Complex a, da, b, db;
    A.eval2(x, a, da);
    B.eval2(x, b, db);
    const Complex g = w2 * a - w1 * b, dg = w2 * da - w1 * db;
    if (g == Complex(0.0, 0.0)) break;
    if (dg == Complex(0.0, 0.0)) return false;
    const Complex step = g / dg;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
    x -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(x))) {
      z = SpherePoint(x, ch).canonical();
      return true;
    }
  }
  z = SpherePoint(x, ch).canonical();
  return true;
}

double min_separation(const std::vector<SpherePoint>& pts) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) sep = std::min(sep, chordal_distance(pts[a], pts[b]));
  return sep;
}

struct LiftedCurve {
  std::vector<SpherePoint> pts;
  int laps = 1;
  bool from_outer = true;
};

/// Continues all d branches once around S; returns the closed lifted curves.
std::vector<LiftedCurve> lift_curve(const RationalMap& R, const SourceCurve& S, const LiftOptions& opt) {
  const std::size_t n = S.pts->size();
  const int d = R.degree();
  const auto base = R.preimages((*S.pts)[0]);
  if (static_cast<int>(base.size()) != d)
    throw NumericError("refine-or-fail", "source boundary passes through a critical value");
  std::vector<SpherePoint> cur;
  for (const auto& p : base) cur.push_back(p.point);
  std::vector<std::vector<SpherePoint>> branch(d);
  for (int k = 0; k < d; ++k) branch[k].push_back(cur[k]);

  std::vector<SpherePoint> next(d);
  double h = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    h = std::min(1.0, 2.0 * h);
    while (s < 1.0) {
      h = std::min(h, 1.0 - s);
      const double t = (1.0 - s - h <= 1e-15) ? 1.0 : s + h;
      const auto [w1, w2] = target_at(S, i, t);
      const double sep = d > 1 ? min_separation(cur) : std::numeric_limits<double>::infinity();
      if (sep < opt.separation_floor)
        throw NumericError("refine-or-fail", "inverse branches collide below the separation floor");
      bool ok = true;
      for (int k = 0; k < d && ok; ++k) {
        next[k] = cur[k];
        ok = newton_to(R, next[k], w1, w2) && 10.0 * chordal_distance(next[k], cur[k]) < sep;
      }
      if (ok) {
        cur = next;
        s = t;
        h = std::min(1.0, 2.0 * h);
      } else {
        h *= 0.5;
        if (h < 1e-10) throw NumericError("refine-or-fail", "boundary continuation step underflow");
      }
    }
    if (i + 1 < n)
      for (int k = 0; k < d; ++k) branch[k].push_back(cur[k]);
  }

  // Monodromy: where each branch ends after one lap.
  const double sep = d > 1 ? min_separation(cur) : 1.0;
  std::vector<int> perm(d, -1);
  std::vector<bool> taken(d, false);
  for (int k = 0; k < d; ++k) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int m = 0; m < d; ++m) {
      const double dist = chordal_distance(cur[k], base[m].point);
      if (dist < bd) {
        bd = dist;
        best = m;
      }
    }
    if (taken[best] || bd > 0.25 * sep + 1e-12)
      throw NumericError("numeric-failure", "monodromy orbit does not close");
    taken[best] = true;
    perm[k] = best;
  }

  std::vector<LiftedCurve> out;
  std::vector<bool> seen(d, false);
  for (int k = 0; k < d; ++k) {
    if (seen[k]) continue;
    LiftedCurve c;
    c.from_outer = S.outer;
    c.laps = 0;
    int m = k;
    while (!seen[m]) {
      seen[m] = true;
      c.pts.insert(c.pts.end(), branch[m].begin(), branch[m].end());
      ++c.laps;
      m = perm[m];
      if (c.laps > d) throw NumericError("numeric-failure", "monodromy orbit does not close after d laps");
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// A point well outside the source, used to pick the grouping chart.
SpherePoint far_point(const Domain& source) {
  std::vector<SpherePoint> cand{source.witness().antipode(), SpherePoint::from_complex(0.0),
                                SpherePoint::infinity(),       SpherePoint::from_complex(1.0),
                                SpherePoint::from_complex(-1.0), SpherePoint::from_complex({0.0, 1.0}),
                                SpherePoint::from_complex({0.0, -1.0})};
  SpherePoint best = cand[0];
  double bd = -1.0;
  for (const auto& p : cand) {
    const double dist = source.distance_to(p);
    if (dist > bd + 1e-3) {
      bd = dist;
      best = p;
    }
  }
  return best;
}

}  // namespace

std::vector<PullbackComponent> pullback_components(const RationalMap& R, const Domain& source,
                                                   const LiftOptions& opt) {
  // Lift each boundary curve of the source.
  std::vector<LiftedCurve> curves;
  {
    SourceCurve S{&source.chart(), &source.outer(), &source.outer_plane(), source.circle_radius(), true};
    auto c = lift_curve(R, S, opt);
    curves.insert(curves.end(), c.begin(), c.end());
  }
  for (std::size_t h = 0; h < source.holes().size(); ++h) {
    SourceCurve S{&source.chart(), &source.holes()[h], &source.holes_plane()[h], std::nullopt, false};
    auto c = lift_curve(R, S, opt);
    curves.insert(curves.end(), c.begin(), c.end());
  }

  // Group in a chart where a preimage of a far point sits at infinity.
  const SpherePoint q = R.preimages(far_point(source)).front().point;
  const PlanarChart gchart(q.antipode());
  struct Planar {
    std::vector<Complex> pts;
    double area;
  };
  std::vector<Planar> planar;
  for (const auto& c : curves) {
    Planar p;
    for (const auto& z : c.pts) p.pts.push_back(gchart.to_plane(z));
    p.area = signed_area(p.pts);
    planar.push_back(std::move(p));
  }
  std::vector<int> outers, holes;
  for (std::size_t i = 0; i < curves.size(); ++i) (planar[i].area > 0 ? outers : holes).push_back(static_cast<int>(i));
  std::sort(outers.begin(), outers.end(), [&](int a, int b) { return planar[a].area < planar[b].area; });

  std::vector<std::vector<int>> hole_of(outers.size());
  for (int h : holes) {
    const Complex probe = planar[h].pts.front();
    int owner = -1;
    for (std::size_t o = 0; o < outers.size(); ++o)
      if (point_in_polygon(planar[outers[o]].pts, probe)) {
        owner = static_cast<int>(o);
        break;
      }
    if (owner < 0) throw NumericError("numeric-failure", "lifted hole boundary has no enclosing component");
    hole_of[owner].push_back(h);
  }

  auto in_group = [&](std::size_t o, Complex zeta) {
    if (!point_in_polygon(planar[outers[o]].pts, zeta)) return false;
    for (int h : hole_of[o])
      if (point_in_polygon(planar[h].pts, zeta)) return false;
    return true;
  };

  // Covering degree from preimages of the witness.
  const auto wpre = R.preimages(source.witness());
  std::vector<int> degree(outers.size(), 0);
  std::vector<std::optional<SpherePoint>> witness(outers.size());
  for (const auto& p : wpre) {
    const Complex zeta = gchart.to_plane(p.point);
    bool placed = false;
    for (std::size_t o = 0; o < outers.size() && !placed; ++o)
      if (in_group(o, zeta)) {
        degree[o] += p.multiplicity;
        if (!witness[o] || witness_less(p.point, *witness[o])) witness[o] = p.point;
        placed = true;
      }
    if (!placed) throw NumericError("numeric-failure", "witness preimage outside every lifted component");
  }

  const int source_curves = 1 + static_cast<int>(source.holes().size());
  const auto& crit = R.critical_points();
  std::vector<PullbackComponent> out;
  for (std::size_t o = 0; o < outers.size(); ++o) {
    if (degree[o] == 0 || !witness[o]) throw NumericError("numeric-failure", "lifted component without witness");
    int laps = 0;
    const int c0 = outers[o];
    if (curves[c0].from_outer) laps += curves[c0].laps;
    for (int h : hole_of[o])
      if (curves[h].from_outer) laps += curves[h].laps;
    if (laps != degree[o]) {
      std::ostringstream os;
      os << "covering degree mismatch: " << laps << " laps, " << degree[o] << " witness preimages";
      throw NumericError("refine-or-fail", os.str());
    }
    PullbackComponent comp;
    comp.covering_degree = degree[o];
    std::vector<std::vector<SpherePoint>> hole_pts;
    for (int h : hole_of[o]) hole_pts.push_back(decimate(curves[h].pts, opt.max_vertices));
    // The witness chart is used unless its point at infinity falls inside.
    const SpherePoint center = in_group(o, gchart.to_plane(witness[o]->antipode())) ? gchart.center() : *witness[o];
    comp.domain = Domain(*witness[o], center, decimate(curves[c0].pts, opt.max_vertices), std::move(hole_pts));
    int ramification = 0;
    for (std::size_t k = 0; k < crit.size(); ++k)
      if (in_group(o, gchart.to_plane(crit[k].point))) {
        comp.critical_indices.push_back(static_cast<int>(k));
        ramification += crit[k].local_degree - 1;
      }
    // Riemann-Hurwitz for the proper map W -> source.
    const int boundary = 1 + static_cast<int>(hole_of[o].size());
    if (2 - boundary != degree[o] * (2 - source_curves) - ramification)
      throw NumericError("refine-or-fail", "lifted component violates Riemann-Hurwitz");
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end(),
            [](const PullbackComponent& a, const PullbackComponent& b) { return witness_less(a.witness(), b.witness()); });
  return out;
}

std::vector<PullbackComponent> disk_preimage_components(const RationalMap& R, const DiskSpec& disk,
                                                        const LiftOptions& opt) {
  disk.validate();
  return pullback_components(R, Domain::disk(disk.center, disk.radius, disk.samples), opt);
}

PullbackComponent tilde_ball(const RationalMap& R, int critical_index, double delta, int samples,
                             double delta_limit) {
  const auto& crit = R.critical_points();
  if (critical_index < 0 || critical_index >= static_cast<int>(crit.size()))
    throw PreconditionError("critical index out of range");
  if (delta_limit > 1.0) throw PreconditionError("tilde_ball radius limit is at most 1");
  if (!(delta > 0.0 && delta < delta_limit)) throw PreconditionError("tilde_ball needs 0 < delta < limit (0.5 by default)");
  const SpherePoint v = crit[critical_index].image;
  for (const auto& c : crit) {
    const double dist = chordal_distance(c.image, v);
    if (dist > 1e-12 && dist < delta + 1e-6)
      throw NumericError("refine-or-fail", "another critical value lies in or near B(R(c), delta)");
  }
  DiskSpec spec{v, delta, samples};
  for (auto& comp : disk_preimage_components(R, spec))
    if (std::find(comp.critical_indices.begin(), comp.critical_indices.end(), critical_index) !=
        comp.critical_indices.end())
      return comp;
  throw NumericError("numeric-failure", "no preimage component contains the critical point");
}

PullbackComponent tilde_ball_block(const RationalMap& R, int block_id, double delta, int samples,
                                   double delta_limit) {
  const auto& blocks = R.critical_blocks();
  if (block_id < 0 || block_id >= static_cast<int>(blocks.size())) throw PreconditionError("block id out of range");
  return tilde_ball(R, blocks[block_id].tail, delta, samples, delta_limit);
}

std::vector<int> PullbackTree::leaves() const {
  std::vector<bool> has_child(nodes.size(), false);
  for (const auto& n : nodes)
    if (n.parent >= 0) has_child[n.parent] = true;
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!has_child[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> PullbackTree::path(int node) const {
  std::vector<int> out;
  for (int k = node; k >= 0; k = nodes[k].parent) out.push_back(k);
  std::reverse(out.begin(), out.end());
  return out;
}

PullbackTree enumerate_pullbacks(const RationalMap& R, const Domain& root, const EnumerateOptions& opt,
                                 const VisitFn& visit) {
  if (opt.depth < 0) throw PreconditionError("depth must be >= 0");
  PullbackTree tree;
  PullbackNode r;
  r.comp.domain = root;
  for (std::size_t k = 0; k < R.critical_points().size(); ++k)
    if (root.contains(R.critical_points()[k].point)) r.comp.critical_indices.push_back(static_cast<int>(k));
  tree.nodes.push_back(std::move(r));
  if (visit) visit(tree, 0);

  std::vector<int> frontier{0};
  for (int depth = 1; depth <= opt.depth && !frontier.empty(); ++depth) {
    std::vector<std::vector<PullbackComponent>> kids(frontier.size());
    parallel_for(frontier.size(), opt.workers, [&](std::size_t i) {
      kids[i] = pullback_components(R, tree.nodes[frontier[i]].comp.domain, opt.lift);
    });
    std::vector<int> next;
    bool full = false;
    for (std::size_t i = 0; i < frontier.size() && !full; ++i) {
      for (std::size_t k = 0; k < kids[i].size(); ++k) {
        if (tree.nodes.size() >= opt.budget) {
          tree.complete = false;
          full = true;
          break;
        }
        PullbackNode node;
        node.parent = frontier[i];
        node.depth = depth;
        node.rank = static_cast<int>(k);
        node.comp = std::move(kids[i][k]);
        node.pruned = opt.prune && opt.prune(node.comp, depth);
        tree.nodes.push_back(std::move(node));
        const int id = static_cast<int>(tree.nodes.size()) - 1;
        if (visit && !visit(tree, id)) tree.nodes[id].pruned = true;
        if (!tree.nodes[id].pruned) next.push_back(id);
      }
    }
    if (!opt.keep_domains) {
      for (int f : frontier) tree.nodes[f].comp.domain = Domain();
      for (auto& n : tree.nodes)
        if (n.pruned && n.depth == depth) n.comp.domain = Domain();
    }
    frontier = std::move(next);
  }
  if (!opt.keep_domains)
    for (int f : frontier) tree.nodes[f].comp.domain = Domain();
  return tree;
}

std::vector<std::vector<int>> chains(const PullbackTree& tree) {
  std::vector<std::vector<int>> children(tree.nodes.size());
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) children[tree.nodes[i].parent].push_back(static_cast<int>(i));
  std::vector<std::vector<int>> out;
  if (tree.nodes.empty()) return out;
  std::vector<int> path;
  auto walk = [&](auto&& self, int n) -> void {
    path.push_back(n);
    if (children[n].empty()) out.push_back(path);
    for (int c : children[n]) self(self, c);
    path.pop_back();
  };
  walk(walk, 0);
  return out;
}

std::vector<PullbackComponent> rebuild_chain(const RationalMap& R, const Domain& root, const PullbackTree& tree,
                                             int node, const LiftOptions& opt) {
  const auto p = tree.path(node);
  std::vector<PullbackComponent> out;
  PullbackComponent cur;
  cur.domain = root;
  out.push_back(cur);
  for (std::size_t i = 1; i < p.size(); ++i) {
    auto kids = pullback_components(R, out.back().domain, opt);
    out.push_back(kids.at(tree.nodes[p[i]].rank));
  }
  return out;
}

namespace {

double distance_to_set(const Domain& W, const std::vector<SpherePoint>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::min(best, W.distance_to(p));
  return best;
}

void check_pair(double delta, double delta_prime) {
  if (!(delta > 0.0)) throw PreconditionError("delta must be positive");
  if (!(delta_prime > delta)) throw PreconditionError("delta' must exceed delta");
  if (!(delta_prime < 1.0)) throw PreconditionError("delta' must be below 1");
}

}  // namespace

BCReport check_bc(const RationalMap& R, double delta, double delta_prime, const CheckOptions& opt) {
  check_pair(delta, delta_prime);
  if (opt.depth < 0) throw PreconditionError("depth must be >= 0");
  BCReport rep;
  rep.delta = delta;
  rep.delta_prime = delta_prime;
  rep.depth = opt.depth;
  const auto cv = R.critical_values();
  for (int b : R.julia_blocks()) {
    const Domain root = tilde_ball_block(R, b, delta_prime, opt.samples, 1.0).domain;
    EnumerateOptions eo;
    eo.depth = opt.depth;
    eo.budget = opt.budget > rep.nodes ? opt.budget - rep.nodes : 1;
    eo.workers = opt.workers;
    eo.keep_domains = false;
    int bad = -1;
    double bad_diam = 0.0, bad_dist = 0.0;
    auto visit = [&](const PullbackTree& t, int id) {
      const auto& n = t.nodes[id];
      if (n.depth == 0) return true;
      if (bad >= 0) return false;
      const double dist = distance_to_set(n.comp.domain, cv);
      if (dist <= delta) {
        const double diam = n.comp.diameter();
        rep.max_near_diameter = std::max(rep.max_near_diameter, diam);
        if (diam >= delta) {
          bad = id;
          bad_diam = diam;
          bad_dist = dist;
        }
      }
      return bad < 0;
    };
    const auto tree = enumerate_pullbacks(R, root, eo, visit);
    rep.nodes += tree.nodes.size();
    rep.complete = rep.complete && tree.complete;
    if (bad >= 0) {
      ChainWitness w;
      w.block_id = b;
      w.depth = tree.nodes[bad].depth;
      w.diameter = bad_diam;
      w.distance_to_cv = bad_dist;
      w.chain = rebuild_chain(R, root, tree, bad);
      rep.counterexample = std::move(w);
      rep.verdict = Verdict::Fails;
      return rep;
    }
  }
  rep.verdict = rep.complete ? Verdict::Holds : Verdict::Undetermined;
  return rep;
}

UPCReport check_upc(const RationalMap& R, double delta, double delta_prime, const CheckOptions& opt) {
  check_pair(delta, delta_prime);
  if (opt.depth < 0) throw PreconditionError("depth must be >= 0");
  UPCReport rep;
  rep.delta = delta;
  rep.delta_prime = delta_prime;
  rep.depth = opt.depth;
  if (opt.depth == 0) {
    rep.verdict = Verdict::Holds;
    return rep;
  }
  std::vector<Domain> avoid;
  for (int b : R.julia_blocks()) avoid.push_back(tilde_ball_block(R, b, delta, opt.samples).domain);
  auto in_avoid = [&](const SpherePoint& z) {
    for (const auto& a : avoid)
      if (a.contains(z)) return true;
    return false;
  };

  for (int b : R.julia_blocks()) {
    const Domain root = tilde_ball_block(R, b, delta_prime, opt.samples, 1.0).domain;
    // Polar grid in B(v, delta'), pulled back into the root.
    std::vector<SpherePoint> seeds;
    const PlanarChart vchart(R.critical_blocks()[b].value);
    const double rho = chordal_radius_to_plane(delta_prime);
    for (int ring = 1; ring <= 4; ++ring)
      for (int k = 0; k < 8; ++k) {
        const Complex zeta = std::polar(rho * ring / 5.0, 2.0 * std::numbers::pi * (k + 0.5 * ring) / 8.0);
        for (const auto& p : R.preimages(vchart.to_sphere(zeta)))
          if (root.contains(p.point)) seeds.push_back(p.point);
      }
    // carried[id]: samples z in node id with R^j(z) outside the small balls
    // for 1 <= j < depth(id).
    std::vector<std::vector<SpherePoint>> carried{seeds};
    int bad = -1;
    auto visit = [&](const PullbackTree& t, int id) {
      if (id == 0) return true;
      const auto& n = t.nodes[id];
      std::vector<SpherePoint> mine;
      for (const auto& z : carried[n.parent]) {
        if (n.parent != 0 && in_avoid(z)) continue;
        for (const auto& p : R.preimages(z))
          if (n.comp.domain.contains(p.point)) mine.push_back(p.point);
      }
      carried.push_back(mine);
      if (mine.empty()) return false;
      rep.witnesses += mine.size();
      if (bad < 0)
        for (int k : t.path(id))
          if (k != 0 && !t.nodes[k].comp.univalent()) bad = id;
      return bad < 0;
    };
    EnumerateOptions eo;
    eo.depth = opt.depth;
    eo.budget = opt.budget > rep.nodes ? opt.budget - rep.nodes : 1;
    eo.workers = opt.workers;
    eo.keep_domains = false;
    const auto tree = enumerate_pullbacks(R, root, eo, visit);
    rep.nodes += tree.nodes.size();
    rep.complete = rep.complete && tree.complete;
    if (bad >= 0) {
      ChainWitness w;
      w.block_id = b;
      w.depth = tree.nodes[bad].depth;
      w.chain = rebuild_chain(R, root, tree, bad);
      w.diameter = w.chain.back().diameter();
      rep.counterexample = std::move(w);
      rep.verdict = Verdict::Fails;
      return rep;
    }
  }
  rep.verdict = rep.complete ? Verdict::Holds : Verdict::Undetermined;
  return rep;
}

std::vector<BCFunctionRow> bc_function_estimate(const RationalMap& R, std::vector<double> deltas, double rho_max,
                                                const CheckOptions& opt, int bisection_steps) {
  if (deltas.empty()) return {};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 0.1)) throw PreconditionError("grid values must lie in (0, 0.1)");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw PreconditionError("grid must be strictly descending");
  }
  if (!(rho_max >= 1.0)) throw PreconditionError("rho_max must be >= 1");
  std::vector<BCFunctionRow> rows;
  for (double delta : deltas) {
    BCFunctionRow row;
    row.delta = delta;
    const double hi_cap = std::min(rho_max, 0.49 / delta);
    if (hi_cap > 1.0) {
      auto holds = [&](double rho) { return check_bc(R, delta, rho * delta, opt).verdict == Verdict::Holds; };
      if (holds(hi_cap)) {
        row.raw_ratio = hi_cap;
      } else {
        double lo = 1.0, hi = hi_cap;
        for (int s = 0; s < bisection_steps; ++s) {
          const double mid = 0.5 * (lo + hi);
          (holds(mid) ? lo : hi) = mid;
        }
        row.raw_ratio = lo;
      }
    }
    rows.push_back(row);
  }
  double running = 0.0;
  for (auto& row : rows) {
    running = std::max(running, row.raw_ratio);
    row.ratio = running;
  }
  return rows;
}

}  // namespace bctk
