#include "bctk/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace bctk {

namespace {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Disjoint: return "disjoint";
    case Relation::Inside: return "inside";
    case Relation::Contains: return "contains";
    case Relation::Overlap: return "overlap";
  }
  return "overlap";
}

// JSON has no infinities; unbounded quantities become null.
Json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

Json point_list(const std::vector<SpherePoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

std::vector<SpherePoint> points_from(const Json& j) {
  if (!j.is_array()) throw PreconditionError("expected an array of points");
  std::vector<SpherePoint> out;
  for (const auto& e : j) out.push_back(point_from_json(e));
  return out;
}

Json chain_to_json(const ChainWitness& w) {
  Json chain = Json::array();
  for (const auto& c : w.chain) chain.push_back(component_to_json(c));
  return {{"block", w.block_id},
          {"depth", w.depth},
          {"diameter", w.diameter},
          {"distance_to_cv", w.distance_to_cv},
          {"chain", chain}};
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real() + 0.0, z.imag() + 0.0}); }

Json to_json(const SpherePoint& p) {
  if (p.is_infinity()) return "inf";
  return to_json(p.finite());
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw PreconditionError("complex numbers are [re, im] arrays, got " + j.dump());
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError("non-finite complex number");
  return z;
}

SpherePoint point_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return SpherePoint::infinity();
    throw PreconditionError("unknown point " + j.dump());
  }
  return SpherePoint::from_complex(complex_from_json(j));
}

std::vector<Complex> complex_list(const Json& j) {
  if (!j.is_array()) throw PreconditionError("expected an array of [re, im] pairs");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

RationalMap map_from_json(const Json& j, const ClassifyOptions& opt) {
  if (!j.is_object()) throw PreconditionError("map must be a JSON object");
  const bool coeffs = j.contains("numerator") || j.contains("denominator");
  const bool shorthand = j.contains("quadratic_c");
  if (coeffs == shorthand) throw PreconditionError("map needs exactly one of numerator/denominator or quadratic_c");
  if (shorthand) return RationalMap::quadratic(complex_from_json(j.at("quadratic_c")), opt);
  if (!j.contains("numerator") || !j.contains("denominator"))
    throw PreconditionError("map needs both numerator and denominator");
  return RationalMap::from_coefficients(complex_list(j.at("numerator")), complex_list(j.at("denominator")), opt);
}

Json map_to_json(const RationalMap& R) {
  Json num_c = Json::array(), den_c = Json::array();
  for (const auto& c : R.numerator().c) num_c.push_back(to_json(c));
  for (const auto& c : R.denominator().c) den_c.push_back(to_json(c));
  return {{"numerator", num_c}, {"denominator", den_c}};
}

Json domain_to_json(const Domain& D, std::size_t max_points) {
  Json j{{"witness", to_json(D.witness())}, {"chart_center", to_json(D.chart().center())}};
  j["outer"] = point_list(max_points > 0 ? decimate(D.outer(), max_points) : D.outer());
  if (!D.holes().empty()) {
    Json holes = Json::array();
    for (const auto& h : D.holes()) holes.push_back(point_list(max_points > 0 ? decimate(h, max_points) : h));
    j["holes"] = holes;
  }
  return j;
}

Json component_to_json(const PullbackComponent& c, std::size_t max_points) {
  Json j = domain_to_json(c.domain, max_points);
  j["covering_degree"] = c.covering_degree;
  j["critical_indices"] = c.critical_indices;
  j["diameter"] = c.diameter();
  return j;
}

Json analyze_to_json(const RationalMap& R) {
  Json crit = Json::array();
  for (std::size_t i = 0; i < R.critical_points().size(); ++i) {
    const auto& c = R.critical_points()[i];
    crit.push_back({{"index", i},
                    {"point", to_json(c.point)},
                    {"mu", c.local_degree},
                    {"value", to_json(c.image)},
                    {"in_julia", to_string(c.in_julia)},
                    {"evidence", c.evidence},
                    {"block", c.block_id}});
  }
  Json blocks = Json::array();
  for (const auto& b : R.critical_blocks())
    blocks.push_back({{"id", b.id},
                      {"members", b.members},
                      {"tail", b.tail},
                      {"multiplicity", b.multiplicity},
                      {"value", to_json(b.value)},
                      {"in_julia", b.in_julia}});
  return {{"degree", R.degree()},
          {"polynomial", R.is_polynomial()},
          {"map", map_to_json(R)},
          {"critical_points", crit},
          {"blocks", blocks},
          {"julia_blocks", R.julia_blocks()}};
}

Json to_json(const CEReport& r) {
  return {{"critical_index", r.critical_index},
          {"value", to_json(r.value)},
          {"in_julia", r.in_julia},
          {"exposed", r.exposed},
          {"depth", r.depth},
          {"lambda_hat", r.lambda_hat},
          {"std_error", r.std_error},
          {"parabolic", r.parabolic},
          {"verdict", to_string(r.verdict)}};
}

Json to_json(const SummabilityReport& r) {
  return {{"critical_index", r.critical_index},
          {"value", to_json(r.value)},
          {"in_julia", r.in_julia},
          {"exposed", r.exposed},
          {"beta", r.beta},
          {"depth", r.depth},
          {"partial_sum", r.partial_sum},
          {"tail_bound", num(r.tail_bound)},
          {"lambda_hat", r.lambda_hat},
          {"verdict", to_string(r.verdict)}};
}

Json to_json(const BCReport& r) {
  Json j{{"verdict", to_string(r.verdict)},
         {"delta", r.delta},
         {"delta_prime", r.delta_prime},
         {"depth", r.depth},
         {"nodes", r.nodes},
         {"complete", r.complete},
         {"max_near_diameter", r.max_near_diameter},
         {"counterexample", nullptr}};
  if (r.verdict == Verdict::Holds) j["status"] = "holds-to-depth-" + std::to_string(r.depth);
  if (r.counterexample) j["counterexample"] = chain_to_json(*r.counterexample);
  return j;
}

Json to_json(const UPCReport& r) {
  Json j{{"verdict", to_string(r.verdict)},
         {"delta", r.delta},
         {"delta_prime", r.delta_prime},
         {"depth", r.depth},
         {"nodes", r.nodes},
         {"witnesses", r.witnesses},
         {"complete", r.complete},
         {"counterexample", nullptr}};
  if (r.counterexample) j["counterexample"] = chain_to_json(*r.counterexample);
  return j;
}

Json to_json(const BCFunctionRow& r) {
  return {{"delta", r.delta}, {"raw_ratio", r.raw_ratio}, {"ratio", r.ratio}};
}

Json to_json(const NiceReport& r) {
  Json j{{"verdict", to_string(r.verdict)},
         {"depth", r.depth},
         {"closures_disjoint", r.closures_disjoint},
         {"pullbacks", r.pullbacks},
         {"overlaps", r.overlaps},
         {"complete", r.complete},
         {"pullback_margin", num(r.pullback_margin)},
         {"boundary_margin", num(r.boundary_margin)},
         {"pullback_witness", nullptr},
         {"boundary_witness", nullptr}};
  if (r.pullback_witness) {
    const auto& w = *r.pullback_witness;
    j["pullback_witness"] = {{"root_block", w.root_block},
                             {"depth", w.depth},
                             {"target_block", w.target_block},
                             {"relation", to_string(w.relation)},
                             {"W", domain_to_json(w.W, 256)}};
  }
  if (r.boundary_witness) {
    const auto& w = *r.boundary_witness;
    j["boundary_witness"] = {{"block", w.block}, {"z", to_json(w.z)}, {"n", w.n}};
  }
  return j;
}

Json to_json(const NestReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l));
  return {{"verdict", to_string(r.verdict)},
          {"nested", r.nested},
          {"pullbacks", r.pullbacks},
          {"overlaps", r.overlaps},
          {"margin", num(r.margin)},
          {"levels", levels}};
}

Json to_json(const AreaReport& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks)
    blocks.push_back({{"block", b.block},
                      {"samples", b.samples},
                      {"attempts", b.attempts},
                      {"entering", b.entering},
                      {"ratio", b.ratio},
                      {"half_width", b.half_width}});
  return {{"xi", r.xi},
          {"psi", r.psi},
          {"xi_tilde", r.xi_tilde},
          {"psi_tilde", r.psi_tilde},
          {"samples", r.samples},
          {"half_width", r.half_width},
          {"depth", r.depth},
          {"blocks", blocks}};
}

Json to_json(const ModulusEstimate& m) {
  return {{"lower", m.lower},   {"estimate", m.estimate}, {"upper", m.upper},     {"raw", m.raw},
          {"energy", m.energy}, {"spacing", m.spacing},   {"sweeps", m.sweeps},   {"clamped", m.clamped}};
}

Json nice_set_to_json(const NiceSet& V) {
  Json domains = Json::object(), witnesses = Json::object(), centers = Json::object(), holes = Json::object();
  for (const auto& [id, D] : V.domains) {
    const std::string key = std::to_string(id);
    domains[key] = point_list(D.outer());
    witnesses[key] = to_json(D.witness());
    centers[key] = to_json(D.chart().center());
    if (!D.holes().empty()) {
      Json h = Json::array();
      for (const auto& hole : D.holes()) h.push_back(point_list(hole));
      holes[key] = h;
    }
  }
  const NiceParams& p = V.params;
  Json params{{"kind", p.kind},   {"scale", p.scale},         {"eta", p.eta},
              {"delta_prime", p.delta_prime}, {"delta_tilde", p.delta_tilde}, {"tau", p.tau},
              {"ell", p.ell},     {"level", p.level},         {"resolution", p.resolution}};
  Json diag = Json::object();
  for (const auto& [k, v] : V.diagnostics) diag[k] = num(v);
  Json j{{"domains", domains},   {"params", params},    {"depth", p.depth},
         {"witnesses", witnesses}, {"chart_centers", centers}, {"diagnostics", diag}};
  if (!holes.empty()) j["holes"] = holes;
  if (V.verification) j["verification"] = to_json(*V.verification);
  return j;
}

NiceSet nice_set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("domains") || !j.at("domains").is_object())
    throw PreconditionError("nice set needs a \"domains\" object");
  NiceSet V;
  for (const auto& [key, outer_j] : j.at("domains").items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw PreconditionError("domain keys are block ids, got \"" + key + "\"");
    }
    std::vector<SpherePoint> outer = points_from(outer_j);
    if (outer.size() < 3) throw PreconditionError("domain " + key + " has fewer than 3 vertices");
    SpherePoint witness;
    if (j.contains("witnesses") && j.at("witnesses").contains(key)) {
      witness = point_from_json(j.at("witnesses").at(key));
    } else {
      Complex mean = 0.0;
      for (const auto& p : outer) mean += p.finite();
      witness = SpherePoint::from_complex(mean / static_cast<double>(outer.size()));
    }
    SpherePoint center = witness;
    if (j.contains("chart_centers") && j.at("chart_centers").contains(key))
      center = point_from_json(j.at("chart_centers").at(key));
    std::vector<std::vector<SpherePoint>> holes;
    if (j.contains("holes") && j.at("holes").contains(key))
      for (const auto& h : j.at("holes").at(key)) holes.push_back(points_from(h));
    Domain D(witness, center, std::move(outer), std::move(holes));
    if (!D.contains(witness)) throw PreconditionError("witness of domain " + key + " is not inside it");
    V.domains.emplace(id, std::move(D));
  }
  if (j.contains("params")) {
    const Json& p = j.at("params");
    NiceParams& q = V.params;
    q.kind = p.value("kind", q.kind);
    q.scale = p.value("scale", q.scale);
    q.eta = p.value("eta", q.eta);
    q.delta_prime = p.value("delta_prime", q.delta_prime);
    q.delta_tilde = p.value("delta_tilde", q.delta_tilde);
    q.tau = p.value("tau", q.tau);
    q.ell = p.value("ell", q.ell);
    q.level = p.value("level", q.level);
    q.resolution = p.value("resolution", q.resolution);
  }
  V.params.depth = j.value("depth", 0);
  if (j.contains("diagnostics"))
    for (const auto& [k, v] : j.at("diagnostics").items())
      V.diagnostics[k] = v.is_number() ? v.get<double>() : std::numeric_limits<double>::infinity();
  return V;
}

Json nest_to_json(const NiceNest& nest) {
  Json levels = Json::array();
  for (const auto& L : nest.levels) levels.push_back(nice_set_to_json(L));
  Json j{{"base", nice_set_to_json(nest.base)},
         {"levels", levels},
         {"ell", nest.ell},
         {"complete", nest.complete},
         {"failure", nest.failure}};
  if (nest.verification) j["verification"] = to_json(*nest.verification);
  return j;
}

std::vector<NiceSet> nest_levels_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("levels") || !j.at("levels").is_array())
    throw PreconditionError("nest file needs a \"levels\" array");
  std::vector<NiceSet> out;
  for (const auto& L : j.at("levels")) out.push_back(nice_set_from_json(L));
  return out;
}

AnnulusRegion annulus_from_json(const Json& j) {
  if (!j.is_object()) throw PreconditionError("annulus must be a JSON object");
  if (j.contains("round")) {
    const Json& r = j.at("round");
    return AnnulusRegion::round(complex_from_json(r.value("center", Json::array({0.0, 0.0}))),
                                r.at("r").get<double>(), r.at("R").get<double>(), r.value("samples", 512));
  }
  AnnulusRegion A;
  A.outer = complex_list(j.at("outer"));
  A.inner = complex_list(j.at("inner"));
  A.validate();
  return A;
}

Json to_json(const TargetValue& t) {
  return {{"block", t.block},
          {"v", to_json(t.v)},
          {"distance", t.distance},
          {"preperiod", t.preperiod},
          {"period", t.period},
          {"orbit", point_list(t.orbit)},
          {"clearance", num(t.clearance)}};
}

Json dynamics_to_json(const MarkedDynamics& dyn, const std::vector<TargetValue>& targets) {
  Json crit = Json::array();
  for (const auto& c : dyn.critical) crit.push_back({{"index", c.index}, {"mu", c.mu}});
  Json t = Json::object();
  for (const auto& v : targets) t[std::to_string(v.block)] = to_json(v);
  return {{"degree", dyn.degree},
          {"marked", point_list(dyn.marked)},
          {"sigma", dyn.sigma},
          {"critical", crit},
          {"truncated", dyn.truncated},
          {"normalization", dyn.normalization},
          {"targets", t}};
}

MarkedDynamics dynamics_from_json(const Json& j) {
  if (!j.is_object()) throw PreconditionError("dynamics must be a JSON object");
  MarkedDynamics dyn;
  dyn.degree = j.at("degree").get<int>();
  dyn.marked = points_from(j.at("marked"));
  dyn.sigma = j.at("sigma").get<std::vector<int>>();
  for (const auto& c : j.at("critical")) dyn.critical.push_back({c.at("index").get<int>(), c.at("mu").get<int>()});
  if (j.contains("truncated")) dyn.truncated = j.at("truncated").get<std::vector<int>>();
  dyn.normalization = j.value("normalization", dyn.normalization);
  dyn.validate();
  return dyn;
}

Json to_json(const ThurstonRun& run) {
  Json coeffs = Json::array();
  for (const auto& c : run.coefficients) coeffs.push_back(to_json(c));
  Json positions = Json::array();
  for (const auto& z : run.state.positions) positions.push_back(to_json(z));
  Json j{{"converged", run.converged},
         {"iterations", run.iterations},
         {"residual", run.residual},
         {"history", run.history},
         {"monotone_from", run.monotone_from},
         {"coefficients", coeffs},
         {"positions", positions}};
  if (run.coefficients.size() == 3) j["c"] = to_json(run.coefficients[0]);
  return j;
}

Json to_json(const NonrecurrenceReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"critical_index", row.critical_index},
                    {"min_distance", num(row.min_distance)},
                    {"closest_step", row.closest_step}});
  return {{"verdict", to_string(r.verdict)}, {"min_distance", num(r.min_distance)}, {"depth", r.depth}, {"rows", rows}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place: " + path);
  }
}

}  // namespace bctk
