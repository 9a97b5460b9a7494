#include "bctk/commands.hpp"

#include <functional>
#include <map>

#include "bctk/render.hpp"

namespace bctk {

namespace {

template <class T>
T param(const Json& p, const char* key, T fallback) {
  if (!p.contains(key) || p.at(key).is_null()) return fallback;
  return p.at(key).get<T>();
}

template <class T>
T required(const Json& p, const char* key) {
  if (!p.contains(key) || p.at(key).is_null()) throw PreconditionError(std::string("missing parameter ") + key);
  return p.at(key).get<T>();
}

const Json& document(const Json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_object())
    throw PreconditionError(std::string("missing input document ") + key);
  // A full report of another subcommand stands for its result.
  const Json& d = p.at(key);
  if (d.contains("schema") && d.contains("result") && d.at("result").is_object()) return d.at("result");
  return d;
}

RationalMap load_map(const RunConfig& cfg) {
  if (cfg.map.is_null()) throw PreconditionError("this command needs --map");
  ClassifyOptions opt;
  opt.depth = param(cfg.params, "classify_depth", opt.depth);
  if (cfg.params.contains("julia")) {
    for (const auto& [k, v] : cfg.params.at("julia").items()) {
      const std::string s = v.get<std::string>();
      JuliaStatus st;
      if (s == "yes")
        st = JuliaStatus::Yes;
      else if (s == "no")
        st = JuliaStatus::No;
      else if (s == "undetermined")
        st = JuliaStatus::Undetermined;
      else
        throw PreconditionError("julia override must be yes, no or undetermined");
      opt.overrides[std::stoi(k)] = st;
    }
  }
  return map_from_json(cfg.map, opt);
}

CheckOptions check_options(const RunConfig& cfg, int depth) {
  CheckOptions co;
  co.depth = param(cfg.params, "depth", depth);
  co.samples = param(cfg.params, "samples", co.samples);
  co.budget = cfg.budget;
  co.workers = cfg.workers;
  return co;
}

NiceOptions nice_options(const RunConfig& cfg, int verify_depth) {
  NiceOptions no;
  no.resolution = param(cfg.params, "resolution", no.resolution);
  no.kappa0 = param(cfg.params, "kappa0", no.kappa0);
  no.C0 = param(cfg.params, "C0", no.C0);
  no.check_bc = param(cfg.params, "check_bc", no.check_bc);
  no.verify_depth = param(cfg.params, "verify_depth", verify_depth);
  no.budget = cfg.budget;
  no.workers = cfg.workers;
  return no;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions vo;
  vo.boundary_samples = param(cfg.params, "samples", vo.boundary_samples);
  vo.budget = cfg.budget;
  vo.workers = cfg.workers;
  return vo;
}

Json cmd_analyze(const RunConfig& cfg) { return analyze_to_json(load_map(cfg)); }

Json cmd_check_ce(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const auto reps = check_collet_eckmann(R, param(cfg.params, "depth", 100), param(cfg.params, "tol", 1e-9));
  Json a = Json::array();
  for (const auto& r : reps) a.push_back(to_json(r));
  return {{"reports", a}, {"verdict", to_string(julia_verdict(reps))}};
}

Json cmd_check_summ(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const auto reps = check_summability(R, param(cfg.params, "beta", 1.0), param(cfg.params, "depth", 30),
                                      param(cfg.params, "tol", 1e-9));
  Json a = Json::array();
  for (const auto& r : reps) a.push_back(to_json(r));
  return {{"reports", a}, {"verdict", to_string(julia_verdict(reps))}};
}

Json cmd_check_bc(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  return to_json(check_bc(R, required<double>(cfg.params, "delta"), required<double>(cfg.params, "delta_prime"),
                          check_options(cfg, 12)));
}

Json cmd_check_upc(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  return to_json(check_upc(R, required<double>(cfg.params, "delta"), required<double>(cfg.params, "delta_prime"),
                           check_options(cfg, 12)));
}

Json cmd_bc_function(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const auto rows = bc_function_estimate(R, required<std::vector<double>>(cfg.params, "deltas"),
                                         param(cfg.params, "rho_max", 8.0), check_options(cfg, 6),
                                         param(cfg.params, "steps", 10));
  Json a = Json::array();
  for (const auto& r : rows) a.push_back(to_json(r));
  return {{"rows", a}};
}

Json cmd_nice_set(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const NiceSet V = construct_nice_set(R, required<double>(cfg.params, "delta"),
                                       required<double>(cfg.params, "delta_prime"), param(cfg.params, "depth", 8),
                                       nice_options(cfg, 0));
  return nice_set_to_json(V);
}

Json cmd_nice_nest(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const NiceNest nest = construct_nice_nest(
      R, required<double>(cfg.params, "delta0"), required<double>(cfg.params, "tau"),
      required<double>(cfg.params, "eta"), param(cfg.params, "ell", 0), param(cfg.params, "depth", 8),
      nice_options(cfg, 0), param(cfg.params, "levels", 0));
  return nest_to_json(nest);
}

Json cmd_verify_nice(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  const NiceSet V = nice_set_from_json(document(cfg.params, "nice"));
  return to_json(verify_nice(R, V, param(cfg.params, "depth", 10), verify_options(cfg)));
}

Json cmd_area_ratio(const RunConfig& cfg) {
  const RationalMap R = load_map(cfg);
  NiceSet outer, inner;
  if (cfg.params.contains("nest")) {
    const auto levels = nest_levels_from_json(document(cfg.params, "nest"));
    const int j = param(cfg.params, "level", 1);
    if (j < 1 || j + 1 > static_cast<int>(levels.size()))
      throw PreconditionError("level must satisfy 1 <= level < number of nest levels");
    outer = levels[j - 1];
    inner = levels[j];
  } else {
    outer = nice_set_from_json(document(cfg.params, "outer"));
    inner = nice_set_from_json(document(cfg.params, "inner"));
  }
  const AreaReport rep = area_ratio(R, outer, inner, param(cfg.params, "depth", 20),
                                    param<std::size_t>(cfg.params, "samples", 10'000), cfg.seed,
                                    param(cfg.params, "distortion", 1.0), cfg.workers);
  return to_json(rep);
}

Json cmd_modulus(const RunConfig& cfg) {
  const AnnulusRegion A = annulus_from_json(document(cfg.params, "annulus"));
  ModulusOptions mo;
  mo.grid = param(cfg.params, "grid", mo.grid);
  mo.tolerance = param(cfg.params, "tolerance", mo.tolerance);
  return to_json(modulus_estimate(A, mo));
}

Json cmd_thurston(const RunConfig& cfg) {
  const double tol = param(cfg.params, "tol", 1e-12);
  const int max_iter = param(cfg.params, "max_iter", 200);
  if (cfg.params.contains("dynamics")) {
    const MarkedDynamics dyn = dynamics_from_json(document(cfg.params, "dynamics"));
    std::vector<Complex> init;
    if (cfg.params.contains("init")) {
      init = complex_list(cfg.params.at("init"));
    } else {
      for (const auto& z : dyn.marked) init.push_back(z.is_infinity() ? Complex(0.0) : z.finite());
    }
    const ThurstonRun run = run_thurston(dyn, init, tol, max_iter);
    Json j = to_json(run);
    if (run.Q) j["nonrecurrence"] = to_json(verify_nonrecurrent(*run.Q, param(cfg.params, "verify_depth", 50),
                                                                 param(cfg.params, "margin", 0.05)));
    return j;
  }
  const RationalMap R = load_map(cfg);
  ConnectingOptions co;
  co.depth = param(cfg.params, "depth", co.depth);
  co.tol = tol;
  co.max_iter = max_iter;
  co.verify_depth = param(cfg.params, "verify_depth", co.verify_depth);
  co.margin = param(cfg.params, "margin", co.margin);
  co.bc_depth = param(cfg.params, "bc_depth", co.bc_depth);
  co.targets.max_period = param(cfg.params, "max_period", co.targets.max_period);
  co.targets.budget = cfg.budget;
  const ConnectingRun out = connecting_lemma(R, required<double>(cfg.params, "delta"), co);
  Json j = to_json(out.run);
  j["dynamics"] = dynamics_to_json(out.dynamics, out.targets);
  j["nonrecurrence"] = to_json(out.nonrecurrence);
  j["bc"] = to_json(out.bc);
  return j;
}

using Handler = std::function<Json(const RunConfig&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"analyze", cmd_analyze},         {"check-ce", cmd_check_ce},     {"check-summ", cmd_check_summ},
      {"check-bc", cmd_check_bc},       {"check-upc", cmd_check_upc},   {"bc-function", cmd_bc_function},
      {"nice-set", cmd_nice_set},       {"nice-nest", cmd_nice_nest},   {"verify-nice", cmd_verify_nice},
      {"area-ratio", cmd_area_ratio},   {"modulus", cmd_modulus},       {"thurston", cmd_thurston}};
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"analyze",     "check-ce",  "check-summ", "check-bc",   "check-upc",
                                              "bc-function", "nice-set",  "nice-nest",  "verify-nice",
                                              "area-ratio",  "modulus",   "thurston",   "render"};
  return names;
}

Json run_command(const std::string& name, const RunConfig& cfg) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw PreconditionError("unknown command " + name);
  if (!cfg.params.is_object()) throw PreconditionError("parameters must be a JSON object");
  if (cfg.workers < 1) throw PreconditionError("workers must be >= 1");
  if (cfg.budget < 1) throw PreconditionError("budget must be >= 1");
  try {
    return it->second(cfg);
  } catch (const Json::exception& e) {
    throw PreconditionError(std::string("bad parameter: ") + e.what());
  }
}

std::string run_render(const RunConfig& cfg) {
  try {
    const RationalMap R = load_map(cfg);
    RenderOptions ro;
    ro.width = param(cfg.params, "width", ro.width);
    ro.height = param(cfg.params, "height", ro.height);
    if (cfg.params.contains("viewport")) {
      const auto v = cfg.params.at("viewport").get<std::vector<double>>();
      if (v.size() != 4) throw PreconditionError("viewport is xmin, xmax, ymin, ymax");
      ro.xmin = v[0];
      ro.xmax = v[1];
      ro.ymin = v[2];
      ro.ymax = v[3];
    }
    ro.iterations = param(cfg.params, "iterations", ro.iterations);
    ro.kv_depth = param(cfg.params, "kv_depth", 0);
    ro.workers = cfg.workers;
    NiceSet V;
    if (cfg.params.contains("nice")) {
      V = nice_set_from_json(document(cfg.params, "nice"));
      ro.nice = &V;
    }
    return to_pgm(render_mask(R, ro), ro.width, ro.height);
  } catch (const Json::exception& e) {
    throw PreconditionError(std::string("bad parameter: ") + e.what());
  }
}

Json wrap_report(const std::string& name, const Json& config, const Json& result) {
  return {{"schema", kSchema}, {"command", name}, {"config", config}, {"result", result}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bctk
