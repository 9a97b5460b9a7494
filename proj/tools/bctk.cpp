// bctk: command-line front end. Every subcommand writes one JSON report
// (or a PGM image for render) to --out or stdout.
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "bctk/commands.hpp"

using namespace bctk;

namespace {

enum class Kind { Real, Int, Count, Reals, Doc, Flag, Text, Overrides };

struct Flag {
  std::string name;  // long flag without dashes
  std::string key;   // parameter key
  Kind kind;
  std::string help;
};

struct Command {
  std::string name;
  std::string help;
  bool needs_map = true;
  std::vector<Flag> flags;
};

const std::vector<Command>& commands() {
  const Flag depth{"depth", "depth", Kind::Int, "iteration or pull-back depth"};
  const Flag samples{"samples", "samples", Kind::Int, "boundary samples"};
  const Flag delta{"delta", "delta", Kind::Real, "chordal radius delta"};
  const Flag delta_prime{"delta-prime", "delta_prime", Kind::Real, "chordal radius delta'"};
  static const std::vector<Command> cmds{
      {"analyze", "critical data, blocks and Julia verdicts", true,
       {{"classify-depth", "classify_depth", Kind::Int, "orbit depth of the Julia classification"},
        {"julia", "julia", Kind::Overrides, "override as INDEX=yes|no|undetermined (repeatable)"}}},
      {"check-ce", "Collet-Eckmann growth of the critical values", true,
       {depth, {"tol", "tol", Kind::Real, "critical-orbit tolerance"}}},
      {"check-summ", "summability of the critical values", true,
       {depth, {"beta", "beta", Kind::Real, "exponent beta"}, {"tol", "tol", Kind::Real, "critical-orbit tolerance"}}},
      {"check-bc", "backward contraction to a finite depth", true, {delta, delta_prime, depth, samples}},
      {"check-upc", "univalent pull-back condition on sampled orbits", true, {delta, delta_prime, depth, samples}},
      {"bc-function", "estimate of delta -> r(delta)", true,
       {{"deltas", "deltas", Kind::Reals, "comma-separated deltas"},
        {"rho-max", "rho_max", Kind::Real, "largest ratio tried"},
        {"steps", "steps", Kind::Int, "bisection steps"},
        depth,
        samples}},
      {"nice-set", "construct a nice set", true,
       {delta, delta_prime, depth,
        {"verify-depth", "verify_depth", Kind::Int, "verify the result to this depth"},
        {"resolution", "resolution", Kind::Int, "boundary vertices of round pieces"},
        {"no-check-bc", "check_bc", Kind::Flag, "skip the BC hypothesis check"}}},
      {"nice-nest", "construct a nice nest", true,
       {{"delta0", "delta0", Kind::Real, "initial scale"},
        {"tau", "tau", Kind::Real, "scale ratio between levels"},
        {"eta", "eta", Kind::Real, "outer radius factor"},
        {"ell", "ell", Kind::Int, "window length"},
        {"levels", "levels", Kind::Int, "number of levels (0: default)"},
        depth,
        {"verify-depth", "verify_depth", Kind::Int, "verify the nest to this depth"},
        {"resolution", "resolution", Kind::Int, "boundary vertices of round pieces"},
        {"no-check-bc", "check_bc", Kind::Flag, "skip the BC hypothesis check"}}},
      {"verify-nice", "verify a nice set file", true,
       {{"nice", "nice", Kind::Doc, "NiceSet JSON file"}, depth, samples}},
      {"area-ratio", "Monte-Carlo area ratio between two nice sets", true,
       {{"nest", "nest", Kind::Doc, "nest JSON file"},
        {"level", "level", Kind::Int, "use nest levels j and j + 1"},
        {"outer", "outer", Kind::Doc, "outer NiceSet JSON file"},
        {"inner", "inner", Kind::Doc, "inner NiceSet JSON file"},
        depth,
        {"samples", "samples", Kind::Count, "samples per block"},
        {"distortion", "distortion", Kind::Real, "distortion constant D"}}},
      {"modulus", "conformal modulus of an annulus", false,
       {{"annulus", "annulus", Kind::Doc, "AnnulusRegion JSON file"},
        {"grid", "grid", Kind::Int, "grid size"},
        {"tolerance", "tolerance", Kind::Real, "SOR update tolerance"}}},
      {"thurston", "Thurston iteration on a marked set, or the connecting driver", false,
       {{"dynamics", "dynamics", Kind::Doc, "dynamics JSON file"},
        delta,
        {"tol", "tol", Kind::Real, "step-norm tolerance"},
        {"max-iter", "max_iter", Kind::Int, "iteration cap"},
        depth,
        {"max-period", "max_period", Kind::Int, "largest cycle period searched"},
        {"verify-depth", "verify_depth", Kind::Int, "nonrecurrence depth"},
        {"margin", "margin", Kind::Real, "nonrecurrence margin"},
        {"bc-depth", "bc_depth", Kind::Int, "depth of the reported BC check"}}},
      {"render", "PGM mask of the Julia set", true,
       {{"width", "width", Kind::Int, "pixels"},
        {"height", "height", Kind::Int, "pixels"},
        {"viewport", "viewport", Kind::Reals, "xmin,xmax,ymin,ymax"},
        {"iterations", "iterations", Kind::Int, "iterations per pixel"},
        {"nice", "nice", Kind::Doc, "NiceSet overlay"},
        {"kv-depth", "kv_depth", Kind::Int, "K(V) overlay depth"}}},
  };
  return cmds;
}

double to_real(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw PreconditionError("--" + flag + " expects a number, got \"" + s + "\"");
}

long long to_int(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  throw PreconditionError("--" + flag + " expects an integer, got \"" + s + "\"");
}

Json parse_document(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("malformed JSON in " + what + ": " + e.what());
  }
}

// Inline JSON when the argument starts with '{', else a file path.
Json load_document(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return parse_document(arg, "inline argument");
  return read_json_file(arg);
}

struct Raw {
  std::map<std::string, std::string> values;
  std::map<std::string, std::vector<std::string>> lists;
  std::map<std::string, bool> flags;
};

void add_params(const Command& cmd, const Raw& raw, Json& params, Json& recorded) {
  for (const auto& f : cmd.flags) {
    switch (f.kind) {
      case Kind::Flag:
        if (raw.flags.at(f.name)) {
          params[f.key] = false;
          recorded[f.key] = false;
        }
        continue;
      case Kind::Overrides: {
        const auto& items = raw.lists.at(f.name);
        if (items.empty()) continue;
        Json o = Json::object();
        for (const auto& it : items) {
          const auto eq = it.find('=');
          if (eq == std::string::npos) throw PreconditionError("--" + f.name + " expects INDEX=STATUS");
          o[std::to_string(to_int(it.substr(0, eq), f.name))] = it.substr(eq + 1);
        }
        params[f.key] = o;
        recorded[f.key] = o;
        continue;
      }
      default: break;
    }
    const std::string& s = raw.values.at(f.name);
    if (s.empty()) continue;
    Json v;
    switch (f.kind) {
      case Kind::Real: v = to_real(s, f.name); break;
      case Kind::Int: v = to_int(s, f.name); break;
      case Kind::Count: {
        const long long n = to_int(s, f.name);
        if (n < 0) throw PreconditionError("--" + f.name + " must be >= 0");
        v = static_cast<std::size_t>(n);
        break;
      }
      case Kind::Reals: {
        v = Json::array();
        std::size_t start = 0;
        for (;;) {
          const auto comma = s.find(',', start);
          v.push_back(to_real(s.substr(start, comma - start), f.name));
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        break;
      }
      case Kind::Doc:
        params[f.key] = load_document(s);
        recorded[f.key] = s;
        continue;
      default: v = s; break;
    }
    params[f.key] = v;
    recorded[f.key] = v;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"bctk: finite-depth checks and constructions for rational maps"};
  app.require_subcommand(1);
  std::string map_arg, out_path, format = "json";
  std::string seed_s = "0", budget_s = "1000000", workers_s = "1";
  app.add_option("--map", map_arg, "map JSON file or inline JSON");
  app.add_option("--seed", seed_s, "seed of randomized procedures");
  app.add_option("--budget", budget_s, "node / sample budget");
  app.add_option("--workers", workers_s, "worker threads (results do not depend on it)");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json"}));

  std::map<std::string, Raw> raws;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    Raw& raw = raws[cmd.name];
    for (const auto& f : cmd.flags) {
      if (f.kind == Kind::Flag) {
        raw.flags[f.name] = false;
        sub->add_flag("--" + f.name, raw.flags[f.name], f.help);
      } else if (f.kind == Kind::Overrides) {
        sub->add_option("--" + f.name, raw.lists[f.name], f.help);
      } else {
        sub->add_option("--" + f.name, raw.values[f.name], f.help);
      }
    }
    subs[cmd.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands())
    if (subs[c.name]->parsed()) cmd = &c;

  RunConfig cfg;
  const long long seed = to_int(seed_s, "seed");
  const long long budget = to_int(budget_s, "budget");
  const long long workers = to_int(workers_s, "workers");
  if (seed < 0) throw PreconditionError("--seed must be >= 0");
  if (budget < 1) throw PreconditionError("--budget must be >= 1");
  if (workers < 1 || workers > 256) throw PreconditionError("--workers must lie in [1, 256]");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.budget = static_cast<std::size_t>(budget);
  cfg.workers = static_cast<int>(workers);

  Json recorded = Json::object();
  if (!map_arg.empty()) {
    cfg.map = load_document(map_arg);
    recorded["map"] = cfg.map;
  } else if (cmd->needs_map) {
    throw PreconditionError(cmd->name + " needs --map");
  }
  Json params_recorded = Json::object();
  add_params(*cmd, raws[cmd->name], cfg.params, params_recorded);
  recorded["seed"] = cfg.seed;
  recorded["budget"] = cfg.budget;
  recorded["params"] = params_recorded;

  std::string bytes;
  if (cmd->name == "render") {
    bytes = run_render(cfg);
  } else {
    bytes = dump(wrap_report(cmd->name, recorded, run_command(cmd->name, cfg)));
  }
  if (out_path.empty()) {
    std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
  } else {
    write_file_atomic(out_path, bytes);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "bctk: io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "bctk: numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bctk: precondition: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "bctk: precondition: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bctk: numeric failure: " << e.what() << "\n";
    return 3;
  }
}
