#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "bctk/commands.hpp"
#include "bctk/conformal.hpp"

namespace py = pybind11;
using namespace bctk;

namespace {

// None stands for the point at infinity.
using PyPoint = std::optional<Complex>;

SpherePoint to_point(const PyPoint& p) { return p ? SpherePoint::from_complex(*p) : SpherePoint::infinity(); }

PyPoint from_point(const SpherePoint& p) {
  if (p.is_infinity()) return std::nullopt;
  return p.finite();
}

RunConfig config_from(const std::string& map_json, const std::string& params_json, std::uint64_t seed,
                      std::size_t budget, int workers) {
  RunConfig cfg;
  try {
    cfg.map = map_json.empty() ? Json() : Json::parse(map_json);
    cfg.params = params_json.empty() ? Json::object() : Json::parse(params_json);
  } catch (const Json::parse_error& e) {
    throw PreconditionError(std::string("malformed JSON: ") + e.what());
  }
  cfg.seed = seed;
  cfg.budget = budget;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-depth checks and constructions for rational maps";

  static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
  static py::exception<NumericError> numeric(m, "NumericError", PyExc_RuntimeError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const NumericError& e) {
      py::set_error(numeric, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    }
  });

  m.attr("SCHEMA") = kSchema;

  py::class_<RationalMap>(m, "RationalMap")
      .def_static("quadratic", [](Complex c) { return RationalMap::quadratic(c); }, py::arg("c"))
      .def_static(
          "from_coefficients",
          [](std::vector<Complex> num, std::vector<Complex> den) {
            return RationalMap::from_coefficients(std::move(num), std::move(den));
          },
          py::arg("numerator"), py::arg("denominator"), "Ascending coefficient lists.")
      .def_property_readonly("degree", &RationalMap::degree)
      .def_property_readonly("is_polynomial", &RationalMap::is_polynomial)
      .def("__call__", [](const RationalMap& R, const PyPoint& z) { return from_point(R(to_point(z))); })
      .def("spherical_derivative",
           [](const RationalMap& R, const PyPoint& z) { return R.spherical_derivative(to_point(z)); })
      .def("preimages",
           [](const RationalMap& R, const PyPoint& w) {
             std::vector<std::pair<PyPoint, int>> out;
             for (const auto& p : R.preimages(to_point(w))) out.emplace_back(from_point(p.point), p.multiplicity);
             return out;
           })
      .def("critical_points",
           [](const RationalMap& R) {
             py::list out;
             for (const auto& c : R.critical_points()) {
               py::dict d;
               d["point"] = from_point(c.point);
               d["mu"] = c.local_degree;
               d["value"] = from_point(c.image);
               d["in_julia"] = to_string(c.in_julia);
               d["block"] = c.block_id;
               out.append(d);
             }
             return out;
           })
      .def("to_json", [](const RationalMap& R) { return map_to_json(R).dump(); });

  m.def(
      "chordal_distance", [](const PyPoint& p, const PyPoint& q) { return chordal_distance(to_point(p), to_point(q)); },
      py::arg("p"), py::arg("q"));
  m.def("modulus_round", &modulus_round, py::arg("r"), py::arg("R"));
  m.def(
      "qc_modulus_bounds",
      [](double K, double area, double mod) {
        const ModulusBounds b = qc_modulus_bounds(K, area, mod);
        return std::make_pair(b.lower, b.upper);
      },
      py::arg("K"), py::arg("area_N"), py::arg("modA"));

  m.def("command_names", &command_names);
  m.def(
      "run_json",
      [](const std::string& name, const std::string& map_json, const std::string& params_json, std::uint64_t seed,
         std::size_t budget, int workers) {
        const RunConfig cfg = config_from(map_json, params_json, seed, budget, workers);
        Json result;
        {
          py::gil_scoped_release release;
          result = run_command(name, cfg);
        }
        return result.dump();
      },
      py::arg("name"), py::arg("map_json"), py::arg("params_json"), py::arg("seed") = 0,
      py::arg("budget") = 1'000'000, py::arg("workers") = 1);
  m.def(
      "render_pgm",
      [](const std::string& map_json, const std::string& params_json, int workers) {
        const RunConfig cfg = config_from(map_json, params_json, 0, 1'000'000, workers);
        std::string bytes;
        {
          py::gil_scoped_release release;
          bytes = run_render(cfg);
        }
        return py::bytes(bytes);
      },
      py::arg("map_json"), py::arg("params_json"), py::arg("workers") = 1);
}
