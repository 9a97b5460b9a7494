/**
 * @file io.hpp
 * @brief JSON forms of maps, points, domains, reports and Thurston data,
 *        and atomic file output.
 *
 * Complex numbers are [re, im]; infinity is the string "inf". Polynomial
 * coefficients are listed in ascending order.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bctk/conformal.hpp"
#include "bctk/nice.hpp"
#include "bctk/orbit.hpp"
#include "bctk/thurston.hpp"

namespace bctk {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "bctk/1";

Json to_json(Complex z);
Json to_json(const SpherePoint& p);
Complex complex_from_json(const Json& j);
SpherePoint point_from_json(const Json& j);
std::vector<Complex> complex_list(const Json& j);

/// { "numerator": [...], "denominator": [...] } or { "quadratic_c": [re, im] }.
RationalMap map_from_json(const Json& j, const ClassifyOptions& opt = {});
Json map_to_json(const RationalMap& R);

Json domain_to_json(const Domain& D, std::size_t max_points = 0);
Json component_to_json(const PullbackComponent& c, std::size_t max_points = 256);

Json analyze_to_json(const RationalMap& R);
Json to_json(const CEReport& r);
Json to_json(const SummabilityReport& r);
Json to_json(const BCReport& r);
Json to_json(const UPCReport& r);
Json to_json(const BCFunctionRow& r);
Json to_json(const NiceReport& r);
Json to_json(const NestReport& r);
Json to_json(const AreaReport& r);
Json to_json(const ModulusEstimate& m);

/// { "domains": { "<block-id>": [[re, im], ...] }, "params": {...}, "depth": N }
/// plus witnesses, chart centres, holes, diagnostics and verification.
Json nice_set_to_json(const NiceSet& V);
NiceSet nice_set_from_json(const Json& j);
Json nest_to_json(const NiceNest& nest);
/// Levels of a nest file.
std::vector<NiceSet> nest_levels_from_json(const Json& j);

/// { "outer": [[re, im], ...], "inner": [...] } or
/// { "round": { "center": [re, im], "r": r, "R": R } }.
AnnulusRegion annulus_from_json(const Json& j);

Json dynamics_to_json(const MarkedDynamics& dyn, const std::vector<TargetValue>& targets = {});
MarkedDynamics dynamics_from_json(const Json& j);
Json to_json(const TargetValue& t);
/// { "c" (degree 2) or "coefficients", "residual", "iterations", "history", ... }.
Json to_json(const ThurstonRun& run);
Json to_json(const NonrecurrenceReport& r);

std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);
/// Writes to a temporary file next to @p path and renames it into place.
void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace bctk
