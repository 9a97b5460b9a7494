/**
 * @file commands.hpp
 * @brief Subcommands as functions from a resolved configuration to a JSON
 *        result. Shared by the command-line tool and the Python module.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bctk/io.hpp"

namespace bctk {

struct RunConfig {
  Json map;                       ///< map JSON; null when the command needs none
  Json params = Json::object();   ///< subcommand parameters, input documents inlined
  std::uint64_t seed = 0;
  std::size_t budget = 1'000'000;
  int workers = 1;
};

const std::vector<std::string>& command_names();

/// Result object of a JSON subcommand. JSON type errors in the parameters
/// surface as PreconditionError.
Json run_command(const std::string& name, const RunConfig& cfg);

/// PGM bytes of the render subcommand.
std::string run_render(const RunConfig& cfg);

/// { "schema": "bctk/1", "command", "config", "result" }.
Json wrap_report(const std::string& name, const Json& config, const Json& result);

/// Dumped with two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace bctk
