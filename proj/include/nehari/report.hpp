#pragma once

#include <string>

#include <json.hpp>

#include "nehari/config.hpp"

namespace nehari {

/// Deterministic JSON serialization: keys sorted (nlohmann's default object
/// is an ordered map), every floating-point number printed as %.12e.
std::string emit_json(const nlohmann::json& j);

/// One row per node: r followed by the component values, all %.12e.
/// Header is exactly "r,u1,...,uM".
std::string profile_csv(const FunctionTuple& u);

nlohmann::json report_of(const SolveReport& r, const RunConfig& cfg);

/// Full CLI entry point (argument parsing, dispatch, artifact writing).
/// Returns the process exit code: 0 success, 2 validation error, 3 solver
/// non-convergence, 4 verification failure.
int run_cli(int argc, const char* const* argv);

}  // namespace nehari
