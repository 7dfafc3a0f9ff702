#pragma once

// JSON run configuration. Either a named preset:
//
//   {"scenario": "oscillating_shear", "parameters": {"n_nodes": 401},
//    "time": {"integrator": "rk4", "cfl_fraction": 0.25}}
//
// or a fully specified problem with "grid", "material", "bc", "alpha",
// "initial" and "time" blocks. See README.md for every key.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfdd/dynamics.hpp"
#include "lfdd/scenarios.hpp"

namespace lfdd {

// Throws ConfigError if the file cannot be read or is not a JSON object.
nlohmann::json load_config(const std::filesystem::path& path);

// "a.b.c=value": value is parsed as JSON when possible, otherwise kept as a
// string. Intermediate objects are created.
void apply_override(nlohmann::json& config, const std::string& assignment);

struct Problem {
    std::string scenario;  // empty for a custom problem
    SimConfig sim;
    std::vector<Tensor2> alpha;
    double classify_tol = 1e-8;
    bool has_time = false;
    std::optional<Scenario> preset;
};

// Validates the whole document (unknown keys included) and builds the
// problem. With `need_time` the time block must resolve to a valid
// SimConfig. Every failure is a ConfigError naming the field.
Problem build_problem(const nlohmann::json& config, bool need_time);

}  // namespace lfdd
