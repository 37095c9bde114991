#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "lago/engine.hpp"
#include "lago/environment.hpp"
#include "lago/learner.hpp"
#include "lago/model.hpp"

namespace lago {

/// A run is a pure function of this value.
struct RunConfig {
    EnvironmentParams environment;
    // When absent, derived from the environment parameters.
    std::optional<SystemConstants> constants;
    StrategySpec strategy;
    double v = 100.0;
    std::uint64_t horizon = 500000;
    std::uint64_t seed = 1;
    std::uint64_t checkpoint_every = 1000;
    std::string out_dir = "out";

    [[nodiscard]] SystemConstants effective_constants() const;
};

/// Parses and validates a config document. Missing keys take their
/// defaults; unknown keys, wrong types and violated invariants are all
/// collected into one ConfigError.
RunConfig validate_config(const nlohmann::json& document);

/// Semantic checks on an already-built config (used after CLI overrides).
void check_config(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const SystemConstants& constants);
nlohmann::json to_json(const RunSummary& summary);
nlohmann::json to_json(const BoundConstants& bounds);

nlohmann::json to_json(const SimulationState& state);
SimulationState simulation_state_from_json(const nlohmann::json& document);

/// Reads a JSON document from disk; throws ConfigError on I/O or syntax errors.
nlohmann::json load_json_file(const std::string& path);

}  // namespace lago
