#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lago/config.hpp"
#include "lago/engine.hpp"
#include "lago/metrics.hpp"

namespace lago {

struct RunOutcome {
    RunSummary summary;
    BoundConstants bounds;
    std::string trace_hash;  // empty for in-memory runs
    std::filesystem::path dir;
    nlohmann::json document;  // the summary.json content
};

/// Executes one run and persists it under config.out_dir:
/// trace.csv, tasks.csv, nodes.csv, summary.json and state.json (the final
/// simulation state, usable with `resume`).
RunOutcome run_once(const RunConfig& config, const std::optional<SimulationState>& resume = std::nullopt);

/// Same run without touching the file system.
RunOutcome run_in_memory(const RunConfig& config);

/// Builds the simulation described by a config (validated first).
Simulation make_simulation(const RunConfig& config);

}  // namespace lago
