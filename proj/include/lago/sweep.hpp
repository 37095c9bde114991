#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lago/config.hpp"
#include "lago/metrics.hpp"

namespace lago {

enum class SweepParam { V, ArrivalCount, Accessible, Strategy };

std::optional<SweepParam> parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam p);

/// Copy of `base` with one parameter replaced; throws ConfigError on a bad value.
RunConfig apply_sweep_value(const RunConfig& base, SweepParam param, const std::string& value);

struct SweepRow {
    std::string value;
    std::uint64_t seed = 0;
    RunSummary summary;
};

/// Mean over seeds for one parameter value.
struct SweepAggregate {
    std::string value;
    std::size_t runs = 0;
    double avg_task_latency = 0.0;
    double total_energy = 0.0;
    double regret_expected = 0.0;
    double regret_realized = 0.0;
    double avg_backlog = 0.0;
    double max_energy_ratio = 0.0;  // worst run
};

struct SweepPlan {
    RunConfig base;
    SweepParam param = SweepParam::V;
    std::vector<std::string> values;
    std::vector<std::uint64_t> seeds;
    // When set, each run also writes its trace under <out_dir>/<param>=<value>/seed=<seed>.
    bool write_traces = false;
};

/// Runs every (value, seed) pair on up to `jobs` OpenMP threads. Rows come
/// back in (value, seed) order whatever the scheduling.
std::vector<SweepRow> sweep(const SweepPlan& plan, unsigned jobs);

/// Single-threaded reference executor; must produce identical rows.
std::vector<SweepRow> sweep_serial(const SweepPlan& plan);

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows);

void write_sweep_table(std::ostream& os, SweepParam param, const std::vector<SweepRow>& rows,
                       const std::vector<SweepAggregate>& aggregates);

}  // namespace lago
