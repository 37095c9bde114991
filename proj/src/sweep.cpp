#include "lago/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <exception>
#include <filesystem>
#include <mutex>

#include "lago/runner.hpp"
#include "lago/trace.hpp"

namespace lago {

namespace {

struct RunKey {
    std::size_t value_index;
    std::uint64_t seed;
};

std::vector<RunKey> keys_of(const SweepPlan& plan) {
    if (plan.values.empty()) throw ConfigError({"sweep needs at least one value"});
    if (plan.seeds.empty()) throw ConfigError({"sweep needs at least one seed"});
    std::vector<RunKey> keys;
    for (std::size_t v = 0; v < plan.values.size(); ++v)
        for (std::uint64_t seed : plan.seeds) keys.push_back(RunKey{v, seed});
    return keys;
}

SweepRow run_key(const SweepPlan& plan, const RunKey& key) {
    const std::string& value = plan.values[key.value_index];
    SweepRow row{value, key.seed, {}};
    try {
        RunConfig config = apply_sweep_value(plan.base, plan.param, value);
        config.seed = key.seed;
        if (plan.write_traces) {
            config.out_dir = (std::filesystem::path(plan.base.out_dir) /
                              (std::string(to_string(plan.param)) + "=" + value) /
                              ("seed=" + std::to_string(key.seed)))
                                 .string();
            row.summary = run_once(config).summary;
        } else {
            row.summary = run_in_memory(config).summary;
        }
    } catch (const ConfigError& e) {
        std::vector<std::string> issues;
        for (const auto& issue : e.issues())
            issues.push_back(std::string(to_string(plan.param)) + "=" + value + ", seed " + std::to_string(key.seed) +
                             ": " + issue);
        throw ConfigError(std::move(issues));
    } catch (const IoError& e) {
        throw IoError(std::string(to_string(plan.param)) + "=" + value + ", seed " + std::to_string(key.seed) + ": " +
                      e.what());
    } catch (const std::exception& e) {
        throw SimulationError(std::string(to_string(plan.param)) + "=" + value + ", seed " +
                              std::to_string(key.seed) + ": " + e.what());
    }
    return row;
}

}  // namespace

std::optional<SweepParam> parse_sweep_param(std::string_view name) {
    if (name == "V" || name == "v") return SweepParam::V;
    if (name == "arrival_count" || name == "arrivals") return SweepParam::ArrivalCount;
    if (name == "n_a" || name == "na") return SweepParam::Accessible;
    if (name == "strategy") return SweepParam::Strategy;
    return std::nullopt;
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::V: return "V";
        case SweepParam::ArrivalCount: return "arrival_count";
        case SweepParam::Accessible: return "n_a";
        case SweepParam::Strategy: return "strategy";
    }
    return "unknown";
}

RunConfig apply_sweep_value(const RunConfig& base, SweepParam param, const std::string& value) {
    RunConfig config = base;
    auto parse_uint = [&](std::uint32_t& out) {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            throw ConfigError({std::string(to_string(param)) + " value '" + value + "' is not an integer"});
    };
    switch (param) {
        case SweepParam::V: {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size())
                throw ConfigError({"V value '" + value + "' is not a number"});
            config.v = v;
            break;
        }
        case SweepParam::ArrivalCount: {
            std::uint32_t count = 0;
            parse_uint(count);
            config.environment.arrivals.count = count;
            break;
        }
        case SweepParam::Accessible:
            parse_uint(config.environment.n_accessible);
            break;
        case SweepParam::Strategy: {
            auto s = parse_strategy(value);
            if (!s) throw ConfigError({"strategy value '" + value + "' is not one of ucb1, ucbt, nconfr, eps"});
            config.strategy.kind = *s;
            break;
        }
    }
    check_config(config);
    return config;
}

std::vector<SweepRow> sweep(const SweepPlan& plan, unsigned jobs) {
    const std::vector<RunKey> keys = keys_of(plan);
    std::vector<SweepRow> rows(keys.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const int threads = static_cast<int>(jobs == 0 ? 1 : jobs);
    const auto count = static_cast<std::ptrdiff_t>(keys.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            rows[static_cast<std::size_t>(k)] = run_key(plan, keys[static_cast<std::size_t>(k)]);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<SweepRow> sweep_serial(const SweepPlan& plan) {
    std::vector<SweepRow> rows;
    for (const RunKey& key : keys_of(plan)) rows.push_back(run_key(plan, key));
    return rows;
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
    std::vector<SweepAggregate> out;
    for (const SweepRow& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const SweepAggregate& a) { return a.value == row.value; });
        if (it == out.end()) {
            out.push_back(SweepAggregate{row.value});
            it = std::prev(out.end());
        }
        ++it->runs;
        it->avg_task_latency += row.summary.avg_task_latency;
        it->total_energy += row.summary.total_energy;
        it->regret_expected += row.summary.regret_expected;
        it->regret_realized += row.summary.regret_realized;
        it->avg_backlog += row.summary.avg_backlog;
        it->max_energy_ratio = std::max(it->max_energy_ratio, row.summary.max_energy_ratio);
    }
    for (SweepAggregate& a : out) {
        const double n = static_cast<double>(a.runs);
        a.avg_task_latency /= n;
        a.total_energy /= n;
        a.regret_expected /= n;
        a.regret_realized /= n;
        a.avg_backlog /= n;
    }
    return out;
}

void write_sweep_table(std::ostream& os, SweepParam param, const std::vector<SweepRow>& rows,
                       const std::vector<SweepAggregate>& aggregates) {
    os << "kind,param,value,seed,runs,avg_task_latency,total_energy,regret_expected,regret_realized,avg_backlog,"
          "max_energy_ratio\n";
    for (const SweepRow& r : rows) {
        const RunSummary& s = r.summary;
        os << "run," << to_string(param) << ',' << r.value << ',' << r.seed << ",1," << format_number(s.avg_task_latency)
           << ',' << format_number(s.total_energy) << ',' << format_number(s.regret_expected) << ','
           << format_number(s.regret_realized) << ',' << format_number(s.avg_backlog) << ','
           << format_number(s.max_energy_ratio) << '\n';
    }
    for (const SweepAggregate& a : aggregates) {
        os << "mean," << to_string(param) << ',' << a.value << ",," << a.runs << ',' << format_number(a.avg_task_latency)
           << ',' << format_number(a.total_energy) << ',' << format_number(a.regret_expected) << ','
           << format_number(a.regret_realized) << ',' << format_number(a.avg_backlog) << ','
           << format_number(a.max_energy_ratio) << '\n';
    }
}

}  // namespace lago
