// lago: run, sweep and verify offloading simulations.

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lago/config.hpp"
#include "lago/runner.hpp"
#include "lago/sweep.hpp"
#include "lago/trace.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kIo = 3, kSimulation = 4, kVerifyFailed = 5 };

constexpr const char* kFooter = R"(Exit codes: 0 success, 2 invalid config or arguments, 3 I/O failure,
4 simulation error, 5 trace verification failed.

Task sizes default to log-uniform over [2.5e4, 2.5e5] bits at 1000 cycles/bit.
A wider range such as [1e5, 1e7] makes a single offloaded task cost more
than the 0.5 J per-slot budget of a fog node, so no policy can keep the
energy constraints; set "task_size" in the config file to use other values.
Task sizes are synthetic: the measured workload trace these settings were
designed around is not bundled.)";

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<double> v;
    std::optional<std::uint32_t> n_accessible;
    std::optional<std::uint32_t> arrivals;
    std::optional<std::string> strategy;
    std::optional<double> epsilon;
    std::optional<std::string> out;
    std::optional<std::uint64_t> checkpoint_every;
};

lago::RunConfig build_config(const Overrides& o) {
    lago::RunConfig config;
    if (o.config_path) config = lago::validate_config(lago::load_json_file(*o.config_path));
    if (o.seed) config.seed = *o.seed;
    if (o.horizon) config.horizon = *o.horizon;
    if (o.v) config.v = *o.v;
    if (o.n_accessible) config.environment.n_accessible = *o.n_accessible;
    if (o.arrivals) config.environment.arrivals.count = *o.arrivals;
    if (o.strategy) {
        auto kind = lago::parse_strategy(*o.strategy);
        if (!kind) throw lago::ConfigError({"strategy must be one of ucb1, ucbt, nconfr, eps"});
        config.strategy.kind = *kind;
    }
    if (o.epsilon) config.strategy.epsilon = *o.epsilon;
    if (o.out) config.out_dir = *o.out;
    if (o.checkpoint_every) config.checkpoint_every = *o.checkpoint_every;
    lago::check_config(config);
    return config;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) items.push_back(item);
    return items;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const std::string& item : split_list(text)) {
        std::uint64_t seed = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), seed);
        if (ec != std::errc{} || ptr != item.data() + item.size())
            throw lago::ConfigError({"seed '" + item + "' is not an unsigned integer"});
        seeds.push_back(seed);
    }
    return seeds;
}

void print_summary(const lago::RunOutcome& outcome) {
    const lago::RunSummary& s = outcome.summary;
    std::cout << "slots            " << s.slots << "\n"
              << "tasks            " << s.tasks << "\n"
              << "avg latency (s)  " << lago::format_number(s.avg_task_latency) << "\n"
              << "total energy (J) " << lago::format_number(s.total_energy) << "\n"
              << "max energy/b     " << lago::format_number(s.max_energy_ratio) << "\n"
              << "violations       " << s.violations << "\n"
              << "regret R(T)      " << lago::format_number(s.regret_expected) << "\n"
              << "regret bound     " << lago::format_number(outcome.bounds.regret_bound) << "\n"
              << "avg backlog      " << lago::format_number(s.avg_backlog) << "\n";
    if (!outcome.trace_hash.empty())
        std::cout << "trace hash       " << outcome.trace_hash << "\n"
                  << "output           " << outcome.dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate learning-aided task offloading with per-node energy budgets."};
    app.footer(kFooter);
    app.require_subcommand(0, 1);

    Overrides o;
    unsigned jobs = 1;
    app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Master seed");
    app.add_option("--horizon", o.horizon, "Number of slots T");
    app.add_option("--v", o.v, "Latency-energy tradeoff weight V");
    app.add_option("--na", o.n_accessible, "Accessible fog nodes per slot");
    app.add_option("--arrivals", o.arrivals, "Tasks per slot (the cap when arrivals are Poisson)");
    app.add_option("--strategy", o.strategy, "Estimator: ucb1, ucbt, nconfr or eps")
        ->check(CLI::IsMember({"ucb1", "ucbt", "nconfr", "eps"}));
    app.add_option("--epsilon", o.epsilon, "Exploration probability for eps");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--checkpoint-every", o.checkpoint_every, "Slots between per-task trace dumps (0 disables)");
    app.add_option("--jobs", jobs, "Concurrent runs in a sweep")->check(CLI::PositiveNumber);

    std::optional<std::string> resume_path;
    bool print_config = false;
    CLI::App* run = app.add_subcommand("run", "Run one simulation (the default)");
    run->add_option("--resume", resume_path, "Continue from a state.json written by an earlier run")
        ->check(CLI::ExistingFile);
    run->add_flag("--print-config", print_config, "Print the effective config and exit");

    std::string sweep_param;
    std::string sweep_values;
    std::string sweep_seeds = "1,2,3";
    bool sweep_traces = false;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a grid of (value, seed) pairs and tabulate summaries");
    sweep->add_option("--param", sweep_param, "V, arrival_count, n_a or strategy")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
    sweep->add_option("--seeds", sweep_seeds, "Comma-separated seeds")->capture_default_str();
    sweep->add_flag("--traces", sweep_traces, "Also write a trace directory per run under --out");

    std::string trace_path;
    CLI::App* verify = app.add_subcommand("verify", "Recompute a trace's queues and energies and compare");
    verify->add_option("TRACE", trace_path, "Run directory or trace.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (verify->parsed()) {
            const lago::VerifyReport report = lago::verify_trace(trace_path);
            for (const std::string& problem : report.problems) std::cerr << "mismatch: " << problem << "\n";
            std::cout << (report.ok() ? "ok" : "FAILED") << ": " << report.slots << " slots, "
                      << report.checkpoint_slots << " checkpoint slots, " << report.problems.size()
                      << " problems\n";
            return report.ok() ? kOk : kVerifyFailed;
        }

        const lago::RunConfig config = build_config(o);

        if (sweep->parsed()) {
            auto param = lago::parse_sweep_param(sweep_param);
            if (!param) throw lago::ConfigError({"--param must be one of V, arrival_count, n_a, strategy"});
            lago::SweepPlan plan;
            plan.base = config;
            plan.param = *param;
            plan.values = split_list(sweep_values);
            plan.seeds = parse_seeds(sweep_seeds);
            plan.write_traces = sweep_traces;
            const auto rows = lago::sweep(plan, jobs);
            const auto aggregates = lago::aggregate(rows);
            lago::write_sweep_table(std::cout, plan.param, rows, aggregates);
            if (sweep_traces) {
                const auto table = std::filesystem::path(config.out_dir) / "sweep.csv";
                std::ofstream file(table);
                if (!file) throw lago::IoError("cannot write " + table.string());
                lago::write_sweep_table(file, plan.param, rows, aggregates);
            }
            return kOk;
        }

        if (print_config) {
            std::cout << lago::to_json(config).dump(2) << "\n";
            return kOk;
        }
        std::optional<lago::SimulationState> resume;
        if (resume_path) {
            const nlohmann::json doc = lago::load_json_file(*resume_path);
            if (!doc.contains("state")) throw lago::ConfigError({*resume_path + ": no \"state\" object"});
            resume = lago::simulation_state_from_json(doc.at("state"));
        }
        print_summary(lago::run_once(config, resume));
        return kOk;
    } catch (const lago::ConfigError& e) {
        for (const std::string& issue : e.issues()) std::cerr << "config error: " << issue << "\n";
        return kConfig;
    } catch (const lago::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kSimulation;
    }
}
