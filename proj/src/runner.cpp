#include "lago/runner.hpp"

#include <fstream>

#include "lago/trace.hpp"

namespace lago {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

json summary_document(const RunConfig& config, const RunOutcome& outcome, std::uint64_t first_slot) {
    return json{{"format_version", kTraceFormatVersion},
                {"seed", config.seed},
                {"first_slot", first_slot},
                {"summary", to_json(outcome.summary)},
                {"bounds", to_json(outcome.bounds)},
                {"constants", to_json(config.effective_constants())},
                {"trace_hash", outcome.trace_hash},
                {"config", to_json(config)}};
}

}  // namespace

Simulation make_simulation(const RunConfig& config) {
    check_config(config);
    return Simulation(config.environment, config.effective_constants(), config.strategy, config.v, config.seed);
}

RunOutcome run_in_memory(const RunConfig& config) {
    Simulation sim = make_simulation(config);
    const std::vector<double> budgets = budgets_of(sim.environment().profiles());
    MetricsAccumulator metrics(budgets);
    sim.run(config.horizon, [&metrics](const SlotTrace& trace) { metrics.add(trace.record); });
    RunOutcome outcome;
    outcome.summary = metrics.summary();
    outcome.bounds = bound_constants(sim.environment().constants(), budgets, config.v, config.horizon);
    outcome.document = summary_document(config, outcome, 0);
    return outcome;
}

RunOutcome run_once(const RunConfig& config, const std::optional<SimulationState>& resume) {
    Simulation sim = make_simulation(config);
    if (resume) sim.restore(*resume);
    const std::uint64_t first_slot = sim.next_slot();
    const std::vector<double> budgets = budgets_of(sim.environment().profiles());

    RunOutcome outcome;
    outcome.dir = config.out_dir;
    TraceMeta meta;
    meta.n_fog = config.environment.n_fog;
    meta.seed = config.seed;
    meta.checkpoint_every = config.checkpoint_every;
    meta.budgets = budgets;
    meta.initial_backlog = sim.queues().backlog;
    TraceWriter writer(outcome.dir, meta);

    MetricsAccumulator metrics(budgets, sim.queues().total());
    sim.run(config.horizon, [&](const SlotTrace& trace) {
        metrics.add(trace.record);
        writer.write(trace, sim.learner());
    });
    writer.close();

    outcome.summary = metrics.summary();
    outcome.bounds = bound_constants(sim.environment().constants(), budgets, config.v, first_slot + config.horizon);
    outcome.trace_hash = trace_content_hash(outcome.dir);
    outcome.document = summary_document(config, outcome, first_slot);
    write_json(outcome.dir / "summary.json", outcome.document);
    write_json(outcome.dir / "state.json", json{{"config", to_json(config)}, {"state", to_json(sim.save())}});
    return outcome;
}

}  // namespace lago
