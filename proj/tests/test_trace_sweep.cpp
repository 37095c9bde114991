#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lago/config.hpp"
#include "lago/runner.hpp"
#include "lago/sweep.hpp"
#include "lago/trace.hpp"
#include "support.hpp"

using namespace lago;
namespace fs = std::filesystem;

namespace {

RunConfig quick_config(const fs::path& out, std::uint64_t horizon = 1000) {
    RunConfig c;
    c.horizon = horizon;
    c.seed = 7;
    c.checkpoint_every = 50;
    c.out_dir = out.string();
    return c;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("a run writes a trace with one row per slot and a stable hash") {
    const auto dir_a = lago::testing::scratch_dir("run_a");
    const auto dir_b = lago::testing::scratch_dir("run_b");
    const RunOutcome a = run_once(quick_config(dir_a));
    const RunOutcome b = run_once(quick_config(dir_b));
    CHECK(a.trace_hash == b.trace_hash);
    CHECK(a.trace_hash.size() == 64);
    const TraceData data = read_trace(dir_a);
    CHECK(data.records.size() == 1000);
    CHECK(data.meta.seed == 7);
    CHECK(data.tasks.size() == 20);  // checkpoints 0, 50, ..., 950
    CHECK(fs::exists(dir_a / "summary.json"));
    CHECK(fs::exists(dir_a / "state.json"));
    const auto doc = nlohmann::json::parse(slurp(dir_a / "summary.json"));
    CHECK(doc.at("trace_hash") == a.trace_hash);
    CHECK(doc.at("seed") == 7);
    CHECK(doc.contains("bounds"));
    CHECK(doc.at("config").at("horizon") == 1000);

    const RunOutcome c = run_once([&] {
        auto cfg = quick_config(lago::testing::scratch_dir("run_c"));
        cfg.seed = 8;
        return cfg;
    }());
    CHECK(c.trace_hash != a.trace_hash);
}

TEST_CASE("verify accepts emitted traces for every strategy") {
    for (const char* name : {"ucb1", "ucbt", "nconfr", "eps"}) {
        auto cfg = quick_config(lago::testing::scratch_dir(std::string("verify_") + name), 600);
        cfg.strategy.kind = *parse_strategy(name);
        cfg.checkpoint_every = 1;
        run_once(cfg);
        const VerifyReport report = verify_trace(cfg.out_dir);
        CHECK_MESSAGE(report.ok(), name);
        CHECK(report.slots == 600);
        CHECK(report.checkpoint_slots == 600);
    }
}

TEST_CASE("verify catches a tampered backlog") {
    const auto dir = lago::testing::scratch_dir("tamper");
    run_once(quick_config(dir, 200));
    const fs::path trace = dir / "trace.csv";
    std::string text = slurp(trace);
    // Change the last backlog column of the row for slot 100.
    const auto row = text.find("\n100,");
    REQUIRE(row != std::string::npos);
    const auto end = text.find('\n', row + 1);
    const auto comma = text.rfind(',', end);
    text.replace(comma + 1, end - comma - 1, "12345");
    std::ofstream(trace) << text;
    const VerifyReport report = verify_trace(dir);
    CHECK_FALSE(report.ok());
}

TEST_CASE("summary scalars are recomputable from the trace alone") {
    const auto dir = lago::testing::scratch_dir("recompute");
    const RunOutcome out = run_once(quick_config(dir, 1500));
    const TraceData data = read_trace(dir / "trace.csv");
    const RunSummary again = summarize(data.records, data.meta.budgets);
    CHECK(to_json(again) == to_json(out.summary));
    const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(doc.at("summary") == to_json(again));

    // Queue statistics replayed from the stored backlogs.
    const QueueStats q = queue_stats(start_of_slot_backlog(data.records));
    CHECK(q.final_average == out.summary.avg_backlog);
}

TEST_CASE("an unwritable output directory is reported with its path") {
    const auto base = lago::testing::scratch_dir("readonly");
    fs::create_directories(base);
    std::ofstream(base / "blocker") << "not a directory";
    const fs::path out = base / "blocker" / "run";
    try {
        run_once(quick_config(out, 10));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(out.string()) != std::string::npos);
    }
}

TEST_CASE("reading a missing trace is an I/O error") {
    CHECK_THROWS_AS(read_trace(lago::testing::scratch_dir("missing")), IoError);
}

TEST_CASE("resuming from state.json continues the same run") {
    const auto full_dir = lago::testing::scratch_dir("resume_full");
    const auto first_dir = lago::testing::scratch_dir("resume_first");
    const auto second_dir = lago::testing::scratch_dir("resume_second");
    run_once(quick_config(full_dir, 800));
    run_once(quick_config(first_dir, 500));
    const auto state = nlohmann::json::parse(slurp(first_dir / "state.json"));
    auto cfg = quick_config(second_dir, 300);
    const RunOutcome second = run_once(cfg, simulation_state_from_json(state.at("state")));
    CHECK(verify_trace(second_dir).ok());

    const TraceData full = read_trace(full_dir);
    const TraceData tail = read_trace(second_dir);
    REQUIRE(tail.records.size() == 300);
    CHECK(tail.records.front().t == 500);
    for (std::size_t k = 0; k < 300; ++k) {
        CHECK(tail.records[k].backlog == full.records[500 + k].backlog);
        CHECK(tail.estimate_hashes[k] == full.estimate_hashes[500 + k]);
    }
    const auto full_state = nlohmann::json::parse(slurp(full_dir / "state.json"));
    const auto resumed_state = nlohmann::json::parse(slurp(second_dir / "state.json"));
    CHECK(full_state.at("state") == resumed_state.at("state"));
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 2.558427881104495e-8, 1e300, 0.0, 123456789.0}) {
        const std::string s = format_number(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("sweep: combinatorics, aggregates and the serial reference") {
    SweepPlan plan;
    plan.base.horizon = 400;
    plan.param = SweepParam::V;
    plan.values = {"50", "100", "200"};
    plan.seeds = {1, 2, 3};
    const auto serial = sweep_serial(plan);
    const auto parallel = sweep(plan, 4);
    REQUIRE(serial.size() == 9);
    REQUIRE(parallel.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(parallel[i].value == serial[i].value);
        CHECK(parallel[i].seed == serial[i].seed);
        CHECK(to_json(parallel[i].summary) == to_json(serial[i].summary));
    }
    const auto agg = aggregate(serial);
    REQUIRE(agg.size() == 3);
    CHECK(agg[1].value == "100");
    CHECK(agg[1].runs == 3);
    const double mean = (serial[3].summary.avg_task_latency + serial[4].summary.avg_task_latency +
                         serial[5].summary.avg_task_latency) / 3.0;
    CHECK(agg[1].avg_task_latency == mean);

    std::ostringstream table;
    write_sweep_table(table, plan.param, serial, agg);
    std::size_t lines = 0;
    for (char ch : table.str()) lines += ch == '\n';
    CHECK(lines == 1 + 9 + 3);
}

TEST_CASE("sweep rows match standalone runs") {
    SweepPlan plan;
    plan.base.horizon = 300;
    plan.param = SweepParam::Strategy;
    plan.values = {"ucb1", "ucbt", "nconfr", "eps"};
    plan.seeds = {5};
    const auto rows = sweep(plan, 2);
    for (const SweepRow& row : rows) {
        RunConfig cfg = plan.base;
        cfg.seed = 5;
        cfg.strategy.kind = *parse_strategy(row.value);
        CHECK(to_json(run_in_memory(cfg).summary) == to_json(row.summary));
    }
}

TEST_CASE("sweep errors name the failing key") {
    SweepPlan plan;
    plan.base.horizon = 10;
    plan.param = SweepParam::Accessible;
    plan.values = {"5", "25"};
    plan.seeds = {1};
    try {
        sweep(plan, 2);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE_FALSE(e.issues().empty());
        CHECK(e.issues().front().find("n_a=25") != std::string::npos);
    }
    plan.values.clear();
    CHECK_THROWS_AS(sweep_serial(plan), ConfigError);
}

TEST_CASE("sweep with traces writes one verified directory per run") {
    SweepPlan plan;
    plan.base.horizon = 200;
    plan.base.out_dir = lago::testing::scratch_dir("sweep_traces").string();
    plan.param = SweepParam::ArrivalCount;
    plan.values = {"4", "8"};
    plan.seeds = {1, 2};
    plan.write_traces = true;
    sweep(plan, 2);
    for (const char* v : {"4", "8"})
        for (const char* s : {"1", "2"}) {
            const fs::path dir = fs::path(plan.base.out_dir) / (std::string("arrival_count=") + v) / (std::string("seed=") + s);
            CHECK(verify_trace(dir).ok());
        }
}

TEST_CASE("sweep parameter names") {
    CHECK(parse_sweep_param("V") == SweepParam::V);
    CHECK(parse_sweep_param("n_a") == SweepParam::Accessible);
    CHECK(parse_sweep_param("arrival_count") == SweepParam::ArrivalCount);
    CHECK(parse_sweep_param("strategy") == SweepParam::Strategy);
    CHECK_FALSE(parse_sweep_param("seed").has_value());
    CHECK_THROWS_AS(apply_sweep_value(RunConfig{}, SweepParam::V, "abc"), ConfigError);
    CHECK_THROWS_AS(apply_sweep_value(RunConfig{}, SweepParam::Strategy, "greedy"), ConfigError);
}
