#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lago/config.hpp"
#include "lago/model.hpp"

using namespace lago;

namespace {

bool has_issue(const ConfigError& e, const std::string& text) {
    return std::any_of(e.issues().begin(), e.issues().end(),
                       [&](const std::string& s) { return s.find(text) != std::string::npos; });
}

SlotContext two_node_context(const SystemConstants& c) {
    SlotContext ctx;
    ctx.t = 3;
    ctx.tasks = {Task{{3, 0}, 1e5, 1e8}};
    ctx.accessible = {0, 1};
    ctx.eta.assign(c.node_count(), 0.0);
    ctx.kappa.assign(c.node_count(), 0.0);
    ctx.kappa[0] = 1e-10;
    ctx.kappa[1] = 1e-8;
    ctx.eta[1] = 1e-7;
    return ctx;
}

}  // namespace

TEST_CASE("make_constants derives exact reciprocals") {
    const SystemConstants c = make_constants(20, 10, 2.5e5, 2.5e8, 5e6, 1e9, 1e-6, 1.5e-8);
    CHECK(c.rho_max == 1.0 / 5e6);
    CHECK(c.phi_max == 1.0 / 1e9);
    CHECK(is_reciprocal(c.rho_max, c.r_min));
    CHECK(is_reciprocal(c.phi_max, c.f_min));
    CHECK(c.node_count() == 21);
    CHECK(check_constants(c).empty());
}

TEST_CASE("constants violations are listed per field") {
    SystemConstants c = make_constants(2, 1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
    c.l_max = -1.0;
    c.kappa_max = 0.0;
    c.a_max = 0;
    const auto issues = check_constants(c);
    CHECK(issues.size() == 3);
    CHECK_THROWS_AS(make_constants(2, 1, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("reciprocal identity is checked to one ulp") {
    CHECK(is_reciprocal(2e-7, 5e6));
    CHECK_FALSE(is_reciprocal(1e-7, 5e6));
    CHECK(is_reciprocal(std::nextafter(2e-7, 1.0), 5e6));
    CHECK_FALSE(is_reciprocal(std::nextafter(std::nextafter(2e-7, 1.0), 1.0), 5e6));
}

TEST_CASE("slot context invariants") {
    const SystemConstants c = make_constants(2, 2, 1e6, 1e9, 1e6, 1e9, 1e-6, 1e-8);
    SlotContext ctx = two_node_context(c);
    CHECK(check_context(ctx, c).empty());
    CHECK(ctx.is_accessible(1));
    CHECK_FALSE(ctx.is_accessible(2));

    SUBCASE("device missing") {
        ctx.accessible = {1};
        CHECK_FALSE(check_context(ctx, c).empty());
    }
    SUBCASE("too many tasks") {
        ctx.tasks.assign(3, Task{{3, 0}, 1e5, 1e8});
        CHECK_FALSE(check_context(ctx, c).empty());
    }
    SUBCASE("eta above bound") {
        ctx.eta[1] = 2e-6;
        CHECK_FALSE(check_context(ctx, c).empty());
    }
    SUBCASE("task larger than l_max") {
        ctx.tasks[0].size_bits = 2e6;
        CHECK_FALSE(check_context(ctx, c).empty());
    }
}

TEST_CASE("decisions must cover every task with an accessible node") {
    const SystemConstants c = make_constants(2, 2, 1e6, 1e9, 1e6, 1e9, 1e-6, 1e-8);
    const SlotContext ctx = two_node_context(c);
    CHECK_NOTHROW(check_decision(ctx, Decision{{1}}));
    CHECK_THROWS_AS(check_decision(ctx, Decision{{2}}), SimulationError);
    CHECK_THROWS_AS(check_decision(ctx, Decision{{0, 1}}), SimulationError);
    CHECK_THROWS_AS(check_decision(ctx, Decision{}), SimulationError);
}

TEST_CASE("task latency is transmission plus processing") {
    TaskFeedback fb;
    fb.realized_rate = 1e7;
    fb.realized_freq = 1e10;
    fb.d_tr = 1e6 / 1e7;
    fb.d_pr = 1e9 / 1e10;
    CHECK(fb.latency() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("validate_config accepts the default settings") {
    const RunConfig config = validate_config(nlohmann::json::object());
    const SystemConstants c = config.effective_constants();
    CHECK(c.n_fog == 20);
    CHECK(c.a_max == 10);
    CHECK(config.environment.n_accessible == 10);
    CHECK(config.environment.meta.budget == 0.5);
    CHECK(config.horizon == 500000);
    CHECK(config.v == 100.0);
    CHECK(check_constants(c).empty());
}

TEST_CASE("validate_config rejects n_fog = 0") {
    try {
        validate_config({{"n_fog", 0}, {"n_accessible", 0}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "n_fog must be positive"));
    }
}

TEST_CASE("validate_config rejects inconsistent reciprocal constants") {
    nlohmann::json doc = {{"constants",
                           {{"n_fog", 20},
                            {"a_max", 10},
                            {"l_max", 2.5e5},
                            {"w_max", 2.5e8},
                            {"r_min", 5e6},
                            {"rho_max", 1e-7},
                            {"f_min", 1e9},
                            {"eta_max", 1e-6},
                            {"kappa_max", 1.5e-8}}}};
    try {
        validate_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "rho_max must equal 1/r_min"));
    }
    doc["constants"]["rho_max"] = 2e-7;
    CHECK_NOTHROW(validate_config(doc));
}

TEST_CASE("validate_config collects every problem at once") {
    const nlohmann::json doc = {{"n_fog", -3}, {"v", "big"}, {"colour", "red"}, {"strategy", "eps"}, {"epsilon", 1.5}};
    try {
        validate_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "n_fog"));
        CHECK(has_issue(e, "v must be a number"));
        CHECK(has_issue(e, "unknown field colour"));
        CHECK(has_issue(e, "epsilon must lie in [0, 1]"));
    }
}

TEST_CASE("epsilon-greedy with epsilon 1.5 is a config error") {
    try {
        validate_config({{"strategy", "eps"}, {"epsilon", 1.5}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "epsilon must lie in [0, 1]"));
    }
}

TEST_CASE("config survives a JSON round trip") {
    nlohmann::json doc = {{"n_fog", 6},
                          {"n_accessible", 3},
                          {"arrivals", {{"kind", "poisson"}, {"count", 5}, {"mean", 2.5}}},
                          {"task_size", {{"low", 1e4}, {"high", 1e5}, {"intensity", 500}}},
                          {"coefficients", "per_node"},
                          {"strategy", "ucbt"},
                          {"v", 42.5},
                          {"horizon", 77},
                          {"seed", 9},
                          {"checkpoint_every", 5},
                          {"out", "somewhere"}};
    const RunConfig a = validate_config(doc);
    const RunConfig b = validate_config(to_json(a));
    CHECK(to_json(a) == to_json(b));
    CHECK(b.environment == a.environment);
    CHECK(b.strategy.kind == Strategy::UcbTuned);
    CHECK(b.environment.arrivals.kind == ArrivalSpec::Kind::Poisson);
    CHECK(b.environment.coefficients == CoefficientMode::PerNode);
}

TEST_CASE("integer fields accept any integral JSON number") {
    const RunConfig c = validate_config(nlohmann::json::parse(R"({"horizon": 1e3, "seed": 0, "n_fog": 8, "n_accessible": 4})"));
    CHECK(c.horizon == 1000);
    CHECK(c.seed == 0);
    try {
        validate_config({{"horizon", -5}, {"seed", 2.5}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(has_issue(e, "horizon must be a nonnegative integer"));
        CHECK(has_issue(e, "seed must be a nonnegative integer"));
    }
}
