#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lago/controller.hpp"
#include "lago/learner.hpp"
#include "lago/model.hpp"
#include "lago/rng.hpp"

namespace lago::testing {

inline bool close_rel(double a, double b, double tol) {
    if (a == b) return true;
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

/// A fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lago_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

/// Hand-rolled price, written out term by term for brute-force comparisons.
inline double reference_price(const Task& task, NodeId n, const std::vector<double>& q, const SlotContext& ctx,
                              const std::vector<double>& rho_hat, const std::vector<double>& phi_hat, double v) {
    double value = q[n] * ctx.kappa[n] * task.work_cycles + v * phi_hat[n] * task.work_cycles;
    if (n > 0) value += q[0] * ctx.eta[n] * task.size_bits + v * rho_hat[n] * task.size_bits;
    return value;
}

/// Exhaustive per-task argmin with lowest-id ties, independent of select().
inline std::vector<NodeId> brute_force_argmin(const SlotContext& ctx, const std::vector<double>& q,
                                              const std::vector<double>& rho_hat,
                                              const std::vector<double>& phi_hat, double v) {
    std::vector<NodeId> out;
    for (const Task& task : ctx.tasks) {
        std::vector<double> prices;
        for (NodeId n : ctx.accessible) prices.push_back(reference_price(task, n, q, ctx, rho_hat, phi_hat, v));
        std::size_t best = 0;
        for (std::size_t k = 0; k < prices.size(); ++k)
            if (prices[k] < prices[best] || (prices[k] == prices[best] && ctx.accessible[k] < ctx.accessible[best]))
                best = k;
        out.push_back(ctx.accessible[best]);
    }
    return out;
}

struct RandomInstance {
    SystemConstants constants;
    SlotContext ctx;
    QueueState queues;
    Estimates estimates;
    double v = 0.0;
};

/// A random small instance: N in [1, max_fog], up to max_tasks tasks, random
/// accessible subset, coefficients, queues and UCB1-style estimates.
inline RandomInstance random_instance(RandomStream& rng, std::uint32_t max_fog, std::uint32_t max_tasks) {
    RandomInstance inst;
    const auto n_fog = static_cast<std::uint32_t>(1 + rng.below(max_fog));
    const auto a_max = static_cast<std::uint32_t>(1 + rng.below(max_tasks));
    inst.constants = make_constants(n_fog, a_max, 1e6, 1e9, 1e6, 1e9, 1e-6, 1e-8);
    const std::size_t nodes = inst.constants.node_count();

    inst.ctx.t = rng.below(1000);
    const auto n_tasks = static_cast<std::uint32_t>(rng.below(a_max + 1));
    for (std::uint32_t i = 0; i < n_tasks; ++i) {
        const double size = rng.uniform(1e3, 1e6);
        inst.ctx.tasks.push_back(Task{TaskId{inst.ctx.t, i}, size, size * rng.uniform(1.0, 1000.0)});
    }
    inst.ctx.accessible.push_back(kDevice);
    for (NodeId n = 1; n <= n_fog; ++n)
        if (rng.uniform01() < 0.6) inst.ctx.accessible.push_back(n);
    inst.ctx.eta.assign(nodes, 0.0);
    inst.ctx.kappa.assign(nodes, 0.0);
    for (NodeId n : inst.ctx.accessible) {
        inst.ctx.kappa[n] = rng.uniform(1e-10, 1e-8);
        if (n > 0) inst.ctx.eta[n] = rng.uniform(1e-7, 1e-6);
    }

    std::vector<double> budgets(nodes, 0.5);
    inst.queues = QueueState(budgets);
    for (double& q : inst.queues.backlog) q = rng.uniform01() < 0.2 ? 0.0 : rng.uniform(0.0, 200.0);

    inst.estimates.strategy = StrategySpec{Strategy::Ucb1, 0.1};
    inst.estimates.rho_hat.assign(nodes, 0.0);
    inst.estimates.phi_hat.assign(nodes, 0.0);
    for (std::size_t n = 0; n < nodes; ++n) {
        if (rng.uniform01() < 0.15) continue;  // unvisited node, estimate 0
        inst.estimates.phi_hat[n] = rng.uniform(0.0, inst.constants.phi_max);
        if (n > 0) inst.estimates.rho_hat[n] = rng.uniform(0.0, inst.constants.rho_max);
    }
    inst.v = rng.uniform(0.0, 300.0);
    return inst;
}

}  // namespace lago::testing
