#include "lago/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lago {

QueueState::QueueState(std::vector<double> budgets)
    : backlog(budgets.size(), 0.0), budget(std::move(budgets)) {}

double QueueState::total() const {
    return std::accumulate(backlog.begin(), backlog.end(), 0.0);
}

std::vector<double> budgets_of(const std::vector<NodeProfile>& profiles) {
    std::vector<double> budgets;
    budgets.reserve(profiles.size());
    for (const NodeProfile& p : profiles) budgets.push_back(p.budget);
    return budgets;
}

EnergyLedger::EnergyLedger(std::size_t node_count)
    : last(node_count, 0.0), cumulative(node_count, 0.0) {}

void EnergyLedger::add(const SlotEnergy& energy) {
    if (energy.per_node.size() != cumulative.size())
        throw SimulationError("energy ledger: node count mismatch");
    last = energy.per_node;
    for (std::size_t n = 0; n < cumulative.size(); ++n) cumulative[n] += energy.per_node[n];
    ++slots_elapsed;
}

double price(const Task& task, NodeId node, const QueueState& queues, const SlotContext& ctx,
             double rho_hat, double phi_hat, double v) {
    if (!ctx.is_accessible(node))
        throw SimulationError("price: node " + std::to_string(node) + " is not accessible");
    const double w = task.work_cycles;
    const double l = task.size_bits;
    if (node == kDevice) return queues.backlog[node] * ctx.kappa[node] * w + v * (phi_hat * w);
    const double energy_term = queues.backlog[node] * ctx.kappa[node] * w + queues.backlog[kDevice] * ctx.eta[node] * l;
    return energy_term + v * (phi_hat * w + rho_hat * l);
}

double price(const Task& task, NodeId node, const QueueState& queues, const SlotContext& ctx,
             const Estimates& estimates, double v) {
    if (node >= estimates.phi_hat.size() || node >= estimates.rho_hat.size())
        throw SimulationError("price: missing estimate for node " + std::to_string(node));
    return price(task, node, queues, ctx, estimates.rho_hat[node], estimates.phi_hat[node], v);
}

Decision select(const SlotContext& ctx, const QueueState& queues, const Estimates& estimates, double v,
                RandomStream& exploration) {
    if (ctx.accessible.empty()) throw SimulationError("select: empty accessible set");
    const bool greedy = estimates.strategy.kind == Strategy::EpsilonGreedy;
    Decision decision;
    decision.assignments.reserve(ctx.tasks.size());
    for (const Task& task : ctx.tasks) {
        if (greedy && exploration.uniform01() < estimates.strategy.epsilon) {
            decision.assignments.push_back(ctx.accessible[exploration.below(ctx.accessible.size())]);
            continue;
        }
        // Accessible ids are ascending, so strict < keeps the lowest id on ties.
        NodeId best = ctx.accessible.front();
        double best_price = price(task, best, queues, ctx, estimates, v);
        for (std::size_t k = 1; k < ctx.accessible.size(); ++k) {
            const NodeId n = ctx.accessible[k];
            const double p = price(task, n, queues, ctx, estimates, v);
            if (p < best_price) {
                best = n;
                best_price = p;
            }
        }
        decision.assignments.push_back(best);
    }
    return decision;
}

SlotEnergy slot_energy(const SlotContext& ctx, const Decision& decision) {
    check_decision(ctx, decision);
    SlotEnergy energy;
    energy.per_node.assign(ctx.kappa.size(), 0.0);
    for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
        const Task& task = ctx.tasks[i];
        const NodeId n = decision.assignments[i];
        if (n == kDevice) {
            energy.device_processing += ctx.kappa[kDevice] * task.work_cycles;
        } else {
            energy.device_transmission += ctx.eta[n] * task.size_bits;
            energy.per_node[n] += ctx.kappa[n] * task.work_cycles;
        }
    }
    energy.per_node[kDevice] = energy.device_processing + energy.device_transmission;
    return energy;
}

void update_queues(QueueState& queues, std::span<const double> energies) {
    if (energies.size() != queues.backlog.size())
        throw SimulationError("update_queues: expected " + std::to_string(queues.backlog.size()) +
                              " energies, got " + std::to_string(energies.size()));
    for (std::size_t n = 0; n < energies.size(); ++n)
        if (!(energies[n] >= 0.0) || !std::isfinite(energies[n]))
            throw SimulationError("update_queues: invalid energy for node " + std::to_string(n));
    for (std::size_t n = 0; n < energies.size(); ++n)
        queues.backlog[n] = std::max(queues.backlog[n] - queues.budget[n], 0.0) + energies[n];
}

}  // namespace lago
