#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lago/environment.hpp"
#include "lago/learner.hpp"
#include "lago/model.hpp"
#include "lago/rng.hpp"

namespace lago {

/// Virtual energy queues, one per node, all starting empty.
struct QueueState {
    std::vector<double> backlog;  // J
    std::vector<double> budget;   // J per slot

    QueueState() = default;
    explicit QueueState(std::vector<double> budgets);

    [[nodiscard]] double total() const;
};

std::vector<double> budgets_of(const std::vector<NodeProfile>& profiles);

/// Energy spent in one slot. per_node[0] == device_processing + device_transmission.
struct SlotEnergy {
    std::vector<double> per_node;
    double device_processing = 0.0;
    double device_transmission = 0.0;
};

struct EnergyLedger {
    std::vector<double> last;
    std::vector<double> cumulative;
    std::uint64_t slots_elapsed = 0;

    EnergyLedger() = default;
    explicit EnergyLedger(std::size_t node_count);

    void add(const SlotEnergy& energy);
};

/// Drift-plus-penalty price of running `task` on `node`:
///   Q_n kappa_n W + Q_0 eta_n L 1{n>0} + V (phi_hat W + rho_hat L 1{n>0}).
/// Throws SimulationError if the node is not accessible in this slot.
double price(const Task& task, NodeId node, const QueueState& queues, const SlotContext& ctx,
             double rho_hat, double phi_hat, double v);

/// Same, reading the estimates for `node` from a snapshot.
double price(const Task& task, NodeId node, const QueueState& queues, const SlotContext& ctx,
             const Estimates& estimates, double v);

/// Picks a node per task. Queues are held fixed for the whole slot; ties go
/// to the lowest node id. Under EpsilonGreedy a coin is drawn from
/// `exploration` for every task, and an explored task goes to a uniformly
/// drawn accessible node.
Decision select(const SlotContext& ctx, const QueueState& queues, const Estimates& estimates, double v,
                RandomStream& exploration);

SlotEnergy slot_energy(const SlotContext& ctx, const Decision& decision);

/// Q_n <- max(Q_n - b_n, 0) + E_n for every node, accessible or not.
void update_queues(QueueState& queues, std::span<const double> energies);

}  // namespace lago
