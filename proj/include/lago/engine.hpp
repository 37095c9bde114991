#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lago/controller.hpp"
#include "lago/environment.hpp"
#include "lago/learner.hpp"
#include "lago/metrics.hpp"
#include "lago/model.hpp"
#include "lago/rng.hpp"

namespace lago {

/// Per-task outcome, with the coefficients needed to recompute energies.
struct TaskOutcome {
    NodeId node = 0;
    double size_bits = 0.0;
    double work_cycles = 0.0;
    double eta = 0.0;    // eta of the chosen node (0 for the device)
    double kappa = 0.0;  // kappa of the chosen node
    double realized_rate = 0.0;  // 0 when processed locally
    double realized_freq = 0.0;
    double d_tr = 0.0;
    double d_pr = 0.0;
};

struct SlotTrace {
    SlotRecord record;
    std::vector<TaskOutcome> tasks;
    Estimates estimates;         // the snapshot the decisions were made with
    std::string estimate_hash;   // hex digest of the snapshot

    [[nodiscard]] double regret_increment() const { return record.expected_latency - record.oracle_latency; }
};

using SlotSink = std::function<void(const SlotTrace&)>;

/// Everything needed to continue a run exactly where it stopped.
struct SimulationState {
    EnvironmentState environment;
    LearnerState learner;
    QueueState queues;
    EnergyLedger ledger;
    std::string exploration;
};

/// One run of the learning-aided offloading loop. Each slot:
///   1. freeze estimates from the history before this slot;
///   2. assign every task to its cheapest node under the drift-plus-penalty
///      price, then realize the draws and update the virtual queues;
///   3. fold the slot's feedback into counts and empirical means.
/// The true means are only used to fill the expected-latency and oracle
/// fields of the trace.
class Simulation {
public:
    Simulation(EnvironmentParams params, const SystemConstants& constants, StrategySpec strategy, double v,
               std::uint64_t seed);

    /// Executes exactly `horizon` further slots. Errors are rethrown as
    /// SimulationError naming the failing slot.
    void run(std::uint64_t horizon, const SlotSink& sink = {});

    SlotTrace step();

    [[nodiscard]] const Environment& environment() const noexcept { return env_; }
    [[nodiscard]] const LearnerState& learner() const noexcept { return learner_; }
    [[nodiscard]] const QueueState& queues() const noexcept { return queues_; }
    [[nodiscard]] const EnergyLedger& ledger() const noexcept { return ledger_; }
    [[nodiscard]] double v() const noexcept { return v_; }
    [[nodiscard]] std::uint64_t next_slot() const noexcept { return env_.slots_generated(); }

    [[nodiscard]] SimulationState save() const;
    void restore(const SimulationState& state);

private:
    Environment env_;
    LearnerState learner_;
    QueueState queues_;
    EnergyLedger ledger_;
    RandomStream exploration_;
    double v_;
};

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Digest of an estimate snapshot (bit patterns of every value, node order).
std::string estimate_digest(const Estimates& estimates);

}  // namespace lago
