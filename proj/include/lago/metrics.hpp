#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lago/environment.hpp"
#include "lago/model.hpp"

namespace lago {

/// Clairvoyant per-task baseline: every task goes to the accessible node
/// with the smallest expected latency under the true means, ignoring energy.
/// D* therefore lower-bounds the expected latency of any assignment and the
/// regret measured against it upper-bounds the regret against the
/// constrained optimum.
struct OracleSlot {
    double d_star = 0.0;
    Decision decision;
};

/// rho_n L 1{n>0} + phi_n W.
double expected_task_latency(const Task& task, NodeId node, const TrueMeans& means);

double expected_latency(const SlotContext& ctx, const Decision& decision, const TrueMeans& means);

OracleSlot oracle_slot(const SlotContext& ctx, const TrueMeans& means);

/// Per-slot aggregates shared by the engine output and the trace reader.
struct SlotRecord {
    std::uint64_t t = 0;
    std::uint32_t n_tasks = 0;
    double latency = 0.0;           // realized, summed over tasks
    double expected_latency = 0.0;  // true means applied to the chosen nodes
    double oracle_latency = 0.0;    // D*(t)
    std::vector<double> energy;     // E_n(t)
    std::vector<double> backlog;    // Q_n(t+1), after the update
};

struct RegretCurve {
    // value[k] is R(k+1) = (1/(k+1)) * sum_{tau<=k} (latency(tau) - D*(tau))
    std::vector<double> expected;
    std::vector<double> realized;
};

/// Throws std::invalid_argument when the oracle series does not line up
/// with the records.
RegretCurve regret_curve(std::span<const SlotRecord> records, std::span<const double> oracle);
RegretCurve regret_curve(std::span<const SlotRecord> records);

struct FeasibilityReport {
    std::vector<double> average;  // (1/T) sum_t E_n(t)
    std::vector<double> ratio;    // average / b_n
    std::vector<bool> violated;   // ratio > 1
    // Running per-node averages sampled every `stride` slots (and at T).
    std::vector<std::uint64_t> running_t;
    std::vector<std::vector<double>> running;

    [[nodiscard]] double max_ratio() const;
    [[nodiscard]] double total_average() const;
};

FeasibilityReport feasibility_report(std::span<const SlotRecord> records, std::span<const double> budgets,
                                     std::uint64_t stride = 0);

struct BoundConstants {
    double b = 0.0;       // J^2
    double theta1 = 0.0;  // 2 w_max phi_max a_max
    double theta2 = 0.0;  // 2 l_max rho_max a_max
    double regret_bound = 0.0;

    /// (B + V (theta1 + theta2)) / epsilon for a user-supplied slack.
    [[nodiscard]] double backlog_bound(double v, double epsilon) const;
};

BoundConstants bound_constants(const SystemConstants& constants, std::span<const double> budgets, double v,
                               std::uint64_t horizon);

/// Right-hand side of the regret bound for horizon T.
double regret_bound(const SystemConstants& constants, double b, double theta1, double theta2, double v,
                    std::uint64_t horizon);

struct QueueStats {
    std::vector<double> running;  // running[k] = (1/(k+1)) sum_{tau<=k} total_backlog[tau]
    double final_average = 0.0;
};

/// `total_backlog[tau]` is sum_n Q_n(tau) at the start of slot tau.
QueueStats queue_stats(std::span<const double> total_backlog);

/// Start-of-slot totals from records holding post-update backlogs; the first
/// slot starts from `initial_total` (0 for a fresh run).
std::vector<double> start_of_slot_backlog(std::span<const SlotRecord> records, double initial_total = 0.0);

/// Scalars reported per run.
struct RunSummary {
    std::uint64_t slots = 0;
    std::uint64_t tasks = 0;
    double avg_task_latency = 0.0;
    double avg_expected_task_latency = 0.0;
    double total_energy = 0.0;          // sum over nodes of the time-averaged energy
    std::vector<double> avg_energy;     // per node
    double max_energy_ratio = 0.0;      // max_n avg_energy / b_n
    std::uint32_t violations = 0;
    double regret_expected = 0.0;
    double regret_realized = 0.0;
    double avg_backlog = 0.0;           // time-averaged total backlog
    double final_backlog = 0.0;         // sum_n Q_n(T)
};

/// Batch route: summary recomputed from stored records.
RunSummary summarize(std::span<const SlotRecord> records, std::span<const double> budgets,
                     double initial_backlog_total = 0.0);

/// Streaming route used during a run; yields the same numbers as summarize()
/// on the records it has seen.
class MetricsAccumulator {
public:
    /// `initial_backlog_total` is sum_n Q_n at the first slot (0 for a fresh run).
    explicit MetricsAccumulator(std::vector<double> budgets, double initial_backlog_total = 0.0);

    void add(const SlotRecord& record);
    [[nodiscard]] RunSummary summary() const;

private:
    std::vector<double> budgets_;
    std::uint64_t slots_ = 0;
    std::uint64_t tasks_ = 0;
    double latency_ = 0.0, expected_ = 0.0;
    double regret_expected_sum_ = 0.0, regret_realized_sum_ = 0.0;
    std::vector<double> energy_;
    double backlog_sum_ = 0.0;   // sum of start-of-slot totals
    double last_total_ = 0.0;    // total backlog after the latest slot
};

}  // namespace lago
