#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lago/model.hpp"

namespace lago {

enum class Strategy {
    Ucb1,                // confidence radius phi_max * sqrt(3 ln t / (2 h))
    UcbTuned,            // variance-aware radius
    NoConfidenceRadius,  // plain empirical means
    EpsilonGreedy,       // empirical means plus uniform exploration in select()
};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct StrategySpec {
    Strategy kind = Strategy::Ucb1;
    double epsilon = 0.1;  // only read under EpsilonGreedy

    friend bool operator==(const StrategySpec&, const StrategySpec&) = default;
};

/// Per-node play counts and empirical means of 1/R and 1/F. Means are 0
/// while a node has never been played.
struct LearnerState {
    StrategySpec strategy;
    std::vector<std::uint64_t> counts;
    std::vector<double> mean_rho;  // entry 0 unused
    std::vector<double> mean_phi;
    // Sums of squared observations, for the tuned radius.
    std::vector<double> sq_rho;
    std::vector<double> sq_phi;

    LearnerState() = default;
    LearnerState(StrategySpec spec, std::size_t node_count);

    [[nodiscard]] std::size_t node_count() const noexcept { return counts.size(); }
    [[nodiscard]] std::uint64_t total_plays() const noexcept;
};

/// Estimates frozen for one slot. Nodes never played carry 0.
struct Estimates {
    StrategySpec strategy;
    std::vector<double> rho_hat;  // entry 0 unused
    std::vector<double> phi_hat;
};

/// ln t, clamped to 0 for t <= 1.
double clamped_log(std::uint64_t t);

/// Radius subtracted from an empirical mean under UCB1.
double ucb1_radius(double scale, std::uint64_t t, std::uint64_t plays);

/// Radius under UCB-tuned; `mean` and `sum_sq` are in the original units and
/// are normalized by `scale` before the variance is formed.
double ucb_tuned_radius(double scale, std::uint64_t t, std::uint64_t plays, double mean, double sum_sq);

Estimates snapshot_estimates(const LearnerState& state, std::uint64_t t, const SystemConstants& constants);

/// Folds one slot of feedback into counts and means (weighted-average
/// recurrence). Observations are recovered from latencies: 1/R = d_tr / L,
/// 1/F = d_pr / W.
void record(LearnerState& state, const SlotContext& ctx, const Decision& decision, const Feedback& feedback);

}  // namespace lago
