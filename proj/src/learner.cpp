#include "lago/learner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

namespace lago {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 4> kStrategyNames{{
    {Strategy::Ucb1, "ucb1"},
    {Strategy::UcbTuned, "ucbt"},
    {Strategy::NoConfidenceRadius, "nconfr"},
    {Strategy::EpsilonGreedy, "eps"},
}};

double optimistic(double mean, double radius) { return std::max(mean - radius, 0.0); }

}  // namespace

std::string_view to_string(Strategy s) {
    for (const auto& [kind, name] : kStrategyNames)
        if (kind == s) return name;
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (const auto& [kind, label] : kStrategyNames)
        if (label == name) return kind;
    return std::nullopt;
}

LearnerState::LearnerState(StrategySpec spec, std::size_t node_count)
    : strategy(spec),
      counts(node_count, 0),
      mean_rho(node_count, 0.0),
      mean_phi(node_count, 0.0),
      sq_rho(node_count, 0.0),
      sq_phi(node_count, 0.0) {}

std::uint64_t LearnerState::total_plays() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double clamped_log(std::uint64_t t) {
    return t <= 1 ? 0.0 : std::log(static_cast<double>(t));
}

double ucb1_radius(double scale, std::uint64_t t, std::uint64_t plays) {
    if (plays == 0) return 0.0;
    return scale * std::sqrt(3.0 * clamped_log(t) / (2.0 * static_cast<double>(plays)));
}

double ucb_tuned_radius(double scale, std::uint64_t t, std::uint64_t plays, double mean, double sum_sq) {
    if (plays == 0) return 0.0;
    const double h = static_cast<double>(plays);
    const double log_t = clamped_log(t);
    const double m = mean / scale;
    const double variance = std::max(sum_sq / (scale * scale * h) - m * m, 0.0);
    const double v = variance + std::sqrt(2.0 * log_t / h);
    return scale * std::sqrt(log_t / h * std::min(0.25, v));
}

Estimates snapshot_estimates(const LearnerState& state, std::uint64_t t, const SystemConstants& constants) {
    const std::size_t nodes = state.node_count();
    Estimates est;
    est.strategy = state.strategy;
    est.rho_hat.assign(nodes, 0.0);
    est.phi_hat.assign(nodes, 0.0);
    for (std::size_t n = 0; n < nodes; ++n) {
        const std::uint64_t h = state.counts[n];
        if (h == 0) continue;
        double radius_rho = 0.0;
        double radius_phi = 0.0;
        switch (state.strategy.kind) {
            case Strategy::Ucb1:
                radius_rho = ucb1_radius(constants.rho_max, t, h);
                radius_phi = ucb1_radius(constants.phi_max, t, h);
                break;
            case Strategy::UcbTuned:
                radius_rho = ucb_tuned_radius(constants.rho_max, t, h, state.mean_rho[n], state.sq_rho[n]);
                radius_phi = ucb_tuned_radius(constants.phi_max, t, h, state.mean_phi[n], state.sq_phi[n]);
                break;
            case Strategy::NoConfidenceRadius:
            case Strategy::EpsilonGreedy:
                break;
        }
        est.phi_hat[n] = optimistic(state.mean_phi[n], radius_phi);
        if (n != kDevice) est.rho_hat[n] = optimistic(state.mean_rho[n], radius_rho);
    }
    return est;
}

void record(LearnerState& state, const SlotContext& ctx, const Decision& decision, const Feedback& feedback) {
    if (decision.assignments.size() != ctx.tasks.size() || feedback.tasks.size() != ctx.tasks.size())
        throw SimulationError("record: decision/feedback do not match the slot's tasks");

    const std::size_t nodes = state.node_count();
    std::vector<std::uint64_t> plays(nodes, 0);
    std::vector<double> sum_rho(nodes, 0.0), sum_phi(nodes, 0.0);
    std::vector<double> sum_sq_rho(nodes, 0.0), sum_sq_phi(nodes, 0.0);

    for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
        const NodeId n = decision.assignments[i];
        if (n >= nodes) throw SimulationError("record: node id out of range");
        const Task& task = ctx.tasks[i];
        const TaskFeedback& fb = feedback.tasks[i];
        if ((n != kDevice) != fb.realized_rate.has_value())
            throw SimulationError("record: transmission feedback does not match the assignment");
        ++plays[n];
        const double inv_f = fb.d_pr / task.work_cycles;
        sum_phi[n] += inv_f;
        sum_sq_phi[n] += inv_f * inv_f;
        if (n != kDevice) {
            const double inv_r = fb.d_tr / task.size_bits;
            sum_rho[n] += inv_r;
            sum_sq_rho[n] += inv_r * inv_r;
        }
    }

    for (std::size_t n = 0; n < nodes; ++n) {
        if (plays[n] == 0) continue;
        const double before = static_cast<double>(state.counts[n]);
        state.counts[n] += plays[n];
        const double after = static_cast<double>(state.counts[n]);
        state.mean_phi[n] = state.mean_phi[n] * before / after + sum_phi[n] / after;
        state.sq_phi[n] += sum_sq_phi[n];
        if (n != kDevice) {
            state.mean_rho[n] = state.mean_rho[n] * before / after + sum_rho[n] / after;
            state.sq_rho[n] += sum_sq_rho[n];
        }
    }
}

}  // namespace lago
