#include "lago/engine.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace lago {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

std::string estimate_digest(const Estimates& estimates) {
    std::string bytes;
    bytes.reserve(16 * estimates.phi_hat.size());
    auto append = [&bytes](double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
    };
    for (double x : estimates.rho_hat) append(x);
    for (double x : estimates.phi_hat) append(x);
    return sha256_hex(bytes).substr(0, 16);
}

Simulation::Simulation(EnvironmentParams params, const SystemConstants& constants, StrategySpec strategy,
                       double v, std::uint64_t seed)
    : env_(std::move(params), constants, seed),
      learner_(strategy, constants.node_count()),
      queues_(budgets_of(env_.profiles())),
      ledger_(constants.node_count()),
      exploration_(seed, StreamPurpose::Exploration),
      v_(v) {
    std::vector<std::string> issues;
    if (!(v >= 0.0) || !std::isfinite(v)) issues.emplace_back("V must be nonnegative and finite");
    if (strategy.kind == Strategy::EpsilonGreedy && !(strategy.epsilon >= 0.0 && strategy.epsilon <= 1.0))
        issues.emplace_back("epsilon must lie in [0, 1]");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

SlotTrace Simulation::step() {
    const std::uint64_t t = env_.slots_generated();
    const SlotContext ctx = env_.next_slot(t);

    // Online learning: estimates from slots < t only.
    SlotTrace trace;
    trace.estimates = snapshot_estimates(learner_, t, env_.constants());
    trace.estimate_hash = estimate_digest(trace.estimates);

    // Offloading and queue update.
    const Decision decision = select(ctx, queues_, trace.estimates, v_, exploration_);
    const Feedback feedback = env_.realize(ctx, decision);
    const SlotEnergy energy = slot_energy(ctx, decision);
    ledger_.add(energy);
    update_queues(queues_, energy.per_node);

    // Counts and empirical means.
    record(learner_, ctx, decision, feedback);

    SlotRecord& rec = trace.record;
    rec.t = t;
    rec.n_tasks = static_cast<std::uint32_t>(ctx.tasks.size());
    rec.energy = energy.per_node;
    rec.backlog = queues_.backlog;
    rec.expected_latency = expected_latency(ctx, decision, env_.true_means());
    rec.oracle_latency = oracle_slot(ctx, env_.true_means()).d_star;
    trace.tasks.reserve(ctx.tasks.size());
    for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
        const NodeId n = decision.assignments[i];
        const TaskFeedback& fb = feedback.tasks[i];
        rec.latency += fb.d_tr + fb.d_pr;
        trace.tasks.push_back(TaskOutcome{n, ctx.tasks[i].size_bits, ctx.tasks[i].work_cycles, ctx.eta[n],
                                          ctx.kappa[n], fb.realized_rate.value_or(0.0), fb.realized_freq,
                                          fb.d_tr, fb.d_pr});
    }
    return trace;
}

void Simulation::run(std::uint64_t horizon, const SlotSink& sink) {
    for (std::uint64_t k = 0; k < horizon; ++k) {
        const std::uint64_t t = env_.slots_generated();
        try {
            SlotTrace trace = step();
            if (sink) sink(trace);
        } catch (const ConfigError&) {
            throw;
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw SimulationError("slot " + std::to_string(t) + ": " + e.what());
        }
    }
}

SimulationState Simulation::save() const {
    return SimulationState{env_.save(), learner_, queues_, ledger_, exploration_.save()};
}

void Simulation::restore(const SimulationState& state) {
    const std::size_t nodes = env_.constants().node_count();
    if (state.learner.node_count() != nodes || state.queues.backlog.size() != nodes ||
        state.queues.budget.size() != nodes || state.ledger.cumulative.size() != nodes)
        throw ConfigError({"saved state does not match the node count of the configuration"});
    env_.restore(state.environment);
    learner_ = state.learner;
    queues_ = state.queues;
    ledger_ = state.ledger;
    exploration_.restore(state.exploration);
}

}  // namespace lago
