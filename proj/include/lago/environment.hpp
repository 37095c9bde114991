#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lago/model.hpp"
#include "lago/rng.hpp"

namespace lago {

struct UniformRange {
    double low = 0.0;
    double high = 0.0;

    friend bool operator==(const UniformRange&, const UniformRange&) = default;
};

/// E[1/X] for X ~ Unif(low, high): ln(high/low) / (high - low), or 1/low for
/// a point support.
double reciprocal_mean(const UniformRange& range);

struct NodeProfile {
    NodeId id = 0;
    std::optional<UniformRange> rate;  // bits/s, fog nodes only
    UniformRange freq;                 // cycles/s
    std::optional<UniformRange> eta;   // J/bit, fog nodes only
    UniformRange kappa;                // J/cycle
    double budget = 0.0;               // J per slot

    friend bool operator==(const NodeProfile&, const NodeProfile&) = default;
};

/// Supports from which per-node profiles are drawn once per environment.
struct MetaDistributions {
    UniformRange fog_rate_low{5e6, 1.5e7};
    UniformRange fog_rate_high{5e7, 1.5e8};
    UniformRange fog_freq_low{5e9, 1.5e10};
    UniformRange fog_freq_high{1.5e10, 2.5e10};
    UniformRange device_freq{1e9, 1e10};
    UniformRange device_kappa{1e-10, 5e-10};
    UniformRange fog_kappa{5e-9, 1.5e-8};
    UniformRange fog_eta{1e-7, 1e-6};
    double budget = 0.5;

    friend bool operator==(const MetaDistributions&, const MetaDistributions&) = default;
};

struct ArrivalSpec {
    enum class Kind { Fixed, Poisson };
    Kind kind = Kind::Fixed;
    std::uint32_t count = 10;  // fixed count, or the cap a_max for Poisson
    double mean = 0.0;         // Poisson mean

    [[nodiscard]] std::uint32_t a_max() const noexcept { return count; }
    friend bool operator==(const ArrivalSpec&, const ArrivalSpec&) = default;
};

/// Task sizes are log-uniform over [low, high] bits; work = intensity * size.
struct TaskSizeSpec {
    double low = 2.5e4;
    double high = 2.5e5;
    double intensity = 1000.0;  // cycles per bit

    friend bool operator==(const TaskSizeSpec&, const TaskSizeSpec&) = default;
};

enum class CoefficientMode { PerSlot, PerNode };

struct EnvironmentParams {
    std::uint32_t n_fog = 20;
    std::uint32_t n_accessible = 10;
    ArrivalSpec arrivals;
    TaskSizeSpec task_size;
    MetaDistributions meta;
    CoefficientMode coefficients = CoefficientMode::PerSlot;
    // When non-empty, used verbatim instead of drawing from `meta`.
    std::vector<NodeProfile> profiles;

    friend bool operator==(const EnvironmentParams&, const EnvironmentParams&) = default;
};

struct TrueMeans {
    std::vector<double> rho;  // index 0 unused (0.0)
    std::vector<double> phi;

    /// Empty for the device, which never transmits.
    [[nodiscard]] std::optional<double> rho_at(NodeId n) const;
    [[nodiscard]] double phi_at(NodeId n) const { return phi.at(n); }
};

TrueMeans compute_true_means(const std::vector<NodeProfile>& profiles);

/// Draws one profile per node (device first) from the meta-distributions.
std::vector<NodeProfile> draw_profiles(const MetaDistributions& meta, std::uint32_t n_fog,
                                       std::uint64_t seed);

/// Constants implied by the environment parameters: bounds come from the
/// supports of the meta-distributions (or the explicit profiles).
SystemConstants derive_constants(const EnvironmentParams& params);

std::vector<std::string> check_profiles(const std::vector<NodeProfile>& profiles,
                                        const SystemConstants& constants);

/// Serializable position of an environment inside its random streams.
struct EnvironmentState {
    std::uint64_t next_t = 0;
    std::string subsets, tasks, rates, frequencies, coefficients;
};

/// The stochastic world of one run. The whole sequence of slots and feedback
/// is a pure function of (params, constants, seed) and the decisions made.
class Environment {
public:
    Environment(EnvironmentParams params, const SystemConstants& constants, std::uint64_t seed);

    /// Generates slot t; t must equal the number of slots already generated.
    SlotContext next_slot(std::uint64_t t);

    /// Draws realized rates and frequencies for every task, in task order.
    Feedback realize(const SlotContext& ctx, const Decision& decision);

    [[nodiscard]] const TrueMeans& true_means() const noexcept { return means_; }
    [[nodiscard]] const std::vector<NodeProfile>& profiles() const noexcept { return profiles_; }
    [[nodiscard]] const SystemConstants& constants() const noexcept { return constants_; }
    [[nodiscard]] const EnvironmentParams& params() const noexcept { return params_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t slots_generated() const noexcept { return next_t_; }

    [[nodiscard]] EnvironmentState save() const;
    void restore(const EnvironmentState& state);

private:
    EnvironmentParams params_;
    SystemConstants constants_;
    std::uint64_t seed_;
    std::vector<NodeProfile> profiles_;
    TrueMeans means_;
    std::uint64_t next_t_ = 0;
    // Only used under CoefficientMode::PerNode.
    std::vector<double> fixed_eta_, fixed_kappa_;
    std::vector<NodeId> fog_pool_;

    RandomStream subsets_, tasks_, rates_, frequencies_, coefficients_;
};

}  // namespace lago
