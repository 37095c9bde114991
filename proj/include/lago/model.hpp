#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lago {

// Node 0 is the IoT device, fog nodes are 1..N.
using NodeId = std::uint32_t;
inline constexpr NodeId kDevice = 0;

/// Raised when a configuration or a domain value violates an invariant.
/// Carries one diagnostic per violated field.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> issues);

    [[nodiscard]] const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Raised by the simulation when a contract between modules is broken
/// (out-of-order slots, decisions naming inaccessible nodes, ...).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-system failures (unwritable output directory, unreadable trace).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TaskId {
    std::uint64_t slot = 0;
    std::uint32_t ordinal = 0;

    friend bool operator==(const TaskId&, const TaskId&) = default;
};

struct Task {
    TaskId id;
    double size_bits = 0.0;    // L_i(t)
    double work_cycles = 0.0;  // W_i(t)
};

/// Global bounds of the system. rho_max and phi_max are the reciprocals of
/// r_min and f_min; use make_constants() to get a consistent value.
/// n_fog may be 0 here (device-only system); run configs require n_fog >= 1.
struct SystemConstants {
    std::uint32_t n_fog = 0;
    std::uint32_t a_max = 0;
    double l_max = 0.0;
    double w_max = 0.0;
    double r_min = 0.0;
    double f_min = 0.0;
    double rho_max = 0.0;
    double phi_max = 0.0;
    double eta_max = 0.0;
    double kappa_max = 0.0;

    [[nodiscard]] std::size_t node_count() const noexcept { return std::size_t{n_fog} + 1; }
};

/// Builds constants with rho_max = 1/r_min and phi_max = 1/f_min.
/// Throws ConfigError listing every violated field.
SystemConstants make_constants(std::uint32_t n_fog, std::uint32_t a_max, double l_max, double w_max,
                               double r_min, double f_min, double eta_max, double kappa_max);

/// Checks every SystemConstants invariant; returns the list of violations.
std::vector<std::string> check_constants(const SystemConstants& c);

/// True when `value` and `1/reciprocal_of` agree to within one ulp.
bool is_reciprocal(double value, double reciprocal_of);

struct SlotContext {
    std::uint64_t t = 0;
    std::vector<Task> tasks;
    // Ascending, always starts with node 0.
    std::vector<NodeId> accessible;
    // Indexed by node id, size N+1. Only entries for accessible nodes are
    // meaningful; eta[0] is always 0.
    std::vector<double> eta;
    std::vector<double> kappa;

    [[nodiscard]] bool is_accessible(NodeId n) const noexcept;
};

/// Checks the SlotContext invariants against the constants.
std::vector<std::string> check_context(const SlotContext& ctx, const SystemConstants& c);

/// One node per task, in the order of SlotContext::tasks.
struct Decision {
    std::vector<NodeId> assignments;
};

/// Throws SimulationError unless every task has exactly one accessible node.
void check_decision(const SlotContext& ctx, const Decision& decision);

struct TaskFeedback {
    std::optional<double> realized_rate;  // bits/s, empty for node 0
    double realized_freq = 0.0;           // cycles/s
    double d_tr = 0.0;                    // seconds
    double d_pr = 0.0;                    // seconds

    [[nodiscard]] double latency() const noexcept { return d_tr + d_pr; }
};

struct Feedback {
    std::vector<TaskFeedback> tasks;
};

}  // namespace lago
