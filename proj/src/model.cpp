#include "lago/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lago {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i != 0) os << "; ";
        os << issues[i];
    }
    return os.str();
}

void require_positive(std::vector<std::string>& issues, const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) issues.push_back(std::string(name) + " must be positive");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::invalid_argument(join_issues(issues)), issues_(std::move(issues)) {}

bool is_reciprocal(double value, double reciprocal_of) {
    const double expected = 1.0 / reciprocal_of;
    if (value == expected) return true;
    return std::nextafter(expected, value) == value;
}

std::vector<std::string> check_constants(const SystemConstants& c) {
    std::vector<std::string> issues;
    if (c.a_max == 0) issues.emplace_back("a_max must be positive");
    require_positive(issues, "l_max", c.l_max);
    require_positive(issues, "w_max", c.w_max);
    require_positive(issues, "r_min", c.r_min);
    require_positive(issues, "f_min", c.f_min);
    require_positive(issues, "rho_max", c.rho_max);
    require_positive(issues, "phi_max", c.phi_max);
    require_positive(issues, "eta_max", c.eta_max);
    require_positive(issues, "kappa_max", c.kappa_max);
    if (c.r_min > 0.0 && c.rho_max > 0.0 && !is_reciprocal(c.rho_max, c.r_min))
        issues.emplace_back("rho_max must equal 1/r_min");
    if (c.f_min > 0.0 && c.phi_max > 0.0 && !is_reciprocal(c.phi_max, c.f_min))
        issues.emplace_back("phi_max must equal 1/f_min");
    return issues;
}

SystemConstants make_constants(std::uint32_t n_fog, std::uint32_t a_max, double l_max, double w_max,
                               double r_min, double f_min, double eta_max, double kappa_max) {
    SystemConstants c;
    c.n_fog = n_fog;
    c.a_max = a_max;
    c.l_max = l_max;
    c.w_max = w_max;
    c.r_min = r_min;
    c.f_min = f_min;
    c.rho_max = 1.0 / r_min;
    c.phi_max = 1.0 / f_min;
    c.eta_max = eta_max;
    c.kappa_max = kappa_max;
    if (auto issues = check_constants(c); !issues.empty()) throw ConfigError(std::move(issues));
    return c;
}

bool SlotContext::is_accessible(NodeId n) const noexcept {
    return std::binary_search(accessible.begin(), accessible.end(), n);
}

std::vector<std::string> check_context(const SlotContext& ctx, const SystemConstants& c) {
    std::vector<std::string> issues;
    const std::size_t nodes = c.node_count();
    if (ctx.accessible.empty() || ctx.accessible.front() != kDevice)
        issues.emplace_back("accessible set must contain node 0");
    if (!std::is_sorted(ctx.accessible.begin(), ctx.accessible.end()) ||
        std::adjacent_find(ctx.accessible.begin(), ctx.accessible.end()) != ctx.accessible.end())
        issues.emplace_back("accessible set must be strictly ascending");
    if (!ctx.accessible.empty() && ctx.accessible.back() >= nodes)
        issues.emplace_back("accessible node id out of range");
    if (ctx.tasks.size() > c.a_max) issues.emplace_back("more than a_max tasks in slot");
    if (ctx.eta.size() != nodes || ctx.kappa.size() != nodes) {
        issues.emplace_back("eta/kappa must have one entry per node");
        return issues;
    }
    for (NodeId n : ctx.accessible) {
        if (n >= nodes) continue;
        if (n != kDevice && !(ctx.eta[n] > 0.0 && ctx.eta[n] <= c.eta_max))
            issues.push_back("eta[" + std::to_string(n) + "] outside (0, eta_max]");
        if (!(ctx.kappa[n] > 0.0 && ctx.kappa[n] <= c.kappa_max))
            issues.push_back("kappa[" + std::to_string(n) + "] outside (0, kappa_max]");
    }
    for (const Task& task : ctx.tasks) {
        if (!(task.size_bits > 0.0 && task.size_bits <= c.l_max))
            issues.push_back("task " + std::to_string(task.id.ordinal) + " size outside (0, l_max]");
        if (!(task.work_cycles > 0.0 && task.work_cycles <= c.w_max))
            issues.push_back("task " + std::to_string(task.id.ordinal) + " work outside (0, w_max]");
    }
    return issues;
}

void check_decision(const SlotContext& ctx, const Decision& decision) {
    if (decision.assignments.size() != ctx.tasks.size())
        throw SimulationError("decision covers " + std::to_string(decision.assignments.size()) +
                              " tasks, slot has " + std::to_string(ctx.tasks.size()));
    for (std::size_t i = 0; i < decision.assignments.size(); ++i) {
        if (!ctx.is_accessible(decision.assignments[i]))
            throw SimulationError("task " + std::to_string(i) + " assigned to inaccessible node " +
                                  std::to_string(decision.assignments[i]));
    }
}

}  // namespace lago
