#include "lago/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lago {

namespace {

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

double expected_task_latency(const Task& task, NodeId node, const TrueMeans& means) {
    const double processing = means.phi.at(node) * task.work_cycles;
    if (node == kDevice) return processing;
    return means.rho.at(node) * task.size_bits + processing;
}

double expected_latency(const SlotContext& ctx, const Decision& decision, const TrueMeans& means) {
    double total = 0.0;
    for (std::size_t i = 0; i < ctx.tasks.size(); ++i)
        total += expected_task_latency(ctx.tasks[i], decision.assignments.at(i), means);
    return total;
}

OracleSlot oracle_slot(const SlotContext& ctx, const TrueMeans& means) {
    OracleSlot oracle;
    oracle.decision.assignments.reserve(ctx.tasks.size());
    for (const Task& task : ctx.tasks) {
        NodeId best = ctx.accessible.front();
        double best_latency = expected_task_latency(task, best, means);
        for (std::size_t k = 1; k < ctx.accessible.size(); ++k) {
            const double latency = expected_task_latency(task, ctx.accessible[k], means);
            if (latency < best_latency) {
                best = ctx.accessible[k];
                best_latency = latency;
            }
        }
        oracle.decision.assignments.push_back(best);
        oracle.d_star += best_latency;
    }
    return oracle;
}

RegretCurve regret_curve(std::span<const SlotRecord> records, std::span<const double> oracle) {
    if (records.size() != oracle.size())
        throw std::invalid_argument("regret_curve: " + std::to_string(records.size()) + " records but " +
                                    std::to_string(oracle.size()) + " oracle values");
    RegretCurve curve;
    curve.expected.reserve(records.size());
    curve.realized.reserve(records.size());
    double expected_sum = 0.0;
    double realized_sum = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (k > 0 && records[k].t != records[k - 1].t + 1)
            throw std::invalid_argument("regret_curve: records are not consecutive slots");
        expected_sum += records[k].expected_latency - oracle[k];
        realized_sum += records[k].latency - oracle[k];
        const double slots = static_cast<double>(k + 1);
        curve.expected.push_back(expected_sum / slots);
        curve.realized.push_back(realized_sum / slots);
    }
    return curve;
}

RegretCurve regret_curve(std::span<const SlotRecord> records) {
    std::vector<double> oracle;
    oracle.reserve(records.size());
    for (const SlotRecord& r : records) oracle.push_back(r.oracle_latency);
    return regret_curve(records, oracle);
}

double FeasibilityReport::max_ratio() const {
    return ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end());
}

double FeasibilityReport::total_average() const { return sum_of(average); }

FeasibilityReport feasibility_report(std::span<const SlotRecord> records, std::span<const double> budgets,
                                     std::uint64_t stride) {
    const std::size_t nodes = budgets.size();
    FeasibilityReport report;
    std::vector<double> cumulative(nodes, 0.0);
    for (std::size_t k = 0; k < records.size(); ++k) {
        const SlotRecord& r = records[k];
        if (r.energy.size() != nodes) throw std::invalid_argument("feasibility_report: node count mismatch");
        for (std::size_t n = 0; n < nodes; ++n) cumulative[n] += r.energy[n];
        const bool last = k + 1 == records.size();
        if (stride > 0 && ((k + 1) % stride == 0 || last)) {
            std::vector<double> avg(nodes);
            for (std::size_t n = 0; n < nodes; ++n) avg[n] = cumulative[n] / static_cast<double>(k + 1);
            report.running_t.push_back(r.t);
            report.running.push_back(std::move(avg));
        }
    }
    const double slots = static_cast<double>(records.size());
    report.average.assign(nodes, 0.0);
    report.ratio.assign(nodes, 0.0);
    report.violated.assign(nodes, false);
    for (std::size_t n = 0; n < nodes; ++n) {
        report.average[n] = records.empty() ? 0.0 : cumulative[n] / slots;
        report.ratio[n] = report.average[n] / budgets[n];
        report.violated[n] = report.ratio[n] > 1.0;
    }
    return report;
}

double regret_bound(const SystemConstants& constants, double b, double theta1, double theta2, double v,
                    std::uint64_t horizon) {
    const double t = static_cast<double>(horizon);
    const double a = constants.a_max;
    const double n = constants.n_fog;
    const double log_t = horizon <= 1 ? 0.0 : std::log(t);
    const double learn_phi = 3.0 / (2.0 * t) + std::sqrt(6.0 * a * (n + 1.0) * log_t / t);
    const double learn_rho = 3.0 / (2.0 * t) + std::sqrt(6.0 * a * n * log_t / t);
    return b / v + learn_phi * theta1 + learn_rho * theta2;
}

BoundConstants bound_constants(const SystemConstants& c, std::span<const double> budgets, double v,
                               std::uint64_t horizon) {
    BoundConstants bc;
    double budget_sq = 0.0;
    for (double b : budgets) budget_sq += b * b;
    const double a = c.a_max;
    const double n = c.n_fog;
    const double processing = c.kappa_max * c.w_max;
    const double transmission = c.eta_max * c.l_max;
    const double peak = std::max(processing * processing, transmission * transmission);
    bc.b = budget_sq / 2.0 + a * a * peak / 2.0 + n * n * a * a * processing * processing / 2.0;
    bc.theta1 = 2.0 * c.w_max * c.phi_max * a;
    bc.theta2 = 2.0 * c.l_max * c.rho_max * a;
    bc.regret_bound = horizon == 0 ? 0.0 : regret_bound(c, bc.b, bc.theta1, bc.theta2, v, horizon);
    return bc;
}

double BoundConstants::backlog_bound(double v, double epsilon) const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("backlog_bound: epsilon must be positive");
    return (b + v * (theta1 + theta2)) / epsilon;
}

QueueStats queue_stats(std::span<const double> total_backlog) {
    QueueStats stats;
    stats.running.reserve(total_backlog.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < total_backlog.size(); ++k) {
        sum += total_backlog[k];
        stats.running.push_back(sum / static_cast<double>(k + 1));
    }
    stats.final_average = stats.running.empty() ? 0.0 : stats.running.back();
    return stats;
}

std::vector<double> start_of_slot_backlog(std::span<const SlotRecord> records, double initial_total) {
    std::vector<double> totals;
    totals.reserve(records.size());
    double previous = initial_total;
    for (const SlotRecord& r : records) {
        totals.push_back(previous);
        previous = sum_of(r.backlog);
    }
    return totals;
}

RunSummary summarize(std::span<const SlotRecord> records, std::span<const double> budgets,
                     double initial_backlog_total) {
    RunSummary s;
    s.slots = records.size();
    double latency = 0.0;
    double expected = 0.0;
    for (const SlotRecord& r : records) {
        s.tasks += r.n_tasks;
        latency += r.latency;
        expected += r.expected_latency;
    }
    if (s.tasks > 0) {
        s.avg_task_latency = latency / static_cast<double>(s.tasks);
        s.avg_expected_task_latency = expected / static_cast<double>(s.tasks);
    }
    const FeasibilityReport feasibility = feasibility_report(records, budgets);
    s.avg_energy = feasibility.average;
    s.total_energy = feasibility.total_average();
    s.max_energy_ratio = feasibility.max_ratio();
    s.violations = static_cast<std::uint32_t>(std::count(feasibility.violated.begin(), feasibility.violated.end(), true));
    const RegretCurve regret = regret_curve(records);
    if (!records.empty()) {
        s.regret_expected = regret.expected.back();
        s.regret_realized = regret.realized.back();
        s.final_backlog = sum_of(records.back().backlog);
    }
    const std::vector<double> starts = start_of_slot_backlog(records, initial_backlog_total);
    s.avg_backlog = queue_stats(starts).final_average;
    return s;
}

MetricsAccumulator::MetricsAccumulator(std::vector<double> budgets, double initial_backlog_total)
    : budgets_(std::move(budgets)), energy_(budgets_.size(), 0.0), last_total_(initial_backlog_total) {}

void MetricsAccumulator::add(const SlotRecord& record) {
    if (record.energy.size() != energy_.size()) throw std::invalid_argument("MetricsAccumulator: node count mismatch");
    ++slots_;
    tasks_ += record.n_tasks;
    latency_ += record.latency;
    expected_ += record.expected_latency;
    regret_expected_sum_ += record.expected_latency - record.oracle_latency;
    regret_realized_sum_ += record.latency - record.oracle_latency;
    for (std::size_t n = 0; n < energy_.size(); ++n) energy_[n] += record.energy[n];
    backlog_sum_ += last_total_;
    last_total_ = sum_of(record.backlog);
}

RunSummary MetricsAccumulator::summary() const {
    RunSummary s;
    s.slots = slots_;
    s.tasks = tasks_;
    if (tasks_ > 0) {
        s.avg_task_latency = latency_ / static_cast<double>(tasks_);
        s.avg_expected_task_latency = expected_ / static_cast<double>(tasks_);
    }
    s.avg_energy.assign(energy_.size(), 0.0);
    const double slots = static_cast<double>(slots_);
    for (std::size_t n = 0; n < energy_.size(); ++n) {
        s.avg_energy[n] = slots_ == 0 ? 0.0 : energy_[n] / slots;
        const double ratio = s.avg_energy[n] / budgets_[n];
        s.max_energy_ratio = std::max(s.max_energy_ratio, ratio);
        if (ratio > 1.0) ++s.violations;
    }
    s.total_energy = sum_of(s.avg_energy);
    if (slots_ > 0) {
        s.regret_expected = regret_expected_sum_ / slots;
        s.regret_realized = regret_realized_sum_ / slots;
        s.avg_backlog = backlog_sum_ / slots;
        s.final_backlog = last_total_;
    }
    return s;
}

}  // namespace lago
