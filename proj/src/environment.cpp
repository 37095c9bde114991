#include "lago/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lago {

double reciprocal_mean(const UniformRange& range) {
    if (range.low == range.high) return 1.0 / range.low;
    return std::log(range.high / range.low) / (range.high - range.low);
}

std::optional<double> TrueMeans::rho_at(NodeId n) const {
    if (n == kDevice || n >= rho.size()) return std::nullopt;
    return rho[n];
}

TrueMeans compute_true_means(const std::vector<NodeProfile>& profiles) {
    TrueMeans means;
    means.rho.assign(profiles.size(), 0.0);
    means.phi.assign(profiles.size(), 0.0);
    for (std::size_t n = 0; n < profiles.size(); ++n) {
        if (profiles[n].rate) means.rho[n] = reciprocal_mean(*profiles[n].rate);
        means.phi[n] = reciprocal_mean(profiles[n].freq);
    }
    return means;
}

std::vector<NodeProfile> draw_profiles(const MetaDistributions& meta, std::uint32_t n_fog,
                                       std::uint64_t seed) {
    RandomStream stream(seed, StreamPurpose::Profiles);
    std::vector<NodeProfile> profiles;
    profiles.reserve(std::size_t{n_fog} + 1);

    NodeProfile device;
    device.id = kDevice;
    device.freq = meta.device_freq;
    device.kappa = meta.device_kappa;
    device.budget = meta.budget;
    profiles.push_back(device);

    for (NodeId n = 1; n <= n_fog; ++n) {
        NodeProfile fog;
        fog.id = n;
        // Draw order per node: rate low, rate high, freq low, freq high.
        const double rate_low = stream.uniform(meta.fog_rate_low.low, meta.fog_rate_low.high);
        const double rate_high = stream.uniform(meta.fog_rate_high.low, meta.fog_rate_high.high);
        const double freq_low = stream.uniform(meta.fog_freq_low.low, meta.fog_freq_low.high);
        const double freq_high = stream.uniform(meta.fog_freq_high.low, meta.fog_freq_high.high);
        fog.rate = UniformRange{rate_low, rate_high};
        fog.freq = UniformRange{freq_low, freq_high};
        fog.eta = meta.fog_eta;
        fog.kappa = meta.fog_kappa;
        fog.budget = meta.budget;
        profiles.push_back(fog);
    }
    return profiles;
}

SystemConstants derive_constants(const EnvironmentParams& params) {
    SystemConstants c;
    c.n_fog = params.n_fog;
    c.a_max = params.arrivals.a_max();
    c.l_max = params.task_size.high;
    c.w_max = params.task_size.intensity * params.task_size.high;
    const MetaDistributions& meta = params.meta;
    if (params.profiles.empty()) {
        c.r_min = meta.fog_rate_low.low;
        c.f_min = std::min(meta.device_freq.low, meta.fog_freq_low.low);
        c.eta_max = meta.fog_eta.high;
        c.kappa_max = std::max(meta.device_kappa.high, meta.fog_kappa.high);
    } else {
        c.r_min = meta.fog_rate_low.low;
        c.f_min = params.profiles.front().freq.low;
        c.eta_max = 0.0;
        c.kappa_max = 0.0;
        bool any_rate = false;
        for (const NodeProfile& p : params.profiles) {
            if (p.rate) {
                c.r_min = any_rate ? std::min(c.r_min, p.rate->low) : p.rate->low;
                any_rate = true;
            }
            if (p.eta) c.eta_max = std::max(c.eta_max, p.eta->high);
            c.f_min = std::min(c.f_min, p.freq.low);
            c.kappa_max = std::max(c.kappa_max, p.kappa.high);
        }
        if (c.eta_max == 0.0) c.eta_max = meta.fog_eta.high;
    }
    c.rho_max = 1.0 / c.r_min;
    c.phi_max = 1.0 / c.f_min;
    return c;
}

std::vector<std::string> check_profiles(const std::vector<NodeProfile>& profiles,
                                        const SystemConstants& constants) {
    std::vector<std::string> issues;
    if (profiles.size() != constants.node_count()) {
        issues.push_back("expected " + std::to_string(constants.node_count()) + " node profiles, got " +
                         std::to_string(profiles.size()));
        return issues;
    }
    auto check_range = [&](const std::string& where, const UniformRange& r) {
        if (!(r.low > 0.0 && r.low < r.high && std::isfinite(r.high)))
            issues.push_back(where + " needs 0 < low < high");
    };
    for (std::size_t n = 0; n < profiles.size(); ++n) {
        const NodeProfile& p = profiles[n];
        const std::string tag = "profile[" + std::to_string(n) + "]";
        if (p.id != n) issues.push_back(tag + ".id must equal its position");
        const bool fog = n != kDevice;
        if (fog != p.rate.has_value()) issues.push_back(tag + ".rate must be set exactly for fog nodes");
        if (fog != p.eta.has_value()) issues.push_back(tag + ".eta must be set exactly for fog nodes");
        if (p.rate) {
            check_range(tag + ".rate", *p.rate);
            if (p.rate->low < constants.r_min) issues.push_back(tag + ".rate.low below r_min");
        }
        check_range(tag + ".freq", p.freq);
        if (p.freq.low < constants.f_min) issues.push_back(tag + ".freq.low below f_min");
        if (p.eta) {
            check_range(tag + ".eta", *p.eta);
            if (p.eta->high > constants.eta_max) issues.push_back(tag + ".eta.high above eta_max");
        }
        check_range(tag + ".kappa", p.kappa);
        if (p.kappa.high > constants.kappa_max) issues.push_back(tag + ".kappa.high above kappa_max");
        if (!(p.budget > 0.0)) issues.push_back(tag + ".budget must be positive");
    }
    return issues;
}

Environment::Environment(EnvironmentParams params, const SystemConstants& constants, std::uint64_t seed)
    : params_(std::move(params)),
      constants_(constants),
      seed_(seed),
      subsets_(seed, StreamPurpose::Subsets),
      tasks_(seed, StreamPurpose::Tasks),
      rates_(seed, StreamPurpose::Rates),
      frequencies_(seed, StreamPurpose::Frequencies),
      coefficients_(seed, StreamPurpose::Coefficients) {
    std::vector<std::string> issues = check_constants(constants_);
    if (constants_.n_fog != params_.n_fog) issues.emplace_back("constants.n_fog differs from n_fog");
    if (params_.n_accessible > params_.n_fog)
        issues.push_back("n_a (" + std::to_string(params_.n_accessible) + ") exceeds N (" +
                         std::to_string(params_.n_fog) + ")");
    if (params_.n_accessible == 0 && params_.n_fog > 0) issues.emplace_back("n_a must be positive");
    if (params_.arrivals.a_max() > constants_.a_max) issues.emplace_back("arrival cap exceeds a_max");
    if (params_.arrivals.kind == ArrivalSpec::Kind::Poisson && !(params_.arrivals.mean > 0.0))
        issues.emplace_back("Poisson arrival mean must be positive");
    const TaskSizeSpec& ts = params_.task_size;
    if (!(ts.low > 0.0 && ts.low <= ts.high)) issues.emplace_back("task size needs 0 < low <= high");
    if (!(ts.intensity > 0.0)) issues.emplace_back("intensity must be positive");
    if (ts.high > constants_.l_max) issues.emplace_back("task size high exceeds l_max");
    if (ts.intensity * ts.high > constants_.w_max) issues.emplace_back("task work exceeds w_max");
    if (!issues.empty()) throw ConfigError(std::move(issues));

    profiles_ = params_.profiles.empty() ? draw_profiles(params_.meta, params_.n_fog, seed)
                                         : params_.profiles;
    if (auto bad = check_profiles(profiles_, constants_); !bad.empty()) throw ConfigError(std::move(bad));
    means_ = compute_true_means(profiles_);

    fog_pool_.resize(params_.n_fog);
    std::iota(fog_pool_.begin(), fog_pool_.end(), NodeId{1});

    if (params_.coefficients == CoefficientMode::PerNode) {
        fixed_eta_.assign(constants_.node_count(), 0.0);
        fixed_kappa_.assign(constants_.node_count(), 0.0);
        for (const NodeProfile& p : profiles_) {
            fixed_kappa_[p.id] = coefficients_.uniform(p.kappa.low, p.kappa.high);
            if (p.eta) fixed_eta_[p.id] = coefficients_.uniform(p.eta->low, p.eta->high);
        }
    }
}

SlotContext Environment::next_slot(std::uint64_t t) {
    if (t != next_t_)
        throw SimulationError("next_slot: expected slot " + std::to_string(next_t_) + ", got " +
                              std::to_string(t));
    SlotContext ctx;
    ctx.t = t;

    const ArrivalSpec& arrivals = params_.arrivals;
    std::uint32_t count = arrivals.count;
    if (arrivals.kind == ArrivalSpec::Kind::Poisson)
        count = std::min(tasks_.poisson(arrivals.mean), arrivals.count);
    ctx.tasks.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Task task;
        task.id = TaskId{t, i};
        task.size_bits = tasks_.log_uniform(params_.task_size.low, params_.task_size.high);
        task.work_cycles = params_.task_size.intensity * task.size_bits;
        ctx.tasks.push_back(task);
    }

    // Partial Fisher-Yates over a fresh copy of 1..N.
    std::vector<NodeId> pool = fog_pool_;
    const std::size_t picks = params_.n_accessible;
    for (std::size_t k = 0; k < picks; ++k) {
        const std::size_t j = k + subsets_.below(pool.size() - k);
        std::swap(pool[k], pool[j]);
    }
    ctx.accessible.reserve(picks + 1);
    ctx.accessible.push_back(kDevice);
    ctx.accessible.insert(ctx.accessible.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(picks));
    std::sort(ctx.accessible.begin() + 1, ctx.accessible.end());

    ctx.eta.assign(constants_.node_count(), 0.0);
    ctx.kappa.assign(constants_.node_count(), 0.0);
    for (NodeId n : ctx.accessible) {
        const NodeProfile& p = profiles_[n];
        if (params_.coefficients == CoefficientMode::PerNode) {
            ctx.kappa[n] = fixed_kappa_[n];
            ctx.eta[n] = fixed_eta_[n];
        } else {
            ctx.kappa[n] = coefficients_.uniform(p.kappa.low, p.kappa.high);
            if (p.eta) ctx.eta[n] = coefficients_.uniform(p.eta->low, p.eta->high);
        }
    }

    ++next_t_;
    return ctx;
}

Feedback Environment::realize(const SlotContext& ctx, const Decision& decision) {
    check_decision(ctx, decision);
    Feedback feedback;
    feedback.tasks.reserve(ctx.tasks.size());
    for (std::size_t i = 0; i < ctx.tasks.size(); ++i) {
        const Task& task = ctx.tasks[i];
        const NodeProfile& p = profiles_[decision.assignments[i]];
        TaskFeedback fb;
        if (p.rate) {
            const double rate = rates_.uniform(p.rate->low, p.rate->high);
            fb.realized_rate = rate;
            fb.d_tr = task.size_bits / rate;
        }
        fb.realized_freq = frequencies_.uniform(p.freq.low, p.freq.high);
        fb.d_pr = task.work_cycles / fb.realized_freq;
        feedback.tasks.push_back(fb);
    }
    return feedback;
}

EnvironmentState Environment::save() const {
    return EnvironmentState{next_t_,           subsets_.save(),      tasks_.save(),
                            rates_.save(),     frequencies_.save(),  coefficients_.save()};
}

void Environment::restore(const EnvironmentState& state) {
    next_t_ = state.next_t;
    subsets_.restore(state.subsets);
    tasks_.restore(state.tasks);
    rates_.restore(state.rates);
    frequencies_.restore(state.frequencies);
    coefficients_.restore(state.coefficients);
}

}  // namespace lago
