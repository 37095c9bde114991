#include "lago/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lago {

using nlohmann::json;

namespace {

// Walks one JSON object, reading typed fields and recording every problem
// instead of stopping at the first.
class FieldReader {
public:
    FieldReader(const json& object, std::string prefix, std::vector<std::string>& issues)
        : object_(object), prefix_(std::move(prefix)), issues_(issues) {
        if (!object_.is_object()) {
            issues_.push_back(label() + " must be an object");
            valid_ = false;
        }
    }

    ~FieldReader() {
        if (!valid_) return;
        for (const auto& item : object_.items())
            if (!seen_.contains(item.key())) issues_.push_back("unknown field " + name(item.key()));
    }

    FieldReader(const FieldReader&) = delete;
    FieldReader& operator=(const FieldReader&) = delete;

    const json* find(const std::string& key, bool required = false) {
        seen_.insert(key);
        if (!valid_) return nullptr;
        auto it = object_.find(key);
        if (it == object_.end()) {
            if (required) issues_.push_back("missing field " + name(key));
            return nullptr;
        }
        return &*it;
    }

    bool number(const std::string& key, double& out, bool required = false) {
        const json* v = find(key, required);
        if (!v) return false;
        if (!v->is_number()) {
            issues_.push_back(name(key) + " must be a number");
            return false;
        }
        out = v->get<double>();
        return true;
    }

    template <typename UInt>
    bool unsigned_integer(const std::string& key, UInt& out, bool required = false) {
        const json* v = find(key, required);
        if (!v) return false;
        // Accepts any JSON number with a nonnegative integral value (1e3 included).
        std::uint64_t raw = 0;
        if (v->is_number_unsigned()) {
            raw = v->get<std::uint64_t>();
        } else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
            raw = static_cast<std::uint64_t>(v->get<std::int64_t>());
        } else if (v->is_number_float() && v->get<double>() >= 0.0 && v->get<double>() < 0x1p64 &&
                   std::floor(v->get<double>()) == v->get<double>()) {
            raw = static_cast<std::uint64_t>(v->get<double>());
        } else {
            issues_.push_back(name(key) + " must be a nonnegative integer");
            return false;
        }
        if (raw > std::numeric_limits<UInt>::max()) {
            issues_.push_back(name(key) + " is out of range");
            return false;
        }
        out = static_cast<UInt>(raw);
        return true;
    }

    bool string(const std::string& key, std::string& out) {
        const json* v = find(key);
        if (!v) return false;
        if (!v->is_string()) {
            issues_.push_back(name(key) + " must be a string");
            return false;
        }
        out = v->get<std::string>();
        return true;
    }

    bool range(const std::string& key, UniformRange& out, bool required = false) {
        const json* v = find(key, required);
        if (!v) return false;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            issues_.push_back(name(key) + " must be a [low, high] pair of numbers");
            return false;
        }
        out = UniformRange{(*v)[0].get<double>(), (*v)[1].get<double>()};
        return true;
    }

    [[nodiscard]] std::string name(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

private:
    [[nodiscard]] std::string label() const { return prefix_.empty() ? "config" : prefix_; }

    const json& object_;
    std::string prefix_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
    bool valid_ = true;
};

json range_json(const UniformRange& r) { return json::array({r.low, r.high}); }

void check_range(std::vector<std::string>& issues, const std::string& name, const UniformRange& r) {
    if (!(r.low > 0.0 && r.low <= r.high && std::isfinite(r.high)))
        issues.push_back(name + " needs 0 < low <= high");
}

void read_meta(FieldReader& parent, MetaDistributions& meta, std::vector<std::string>& issues) {
    const json* node = parent.find("meta");
    if (!node) return;
    FieldReader r(*node, "meta", issues);
    r.range("fog_rate_low", meta.fog_rate_low);
    r.range("fog_rate_high", meta.fog_rate_high);
    r.range("fog_freq_low", meta.fog_freq_low);
    r.range("fog_freq_high", meta.fog_freq_high);
    r.range("device_freq", meta.device_freq);
    r.range("device_kappa", meta.device_kappa);
    r.range("fog_kappa", meta.fog_kappa);
    r.range("fog_eta", meta.fog_eta);
    r.number("budget", meta.budget);
}

void read_profiles(FieldReader& parent, std::vector<NodeProfile>& profiles, std::vector<std::string>& issues) {
    const json* node = parent.find("profiles");
    if (!node) return;
    if (!node->is_array()) {
        issues.emplace_back("profiles must be an array");
        return;
    }
    for (std::size_t k = 0; k < node->size(); ++k) {
        FieldReader r((*node)[k], "profiles[" + std::to_string(k) + "]", issues);
        NodeProfile p;
        r.unsigned_integer("id", p.id, true);
        UniformRange range;
        if (r.range("rate", range)) p.rate = range;
        r.range("freq", p.freq, true);
        if (r.range("eta", range)) p.eta = range;
        r.range("kappa", p.kappa, true);
        r.number("budget", p.budget, true);
        profiles.push_back(p);
    }
}

void read_constants(FieldReader& parent, std::optional<SystemConstants>& out, std::vector<std::string>& issues) {
    const json* node = parent.find("constants");
    if (!node) return;
    FieldReader r(*node, "constants", issues);
    SystemConstants c;
    r.unsigned_integer("n_fog", c.n_fog, true);
    r.unsigned_integer("a_max", c.a_max, true);
    r.number("l_max", c.l_max, true);
    r.number("w_max", c.w_max, true);
    r.number("r_min", c.r_min, true);
    r.number("f_min", c.f_min, true);
    r.number("eta_max", c.eta_max, true);
    r.number("kappa_max", c.kappa_max, true);
    if (!r.number("rho_max", c.rho_max)) c.rho_max = c.r_min > 0.0 ? 1.0 / c.r_min : 0.0;
    if (!r.number("phi_max", c.phi_max)) c.phi_max = c.f_min > 0.0 ? 1.0 / c.f_min : 0.0;
    out = c;
}

}  // namespace

SystemConstants RunConfig::effective_constants() const {
    return constants ? *constants : derive_constants(environment);
}

void check_config(const RunConfig& config) {
    std::vector<std::string> issues;
    const EnvironmentParams& env = config.environment;
    if (env.n_fog == 0) issues.emplace_back("n_fog must be positive");
    if (env.n_accessible == 0) issues.emplace_back("n_accessible must be positive");
    if (env.n_accessible > env.n_fog)
        issues.push_back("n_accessible (" + std::to_string(env.n_accessible) + ") exceeds n_fog (" +
                         std::to_string(env.n_fog) + ")");
    if (env.arrivals.count == 0) issues.emplace_back("arrivals.count must be positive");
    if (env.arrivals.kind == ArrivalSpec::Kind::Poisson && !(env.arrivals.mean > 0.0))
        issues.emplace_back("arrivals.mean must be positive");
    const TaskSizeSpec& ts = env.task_size;
    if (!(ts.low > 0.0 && ts.low <= ts.high && std::isfinite(ts.high)))
        issues.emplace_back("task_size needs 0 < low <= high");
    if (!(ts.intensity > 0.0)) issues.emplace_back("task_size.intensity must be positive");
    const MetaDistributions& m = env.meta;
    check_range(issues, "meta.fog_rate_low", m.fog_rate_low);
    check_range(issues, "meta.fog_rate_high", m.fog_rate_high);
    check_range(issues, "meta.fog_freq_low", m.fog_freq_low);
    check_range(issues, "meta.fog_freq_high", m.fog_freq_high);
    check_range(issues, "meta.device_freq", m.device_freq);
    check_range(issues, "meta.device_kappa", m.device_kappa);
    check_range(issues, "meta.fog_kappa", m.fog_kappa);
    check_range(issues, "meta.fog_eta", m.fog_eta);
    if (!(m.budget > 0.0)) issues.emplace_back("meta.budget must be positive");
    if (m.fog_rate_low.high >= m.fog_rate_high.low)
        issues.emplace_back("meta.fog_rate_low must lie below meta.fog_rate_high");
    if (m.fog_freq_low.high > m.fog_freq_high.low)
        issues.emplace_back("meta.fog_freq_low must lie below meta.fog_freq_high");

    if (!(config.v > 0.0) || !std::isfinite(config.v)) issues.emplace_back("v must be positive");
    if (!(config.strategy.epsilon >= 0.0 && config.strategy.epsilon <= 1.0))
        issues.emplace_back("epsilon must lie in [0, 1]");
    if (config.out_dir.empty()) issues.emplace_back("out must not be empty");

    if (issues.empty()) {
        const SystemConstants c = config.effective_constants();
        for (auto& issue : check_constants(c)) issues.push_back("constants: " + issue);
        if (c.n_fog != env.n_fog) issues.emplace_back("constants.n_fog differs from n_fog");
        if (c.a_max < env.arrivals.a_max()) issues.emplace_back("constants.a_max is below arrivals.count");
        if (c.l_max < ts.high) issues.emplace_back("constants.l_max is below task_size.high");
        if (c.w_max < ts.intensity * ts.high) issues.emplace_back("constants.w_max is below the largest task work");
        if (!env.profiles.empty())
            for (auto& issue : check_profiles(env.profiles, c)) issues.push_back(issue);
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

RunConfig validate_config(const json& document) {
    std::vector<std::string> issues;
    RunConfig config;
    {
        FieldReader r(document, "", issues);
        EnvironmentParams& env = config.environment;
        r.unsigned_integer("n_fog", env.n_fog);
        r.unsigned_integer("n_accessible", env.n_accessible);

        if (const json* node = r.find("arrivals")) {
            FieldReader a(*node, "arrivals", issues);
            std::string kind = "fixed";
            a.string("kind", kind);
            if (kind == "fixed") {
                env.arrivals.kind = ArrivalSpec::Kind::Fixed;
            } else if (kind == "poisson") {
                env.arrivals.kind = ArrivalSpec::Kind::Poisson;
                a.number("mean", env.arrivals.mean, true);
            } else {
                issues.push_back("arrivals.kind must be \"fixed\" or \"poisson\"");
            }
            a.unsigned_integer("count", env.arrivals.count);
            if (kind != "poisson") a.find("mean");
        }
        if (const json* node = r.find("task_size")) {
            FieldReader t(*node, "task_size", issues);
            t.number("low", env.task_size.low);
            t.number("high", env.task_size.high);
            t.number("intensity", env.task_size.intensity);
        }
        read_meta(r, env.meta, issues);
        std::string coefficients = "per_slot";
        if (r.string("coefficients", coefficients)) {
            if (coefficients == "per_slot")
                env.coefficients = CoefficientMode::PerSlot;
            else if (coefficients == "per_node")
                env.coefficients = CoefficientMode::PerNode;
            else
                issues.emplace_back("coefficients must be \"per_slot\" or \"per_node\"");
        }
        read_profiles(r, env.profiles, issues);
        read_constants(r, config.constants, issues);

        std::string strategy;
        if (r.string("strategy", strategy)) {
            if (auto parsed = parse_strategy(strategy))
                config.strategy.kind = *parsed;
            else
                issues.emplace_back("strategy must be one of ucb1, ucbt, nconfr, eps");
        }
        r.number("epsilon", config.strategy.epsilon);
        r.number("v", config.v);
        r.unsigned_integer("horizon", config.horizon);
        r.unsigned_integer("seed", config.seed);
        r.unsigned_integer("checkpoint_every", config.checkpoint_every);
        r.string("out", config.out_dir);
    }
    try {
        check_config(config);
    } catch (const ConfigError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return config;
}

json to_json(const SystemConstants& c) {
    return json{{"n_fog", c.n_fog},     {"a_max", c.a_max},     {"l_max", c.l_max},   {"w_max", c.w_max},
                {"r_min", c.r_min},     {"f_min", c.f_min},     {"rho_max", c.rho_max}, {"phi_max", c.phi_max},
                {"eta_max", c.eta_max}, {"kappa_max", c.kappa_max}};
}

json to_json(const RunConfig& config) {
    const EnvironmentParams& env = config.environment;
    json doc;
    doc["n_fog"] = env.n_fog;
    doc["n_accessible"] = env.n_accessible;
    json arrivals{{"kind", env.arrivals.kind == ArrivalSpec::Kind::Fixed ? "fixed" : "poisson"},
                  {"count", env.arrivals.count}};
    if (env.arrivals.kind == ArrivalSpec::Kind::Poisson) arrivals["mean"] = env.arrivals.mean;
    doc["arrivals"] = arrivals;
    doc["task_size"] = {{"low", env.task_size.low}, {"high", env.task_size.high}, {"intensity", env.task_size.intensity}};
    const MetaDistributions& m = env.meta;
    doc["meta"] = {{"fog_rate_low", range_json(m.fog_rate_low)},   {"fog_rate_high", range_json(m.fog_rate_high)},
                   {"fog_freq_low", range_json(m.fog_freq_low)},   {"fog_freq_high", range_json(m.fog_freq_high)},
                   {"device_freq", range_json(m.device_freq)},     {"device_kappa", range_json(m.device_kappa)},
                   {"fog_kappa", range_json(m.fog_kappa)},         {"fog_eta", range_json(m.fog_eta)},
                   {"budget", m.budget}};
    doc["coefficients"] = env.coefficients == CoefficientMode::PerSlot ? "per_slot" : "per_node";
    if (!env.profiles.empty()) {
        json profiles = json::array();
        for (const NodeProfile& p : env.profiles) {
            json item{{"id", p.id}, {"freq", range_json(p.freq)}, {"kappa", range_json(p.kappa)}, {"budget", p.budget}};
            if (p.rate) item["rate"] = range_json(*p.rate);
            if (p.eta) item["eta"] = range_json(*p.eta);
            profiles.push_back(item);
        }
        doc["profiles"] = profiles;
    }
    if (config.constants) doc["constants"] = to_json(*config.constants);
    doc["strategy"] = std::string(to_string(config.strategy.kind));
    doc["epsilon"] = config.strategy.epsilon;
    doc["v"] = config.v;
    doc["horizon"] = config.horizon;
    doc["seed"] = config.seed;
    doc["checkpoint_every"] = config.checkpoint_every;
    doc["out"] = config.out_dir;
    return doc;
}

json to_json(const RunSummary& s) {
    return json{{"slots", s.slots},
                {"tasks", s.tasks},
                {"avg_task_latency", s.avg_task_latency},
                {"avg_expected_task_latency", s.avg_expected_task_latency},
                {"total_energy", s.total_energy},
                {"avg_energy", s.avg_energy},
                {"max_energy_ratio", s.max_energy_ratio},
                {"violations", s.violations},
                {"regret_expected", s.regret_expected},
                {"regret_realized", s.regret_realized},
                {"avg_backlog", s.avg_backlog},
                {"final_backlog", s.final_backlog}};
}

json to_json(const BoundConstants& b) {
    return json{{"B", b.b}, {"theta1", b.theta1}, {"theta2", b.theta2}, {"regret_bound", b.regret_bound}};
}

json to_json(const SimulationState& state) {
    const LearnerState& l = state.learner;
    return json{
        {"environment",
         {{"next_t", state.environment.next_t},
          {"subsets", state.environment.subsets},
          {"tasks", state.environment.tasks},
          {"rates", state.environment.rates},
          {"frequencies", state.environment.frequencies},
          {"coefficients", state.environment.coefficients}}},
        {"learner",
         {{"strategy", std::string(to_string(l.strategy.kind))},
          {"epsilon", l.strategy.epsilon},
          {"counts", l.counts},
          {"mean_rho", l.mean_rho},
          {"mean_phi", l.mean_phi},
          {"sq_rho", l.sq_rho},
          {"sq_phi", l.sq_phi}}},
        {"queues", {{"backlog", state.queues.backlog}, {"budget", state.queues.budget}}},
        {"ledger",
         {{"last", state.ledger.last},
          {"cumulative", state.ledger.cumulative},
          {"slots_elapsed", state.ledger.slots_elapsed}}},
        {"exploration", state.exploration},
    };
}

SimulationState simulation_state_from_json(const json& doc) {
    try {
        SimulationState s;
        const json& env = doc.at("environment");
        s.environment.next_t = env.at("next_t").get<std::uint64_t>();
        s.environment.subsets = env.at("subsets").get<std::string>();
        s.environment.tasks = env.at("tasks").get<std::string>();
        s.environment.rates = env.at("rates").get<std::string>();
        s.environment.frequencies = env.at("frequencies").get<std::string>();
        s.environment.coefficients = env.at("coefficients").get<std::string>();
        const json& l = doc.at("learner");
        auto strategy = parse_strategy(l.at("strategy").get<std::string>());
        if (!strategy) throw ConfigError({"state: unknown strategy"});
        s.learner.strategy = StrategySpec{*strategy, l.at("epsilon").get<double>()};
        s.learner.counts = l.at("counts").get<std::vector<std::uint64_t>>();
        s.learner.mean_rho = l.at("mean_rho").get<std::vector<double>>();
        s.learner.mean_phi = l.at("mean_phi").get<std::vector<double>>();
        s.learner.sq_rho = l.at("sq_rho").get<std::vector<double>>();
        s.learner.sq_phi = l.at("sq_phi").get<std::vector<double>>();
        s.queues.backlog = doc.at("queues").at("backlog").get<std::vector<double>>();
        s.queues.budget = doc.at("queues").at("budget").get<std::vector<double>>();
        s.ledger.last = doc.at("ledger").at("last").get<std::vector<double>>();
        s.ledger.cumulative = doc.at("ledger").at("cumulative").get<std::vector<double>>();
        s.ledger.slots_elapsed = doc.at("ledger").at("slots_elapsed").get<std::uint64_t>();
        s.exploration = doc.at("exploration").get<std::string>();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError({std::string("malformed state document: ") + e.what()});
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
}

}  // namespace lago
