#include "survival/config.hpp"

#include "survival/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace survival {

namespace {

using nlohmann::json;

// Object view that remembers which keys were consumed so that leftovers can
// be reported as unknown.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + ": required number missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        return v.get<double>();
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError(where(key) + ": required string missing");
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }

    const json* raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback)
    {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key, std::vector<int> fallback)
    {
        const json* v = raw(key);
        if (!v) return fallback;
        if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of integers");
        std::vector<int> out;
        for (const auto& e : *v) {
            if (!e.is_number_integer()) throw ConfigError(where(key) + ": expected an array of integers");
            out.push_back(e.get<int>());
        }
        return out;
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Scheme parse_scheme(const std::string& s, const std::string& where)
{
    if (s == "upwind-auto") return Scheme::upwind_auto;
    if (s == "central") return Scheme::central;
    throw ConfigError(where + ": expected \"upwind-auto\" or \"central\"");
}

void parse_model(Block b, RunConfig& cfg)
{
    cfg.model.a = b.number("a");
    cfg.model.sigma = b.number("sigma");
    cfg.model.c = b.number("c");
    cfg.model.lambda = b.number("lambda");
    b.finish();
}

void parse_jumps(Block b, RunConfig& cfg)
{
    const std::string type = b.string("type");
    auto& j = cfg.jumps;
    if (type == "exponential") {
        j.type = JumpSpec::Type::exponential;
        j.rate = b.number("rate", 1.0);
    } else if (type == "gamma") {
        j.type = JumpSpec::Type::gamma;
        j.shape = b.number("shape");
        j.scale = b.number("scale");
    } else if (type == "empirical") {
        j.type = JumpSpec::Type::empirical;
        const json* pts = b.raw("points");
        if (!pts || !pts->is_array() || pts->empty())
            throw ConfigError(b.where("points") + ": expected a non-empty array of [value, probability]");
        for (const auto& p : *pts) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError(b.where("points") + ": each entry must be [value, probability]");
            j.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    } else {
        throw ConfigError(b.where("type") + ": expected \"exponential\", \"gamma\" or \"empirical\"");
    }
    b.finish();
}

void parse_grid(Block b, RunConfig& cfg)
{
    auto& g = cfg.grid;
    g.u_max = b.number("u_max", g.u_max);
    g.n = static_cast<int>(b.integer("n", g.n));
    g.stretch = b.number("stretch", g.stretch);
    g.cluster_at_drift_root = b.boolean("cluster_at_drift_root", g.cluster_at_drift_root);
    b.finish();
}

void parse_solver(Block b, RunConfig& cfg)
{
    auto& s = cfg.solver;
    const std::string method = b.string("method", "direct");
    if (method == "direct") s.method = Method::direct;
    else if (method == "picard") s.method = Method::picard;
    else throw ConfigError(b.where("method") + ": expected \"direct\" or \"picard\"");
    s.tol = b.number("tol", s.tol);
    s.max_iter = static_cast<int>(b.integer("max_iter", s.max_iter));
    s.umax_factor = b.number("umax_factor", s.umax_factor);
    s.umax_tol = b.number("umax_tol", s.umax_tol);
    s.max_extensions = static_cast<int>(b.integer("max_extensions", s.max_extensions));
    s.scheme = parse_scheme(b.string("scheme", "upwind-auto"), b.where("scheme"));
    cfg.adaptive = b.boolean("adaptive", cfg.adaptive);
    b.finish();
}

void parse_sim(Block b, RunConfig& cfg)
{
    auto& s = cfg.sim;
    s.dt = b.number("dt", s.dt);
    s.n_paths = b.integer("n_paths", s.n_paths);
    s.t_max = b.number("t_max", s.t_max);
    if (const json* barrier = b.raw("barrier")) {
        if (barrier->is_string() && barrier->get<std::string>() == "auto") {
            cfg.barrier_auto = true;
        } else if (barrier->is_number()) {
            cfg.barrier_auto = false;
            s.barrier = barrier->get<double>();
        } else {
            throw ConfigError(b.where("barrier") + ": expected a number or \"auto\"");
        }
    }
    cfg.barrier_slack = b.number("barrier_slack", cfg.barrier_slack);
    const std::int64_t seed = b.integer("seed", static_cast<std::int64_t>(s.seed));
    if (seed < 0) throw ConfigError(b.where("seed") + ": must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
    s.bridge_correction = b.boolean("bridge_correction", s.bridge_correction);
    s.threads = static_cast<int>(b.integer("threads", s.threads));
    b.finish();
}

void parse_validation(Block b, RunConfig& cfg)
{
    auto& v = cfg.validation;
    v.u_list = b.numbers("u_list", v.u_list);
    v.allowance = b.number("allowance", v.allowance);
    v.dpp_u = b.number("dpp_u", v.dpp_u);
    v.dpp_t = b.number("dpp_t", v.dpp_t);
    v.comparison_trials = static_cast<int>(b.integer("comparison_trials", v.comparison_trials));
    v.uniqueness_starts = static_cast<int>(b.integer("uniqueness_starts", v.uniqueness_starts));
    v.lemma1_samples = b.integer("lemma1_samples", v.lemma1_samples);
    v.consistency_n = b.integers("consistency_n", v.consistency_n);
    v.consistency_u_max = b.number("consistency_u_max", v.consistency_u_max);
    const auto probe = b.numbers("consistency_probe", {v.consistency_probe_lo, v.consistency_probe_hi});
    if (probe.size() != 2 || !(probe[0] < probe[1]))
        throw ConfigError(b.where("consistency_probe") + ": expected [lo, hi] with lo < hi");
    v.consistency_probe_lo = probe[0];
    v.consistency_probe_hi = probe[1];
    v.consistency_min_order = b.number("consistency_min_order", v.consistency_min_order);
    v.parameter_trends = b.boolean("parameter_trends", v.parameter_trends);
    b.finish();
    if (!(v.allowance >= 0.0)) throw ConfigError(b.where("allowance") + ": must be >= 0");
    if (v.comparison_trials < 1) throw ConfigError(b.where("comparison_trials") + ": must be >= 1");
    if (v.uniqueness_starts < 1) throw ConfigError(b.where("uniqueness_starts") + ": must be >= 1");
    if (v.lemma1_samples < 1) throw ConfigError(b.where("lemma1_samples") + ": must be >= 1");
    if (!(v.dpp_u > 0.0)) throw ConfigError(b.where("dpp_u") + ": must be > 0");
    if (!(v.dpp_t >= 0.0)) throw ConfigError(b.where("dpp_t") + ": must be >= 0");
    for (double u : v.u_list)
        if (!(u > 0.0)) throw ConfigError(b.where("u_list") + ": entries must be > 0");
}

void parse_convergence(Block b, RunConfig& cfg)
{
    auto& c = cfg.convergence;
    const std::string fn = b.string("test_function", "exp_decay");
    if (fn == "exp_decay") c.test_function = ConvergenceSpec::TestFn::exp_decay;
    else if (fn == "constant") c.test_function = ConvergenceSpec::TestFn::constant;
    else throw ConfigError(b.where("test_function") + ": expected \"exp_decay\" or \"constant\"");
    c.n_list = b.integers("n_list", c.n_list);
    c.u_max = b.number("u_max", c.u_max);
    const auto probe = b.numbers("probe", {c.probe_lo, c.probe_hi});
    if (probe.size() != 2 || !(probe[0] < probe[1]))
        throw ConfigError(b.where("probe") + ": expected [lo, hi] with lo < hi");
    c.probe_lo = probe[0];
    c.probe_hi = probe[1];
    c.scheme = parse_scheme(b.string("scheme", "upwind-auto"), b.where("scheme"));
    b.finish();
}

void parse_output(Block b, RunConfig& cfg)
{
    cfg.output.diagnostics = b.string("diagnostics", "");
    cfg.output.paths_csv = b.string("paths_csv", "");
    cfg.output.operator_csv = b.string("operator_csv", "");
    b.finish();
}

} // namespace

JumpDistribution JumpSpec::build() const
{
    switch (type) {
    case Type::exponential: return make_exponential(rate);
    case Type::gamma: return make_gamma(shape, scale);
    case Type::empirical: return make_empirical(points);
    }
    throw ConfigError("jumps: unknown type");
}

RunConfig parse_run_config(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig cfg;
    Block top(root, "config");
    if (!top.has("model")) throw ConfigError("config.model: required block missing");
    if (!top.has("jumps")) throw ConfigError("config.jumps: required block missing");
    parse_model(Block(*top.raw("model"), "config.model"), cfg);
    parse_jumps(Block(*top.raw("jumps"), "config.jumps"), cfg);
    if (const json* g = top.raw("grid")) parse_grid(Block(*g, "config.grid"), cfg);
    if (const json* s = top.raw("solver")) parse_solver(Block(*s, "config.solver"), cfg);
    if (const json* s = top.raw("sim")) parse_sim(Block(*s, "config.sim"), cfg);
    if (const json* v = top.raw("validation")) parse_validation(Block(*v, "config.validation"), cfg);
    if (const json* c = top.raw("convergence")) parse_convergence(Block(*c, "config.convergence"), cfg);
    if (const json* o = top.raw("output")) parse_output(Block(*o, "config.output"), cfg);
    top.finish();

    try {
        (void)cfg.model.build();
        (void)cfg.jumps.build();
        (void)cfg.grid.build(cfg.model.build());
        cfg.solver.validate();
        cfg.sim.validate();
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
    if (!(cfg.barrier_slack > 0.0 && cfg.barrier_slack < 1.0))
        throw ConfigError("config.sim.barrier_slack: must lie in (0, 1)");

    cfg.validation.solver = cfg.solver;
    cfg.validation.grid = cfg.grid;
    cfg.validation.sim = cfg.sim;
    cfg.validation.informed_barrier = cfg.barrier_auto;
    cfg.validation.barrier_slack = cfg.barrier_slack;
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace survival
