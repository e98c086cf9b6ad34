#include "nlscat/config.hpp"

#include <cmath>
#include <set>

#include "nlscat/errors.hpp"
#include "nlscat/io.hpp"

namespace nlscat {

using nlohmann::json;

namespace {

// Object reader that records the keys it consumed so leftovers can be reported.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key)) {
            if (!def) {
                throw ConfigError(at(key) + ": missing required field");
            }
            return *def;
        }
        const json& v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError(at(key) + ": expected a number");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw ConfigError(at(key) + ": must be finite");
        }
        return x;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) {
            return std::nullopt;
        }
        return number(key);
    }

    int integer(const std::string& key, std::optional<int> def = std::nullopt) {
        if (!has(key)) {
            if (!def) {
                throw ConfigError(at(key) + ": missing required field");
            }
            return *def;
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(at(key) + ": expected an integer");
        }
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(at(key) + ": expected true or false");
        }
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& def) {
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError(at(key) + ": expected a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> def) {
        if (!has(key)) {
            return def;
        }
        const json& v = j_.at(key);
        if (!v.is_array()) {
            throw ConfigError(at(key) + ": expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                throw ConfigError(at(key) + "[" + std::to_string(i) + "]: expected a number");
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) {
                throw ConfigError(at(k) + ": unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

const json kEmpty = json::object();

const json& section(const json& root, const char* key) {
    if (root.contains(key) && !root.at(key).is_null()) {
        return root.at(key);
    }
    return kEmpty;
}

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) {
        throw ConfigError(path + ": " + what);
    }
}

DensitySpec parse_density(const json& j, const std::string& path) {
    Reader r(j, path);
    DensitySpec d;
    d.kind = r.string("kind", "random");
    d.directions = r.integer("directions", 64);
    require(d.directions >= 4, r.at("directions"), "need at least 4 directions");
    if (r.has("value")) {
        d.value = io::parse_complex(r.raw("value"), r.at("value"));
    }
    if (r.has("values")) {
        const json& v = r.raw("values");
        require(v.is_array(), r.at("values"), "expected an array of density arrays");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = r.at("values") + "[" + std::to_string(i) + "]";
            CVector c = io::parse_complex_array(v[i], p);
            require(static_cast<int>(c.size()) == d.directions, p, "length must equal directions");
            d.values.push_back(std::move(c));
        }
    }
    require(d.kind == "random" || d.kind == "constant" || d.kind == "values", r.at("kind"),
            "must be random, constant or values");
    if (d.kind == "values") {
        require(!d.values.empty(), r.at("values"), "required when kind is values");
    }
    r.finish();
    return d;
}

json density_json(const DensitySpec& d) {
    json j = {{"kind", d.kind}, {"directions", d.directions}, {"value", json::array({d.value.real(), d.value.imag()})}};
    json vals = json::array();
    for (const auto& v : d.values) {
        vals.push_back(io::complex_array(v));
    }
    j["values"] = vals;
    return j;
}

Profile parse_profile(const json& j, const std::string& path, int d) {
    Reader r(j, path);
    Profile p;
    const std::string kind = r.string("kind", "gaussian");
    if (kind == "gaussian") {
        p.kind = Profile::Kind::Gaussian;
    } else if (kind == "disk") {
        p.kind = Profile::Kind::Disk;
    } else if (kind == "polynomial") {
        p.kind = Profile::Kind::Polynomial;
    } else {
        throw ConfigError(r.at("kind") + ": must be gaussian, disk or polynomial");
    }
    if (r.has("amplitude")) {
        p.amplitude = io::parse_complex(r.raw("amplitude"), r.at("amplitude"));
    }
    const auto c = r.numbers("center", std::vector<double>(static_cast<std::size_t>(d), 0.0));
    require(c.size() == static_cast<std::size_t>(d), r.at("center"), "expected " + std::to_string(d) + " coordinates");
    for (int a = 0; a < d; ++a) {
        p.center[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)];
    }
    p.width = r.number("width", 0.25);
    require(p.width > 0.0, r.at("width"), "must be positive");
    if (r.has("terms")) {
        const json& t = r.raw("terms");
        require(t.is_array(), r.at("terms"), "expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            Reader tr(t[i], r.at("terms") + "[" + std::to_string(i) + "]");
            Profile::Term term;
            const auto pw = tr.numbers("powers", {});
            require(pw.size() == static_cast<std::size_t>(d), tr.at("powers"),
                    "expected " + std::to_string(d) + " exponents");
            for (int a = 0; a < d; ++a) {
                const double e = pw[static_cast<std::size_t>(a)];
                require(e >= 0.0 && e == std::floor(e), tr.at("powers"), "exponents must be non-negative integers");
                term.powers[static_cast<std::size_t>(a)] = static_cast<int>(e);
            }
            term.value = tr.has("value") ? io::parse_complex(tr.raw("value"), tr.at("value")) : cplx{1.0, 0.0};
            tr.finish();
            p.terms.push_back(term);
        }
    }
    require(p.kind != Profile::Kind::Polynomial || !p.terms.empty(), r.at("terms"),
            "required for polynomial profiles");
    r.finish();
    return p;
}

json profile_json(const Profile& p, int d) {
    const char* kind = p.kind == Profile::Kind::Gaussian ? "gaussian" : p.kind == Profile::Kind::Disk ? "disk" : "polynomial";
    json c = json::array();
    for (int a = 0; a < d; ++a) {
        c.push_back(p.center[static_cast<std::size_t>(a)]);
    }
    json terms = json::array();
    for (const auto& t : p.terms) {
        json pw = json::array();
        for (int a = 0; a < d; ++a) {
            pw.push_back(t.powers[static_cast<std::size_t>(a)]);
        }
        terms.push_back({{"powers", pw}, {"value", json::array({t.value.real(), t.value.imag()})}});
    }
    return {{"kind", kind},
            {"amplitude", json::array({p.amplitude.real(), p.amplitude.imag()})},
            {"center", c},
            {"width", p.width},
            {"terms", terms}};
}

std::vector<HerglotzDensity> build_densities(const DensitySpec& spec, int count, int d, std::uint64_t seed) {
    auto dirs = DirectionSet::build(spec.directions, d);
    const auto m = static_cast<Eigen::Index>(dirs->size());
    std::vector<HerglotzDensity> out;
    if (spec.kind == "values") {
        if (static_cast<int>(spec.values.size()) < count) {
            throw ConfigError("densities.values: " + std::to_string(count) + " densities needed, " +
                              std::to_string(spec.values.size()) + " given");
        }
        for (int i = 0; i < count; ++i) {
            out.emplace_back(dirs, spec.values[static_cast<std::size_t>(i)]);
        }
        return out;
    }
    if (spec.kind == "constant") {
        for (int i = 0; i < count; ++i) {
            out.push_back(HerglotzDensity::constant(dirs, spec.value));
        }
        return out;
    }
    SeededUniform rng(seed);
    for (int i = 0; i < count; ++i) {
        CVector v(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double re = rng.next();
            const double im = rng.next();
            v[j] = cplx(re, im);
        }
        const double s = v.cwiseAbs().maxCoeff();
        out.emplace_back(dirs, v / s);
    }
    return out;
}

}  // namespace

SeededUniform::SeededUniform(std::uint64_t seed) : engine_(seed) {}

double SeededUniform::next() {
    // 53 random bits mapped to [0, 1), then to [-1, 1).
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

RunConfig parse_config(const json& root) {
    if (!root.is_object()) {
        throw ConfigError("config: expected a JSON object at the top level");
    }
    {
        const std::set<std::string> known{"wave", "grid", "model", "plan", "forward", "synth", "inverse", "io"};
        for (const auto& [k, v] : root.items()) {
            if (!known.count(k)) {
                throw ConfigError(k + ": unknown field");
            }
        }
    }
    RunConfig c;
    {
        Reader r(section(root, "wave"), "wave");
        c.wave.k = r.number("k");
        require(c.wave.k > 0.0, "wave.k", "must be positive");
        c.wave.d = r.integer("d", 2);
        require(c.wave.d == 2 || c.wave.d == 3, "wave.d", "must be 2 or 3");
        r.finish();
    }
    {
        Reader r(section(root, "grid"), "grid");
        c.grid.R = r.number("R", 1.0);
        require(c.grid.R > 0.0, "grid.R", "must be positive");
        c.grid.n = r.integer("n", 48);
        require(c.grid.n >= 8, "grid.n", "must be at least 8");
        r.finish();
    }
    {
        Reader r(section(root, "model"), "model");
        c.model.c0 = r.number("c0", 1.0);
        require(c.model.c0 > 0.0, "model.c0", "must be positive");
        c.model.eta = r.optional_number("eta");
        require(!c.model.eta || *c.model.eta > 0.0, "model.eta", "must be positive");
        c.model.support_radius = r.optional_number("support_radius");
        require(!c.model.support_radius || *c.model.support_radius > 0.0, "model.support_radius", "must be positive");
        int highest = 1;
        if (r.has("derivatives")) {
            const json& arr = r.raw("derivatives");
            require(arr.is_array(), "model.derivatives", "expected an array");
            std::set<int> orders;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string p = "model.derivatives[" + std::to_string(i) + "]";
                Reader dr(arr[i], p);
                DerivativeSpec ds;
                ds.order = dr.integer("order");
                require(ds.order >= 1, dr.at("order"), "must be at least 1");
                require(orders.insert(ds.order).second, dr.at("order"), "duplicate order");
                if (dr.has("profiles")) {
                    const json& pa = dr.raw("profiles");
                    require(pa.is_array(), dr.at("profiles"), "expected an array");
                    for (std::size_t k = 0; k < pa.size(); ++k) {
                        ds.profiles.push_back(parse_profile(pa[k], dr.at("profiles") + "[" + std::to_string(k) + "]", c.wave.d));
                    }
                }
                if (dr.has("values")) {
                    ds.values = io::parse_complex_array(dr.raw("values"), dr.at("values"));
                }
                require(ds.profiles.empty() || !ds.values, p, "give either profiles or values, not both");
                dr.finish();
                highest = std::max(highest, ds.order);
                c.model.derivatives.push_back(std::move(ds));
            }
        }
        c.model.L = r.integer("L", highest);
        require(c.model.L >= highest, "model.L", "must cover every listed derivative order");
        r.finish();
    }
    {
        Reader r(section(root, "plan"), "plan");
        c.plan.N = r.integer("N", 0);
        require(c.plan.N >= 0, "plan.N", "must be non-negative");
        c.plan.delta = r.number("delta", 0.05);
        require(c.plan.delta > 0.0, "plan.delta", "must be positive");
        c.plan.densities = r.has("densities") ? parse_density(r.raw("densities"), "plan.densities") : DensitySpec{};
        c.plan.eps_ladder = r.numbers("eps_ladder", ExperimentPlan::default_ladder(c.plan.delta));
        c.plan.obs = r.integer("obs", 64);
        require(c.plan.obs >= 4, "plan.obs", "need at least 4 observation directions");
        c.plan.fd_scheme = r.integer("fd_scheme", 1);
        require(c.plan.fd_scheme == 1 || c.plan.fd_scheme == 2, "plan.fd_scheme", "must be 1 or 2");
        c.plan.max_order = r.integer("max_order", std::min(c.model.L, c.plan.N + 1));
        require(c.plan.max_order >= 1 && c.plan.max_order <= c.plan.N + 1, "plan.max_order", "must lie in 1..N+1");
        r.finish();
    }
    {
        Reader r(section(root, "forward"), "forward");
        c.forward.density = r.has("density") ? parse_density(r.raw("density"), "forward.density") : DensitySpec{};
        c.forward.sup = r.optional_number("sup");
        require(!c.forward.sup || *c.forward.sup >= 0.0, "forward.sup", "must be non-negative");
        c.forward.delta0 = r.number("delta0", 0.1);
        c.forward.tol = r.number("tol", 1e-10);
        require(c.forward.tol >= 0.0, "forward.tol", "must be non-negative");
        c.forward.max_iter = r.integer("max_iter", 200);
        require(c.forward.max_iter >= 1, "forward.max_iter", "must be at least 1");
        const int dl = r.integer("dense_limit", static_cast<int>(PotentialOperator::kDefaultDenseLimit));
        require(dl >= 1, "forward.dense_limit", "must be positive");
        c.forward.dense_limit = static_cast<std::size_t>(dl);
        r.finish();
    }
    {
        Reader r(section(root, "synth"), "synth");
        c.synth.rel_tol = r.number("rel_tol", 1e-14);
        require(c.synth.rel_tol >= 0.0, "synth.rel_tol", "must be non-negative");
        c.synth.max_iter = r.integer("max_iter", 500);
        require(c.synth.max_iter >= 1, "synth.max_iter", "must be at least 1");
        r.finish();
    }
    {
        Reader r(section(root, "inverse"), "inverse");
        c.inverse.L = r.integer("L", c.plan.max_order);
        require(c.inverse.L >= 1, "inverse.L", "must be at least 1");
        c.inverse.lambda_schedule = r.numbers("lambda_schedule", {1e-8});
        require(!c.inverse.lambda_schedule.empty(), "inverse.lambda_schedule", "must not be empty");
        for (std::size_t i = 0; i < c.inverse.lambda_schedule.size(); ++i) {
            require(c.inverse.lambda_schedule[i] > 0.0, "inverse.lambda_schedule[" + std::to_string(i) + "]",
                    "must be positive");
        }
        c.inverse.max_outer = r.integer("max_outer", 20);
        require(c.inverse.max_outer >= 1, "inverse.max_outer", "must be at least 1");
        c.inverse.outer_tol = r.number("outer_tol", 1e-4);
        c.inverse.discrepancy = r.boolean("discrepancy", false);
        c.inverse.tau = r.number("tau", 1.5);
        c.inverse.grid_mode = r.string("grid_mode", "same");
        require(c.inverse.grid_mode == "same" || c.inverse.grid_mode == "coarse", "inverse.grid_mode",
                "must be same or coarse");
        c.inverse.n = r.integer("n", c.inverse.grid_mode == "coarse" ? std::max(8, c.grid.n / 2) : c.grid.n);
        require(c.inverse.n >= 8, "inverse.n", "must be at least 8");
        if (r.has("probe_schedule")) {
            c.inverse.probe_schedule.clear();
            for (double m : r.numbers("probe_schedule", {})) {
                require(m >= 4 && m == std::floor(m), "inverse.probe_schedule", "entries must be integers >= 4");
                c.inverse.probe_schedule.push_back(static_cast<int>(m));
            }
        }
        r.finish();
    }
    {
        Reader r(section(root, "io"), "io");
        c.io.output = r.string("output", "out");
        if (r.has("seed")) {
            const json& s = r.raw("seed");
            require(s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0), "io.seed",
                    "expected a non-negative integer");
            c.io.seed = s.get<std::uint64_t>();
        }
        r.finish();
    }
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(io::read_json(path)); }

json effective_config(const RunConfig& c) {
    json derivs = json::array();
    for (const auto& ds : c.model.derivatives) {
        json e = {{"order", ds.order}};
        if (ds.values) {
            e["values"] = io::complex_array(*ds.values);
        } else {
            json ps = json::array();
            for (const auto& p : ds.profiles) {
                ps.push_back(profile_json(p, c.wave.d));
            }
            e["profiles"] = ps;
        }
        derivs.push_back(e);
    }
    const double eta = c.model.eta ? *c.model.eta : 1.0 / (2.0 * c.model.c0);
    return {
        {"wave", {{"k", c.wave.k}, {"d", c.wave.d}}},
        {"grid", {{"R", c.grid.R}, {"n", c.grid.n}}},
        {"model",
         {{"c0", c.model.c0},
          {"eta", eta},
          {"support_radius", c.model.support_radius ? *c.model.support_radius : c.grid.R},
          {"L", c.model.L},
          {"derivatives", derivs}}},
        {"plan",
         {{"N", c.plan.N},
          {"delta", c.plan.delta},
          {"densities", density_json(c.plan.densities)},
          {"eps_ladder", c.plan.eps_ladder},
          {"obs", c.plan.obs},
          {"fd_scheme", c.plan.fd_scheme},
          {"max_order", c.plan.max_order}}},
        {"forward",
         {{"density", density_json(c.forward.density)},
          {"sup", c.forward.sup ? *c.forward.sup : 0.9 * c.plan.delta * c.plan.delta},
          {"delta0", c.forward.delta0},
          {"tol", c.forward.tol},
          {"max_iter", c.forward.max_iter},
          {"dense_limit", c.forward.dense_limit}}},
        {"synth", {{"rel_tol", c.synth.rel_tol}, {"max_iter", c.synth.max_iter}}},
        {"inverse",
         {{"L", c.inverse.L},
          {"lambda_schedule", c.inverse.lambda_schedule},
          {"max_outer", c.inverse.max_outer},
          {"outer_tol", c.inverse.outer_tol},
          {"discrepancy", c.inverse.discrepancy},
          {"tau", c.inverse.tau},
          {"grid_mode", c.inverse.grid_mode},
          {"n", c.inverse.n},
          {"probe_schedule", c.inverse.probe_schedule}}},
        {"io", {{"output", c.io.output}, {"seed", c.io.seed}}},
    };
}

GridPtr make_grid(const RunConfig& cfg) {
    try {
        return DiskGrid::build(cfg.grid.R, cfg.grid.n, cfg.wave.d);
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

GridPtr make_inverse_grid(const RunConfig& cfg) {
    try {
        return DiskGrid::build(cfg.grid.R, cfg.inverse.n, cfg.wave.d);
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("inverse.n: ") + e.what());
    }
}

NonlinearityModel make_model(const RunConfig& cfg, const GridPtr& grid) {
    std::vector<ComplexField> d;
    for (int l = 1; l <= cfg.model.L; ++l) {
        d.push_back(ComplexField::zeros(grid));
    }
    for (std::size_t i = 0; i < cfg.model.derivatives.size(); ++i) {
        const auto& ds = cfg.model.derivatives[i];
        const std::string p = "model.derivatives[" + std::to_string(i) + "]";
        if (ds.values) {
            if (static_cast<std::size_t>(ds.values->size()) != grid->size()) {
                throw ConfigError(p + ".values: " + std::to_string(ds.values->size()) + " values for " +
                                  std::to_string(grid->size()) + " grid nodes");
            }
            d[static_cast<std::size_t>(ds.order - 1)] = ComplexField(grid, *ds.values);
        } else {
            d[static_cast<std::size_t>(ds.order - 1)] = sample_profiles(grid, ds.profiles);
        }
    }
    try {
        return NonlinearityModel::from_derivatives(std::move(d), cfg.model.c0, cfg.model.eta, cfg.model.support_radius);
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

std::shared_ptr<ExperimentPlan> make_plan(const RunConfig& cfg) {
    auto plan = std::make_shared<ExperimentPlan>();
    plan->densities = build_densities(cfg.plan.densities, cfg.plan.N + 1, cfg.wave.d, cfg.io.seed);
    plan->delta = cfg.plan.delta;
    plan->eps_ladder = cfg.plan.eps_ladder;
    plan->obs = DirectionSet::build(cfg.plan.obs, cfg.wave.d);
    plan->fd_scheme = cfg.plan.fd_scheme;
    plan->max_order = cfg.plan.max_order;
    try {
        plan->validate();
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("plan: ") + e.what());
    }
    return plan;
}

HerglotzDensity make_forward_density(const RunConfig& cfg) {
    HerglotzDensity g = build_densities(cfg.forward.density, 1, cfg.wave.d, cfg.io.seed + 1).front();
    const bool explicit_values = cfg.forward.density.kind == "values";
    if (explicit_values && !cfg.forward.sup) {
        return g;
    }
    const double target = cfg.forward.sup ? *cfg.forward.sup : 0.9 * cfg.plan.delta * cfg.plan.delta;
    return g.norm_sup() > 0.0 ? g.scaled(target / g.norm_sup()) : g;
}

ForwardOptions forward_options(const RunConfig& cfg) {
    ForwardOptions o;
    o.delta = cfg.plan.delta;
    o.delta0 = cfg.forward.delta0;
    o.tol = cfg.forward.tol;
    o.max_iter = cfg.forward.max_iter;
    return o;
}

SynthesisOptions synthesis_options(const RunConfig& cfg) {
    SynthesisOptions o = default_synthesis_options();
    o.forward.delta0 = cfg.forward.delta0;
    o.forward.rel_tol = cfg.synth.rel_tol;
    o.forward.max_iter = cfg.synth.max_iter;
    return o;
}

InverseOptions inverse_options(const RunConfig& cfg) {
    InverseOptions o;
    o.lambda_schedule = cfg.inverse.lambda_schedule;
    o.max_outer = cfg.inverse.max_outer;
    o.outer_tol = cfg.inverse.outer_tol;
    o.discrepancy = cfg.inverse.discrepancy;
    o.tau = cfg.inverse.tau;
    o.support_radius = cfg.model.support_radius;
    o.surrogate = synthesis_options(cfg);
    return o;
}

}  // namespace nlscat
