#include "nlscat/io.hpp"

#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nlscat/errors.hpp"

namespace nlscat::io {
namespace {

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ConfigError(path + ": expected a number");
    }
    return j.get<double>();
}

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(path + "." + key + ": missing required field");
    }
    return j.at(key);
}

}  // namespace

json complex_array(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(json::array({v[i].real(), v[i].imag()}));
    }
    return a;
}

cplx parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2) {
        return {number_at(j[0], path + "[0]"), number_at(j[1], path + "[1]")};
    }
    throw ConfigError(path + ": expected a number or [re, im]");
}

CVector parse_complex_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
        throw ConfigError(path + ": expected an array of [re, im] pairs");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parse_complex(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

json points_array(const std::vector<Point>& pts, int d) {
    json a = json::array();
    for (const auto& p : pts) {
        json q = json::array();
        for (int k = 0; k < d; ++k) {
            q.push_back(p[static_cast<std::size_t>(k)]);
        }
        a.push_back(q);
    }
    return a;
}

std::vector<Point> parse_points(const json& j, int d, const std::string& path) {
    if (!j.is_array()) {
        throw ConfigError(path + ": expected an array of points");
    }
    std::vector<Point> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != static_cast<std::size_t>(d)) {
            throw ConfigError(p + ": expected " + std::to_string(d) + " coordinates");
        }
        Point pt{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) {
            pt[static_cast<std::size_t>(k)] = number_at(j[i][static_cast<std::size_t>(k)], p);
        }
        out.push_back(pt);
    }
    return out;
}

json directions_to_json(const DirectionSet& dirs) {
    return {{"d", dirs.dimension()}, {"directions", points_array(dirs.directions(), dirs.dimension())}};
}

DirectionsPtr directions_from_json(const json& j, const std::string& path) {
    const int d = static_cast<int>(number_at(member(j, "d", path), path + ".d"));
    if (d != 2 && d != 3) {
        throw ConfigError(path + ".d: dimension must be 2 or 3");
    }
    auto pts = parse_points(member(j, "directions", path), d, path + ".directions");
    try {
        return DirectionSet::from_directions(std::move(pts), d);
    } catch (const ConstructionError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json field_to_json(const ComplexField& f) {
    const DiskGrid& g = *f.grid();
    return {{"kind", "field"},
            {"grid", {{"R", g.radius()}, {"n", g.nodes_per_axis()}, {"d", g.dimension()}}},
            {"nodes", points_array(g.nodes(), g.dimension())},
            {"values", complex_array(f.values())}};
}

json farfield_to_json(const FarField& f) {
    json j = directions_to_json(*f.directions());
    j["kind"] = "farfield";
    j["values"] = complex_array(f.values());
    return j;
}

FarField farfield_from_json(const json& j, const std::string& path) {
    auto dirs = directions_from_json(j, path);
    CVector v = parse_complex_array(member(j, "values", path), path + ".values");
    if (static_cast<std::size_t>(v.size()) != dirs->size()) {
        throw ConfigError(path + ".values: length differs from the direction count");
    }
    return FarField(std::move(dirs), std::move(v));
}

std::string solve_report_text(const SolveReport& rep) {
    std::ostringstream s;
    s.precision(17);
    s << "iterations: " << rep.iterations << "\n";
    s << "residual_history:";
    for (double r : rep.residual_history) {
        s << ' ' << r;
    }
    s << "\n";
    s << "contraction_estimate: ";
    if (rep.contraction_estimate) {
        s << *rep.contraction_estimate;
    } else {
        s << "n/a";
    }
    s << "\n";
    s << "delta_used: " << rep.delta_used << "\n";
    s << "gate_margin: " << rep.gate_margin << "\n";
    s << "solution_sup: " << rep.solution_sup << "\n";
    return s.str();
}

json dataset_to_json(const ScatteringDataset& data, const WaveContext& ctx) {
    const ExperimentPlan& plan = *data.plan;
    json dens = json::array();
    for (const auto& g : plan.densities) {
        dens.push_back(complex_array(g.values()));
    }
    json failed = json::array();
    for (const auto& f : data.failed) {
        failed.push_back({{"key", f.key}, {"category", f.category}, {"message", f.message}});
    }
    json records = json::object();
    for (const auto& [idx, ff] : data.records) {
        records[format_eps_key(idx)] = complex_array(ff.values());
    }
    return {{"format", "nlscat-dataset-1"},
            {"header",
             {{"complete", data.complete},
              {"record_count", data.records.size()},
              {"required_count", data.required_count()},
              {"failed", failed},
              {"provenance", data.provenance}}},
            {"wave", {{"k", ctx.k}, {"d", ctx.d}}},
            {"plan",
             {{"delta", plan.delta},
              {"eps_ladder", plan.eps_ladder},
              {"fd_scheme", plan.fd_scheme},
              {"max_order", plan.max_order},
              {"obs", directions_to_json(*plan.obs)},
              {"density_directions", directions_to_json(*plan.densities.front().directions())},
              {"densities", dens}}},
            {"records", records}};
}

ScatteringDataset dataset_from_json(const json& j, WaveContext& ctx) {
    const std::string root = "dataset";
    if (!j.is_object() || j.value("format", "") != "nlscat-dataset-1") {
        throw ConfigError(root + ".format: not an nlscat dataset");
    }
    const json& wave = member(j, "wave", root);
    ctx.k = number_at(member(wave, "k", root + ".wave"), root + ".wave.k");
    ctx.d = static_cast<int>(number_at(member(wave, "d", root + ".wave"), root + ".wave.d"));
    try {
        ctx.validate();
    } catch (const ConstructionError& e) {
        throw ConfigError(root + ".wave: " + e.what());
    }

    const json& pj = member(j, "plan", root);
    const std::string pp = root + ".plan";
    auto plan = std::make_shared<ExperimentPlan>();
    plan->delta = number_at(member(pj, "delta", pp), pp + ".delta");
    const json& ladder = member(pj, "eps_ladder", pp);
    if (!ladder.is_array()) {
        throw ConfigError(pp + ".eps_ladder: expected an array");
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        plan->eps_ladder.push_back(number_at(ladder[i], pp + ".eps_ladder[" + std::to_string(i) + "]"));
    }
    plan->fd_scheme = static_cast<int>(number_at(member(pj, "fd_scheme", pp), pp + ".fd_scheme"));
    plan->max_order = static_cast<int>(number_at(member(pj, "max_order", pp), pp + ".max_order"));
    plan->obs = directions_from_json(member(pj, "obs", pp), pp + ".obs");
    auto ddirs = directions_from_json(member(pj, "density_directions", pp), pp + ".density_directions");
    const json& dens = member(pj, "densities", pp);
    if (!dens.is_array()) {
        throw ConfigError(pp + ".densities: expected an array");
    }
    for (std::size_t i = 0; i < dens.size(); ++i) {
        const std::string p = pp + ".densities[" + std::to_string(i) + "]";
        CVector v = parse_complex_array(dens[i], p);
        if (static_cast<std::size_t>(v.size()) != ddirs->size()) {
            throw ConfigError(p + ": length differs from the density direction count");
        }
        plan->densities.emplace_back(ddirs, std::move(v));
    }
    try {
        plan->validate();
    } catch (const ConstructionError& e) {
        throw ConfigError(pp + ": " + e.what());
    }

    ScatteringDataset data;
    data.plan = plan;
    const json& header = member(j, "header", root);
    data.complete = header.value("complete", true);
    data.provenance = header.value("provenance", std::string("measured"));
    if (header.contains("failed")) {
        for (const auto& f : header.at("failed")) {
            data.failed.push_back({f.value("key", ""), f.value("category", ""), f.value("message", "")});
        }
    }
    const json& recs = member(j, "records", root);
    if (!recs.is_object()) {
        throw ConfigError(root + ".records: expected an object keyed by eps:(...)");
    }
    for (const auto& [key, val] : recs.items()) {
        const std::string p = root + ".records[\"" + key + "\"]";
        EpsIndex idx;
        try {
            idx = parse_eps_key(key);
        } catch (const Error& e) {
            throw ConfigError(p + ": " + e.what());
        }
        if (idx.size() != plan->parameter_count()) {
            throw ConfigError(p + ": key length differs from the density count");
        }
        for (int s : idx) {
            if (s < 0 || s > static_cast<int>(plan->eps_ladder.size())) {
                throw ConfigError(p + ": ladder ordinal " + std::to_string(s) + " outside 0.." +
                                  std::to_string(plan->eps_ladder.size()));
            }
        }
        CVector v = parse_complex_array(val, p);
        if (static_cast<std::size_t>(v.size()) != plan->obs->size()) {
            throw ConfigError(p + ": length differs from the observation count");
        }
        data.records.emplace(std::move(idx), FarField(plan->obs, std::move(v)));
    }
    return data;
}

json reconstruction_to_json(const ReconstructionResult& res, const DiskGrid& grid) {
    json coeffs = json::array();
    for (std::size_t l = 0; l < res.coefficients.size(); ++l) {
        const auto& dg = res.diagnostics[l];
        coeffs.push_back({{"order", l + 1},
                          {"values", complex_array(res.coefficients[l].values())},
                          {"relative_misfit", dg.relative_misfit},
                          {"lambda_rel", dg.lambda_rel},
                          {"lambda_abs", dg.lambda_abs},
                          {"iterations", dg.iterations},
                          {"converged", dg.converged},
                          {"noise", dg.noise},
                          {"noise_floor", dg.noise_floor},
                          {"misfit_history", dg.misfit_history},
                          {"change_history", dg.change_history}});
    }
    return {{"kind", "reconstruction"},
            {"grid", {{"R", grid.radius()}, {"n", grid.nodes_per_axis()}, {"d", grid.dimension()}}},
            {"nodes", points_array(grid.nodes(), grid.dimension())},
            {"coefficients", coeffs},
            {"residuals", res.residuals},
            {"lambdas", res.lambdas},
            {"iterations", res.iterations}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open file");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(tmp.string() + ": cannot open for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error(tmp.string() + ": write failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace nlscat::io
