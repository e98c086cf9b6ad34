#include "nlscat/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlscat/errors.hpp"
#include "nlscat/io.hpp"
#include "nlscat/kernels.hpp"

namespace nlscat::cli {

namespace {

using nlohmann::json;

void write_json(const fs::path& path, const json& j) { io::write_atomic(path, io::dump(j)); }

void echo_config(const RunConfig& cfg, const fs::path& out) {
    write_json(out / "effective_config.json", effective_config(cfg));
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

int category_code(const std::string& category) {
    if (category == "gate") {
        return kGate;
    }
    if (category == "analyticity" || category == "divergence") {
        return kDivergence;
    }
    return kIllPosed;
}

// Relative L2 error of each recovered order against the configured truth, when
// the truth can be sampled on the reconstruction grid.
json truth_errors(const RunConfig& cfg, const ReconstructionResult& res, const GridPtr& grid) {
    if (cfg.model.derivatives.empty()) {
        return nullptr;
    }
    NonlinearityModel truth = NonlinearityModel::zero(grid);
    try {
        truth = make_model(cfg, grid);
    } catch (const ConfigError&) {
        return nullptr;  // raw node arrays sized for another grid
    }
    json errs = json::array();
    for (std::size_t l = 0; l < res.coefficients.size(); ++l) {
        const int order = static_cast<int>(l) + 1;
        if (order > truth.order()) {
            break;
        }
        const ComplexField& want = truth.derivative_coefficient(order);
        const CVector diff = res.coefficients[l].values() - want.values();
        const double denom = want.l2_norm();
        const double abs_err = ComplexField(grid, diff).l2_norm();
        errs.push_back({{"order", order},
                        {"absolute_l2", abs_err},
                        {"relative_l2", denom > 0.0 ? json(abs_err / denom) : json(nullptr)}});
    }
    return errs;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) {
        return kConfig;
    }
    if (dynamic_cast<const GateViolation*>(&e)) {
        return kGate;
    }
    if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const AnalyticityError*>(&e)) {
        return kDivergence;
    }
    if (dynamic_cast<const IllPosedError*>(&e) || dynamic_cast<const SingularSystemError*>(&e)) {
        return kIllPosed;
    }
    return kConfig;
}

SolveReport cmd_forward(const RunConfig& cfg, const fs::path& out) {
    fs::create_directories(out);
    echo_config(cfg, out);
    const auto grid = make_grid(cfg);
    const NonlinearityModel model = make_model(cfg, grid);
    const HerglotzDensity g = make_forward_density(cfg);
    const ForwardSolver solver(grid, WaveContext::make(cfg.wave.k, cfg.wave.d), cfg.forward.dense_limit);
    const ForwardOptions opts = forward_options(cfg);
    const ForwardResult res = solver.solve_nonlinear(model, g, opts);
    const FarField ff = far_field_of_source(
        ComplexField(grid, model.evaluate(res.u_sc.values() + herglotz_on_grid(g, solver.context(), grid).values())),
        solver.context(), DirectionSet::build(cfg.plan.obs, cfg.wave.d));
    write_json(out / "u_sc.json", io::field_to_json(res.u_sc));
    write_json(out / "far_field.json", io::farfield_to_json(ff));
    io::write_atomic(out / "solve_report.txt", io::solve_report_text(res.report));
    return res.report;
}

int cmd_synth(const RunConfig& cfg, const fs::path& out) {
    fs::create_directories(out);
    echo_config(cfg, out);
    const auto grid = make_grid(cfg);
    const NonlinearityModel model = make_model(cfg, grid);
    const auto plan = make_plan(cfg);
    const WaveContext ctx = WaveContext::make(cfg.wave.k, cfg.wave.d);
    const ForwardSolver solver(grid, ctx, cfg.forward.dense_limit);
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, synthesis_options(cfg));
    write_json(out / "dataset.json", io::dataset_to_json(data, ctx));
    if (data.failed.empty()) {
        return kOk;
    }
    for (const auto& f : data.failed) {
        std::cerr << "record " << f.key << " failed (" << f.category << "): " << f.message << "\n";
    }
    return category_code(data.failed.front().category);
}

void cmd_invert(const RunConfig& cfg, const fs::path& dataset, const fs::path& out) {
    WaveContext ctx;
    const ScatteringDataset data = io::dataset_from_json(io::read_json(dataset), ctx);
    if (!data.complete) {
        throw IllPosedError(dataset.string() + ": dataset is flagged incomplete (" +
                            std::to_string(data.failed.size()) + " failed records)");
    }
    fs::create_directories(out);
    echo_config(cfg, out);
    const auto grid = make_inverse_grid(cfg);
    const ForwardSolver solver(grid, ctx, cfg.forward.dense_limit);
    const ReconstructionResult res = recover_all(data, solver, cfg.inverse.L, inverse_options(cfg));

    json j = io::reconstruction_to_json(res, *grid);
    const json errs = truth_errors(cfg, res, grid);
    if (!errs.is_null()) {
        j["truth_errors"] = errs;
    }
    write_json(out / "reconstruction.json", j);

    std::ostringstream csv;
    csv << "order,relative_misfit[1],lambda_rel[1],iterations\n";
    for (std::size_t l = 0; l < res.residuals.size(); ++l) {
        csv << l + 1 << ',' << num(res.residuals[l]) << ',' << num(res.lambdas[l]) << ',' << res.iterations[l]
            << '\n';
    }
    io::write_atomic(out / "residuals.csv", csv.str());

    for (std::size_t l = 0; l < res.residuals.size(); ++l) {
        std::cout << "order " << l + 1 << ": relative misfit " << res.residuals[l];
        if (errs.is_array() && l < errs.size() && !errs[l]["relative_l2"].is_null()) {
            std::cout << ", relative L2 error vs truth " << errs[l]["relative_l2"].get<double>();
        }
        std::cout << "\n";
    }
}

bool cmd_check(const checks::Settings& s, const std::string& filter, const std::optional<fs::path>& out,
               std::ostream& os) {
    os << std::left << std::setw(32) << "check" << std::setw(6) << "result" << std::setw(10) << "time[s]"
       << "detail\n";
    const checks::SuiteResult suite = checks::run(s, filter, [&](const checks::CheckResult& r) {
        std::ostringstream t;
        t << std::fixed << std::setprecision(2) << r.seconds;
        os << std::left << std::setw(32) << r.id() << std::setw(6) << (r.passed ? "PASS" : "FAIL") << std::setw(10)
           << t.str() << r.detail << std::endl;
    });
    std::size_t passed = 0;
    for (const auto& r : suite.results) {
        passed += r.passed ? 1 : 0;
    }
    os << passed << "/" << suite.results.size() << " checks passed\n";
    if (out && !suite.probe.empty()) {
        fs::create_directories(*out);
        json pts = json::array();
        for (const auto& p : suite.probe) {
            pts.push_back({{"m", p.m}, {"residual", p.residual}});
        }
        write_json(*out / "range_probe.json", {{"kind", "range_probe"}, {"points", pts}});
    }
    return suite.all_passed();
}

void cmd_plotdata(const fs::path& input, const std::string& kind, const std::optional<fs::path>& output,
                  std::ostream& os) {
    if (kind != "farfield" && kind != "field" && kind != "residual") {
        throw ConfigError("--kind: unknown kind '" + kind + "' (expected farfield, field or residual)");
    }
    const json j = io::read_json(input);
    const std::string src = input.string();
    std::ostringstream csv;
    auto row_values = [&](cplx v) { csv << num(v.real()) << ',' << num(v.imag()) << ',' << num(std::abs(v)) << '\n'; };
    if (kind == "farfield") {
        const FarField ff = io::farfield_from_json(j, src);
        const DirectionSet& dirs = *ff.directions();
        if (dirs.dimension() == 2) {
            csv << "theta[rad],re[1],im[1],abs[1]\n";
        } else {
            csv << "theta[rad],phi[rad],re[1],im[1],abs[1]\n";
        }
        for (std::size_t i = 0; i < ff.size(); ++i) {
            const Point& p = dirs.direction(i);
            if (dirs.dimension() == 2) {
                csv << num(dirs.angle(i)) << ',';
            } else {
                csv << num(std::acos(std::clamp(p[2], -1.0, 1.0))) << ',' << num(std::atan2(p[1], p[0])) << ',';
            }
            row_values(ff.values()[static_cast<Eigen::Index>(i)]);
        }
    } else if (kind == "field") {
        if (!j.contains("grid") || !j.contains("nodes") || !j.contains("values")) {
            throw ConfigError(src + ": expected a field file with grid, nodes and values");
        }
        const int d = j.at("grid").at("d").get<int>();
        const auto nodes = io::parse_points(j.at("nodes"), d, src + ".nodes");
        const CVector v = io::parse_complex_array(j.at("values"), src + ".values");
        if (static_cast<std::size_t>(v.size()) != nodes.size()) {
            throw ConfigError(src + ".values: length differs from the node count");
        }
        csv << (d == 2 ? "x1[length],x2[length]," : "x1[length],x2[length],x3[length],") << "re[1],im[1],abs[1]\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (int a = 0; a < d; ++a) {
                csv << num(nodes[i][static_cast<std::size_t>(a)]) << ',';
            }
            row_values(v[static_cast<Eigen::Index>(i)]);
        }
    } else {
        if (!j.contains("points") || !j.at("points").is_array()) {
            throw ConfigError(src + ".points: expected an array of {m, residual}");
        }
        csv << "m[directions],residual[1]\n";
        for (const auto& p : j.at("points")) {
            csv << p.at("m").get<int>() << ',' << num(p.at("residual").get<double>()) << '\n';
        }
    }
    if (output) {
        io::write_atomic(*output, csv.str());
    } else {
        os << csv.str();
    }
}

int main(int argc, char** argv) {
    CLI::App app{"nlscat: direct and inverse scattering for the semilinear Schrodinger equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string filter;
    std::string dataset_path;
    std::string input_path;
    std::string kind;
    std::string plot_out;
    int threads = 0;
    double perturb = 0.0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (config_required) {
            c->required()->check(CLI::ExistingFile);
        }
        sub->add_option("--threads", threads, "OpenMP threads (NLSCAT_THREADS overrides)")->check(CLI::PositiveNumber);
    };

    auto* forward = app.add_subcommand("forward", "solve the direct problem for one incident density");
    add_common(forward, true);
    forward->add_option("--out", out_dir, "output directory (default io.output)");

    auto* synth = app.add_subcommand("synth", "synthesise a far-field dataset over the eps lattice");
    add_common(synth, true);
    synth->add_option("--out", out_dir, "output directory (default io.output)");

    auto* invert = app.add_subcommand("invert", "recover the Taylor coefficients from a dataset");
    add_common(invert, true);
    invert->add_option("--out", out_dir, "output directory (default io.output)");
    invert->add_option("--dataset", dataset_path, "dataset file (default <out>/dataset.json)");

    auto* check = app.add_subcommand("check", "run the invariant suite");
    add_common(check, false);
    check->add_option("--filter", filter, "module or module.check to run");
    check->add_option("--out", out_dir, "directory for range_probe.json");
    check->add_option("--perturb-y0", perturb, "fault injection: relative error in the Y0 normalisation")
        ->group("Testing");

    auto* plot = app.add_subcommand("plotdata", "convert an output file to CSV");
    add_common(plot, false);
    plot->add_option("--input", input_path, "far_field.json, u_sc.json or range_probe.json")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--kind", kind, "farfield | field | residual")->required();
    plot->add_option("--out", plot_out, "CSV file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    if (const char* env = std::getenv("NLSCAT_THREADS")) {
        try {
            threads = std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "error: NLSCAT_THREADS must be a positive integer\n";
            return kConfig;
        }
    }
    if (threads > 0) {
        kernels::set_threads(threads);
    }

    try {
        if (*plot) {
            cmd_plotdata(input_path, kind, plot_out.empty() ? std::nullopt : std::optional<fs::path>(plot_out),
                         std::cout);
            return kOk;
        }
        if (*check) {
            checks::Settings s;
            if (!config_path.empty()) {
                const RunConfig cfg = load_config(config_path);
                s.k = cfg.wave.k;
                s.probe_schedule = cfg.inverse.probe_schedule;
            }
            specfun::testing::set_y0_normalisation_perturbation(perturb);
            const bool ok = cmd_check(s, filter, out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir),
                                      std::cout);
            specfun::testing::set_y0_normalisation_perturbation(0.0);
            return ok ? kOk : kConfig;
        }
        const RunConfig cfg = load_config(config_path);
        const fs::path out = out_dir.empty() ? fs::path(cfg.io.output) : fs::path(out_dir);
        if (*forward) {
            std::cout << io::solve_report_text(cmd_forward(cfg, out));
            return kOk;
        }
        if (*synth) {
            return cmd_synth(cfg, out);
        }
        cmd_invert(cfg, dataset_path.empty() ? out / "dataset.json" : fs::path(dataset_path), out);
        return kOk;
    } catch (const MissingRecordsError& e) {
        std::cerr << "error: " << e.what() << "\nmissing records:";
        for (const auto& k : e.missing()) {
            std::cerr << ' ' << k;
        }
        std::cerr << "\n";
        return kIllPosed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace nlscat::cli
