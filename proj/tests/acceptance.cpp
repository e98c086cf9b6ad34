// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <mpfr.h>

#include "nlscat/cli.hpp"
#include "nlscat/io.hpp"

using namespace nlscat;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

double since(clk::time_point t) { return std::chrono::duration<double>(clk::now() - t).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double mp(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), double x) {
    mpfr_t a, r;
    mpfr_inits2(200, a, r, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(a, x, MPFR_RNDN);
    fn(r, a, MPFR_RNDN);
    const double v = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clears(a, r, static_cast<mpfr_ptr>(nullptr));
    return v;
}

Profile gaussian(cplx amp, Point c, double w) {
    Profile p;
    p.amplitude = amp;
    p.center = c;
    p.width = w;
    return p;
}

HerglotzDensity random_density(const DirectionsPtr& dirs, std::uint64_t seed) {
    SeededUniform rng(seed);
    CVector v(static_cast<Eigen::Index>(dirs->size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = rng.next();
        v[i] = cplx(re, rng.next());
    }
    return HerglotzDensity(dirs, v / v.cwiseAbs().maxCoeff());
}

// Runs synth + invert through the command layer with its stdout report muted.
int pipeline(const RunConfig& cfg, const fs::path& out) {
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    int code = 0;
    try {
        code = cli::cmd_synth(cfg, out);
        if (code == 0) {
            cli::cmd_invert(cfg, out / "dataset.json", out);
        }
    } catch (...) {
        std::cout.rdbuf(old);
        throw;
    }
    std::cout.rdbuf(old);
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------

Verdict ac1() {
    std::vector<double> xs;
    for (int i = 0; i < 1000; ++i) {
        xs.push_back(1e-2 * std::pow(1e4, i / 999.0));
    }
    std::vector<double> j(xs.size()), y(xs.size());
    const auto t0 = clk::now();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        j[i] = specfun::bessel_j0(xs[i]);
        y[i] = specfun::bessel_y0(xs[i]);
    }
    std::vector<cplx> h(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        h[i] = specfun::hankel0(xs[i]);
    }
    const double sec = since(t0);
    double ej = 0.0, ey = 0.0, eh = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double jj = mp(mpfr_j0, xs[i]);
        const double yy = mp(mpfr_y0, xs[i]);
        ej = std::max(ej, std::abs(j[i] - jj) / std::abs(jj));
        ey = std::max(ey, std::abs(y[i] - yy) / std::abs(yy));
        eh = std::max(eh, std::abs(h[i] - cplx(jj, yy)) / std::abs(cplx(jj, yy)));
    }
    const bool pass = ej <= 1e-9 && ey <= 1e-9 && eh <= 1e-9 && sec < 1.0;
    return {pass, "max rel err J0 " + fmt("%.2e", ej) + ", Y0 " + fmt("%.2e", ey) + ", H0 " + fmt("%.2e", eh) +
                      " over 1000 points; " + fmt("%.3f", sec) + " s"};
}

double green_residual(int n) {
    const WaveContext ctx{1.0, 2};
    auto grid = DiskGrid::build(1.0, n, 2);
    auto fn = [](const Point& x) { return cplx(std::exp(-dot(x, x) / 0.08)); };
    const ComplexField f = ComplexField::from_function(grid, fn);
    const double hf = grid->spacing() / 4.0;
    std::vector<Point> centres, targets;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.35 * std::sqrt((i + 0.5) / 20.0);
        const double th = 2.399963 * i;
        const Point c{r * std::cos(th), r * std::sin(th), 0.0};
        centres.push_back(c);
        targets.push_back(c);
        targets.push_back({c[0] + hf, c[1], 0.0});
        targets.push_back({c[0] - hf, c[1], 0.0});
        targets.push_back({c[0], c[1] + hf, 0.0});
        targets.push_back({c[0], c[1] - hf, 0.0});
    }
    PotentialOptions o;
    o.mode = PotentialOptions::Mode::Corrected;
    const CVector u = volume_potential(f, ctx, targets, o);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) {
        const Eigen::Index b = 5 * i;
        const cplx lap = (u[b + 1] + u[b + 2] + u[b + 3] + u[b + 4] - 4.0 * u[b]) / (hf * hf);
        worst = std::max(worst, std::abs(lap + u[b] + fn(centres[static_cast<std::size_t>(i)])));
    }
    return worst / f.sup_norm();
}

Verdict ac2() {
    const auto t0 = clk::now();
    const double r128 = green_residual(128);
    const double r256 = green_residual(256);
    const double sec = since(t0);
    const bool pass = r128 <= 5e-2 && r256 * 2.0 <= r128 && sec < 30.0;
    return {pass, "residual n=128 " + fmt("%.2e", r128) + ", n=256 " + fmt("%.2e", r256) + " (x" +
                      fmt("%.1f", r128 / r256) + "); " + fmt("%.1f", sec) + " s"};
}

Verdict ac3() {
    bool pass = true;
    std::string detail;
    const double k = 2.0;
    for (int d : {2, 3}) {
        const WaveContext ctx{k, d};
        auto grid = DiskGrid::build(1.0, d == 2 ? 32 : 16, d);
        const ComplexField f = ComplexField::from_function(grid, [](const Point& x) {
            return cplx(1.0 + x[0] - x[2], 0.5 * x[1]) * std::exp(-2.0 * dot(x, x));
        });
        std::vector<double> radii;
        for (int i = 0; i <= 6; ++i) {
            radii.push_back(50.0 * std::pow(2.0, i / 2.0) / k);
        }
        const RadiationReport rep = verify_radiation(f, ctx, radii, {0.6, 0.0, 0.8});
        const double bound = -(d + 1) / 2.0 + 0.2;
        pass = pass && rep.slope && *rep.slope <= bound;
        detail += (detail.empty() ? "" : "; ") + std::string("d=") + std::to_string(d) + " slope " +
                  (rep.slope ? fmt("%.3f", *rep.slope) : std::string("n/a")) + " (<= " + fmt("%.1f", bound) + ")";
    }
    return {pass, detail + " over radii [50, 400]/k"};
}

Verdict ac4() {
    auto grid = DiskGrid::build(1.0, 32, 2);
    const WaveContext ctx{2.0, 2};
    const ForwardSolver solver(grid, ctx);
    const ComplexField q2 = sample_profiles(grid, {gaussian(20.0, {0.0, 0.0, 0.0}, 0.3)});
    const auto model =
        NonlinearityModel::from_derivatives({ComplexField::zeros(grid), q2}, std::sqrt(q2.sup_norm()) * 1.01, 10.0);
    const HerglotzDensity g = random_density(DirectionSet::build(16, 2), 7);
    const std::vector<double> deltas = {0.02, 0.04, 0.08};
    std::vector<double> gammas;
    bool pass = true;
    double worst_sup = 0.0;
    double worst_start = 0.0;
    for (double delta : deltas) {
        ForwardOptions o;
        o.delta = delta;
        const HerglotzDensity gd = g.scaled(0.9 * delta * delta);
        // Tight relative tolerance so that the contraction estimate sees enough iterations.
        ForwardOptions fine = o;
        fine.tol = 0.0;
        fine.rel_tol = 1e-13;
        const ForwardResult r = solver.solve_nonlinear(model, gd, fine);
        const double gamma = r.report.contraction_estimate.value_or(1.0);
        gammas.push_back(gamma);
        pass = pass && gamma < 1.0 && r.report.solution_sup <= delta;
        worst_sup = std::max(worst_sup, r.report.solution_sup / delta);
        const ForwardResult a = solver.solve_nonlinear(model, gd, o);
        const CVector w0 = CVector::Constant(static_cast<Eigen::Index>(grid->size()), cplx(0.5 * delta, 0.5 * delta));
        const ForwardResult b = solver.solve_nonlinear(model, gd, o, &w0);
        const double diff = sup_norm(a.u_sc.values() - b.u_sc.values());
        worst_start = std::max(worst_start, diff / (10.0 * o.tol));
        pass = pass && diff <= 10.0 * o.tol;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        mx += std::log(deltas[i]) / 3.0;
        my += std::log(gammas[i]) / 3.0;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        num += (std::log(deltas[i]) - mx) * (std::log(gammas[i]) - my);
        den += std::pow(std::log(deltas[i]) - mx, 2);
    }
    const double slope = num / den;
    pass = pass && slope >= 0.5 && slope <= 2.0;
    return {pass, "gamma " + fmt("%.3e", gammas[0]) + " " + fmt("%.3e", gammas[1]) + " " + fmt("%.3e", gammas[2]) +
                      ", fit slope " + fmt("%.4f", slope) + ", max sup|u_sc|/delta " + fmt("%.2e", worst_sup) +
                      ", start difference / (10 tol) " + fmt("%.2e", worst_start)};
}

Verdict ac5() {
    auto grid = DiskGrid::build(1.0, 32, 2);
    const WaveContext ctx{2.0, 2};
    const ForwardSolver solver(grid, ctx);
    const ComplexField q = sample_profiles(grid, {gaussian(2.0, {0.0, 0.0, 0.0}, 0.3)});
    const auto model = NonlinearityModel::from_derivatives({q}, q.sup_norm() * 1.01, 10.0);
    ForwardOptions o;
    o.delta = 0.08;
    o.tol = 1e-10;
    const HerglotzDensity g = random_density(DirectionSet::build(16, 2), 7).scaled(0.9 * 0.08 * 0.08);
    const ForwardResult r = solver.solve_nonlinear(model, g, o);
    const ComplexField ref = solver.solve_linear_total(q, herglotz_on_grid(g, ctx, grid));
    const double diff = sup_norm(r.u_sc.values() - ref.values());
    return {diff <= 1e-8, "sup |Picard - dense| = " + fmt("%.2e", diff) + " after " +
                              std::to_string(r.report.iterations) + " iterations"};
}

Verdict ac6() {
    auto grid = DiskGrid::build(1.0, 32, 2);
    const WaveContext ctx{2.0, 2};
    const ForwardSolver solver(grid, ctx);
    const ComplexField q1 = sample_profiles(grid, {gaussian(1.0, {0.2, 0.1, 0.0}, 0.25)});
    const ComplexField q2 = sample_profiles(grid, {gaussian(1.5, {0.0, 0.25, 0.0}, 0.25)});
    const auto model = NonlinearityModel::from_derivatives({q1, q2}, 1.3);
    auto plan = std::make_shared<ExperimentPlan>();
    plan->densities = {random_density(DirectionSet::build(32, 2), 11)};
    plan->delta = 0.08;
    plan->eps_ladder = ExperimentPlan::default_ladder(0.08);
    plan->obs = DirectionSet::build(32, 2);
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, default_synthesis_options());
    const MixedDerivative md = mixed_derivative(data, {1});
    const CVector exact = first_order_farfield(solver, q1, plan->densities[0], plan->delta, plan->obs).values();
    std::vector<double> err;
    for (const auto& l : md.levels) {
        err.push_back((l.values() - exact).norm() / exact.norm());
    }
    const double rich = (md.value.values() - exact).norm() / exact.norm();
    bool pass = err.size() == 3;
    std::string detail = "relative errors per level";
    for (std::size_t i = 0; i < err.size(); ++i) {
        detail += " " + fmt("%.2e", err[i]);
        if (i > 0) {
            const double ratio = err[i - 1] / err[i];
            pass = pass && ratio >= 1.8 && ratio <= 2.2;
        }
    }
    pass = pass && rich * 4.0 <= err.back();
    return {pass, detail + " (h halved each step); Richardson " + fmt("%.2e", rich) + ", improvement x" +
                      fmt("%.1e", err.back() / rich)};
}

Verdict ac7() {
    auto grid = DiskGrid::build(1.0, 24, 2);
    const WaveContext ctx{2.0, 2};
    const ForwardSolver solver(grid, ctx);
    const ComplexField d3 = sample_profiles(grid, {gaussian(6.0, {0.1, -0.1, 0.0}, 0.3)});
    const auto model = NonlinearityModel::from_derivatives(
        {ComplexField::zeros(grid), ComplexField::zeros(grid), d3}, std::cbrt(d3.sup_norm()) * 1.01);
    auto plan = std::make_shared<ExperimentPlan>();
    auto dirs = DirectionSet::build(32, 2);
    for (std::uint64_t s = 0; s < 3; ++s) {
        plan->densities.push_back(random_density(dirs, 21 + s));
    }
    plan->delta = 0.05;
    plan->eps_ladder = ExperimentPlan::default_ladder(0.05);
    plan->obs = DirectionSet::build(32, 2);
    plan->max_order = 3;
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, default_synthesis_options());
    const double third = mixed_derivative(data, {1, 1, 1}).value.values().norm();
    double lower = 0.0;
    for (const std::vector<int>& a : std::vector<std::vector<int>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0},
                                                                   {1, 0, 1}, {0, 1, 1}}) {
        lower = std::max(lower, mixed_derivative(data, a).value.values().norm());
    }
    const double ratio = lower / third;
    return {third > 0.0 && ratio <= 1e-3,
            "max |order 1, 2 derivative| / |order 3 derivative| = " + fmt("%.2e", ratio)};
}

// The sample inverse-crime configuration, run through the command layer.
const fs::path kWork = fs::temp_directory_path() / "nlscat_acceptance";

RunConfig ac8_config(const fs::path& out) {
    RunConfig cfg = load_config(std::string(NLSCAT_CONFIGS) + "/quadratic_inverse.json");
    cfg.io.output = out.string();
    return cfg;
}

Verdict ac8() {
    const fs::path out = kWork / "run1";
    const RunConfig cfg = ac8_config(out);
    const auto t0 = clk::now();
    const int code = pipeline(cfg, out);
    if (code != 0) {
        return {false, "synthesis failed with exit code " + std::to_string(code)};
    }
    const double sec = since(t0);
    const auto rec = io::read_json(out / "reconstruction.json");
    const double e1 = rec.at("truth_errors").at(0).at("relative_l2").get<double>();
    const double e2 = rec.at("truth_errors").at(1).at("relative_l2").get<double>();
    // Frozen at the first verified run: q1 0.0156157, q2 0.00196566. The
    // regression bounds allow 25 % drift on top and must stay within the targets.
    const double b1 = std::min(0.05, 1.25 * 0.0156157);
    const double b2 = std::min(0.1, 1.25 * 0.00196566);
    const bool pass = e1 <= b1 && e2 <= b2 && sec < 600.0;
    return {pass, "relative L2 error q1 " + fmt("%.4f", e1) + " (bound " + fmt("%.4f", b1) + "), q2 " +
                      fmt("%.5f", e2) + " (bound " + fmt("%.5f", b2) + "); pipeline " + fmt("%.1f", sec) + " s"};
}

Verdict ac9() {
    auto grid = DiskGrid::build(1.0, 32, 2);
    const WaveContext ctx{2.0, 2};
    const ForwardSolver solver(grid, ctx);
    const ComplexField q = sample_profiles(grid, {gaussian(1.0, {0.2, 0.1, 0.0}, 0.25)});
    std::vector<Point> held_out;
    for (int j = 0; j < 101; ++j) {
        const double t = 2.0 * kPi * (j + 0.37) / 101.0;
        held_out.push_back({std::cos(t), std::sin(t), 0.0});
    }
    const HerglotzDensity g = random_density(DirectionSet::from_directions(held_out, 2), 99);
    const ComplexField target = solver.apply_TqH(q, g);
    const auto pts = dense_range_probe(solver, q, target, {8, 16, 32, 64});
    bool pass = pts.size() == 4;
    std::string detail = "residuals";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        detail += " m=" + std::to_string(pts[i].m) + ": " + fmt("%.2e", pts[i].residual);
        if (i > 0) {
            pass = pass && pts[i].residual <= 1.05 * pts[i - 1].residual;
        }
    }
    return {pass, detail};
}

Verdict ac10() {
    const fs::path a = kWork / "run1";
    const fs::path b = kWork / "run2";
    if (!fs::exists(a / "reconstruction.json")) {
        return {false, "first run missing (AC8 did not complete)"};
    }
    const RunConfig cfg = ac8_config(b);
    const int code = pipeline(cfg, b);
    if (code != 0) {
        return {false, "synthesis failed with exit code " + std::to_string(code)};
    }
    bool same = true;
    std::string detail;
    for (const char* f : {"dataset.json", "reconstruction.json", "residuals.csv"}) {
        const bool eq = slurp(a / f) == slurp(b / f);
        same = same && eq;
        detail += std::string(detail.empty() ? "" : ", ") + f + (eq ? " identical" : " DIFFERS");
    }
    return {same, detail};
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"AC1 special functions vs MPFR", ac1},
        {"AC2 Green identity", ac2},
        {"AC3 far-field asymptotics", ac3},
        {"AC4 small-data fixed point", ac4},
        {"AC5 linear cross-check", ac5},
        {"AC6 first-order linearization", ac6},
        {"AC7 order separation", ac7},
        {"AC8 inverse-crime reconstruction", ac8},
        {"AC9 dense-range probe", ac9},
        {"AC10 determinism", ac10},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Verdict v{false, ""};
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    fs::remove_all(kWork);
    return failed == 0 ? 0 : 1;
}
