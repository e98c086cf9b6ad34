#include "nlscat/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <utility>

#include "nlscat/errors.hpp"
#include "nlscat/kernels.hpp"

namespace nlscat::checks {

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

using CheckFn = Outcome (*)(const Settings&, SuiteResult&);

struct Entry {
    const char* module;
    const char* name;
    CheckFn fn;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Fourth-order central difference.
template <class F>
double derivative(F f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

// ---------------------------------------------------------------- specfun

Outcome wronskian(const Settings&, SuiteResult&) {
    // J0 Y0' - J0' Y0 = 2 / (pi x), with J1 = -J0' and Y1 = -Y0'.
    double worst = 0.0;
    for (double x : {0.3, 1.0, 2.5, 7.0, 12.0, 16.5, 17.5, 25.0, 60.0, 100.0}) {
        const double h = 1e-3 * std::max(1.0, x / 10.0);
        const double dj = derivative(specfun::bessel_j0, x, h);
        const double dy = derivative(specfun::bessel_y0, x, h);
        const double w = specfun::bessel_j0(x) * dy - dj * specfun::bessel_y0(x);
        worst = std::max(worst, std::abs(w * kPi * x / 2.0 - 1.0));
    }
    return {worst < 1e-8, "max relative Wronskian defect " + sci(worst)};
}

Outcome crossover(const Settings&, SuiteResult&) {
    const double x = specfun::kSeriesCrossover;
    const double lo = std::nextafter(x, 0.0);
    const double hi = std::nextafter(x, 100.0);
    const double dj = std::abs(specfun::bessel_j0(hi) - specfun::bessel_j0(lo));
    const double dy = std::abs(specfun::bessel_y0(hi) - specfun::bessel_y0(lo));
    const double jump = std::max(dj, dy);
    return {jump < 1e-12, "jump across the series/asymptotic switch " + sci(jump)};
}

Outcome reference_values(const Settings&, SuiteResult&) {
    const double ej = std::abs(specfun::bessel_j0(1.0) / 0.7651976865579666 - 1.0);
    const double ey = std::abs(specfun::bessel_y0(1.0) / 0.08825696421567696 - 1.0);
    return {ej < 1e-14 && ey < 1e-13, "J0(1) rel " + sci(ej) + ", Y0(1) rel " + sci(ey)};
}

Outcome farfield_constant(const Settings& s, SuiteResult&) {
    const cplx c3 = specfun::farfield_constant(WaveContext::make(s.k, 3));
    const cplx c2 = specfun::farfield_constant(WaveContext::make(s.k, 2));
    const cplx want2 = std::polar(1.0 / std::sqrt(8.0 * kPi * s.k), kPi / 4.0);
    const double e3 = std::abs(c3 - 1.0 / (4.0 * kPi)) * 4.0 * kPi;
    const double e2 = std::abs(c2 - want2) / std::abs(want2);
    return {e3 < 1e-15 && e2 < 1e-14, "C_3 rel " + sci(e3) + ", C_2 rel " + sci(e2)};
}

// --------------------------------------------------------------- geometry

Outcome grid_volume(const Settings&, SuiteResult&) {
    double worst = 0.0;
    for (int d : {2, 3}) {
        const int n = d == 2 ? 64 : 24;
        auto g = DiskGrid::build(1.0, n, d);
        const double rel = std::abs(g->total_weight() / ball_volume(1.0, d) - 1.0);
        worst = std::max(worst, rel / g->spacing());
    }
    return {worst < 2.0, "max |vol error| / (|B| h) " + sci(worst)};
}

Outcome sphere_weights(const Settings&, SuiteResult&) {
    double worst = 0.0;
    for (int d : {2, 3}) {
        auto dirs = DirectionSet::build(37, d);
        double total = 0.0;
        for (double w : dirs->weights()) {
            total += w;
        }
        worst = std::max(worst, std::abs(total / sphere_area(d) - 1.0));
        for (const Point& p : dirs->directions()) {
            worst = std::max(worst, std::abs(norm(p) - 1.0));
        }
    }
    return {worst < 1e-14, "weight-sum and unit-length defect " + sci(worst)};
}

// ----------------------------------------------------------------- fields

Outcome herglotz_bessel(const Settings& s, SuiteResult&) {
    // A constant density on the circle synthesises 2 pi J0(k|x|).
    const WaveContext ctx = WaveContext::make(s.k, 2);
    const auto g = HerglotzDensity::constant(DirectionSet::build(64, 2), 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) {
        const double r = 0.1 * i;
        pts.push_back({r * std::cos(1.3 * i), r * std::sin(1.3 * i), 0.0});
    }
    const CVector u = herglotz_wave(g, ctx, pts);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const cplx want = 2.0 * kPi * specfun::bessel_j0(s.k * norm(pts[i]));
        worst = std::max(worst, std::abs(u[static_cast<Eigen::Index>(i)] - want));
    }
    return {worst < 1e-10, "max |u - 2 pi J0| " + sci(worst)};
}

Outcome green_identity(const Settings& s, SuiteResult&) {
    // Delta V[f] + k^2 V[f] = -f by a five-point Laplacian of the corrected potential.
    const WaveContext ctx = WaveContext::make(s.k, 2);
    auto grid = DiskGrid::build(1.0, 96, 2);
    auto fn = [](const Point& x) { return cplx(std::exp(-dot(x, x) / 0.08), 0.0); };
    const ComplexField f = ComplexField::from_function(grid, fn);
    const double hf = grid->spacing() / 4.0;
    std::vector<Point> centres;
    std::vector<Point> targets;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.35 * std::sqrt((i + 0.5) / 20.0);
        const double th = 2.399963 * i;
        const Point c{r * std::cos(th), r * std::sin(th), 0.0};
        centres.push_back(c);
        targets.push_back(c);
        for (int a = 0; a < 2; ++a) {
            Point p = c;
            p[static_cast<std::size_t>(a)] += hf;
            targets.push_back(p);
            p[static_cast<std::size_t>(a)] -= 2.0 * hf;
            targets.push_back(p);
        }
    }
    PotentialOptions opts;
    opts.mode = PotentialOptions::Mode::Corrected;
    const CVector u = volume_potential(f, ctx, targets, opts);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) {
        const Eigen::Index b = 5 * i;
        const cplx lap = (u[b + 1] + u[b + 2] + u[b + 3] + u[b + 4] - 4.0 * u[b]) / (hf * hf);
        const cplx fx = fn(centres[static_cast<std::size_t>(i)]);
        worst = std::max(worst, std::abs(lap + s.k * s.k * u[b] + fx));
    }
    // sup|f| = 1, so the residual is already relative.
    return {worst < 5e-2, "max residual / sup|f| at n=96: " + sci(worst)};
}

Outcome radiation(const Settings& s, SuiteResult&) {
    std::string detail;
    bool ok = true;
    for (int d : {2, 3}) {
        const WaveContext ctx = WaveContext::make(s.k, d);
        auto grid = DiskGrid::build(1.0, d == 2 ? 32 : 14, d);
        const ComplexField f = ComplexField::from_function(grid, [](const Point& x) {
            return cplx(1.0 + x[0], 0.5 * x[1]) * std::exp(-2.0 * dot(x, x));
        });
        std::vector<double> radii;
        for (double r = 50.0; r <= 400.0 * 1.0001; r *= std::sqrt(2.0)) {
            radii.push_back(r / s.k);
        }
        const RadiationReport rep = verify_radiation(f, ctx, radii, {0.6, 0.8, 0.0});
        const double bound = -(d + 1) / 2.0 + 0.2;
        const bool pass = rep.slope && *rep.slope <= bound;
        ok = ok && pass;
        detail += (detail.empty() ? "" : ", ") + std::string("d=") + std::to_string(d) + " slope " +
                  (rep.slope ? sci(*rep.slope) : std::string("n/a"));
    }
    return {ok, detail};
}

Outcome reciprocity(const Settings& s, SuiteResult&) {
    // With obs = incident directions the discrete far-field operator is symmetric.
    const WaveContext ctx = WaveContext::make(s.k, 2);
    auto grid = DiskGrid::build(1.0, 24, 2);
    ForwardSolver solver(grid, ctx);
    Profile p;
    p.amplitude = cplx(2.0, 0.3);
    p.center = {0.2, -0.1, 0.0};
    const ComplexField q = sample_profiles(grid, {p});
    auto dirs = DirectionSet::build(16, 2);
    const CMatrix E = FarFieldOperator(grid, dirs, ctx).matrix();
    const CMatrix H = HerglotzOperator(grid, dirs, ctx).matrix();
    const CMatrix MH = q.values().asDiagonal() * H;
    const CMatrix F = E * solver.scatterer(q)->solve_adjoint_side(MH);
    const double asym = (F - F.transpose()).norm() / F.norm();
    return {asym < 1e-10, "|F - F^T| / |F| = " + sci(asym)};
}

// ----------------------------------------------------------- nonlinearity

Outcome assumption(const Settings&, SuiteResult&) {
    auto grid = DiskGrid::build(1.0, 24, 2);
    Profile p;
    p.width = 0.3;
    const ComplexField q = sample_profiles(grid, {p});
    const auto model = NonlinearityModel::from_derivatives({q, q}, 1.2);
    const ValidationReport rep = validate_assumption(model);
    const auto zero = NonlinearityModel::zero(grid);
    const bool ok = rep.all_pass() && rep.eta_defaulted && validate_assumption(zero).all_pass() && zero.is_zero();
    std::string detail;
    for (const auto& c : rep.clauses) {
        detail += c.id + (c.pass ? ":ok " : ":FAIL ");
    }
    return {ok, detail + (rep.eta_defaulted ? "(eta defaulted)" : "")};
}

// ---------------------------------------------------------------- forward

struct SmallProblem {
    GridPtr grid;
    WaveContext ctx;
    ComplexField q1;
    ComplexField q2;
    HerglotzDensity g;
};

SmallProblem small_problem(const Settings& s, double delta) {
    const WaveContext ctx = WaveContext::make(s.k, 2);
    auto grid = DiskGrid::build(1.0, 24, 2);
    Profile a;
    a.amplitude = 1.0;
    a.center = {0.2, 0.1, 0.0};
    Profile b;
    b.amplitude = 1.5;
    b.center = {0.0, 0.25, 0.0};
    auto dirs = DirectionSet::build(32, 2);
    CVector v(static_cast<Eigen::Index>(dirs->size()));
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        v[j] = std::polar(1.0, 0.7 * static_cast<double>(j * j));
    }
    return {grid, ctx, sample_profiles(grid, {a}), sample_profiles(grid, {b}),
            HerglotzDensity(dirs, v * (0.9 * delta * delta))};
}

Outcome linear_crosscheck(const Settings& s, SuiteResult&) {
    const SmallProblem p = small_problem(s, 0.05);
    ForwardSolver solver(p.grid, p.ctx);
    const auto model = NonlinearityModel::from_derivatives({p.q1}, 1.0, 10.0);
    ForwardOptions opts;
    const ForwardResult res = solver.solve_nonlinear(model, p.g, opts);
    const ComplexField ref = solver.solve_linear_total(p.q1, herglotz_on_grid(p.g, p.ctx, p.grid));
    const double diff = sup_norm(res.u_sc.values() - ref.values());
    return {diff < 1e-8, "Picard vs dense solve " + sci(diff) + " after " + std::to_string(res.report.iterations) +
                             " iterations"};
}

Outcome uniqueness(const Settings& s, SuiteResult&) {
    const double delta = 0.05;
    const SmallProblem p = small_problem(s, delta);
    ForwardSolver solver(p.grid, p.ctx);
    const auto model = NonlinearityModel::from_derivatives({p.q1, p.q2}, 1.6);
    ForwardOptions opts;
    opts.delta = delta;
    const ForwardResult a = solver.solve_nonlinear(model, p.g, opts);
    CVector w0 = CVector::Constant(static_cast<Eigen::Index>(p.grid->size()), cplx(0.5 * delta, -0.3 * delta));
    const ForwardResult b = solver.solve_nonlinear(model, p.g, opts, &w0);
    const double diff = sup_norm(a.u_sc.values() - b.u_sc.values());
    return {diff <= 10.0 * opts.tol, "two starts differ by " + sci(diff)};
}

Outcome ball_bound(const Settings& s, SuiteResult&) {
    const double delta = 0.05;
    const SmallProblem p = small_problem(s, delta);
    ForwardSolver solver(p.grid, p.ctx);
    const auto model = NonlinearityModel::from_derivatives({p.q1, p.q2}, 1.6);
    ForwardOptions opts;
    opts.delta = delta;
    const ForwardResult r = solver.solve_nonlinear(model, p.g, opts);
    const double gamma = r.report.contraction_estimate.value_or(1.0);
    const bool ok = r.report.solution_sup <= delta && gamma < 1.0;
    return {ok, "sup|u_sc| " + sci(r.report.solution_sup) + " (delta " + sci(delta) + "), gamma " + sci(gamma)};
}

Outcome zero_model(const Settings& s, SuiteResult&) {
    const SmallProblem p = small_problem(s, 0.05);
    ForwardSolver solver(p.grid, p.ctx);
    ForwardOptions opts;
    const ForwardResult r = solver.solve_nonlinear(NonlinearityModel::zero(p.grid), p.g, opts);
    const bool ok = r.u_sc.sup_norm() == 0.0 && r.report.iterations == 1;
    return {ok, "sup " + sci(r.u_sc.sup_norm()) + ", iterations " + std::to_string(r.report.iterations)};
}

// -------------------------------------------------------------- linearize

std::shared_ptr<ExperimentPlan> single_density_plan(const SmallProblem& p, double delta) {
    auto plan = std::make_shared<ExperimentPlan>();
    plan->densities = {p.g.scaled(1.0 / p.g.norm_sup())};
    plan->delta = delta;
    plan->eps_ladder = ExperimentPlan::default_ladder(delta);
    plan->obs = DirectionSet::build(32, 2);
    return plan;
}

Outcome fd_order(const Settings& s, SuiteResult&) {
    const double delta = 0.05;
    const SmallProblem p = small_problem(s, delta);
    ForwardSolver solver(p.grid, p.ctx);
    const auto model = NonlinearityModel::from_derivatives({p.q1, p.q2}, 1.6);
    auto plan = single_density_plan(p, delta);
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, default_synthesis_options());
    const MixedDerivative md = mixed_derivative(data, {1});
    const CVector exact = first_order_farfield(solver, p.q1, plan->densities[0], delta, plan->obs).values();
    std::vector<double> err;
    for (const auto& lvl : md.levels) {
        err.push_back((lvl.values() - exact).norm());
    }
    const double rich = (md.value.values() - exact).norm();
    bool ok = err.size() >= 2;
    std::string detail = "level errors";
    for (std::size_t i = 0; i < err.size(); ++i) {
        detail += " " + sci(err[i]);
        if (i > 0) {
            const double ratio = err[i - 1] / err[i];
            ok = ok && ratio > 1.6 && ratio < 2.4;
        }
    }
    ok = ok && rich * 4.0 <= err.back();
    return {ok, detail + "; Richardson " + sci(rich)};
}

Outcome determinism(const Settings& s, SuiteResult&) {
    const double delta = 0.05;
    const SmallProblem p = small_problem(s, delta);
    const auto model = NonlinearityModel::from_derivatives({p.q1, p.q2}, 1.6);
    auto plan = single_density_plan(p, delta);
    ForwardSolver a(p.grid, p.ctx);
    ForwardSolver b(p.grid, p.ctx);
    const ScatteringDataset d1 = synthesize_dataset(a, model, plan, default_synthesis_options());
    const ScatteringDataset d2 = synthesize_dataset(b, model, plan, default_synthesis_options());
    bool same = d1.records.size() == d2.records.size();
    for (const auto& [key, ff] : d1.records) {
        const auto it = d2.records.find(key);
        same = same && it != d2.records.end() && it->second.values() == ff.values();
    }
    return {same, std::to_string(d1.records.size()) + " records compared bitwise"};
}

// ---------------------------------------------------------------- inverse

Outcome normal_equations(const Settings&, SuiteResult&) {
    CMatrix A(30, 12);
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            A(i, j) = std::polar(1.0 / (1.0 + static_cast<double>(i + j)), 0.3 * static_cast<double>(i * j));
        }
    }
    CVector d(30);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        d[i] = cplx(std::sin(1.0 + static_cast<double>(i)), std::cos(2.0 * static_cast<double>(i)));
    }
    double worst = 0.0;
    for (double lam : {1e-2, 1e-6}) {
        TikhonovOptions o;
        o.lambda_rel = lam;
        const TikhonovResult r = tikhonov_solve(A, d, o);
        const CVector lhs = A.adjoint() * (A * r.x) + r.lambda_abs * r.x;
        const CVector rhs = A.adjoint() * d;
        worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
    }
    return {worst < 1e-10, "normal-equation residual " + sci(worst)};
}

Outcome range_probe(const Settings& s, SuiteResult& suite) {
    const WaveContext ctx = WaveContext::make(s.k, 2);
    auto grid = DiskGrid::build(1.0, 24, 2);
    ForwardSolver solver(grid, ctx);
    Profile p;
    p.amplitude = 1.0;
    p.center = {0.2, 0.1, 0.0};
    const ComplexField q = sample_profiles(grid, {p});
    // Held-out solution: total field of a density on a rotated, finer direction set.
    std::vector<Point> rotated;
    for (int j = 0; j < 101; ++j) {
        const double t = 2.0 * kPi * (j + 0.37) / 101.0;
        rotated.push_back({std::cos(t), std::sin(t), 0.0});
    }
    auto dirs = DirectionSet::from_directions(rotated, 2);
    CVector v(101);
    for (Eigen::Index j = 0; j < 101; ++j) {
        v[j] = std::polar(1.0 + 0.5 * std::cos(static_cast<double>(j)), 1.7 * static_cast<double>(j));
    }
    const ComplexField target = solver.apply_TqH(q, HerglotzDensity(dirs, v));
    suite.probe = dense_range_probe(solver, q, target, s.probe_schedule);
    bool ok = !suite.probe.empty();
    std::string detail;
    for (std::size_t i = 0; i < suite.probe.size(); ++i) {
        detail += (i ? ", m=" : "m=") + std::to_string(suite.probe[i].m) + ": " + sci(suite.probe[i].residual);
        if (i > 0) {
            ok = ok && suite.probe[i].residual <= 1.05 * suite.probe[i - 1].residual;
        }
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- kernels

Outcome serial_vs_omp(const Settings& s, SuiteResult&) {
    const int saved = kernels::max_threads();
    kernels::set_threads(4);
    bool same = true;
    for (int d : {2, 3}) {
        const WaveContext ctx = WaveContext::make(s.k, d);
        auto grid = DiskGrid::build(1.0, d == 2 ? 20 : 10, d);
        auto dirs = DirectionSet::build(24, d);
        CMatrix a;
        CMatrix b;
        kernels::assemble_potential_serial(*grid, ctx, a);
        kernels::assemble_potential_omp(*grid, ctx, b);
        same = same && a == b;
        kernels::assemble_far_field_serial(*grid, *dirs, s.k, a);
        kernels::assemble_far_field_omp(*grid, *dirs, s.k, b);
        same = same && a == b;
        kernels::assemble_herglotz_serial(*dirs, s.k, grid->nodes(), a);
        kernels::assemble_herglotz_omp(*dirs, s.k, grid->nodes(), b);
        same = same && a == b;
        CVector f(static_cast<Eigen::Index>(grid->size()));
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            f[i] = cplx(std::cos(0.1 * static_cast<double>(i)), 1.0);
        }
        std::vector<Point> targets = {{0.1, 0.2, 0.0}, {1.5, -0.4, 0.3}, {-0.2, 0.05, 0.1}};
        CVector x;
        CVector y;
        kernels::point_potential_serial(*grid, ctx, f, targets, {}, x);
        kernels::point_potential_omp(*grid, ctx, f, targets, {}, y);
        same = same && x == y;
    }
    kernels::set_threads(saved);
    return {same, same ? "bit-identical on 4 threads" : "serial and parallel kernels differ"};
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"specfun", "wronskian", wronskian},
        {"specfun", "crossover", crossover},
        {"specfun", "reference_values", reference_values},
        {"specfun", "farfield_constant", farfield_constant},
        {"geometry", "grid_volume", grid_volume},
        {"geometry", "sphere_weights", sphere_weights},
        {"fields", "herglotz_bessel", herglotz_bessel},
        {"fields", "green_identity", green_identity},
        {"fields", "radiation", radiation},
        {"fields", "reciprocity", reciprocity},
        {"nonlinearity", "assumption", assumption},
        {"forward", "linear_crosscheck", linear_crosscheck},
        {"forward", "uniqueness", uniqueness},
        {"forward", "ball_bound", ball_bound},
        {"forward", "zero_model", zero_model},
        {"linearize", "fd_order", fd_order},
        {"linearize", "determinism", determinism},
        {"inverse", "normal_equations", normal_equations},
        {"inverse", "range_probe", range_probe},
        {"kernels", "serial_vs_omp", serial_vs_omp},
    };
    return entries;
}

}  // namespace

bool SuiteResult::all_passed() const {
    for (const auto& r : results) {
        if (!r.passed) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) {
        out.push_back(std::string(e.module) + "." + e.name);
    }
    return out;
}

SuiteResult run(const Settings& s, const std::string& filter,
                const std::function<void(const CheckResult&)>& on_result) {
    SuiteResult suite;
    for (const auto& e : registry()) {
        const std::string id = std::string(e.module) + "." + e.name;
        if (!filter.empty() && filter != e.module && filter != id) {
            continue;
        }
        CheckResult r{e.module, e.name, false, {}, 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Outcome o = e.fn(s, suite);
            r.passed = o.passed;
            r.detail = o.detail;
        } catch (const std::exception& ex) {
            r.detail = std::string("threw: ") + ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        suite.results.push_back(r);
        if (on_result) {
            on_result(r);
        }
    }
    if (!filter.empty() && suite.results.empty()) {
        throw ConfigError("--filter: no check or module named '" + filter + "'");
    }
    return suite;
}

}  // namespace nlscat::checks
