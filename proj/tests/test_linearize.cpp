#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlscat/errors.hpp"
#include "nlscat/linearize.hpp"

using namespace nlscat;

namespace {

const WaveContext kCtx{2.0, 2};

std::shared_ptr<ExperimentPlan> make_plan(int densities, std::vector<double> ladder, int max_order, int scheme = 1) {
    auto dirs = DirectionSet::build(16, 2);
    auto plan = std::make_shared<ExperimentPlan>();
    for (int j = 0; j < densities; ++j) {
        CVector v(16);
        for (Eigen::Index i = 0; i < 16; ++i) {
            v[i] = std::polar(1.0, 0.4 * static_cast<double>((j + 1) * i * i));
        }
        plan->densities.emplace_back(dirs, v);
    }
    plan->delta = 0.05;
    plan->eps_ladder = std::move(ladder);
    plan->obs = DirectionSet::build(12, 2);
    plan->max_order = max_order;
    plan->fd_scheme = scheme;
    return plan;
}

ComplexField bump(const GridPtr& g, cplx amp) {
    Profile p;
    p.amplitude = amp;
    p.center = {0.15, 0.05, 0.0};
    return sample_profiles(g, {p});
}

}  // namespace

TEST_CASE("record keys") {
    CHECK(format_eps_key({0, 2, 1}) == "eps:(0,2,1)");
    CHECK(parse_eps_key("eps:(0,2,1)") == EpsIndex{0, 2, 1});
    CHECK(parse_eps_key(format_eps_key({3})) == EpsIndex{3});
    CHECK_THROWS_AS(parse_eps_key("eps:0,1"), Error);
    CHECK_THROWS_AS(parse_eps_key("eps:(0,x)"), Error);
    CHECK_THROWS_AS(parse_eps_key("eps:()"), Error);
}

TEST_CASE("plan validation and record counts") {
    const double d = 0.05;
    CHECK(ExperimentPlan::default_ladder(d) == std::vector<double>{d / 4, d / 8, d / 16});
    // 1 + 2 * 2 + 1 * 4 = 9
    CHECK(make_plan(2, {d / 4, d / 8}, 2)->required_records().size() == 9);
    // 1 + 3 * 3 = 10
    CHECK(make_plan(3, ExperimentPlan::default_ladder(d), 1)->required_records().size() == 10);
    // 1 + 3 * 3 + 3 * 9 + 1 * 27 = 64
    CHECK(make_plan(3, ExperimentPlan::default_ladder(d), 3)->required_records().size() == 64);

    const auto p = make_plan(2, ExperimentPlan::default_ladder(d), 2);
    CHECK(p->records_for({1, 0}) == std::vector<EpsIndex>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    CHECK(p->records_for({1, 1}).size() == 1 + 3 * 3);
    CHECK(make_plan(1, ExperimentPlan::default_ladder(d), 1, 2)->stencil_levels() == std::vector<int>{2, 3});

    const HerglotzDensity g = p->incident_density({2, 0});
    CHECK((g.values() - (d / 8) * d * d * p->densities[0].values()).norm() < 1e-18);

    CHECK_THROWS_AS(make_plan(1, {d / 8, d / 4}, 1)->validate(), ConstructionError);
    CHECK_THROWS_AS(make_plan(1, {d}, 1)->validate(), ConstructionError);
    CHECK_THROWS_AS(make_plan(1, {d / 4, d / 5}, 1, 2)->validate(), ConstructionError);
    CHECK_THROWS_AS(make_plan(1, {d / 4}, 2)->validate(), ConstructionError);
    CHECK_THROWS_AS(p->records_for({0, 0}), Error);
    CHECK_THROWS_AS(p->records_for({2, 0}), Error);
}

TEST_CASE("Richardson extrapolation is exact on polynomials") {
    const std::vector<double> h = {0.4, 0.2, 0.1};
    std::vector<CVector> v;
    for (double s : h) {
        v.push_back(CVector::Constant(2, cplx(1.0 + 3.0 * s - 2.0 * s * s, 0.5 * s)));
    }
    CHECK((richardson(h, v, 1) - CVector::Constant(2, 1.0)).norm() < 1e-14);
    std::vector<CVector> w;
    for (double s : h) {
        w.push_back(CVector::Constant(1, cplx(2.0 + s * s - s * s * s)));
    }
    CHECK(std::abs(richardson(h, w, 2)[0] - 2.0) < 1e-14);
    CHECK_THROWS_AS(richardson(h, {v[0]}, 1), Error);
}

TEST_CASE("zero model gives a complete dataset of zero records") {
    auto grid = DiskGrid::build(1.0, 12, 2);
    const auto plan = make_plan(2, {0.0125, 0.00625}, 2);
    const ScatteringDataset data = synthesize_dataset(NonlinearityModel::zero(grid), plan, kCtx);
    CHECK(data.complete);
    CHECK(data.records.size() == data.required_count());
    for (const auto& [k, ff] : data.records) {
        CHECK(ff.values().norm() == 0.0);
    }
}

TEST_CASE("first-order derivative of a linear model is exact") {
    auto grid = DiskGrid::build(1.0, 16, 2);
    const ForwardSolver solver(grid, kCtx);
    const ComplexField q = bump(grid, cplx(2.0, 0.5));
    const auto model = NonlinearityModel::from_derivatives({q}, 2.5, 1e6);
    const auto plan = make_plan(2, ExperimentPlan::default_ladder(0.05), 1);
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, default_synthesis_options());
    for (int j = 0; j < 2; ++j) {
        std::vector<int> alpha(2, 0);
        alpha[static_cast<std::size_t>(j)] = 1;
        const MixedDerivative md = mixed_derivative(data, alpha);
        const FarField exact = first_order_farfield(solver, q, plan->densities[static_cast<std::size_t>(j)], 0.05, plan->obs);
        CHECK((md.value.values() - exact.values()).norm() / exact.values().norm() < 1e-9);
        CHECK(md.levels.size() == 3);
    }
    // the field-level helper agrees with the dense linear solve
    const ComplexField w = first_order_field(solver, q, plan->densities[0], 0.05);
    const HerglotzDensity g = plan->densities[0].scaled(0.05 * 0.05);
    const ComplexField ref = solver.solve_linear_total(q, herglotz_on_grid(g, kCtx, grid));
    CHECK((w.values() - ref.values()).norm() / ref.values().norm() < 1e-12);
}

TEST_CASE("second-order scheme converges at second order") {
    auto grid = DiskGrid::build(1.0, 16, 2);
    const ForwardSolver solver(grid, kCtx);
    const ComplexField q1 = bump(grid, 1.0);
    const auto model = NonlinearityModel::from_derivatives({q1, bump(grid, cplx(0.0, 1.5))}, 1.6);
    const double d = 0.05;
    const auto plan = make_plan(1, {d / 2, d / 4, d / 8, d / 16}, 1, 2);
    const ScatteringDataset data = synthesize_dataset(solver, model, plan, default_synthesis_options());
    const MixedDerivative md = mixed_derivative(data, {1});
    const CVector exact = first_order_farfield(solver, q1, plan->densities[0], d, plan->obs).values();
    REQUIRE(md.levels.size() == 3);
    const double e0 = (md.levels[0].values() - exact).norm();
    const double e1 = (md.levels[1].values() - exact).norm();
    const double e2 = (md.levels[2].values() - exact).norm();
    CHECK(e0 / e1 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK((md.value.values() - exact).norm() < e2 / 4.0);
}

TEST_CASE("missing records are listed") {
    auto grid = DiskGrid::build(1.0, 12, 2);
    const auto plan = make_plan(2, {0.0125, 0.00625}, 2);
    ScatteringDataset data = synthesize_dataset(NonlinearityModel::zero(grid), plan, kCtx);
    data.records.erase({1, 1});
    data.records.erase({2, 0});
    try {
        mixed_derivative(data, {1, 1});
        FAIL("expected MissingRecordsError");
    } catch (const MissingRecordsError& e) {
        CHECK(e.missing() == std::vector<std::string>{"eps:(1,1)", "eps:(2,0)"});
    }
    CHECK_NOTHROW(mixed_derivative(data, {0, 1}));
}

TEST_CASE("synthesis of a subset and determinism") {
    auto grid = DiskGrid::build(1.0, 12, 2);
    const ForwardSolver solver(grid, kCtx);
    const auto model = NonlinearityModel::from_derivatives({bump(grid, 1.0), bump(grid, 1.0)}, 1.2);
    const auto plan = make_plan(2, {0.0125, 0.00625}, 2);
    const std::vector<EpsIndex> only = {{0, 0}, {1, 1}};
    const ScatteringDataset part = synthesize_dataset(solver, model, plan, default_synthesis_options(), &only);
    CHECK(part.records.size() == 2);
    const ScatteringDataset a = synthesize_dataset(solver, model, plan, default_synthesis_options());
    const ScatteringDataset b = synthesize_dataset(solver, model, plan, default_synthesis_options());
    CHECK(a.records.at({1, 1}).values() == part.records.at({1, 1}).values());
    for (const auto& [k, ff] : a.records) {
        CHECK(ff.values() == b.records.at(k).values());
    }
}
