#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "nlscat/errors.hpp"
#include "nlscat/inverse.hpp"

using namespace nlscat;

namespace {

CMatrix test_matrix(Eigen::Index m, Eigen::Index n) {
    CMatrix A(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            A(i, j) = std::polar(1.0 / (1.0 + static_cast<double>(i + 2 * j)), 0.37 * static_cast<double>(i * j + 1));
        }
    }
    return A;
}

struct Problem {
    GridPtr grid = DiskGrid::build(1.0, 20, 2);
    WaveContext ctx{4.0, 2};
    ComplexField q1 = ComplexField::zeros(grid);
    ComplexField q2 = ComplexField::zeros(grid);
    std::shared_ptr<ExperimentPlan> plan = std::make_shared<ExperimentPlan>();

    Problem() {
        Profile a;
        a.amplitude = 1.0;
        a.center = {0.2, 0.1, 0.0};
        Profile b;
        b.amplitude = 1.5;
        b.center = {-0.1, 0.25, 0.0};
        q1 = sample_profiles(grid, {a});
        q2 = sample_profiles(grid, {b});
        auto dirs = DirectionSet::build(32, 2);
        for (int j = 0; j < 6; ++j) {
            CVector v(32);
            for (Eigen::Index i = 0; i < 32; ++i) {
                v[i] = std::polar(1.0, 1.3 * static_cast<double>((j + 2) * i * i + j));
            }
            plan->densities.emplace_back(dirs, v);
        }
        plan->delta = 0.08;
        plan->eps_ladder = ExperimentPlan::default_ladder(0.08);
        plan->obs = DirectionSet::build(32, 2);
        plan->max_order = 2;
    }

    double rel_error(const ComplexField& got, const ComplexField& want) const {
        return ComplexField(grid, got.values() - want.values()).l2_norm() / want.l2_norm();
    }
};

}  // namespace

TEST_CASE("spectral norm matches the SVD") {
    const CMatrix A = test_matrix(20, 9);
    const double want = Eigen::JacobiSVD<CMatrix>(A).singularValues()[0];
    CHECK(spectral_norm(A) == doctest::Approx(want).epsilon(1e-9));
    CHECK(spectral_norm(CMatrix::Zero(3, 4)) == 0.0);
}

TEST_CASE("Tikhonov solves the regularised normal equations") {
    for (auto [m, n] : {std::pair<Eigen::Index, Eigen::Index>{25, 8}, {6, 14}}) {
        const CMatrix A = test_matrix(m, n);
        CVector d(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            d[i] = cplx(std::cos(static_cast<double>(i)), 1.0 / (1.0 + static_cast<double>(i)));
        }
        TikhonovOptions o;
        o.lambda_rel = 1e-4;
        const TikhonovResult r = tikhonov_solve(A, d, o);
        CHECK(r.lambda_abs == doctest::Approx(1e-4 * r.norm_A * r.norm_A));
        const CVector res = A.adjoint() * (A * r.x - d) + r.lambda_abs * r.x;
        CHECK(res.norm() < 1e-12 * (A.adjoint() * d).norm());
        CHECK(r.misfit == doctest::Approx((A * r.x - d).norm()));
    }
}

TEST_CASE("Tikhonov edge cases and the discrepancy principle") {
    const CMatrix A = test_matrix(30, 10);
    CVector x0 = CVector::Ones(10);
    CVector noise(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
        noise[i] = 1e-3 * std::polar(1.0, 2.1 * static_cast<double>(i));
    }
    const CVector d = A * x0 + noise;
    TikhonovOptions o;
    o.discrepancy = true;
    o.noise = noise.norm();
    const TikhonovResult r = tikhonov_solve(A, d, o);
    CHECK(r.misfit <= o.tau * o.noise * (1.0 + 1e-6));
    CHECK(r.lambda_rel > 1e-8);

    const TikhonovResult z = tikhonov_solve(A, CVector::Zero(30));
    CHECK(z.x.norm() == 0.0);
    CHECK_THROWS_AS(tikhonov_solve(CMatrix::Zero(30, 10), d), IllPosedError);
}

TEST_CASE("zero dataset gives zero coefficients") {
    Problem p;
    const ForwardSolver solver(p.grid, p.ctx);
    const ScatteringDataset data = synthesize_dataset(solver, NonlinearityModel::zero(p.grid), p.plan,
                                                      default_synthesis_options());
    const ReconstructionResult r = recover_all(data, solver, 2, InverseOptions{});
    REQUIRE(r.coefficients.size() == 2);
    CHECK(r.coefficients[0].sup_norm() == 0.0);
    CHECK(r.coefficients[1].sup_norm() == 0.0);
}

TEST_CASE("inverse-crime recovery of linear and quadratic coefficients") {
    Problem p;
    const ForwardSolver solver(p.grid, p.ctx);
    const auto model = NonlinearityModel::from_derivatives({p.q1, p.q2}, 1.3);
    const ScatteringDataset data = synthesize_dataset(solver, model, p.plan, default_synthesis_options());
    InverseOptions o;
    const ReconstructionResult r = recover_all(data, solver, 2, o);
    const double e1 = p.rel_error(r.coefficients[0], p.q1);
    const double e2 = p.rel_error(r.coefficients[1], p.q2);
    MESSAGE("q1 error " << e1 << ", q2 error " << e2);
    CHECK(e1 < 0.05);
    CHECK(e2 < 0.1);
    CHECK(r.residuals[0] < 1e-3);
    CHECK(r.diagnostics[0].converged);

    // one isolated residual per pair of densities
    const auto iso = isolated_residuals(2, {p.q1}, data, solver, o);
    CHECK(iso.size() == 15);

    // records needed for order 2 are missing
    ScatteringDataset cut = data;
    cut.records.erase({1, 1, 0, 0, 0, 0});
    CHECK_THROWS_AS(recover_all(cut, solver, 2, o), MissingRecordsError);
}

TEST_CASE("dense-range probe decreases with the basis size") {
    Problem p;
    const ForwardSolver solver(p.grid, p.ctx);
    std::vector<Point> dirs;
    for (int j = 0; j < 90; ++j) {
        const double t = 2.0 * kPi * (j + 0.41) / 90.0;
        dirs.push_back({std::cos(t), std::sin(t), 0.0});
    }
    CVector v(90);
    for (Eigen::Index j = 0; j < 90; ++j) {
        v[j] = std::polar(1.0, 0.8 * static_cast<double>(j));
    }
    const ComplexField target = solver.apply_TqH(p.q1, HerglotzDensity(DirectionSet::from_directions(dirs, 2), v));
    const auto pts = dense_range_probe(solver, p.q1, target, {8, 16, 32, 64});
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].residual <= 1.05 * pts[i - 1].residual);
    }
    CHECK(pts.back().residual < 1e-4);
}
