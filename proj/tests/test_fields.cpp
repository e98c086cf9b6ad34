#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlscat/errors.hpp"
#include "nlscat/fields.hpp"
#include "nlscat/kernels.hpp"

using namespace nlscat;

namespace {

cplx bump(const Point& x) { return cplx(1.0 + x[0], 0.5 * x[1]) * std::exp(-dot(x, x) / 0.08); }

}  // namespace

TEST_CASE("fields reject bad input") {
    auto g = DiskGrid::build(1.0, 8, 2);
    CVector v = CVector::Zero(static_cast<Eigen::Index>(g->size()));
    v[3] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(ComplexField(g, v), Error);
    CHECK_THROWS_AS(ComplexField(g, CVector::Zero(3)), ConstructionError);
    auto dirs = DirectionSet::build(8, 2);
    CHECK_THROWS_AS(HerglotzDensity(dirs, CVector::Zero(7)), ConstructionError);
    const auto h = HerglotzDensity::constant(dirs, cplx(0.0, 2.0));
    CHECK(h.norm_sup() == 2.0);
    CHECK(h.norm_l2() == doctest::Approx(2.0 * std::sqrt(2.0 * kPi)));
    CHECK(h.scaled(0.5).norm_sup() == 1.0);
}

TEST_CASE("Herglotz waves") {
    const WaveContext ctx{3.0, 2};
    const auto g = HerglotzDensity::constant(DirectionSet::build(48, 2), 1.0);
    const std::vector<Point> pts = {{0.0, 0.0, 0.0}, {0.3, -0.4, 0.0}, {0.9, 0.1, 0.0}};
    const CVector u = herglotz_wave(g, ctx, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(u[static_cast<Eigen::Index>(i)] - 2.0 * kPi * specfun::bessel_j0(3.0 * norm(pts[i]))) < 1e-12);
    }
    // one direction in 3D is a weighted plane wave exp(-i k x . theta)
    auto one = DirectionSet::from_directions({{0.0, 0.0, 1.0}}, 3);
    const HerglotzDensity p(one, CVector::Ones(1));
    const WaveContext c3{2.0, 3};
    const CVector w = herglotz_wave(p, c3, std::vector<Point>{{0.1, 0.2, 0.3}});
    CHECK(std::abs(w[0] - 4.0 * kPi * std::polar(1.0, -0.6)) < 1e-13);
    // grid sampling agrees with pointwise synthesis
    auto grid = DiskGrid::build(1.0, 12, 2);
    const ComplexField f = herglotz_on_grid(g, ctx, grid);
    const CVector direct = herglotz_wave(g, ctx, grid->nodes());
    CHECK((f.values() - direct).norm() < 1e-13);
}

TEST_CASE("dense potential matrix") {
    const WaveContext ctx{2.0, 2};
    auto grid = DiskGrid::build(1.0, 12, 2);
    const PotentialOperator V(grid, ctx);
    REQUIRE(V.is_dense());
    const CMatrix& M = V.matrix();
    CHECK((M - M.transpose()).norm() == 0.0);
    const double w = grid->cell_volume();
    CHECK(M(0, 0) == kernels::self_cell_term(w, ctx));
    CHECK(std::abs(M(0, 1) - specfun::fundamental_solution(grid->node(0), grid->node(1), ctx) * w) < 1e-16);
    // equivalent-ball value in 2D
    CHECK(kernels::self_cell_term(w, ctx) == specfun::ball_self_integral(std::sqrt(w / kPi), ctx));
}

TEST_CASE("dense, matrix-free and pointwise potentials agree") {
    for (int d : {2, 3}) {
        const WaveContext ctx{1.5, d};
        auto grid = DiskGrid::build(1.0, d == 2 ? 16 : 8, d);
        const ComplexField f = ComplexField::from_function(grid, bump);
        const PotentialOperator dense(grid, ctx);
        const PotentialOperator free(grid, ctx, 1);
        CHECK_FALSE(free.is_dense());
        CHECK_THROWS_AS(free.matrix(), Error);
        const CVector a = dense.apply(f.values());
        const CVector b = free.apply(f.values());
        const CVector c = volume_potential(f, ctx, grid->nodes());
        CHECK((a - b).norm() / a.norm() < 1e-13);
        CHECK((a - c).norm() / a.norm() < 1e-13);
    }
}

TEST_CASE("far-field quadrature") {
    const WaveContext ctx{2.0, 2};
    auto grid = DiskGrid::build(1.0, 16, 2);
    auto obs = DirectionSet::build(12, 2);
    const ComplexField f = ComplexField::from_function(grid, bump);
    const FarField a = far_field_of_source(f, ctx, obs);
    const FarField b = FarFieldOperator(grid, obs, ctx).apply(f);
    CHECK((a.values() - b.values()).norm() < 1e-14);
    // a centred radial source has a direction-independent far field
    const ComplexField r = ComplexField::from_function(grid, [](const Point& x) { return cplx(std::exp(-8.0 * dot(x, x))); });
    const CVector v = far_field_of_source(r, ctx, obs).values();
    CHECK((v.array() - v[0]).abs().maxCoeff() < 1e-3 * std::abs(v[0]));
}

TEST_CASE("far-field asymptotics: residual slopes") {
    for (int d : {2, 3}) {
        const WaveContext ctx{2.0, d};
        auto grid = DiskGrid::build(1.0, d == 2 ? 24 : 12, d);
        const ComplexField f = ComplexField::from_function(grid, bump);
        const RadiationReport rep = verify_radiation(f, ctx, {25.0, 50.0, 100.0, 200.0});
        REQUIRE(rep.slope.has_value());
        CHECK(*rep.slope <= -(d + 1) / 2.0 + 0.2);
        CHECK_THROWS_AS(verify_radiation(f, ctx, {1.5, 3.0, 6.0}), Error);
        CHECK_THROWS_AS(verify_radiation(f, ctx, {25.0, 50.0}), Error);
    }
    // in 2D an out-of-plane component is dropped before normalising
    const WaveContext ctx{2.0, 2};
    const ComplexField f = ComplexField::from_function(DiskGrid::build(1.0, 24, 2), bump);
    const RadiationReport rep = verify_radiation(f, ctx, {25.0, 50.0, 100.0, 200.0}, {0.6, 0.0, 0.8});
    CHECK(norm(rep.direction) == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(rep.slope.has_value());
    CHECK(*rep.slope <= -1.3);
    CHECK_THROWS_AS(verify_radiation(f, ctx, {25.0, 50.0, 100.0}, {0.0, 0.0, 1.0}), Error);
}

TEST_CASE("Green identity for the corrected potential") {
    const WaveContext ctx{1.0, 2};
    double prev = 0.0;
    for (int n : {64, 128}) {
        auto grid = DiskGrid::build(1.0, n, 2);
        auto fn = [](const Point& x) { return cplx(std::exp(-dot(x, x) / 0.08)); };
        const ComplexField f = ComplexField::from_function(grid, fn);
        const double hf = grid->spacing() / 4.0;
        std::vector<Point> t;
        const std::vector<Point> centres = {{0.05, 0.1, 0.0}, {-0.2, 0.13, 0.0}, {0.27, -0.21, 0.0}};
        for (const Point& c : centres) {
            t.push_back(c);
            t.push_back({c[0] + hf, c[1], 0.0});
            t.push_back({c[0] - hf, c[1], 0.0});
            t.push_back({c[0], c[1] + hf, 0.0});
            t.push_back({c[0], c[1] - hf, 0.0});
        }
        PotentialOptions o;
        o.mode = PotentialOptions::Mode::Corrected;
        const CVector u = volume_potential(f, ctx, t, o);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < 3; ++i) {
            const Eigen::Index b = 5 * i;
            const cplx lap = (u[b + 1] + u[b + 2] + u[b + 3] + u[b + 4] - 4.0 * u[b]) / (hf * hf);
            worst = std::max(worst, std::abs(lap + u[b] + fn(centres[static_cast<std::size_t>(i)])));
        }
        CAPTURE(n);
        CHECK(worst < 5e-2);
        if (prev > 0.0) {
            CHECK(worst * 2.0 <= prev);
        }
        prev = worst;
    }
}

TEST_CASE("serial and OpenMP kernels are bit-identical") {
    const int saved = kernels::max_threads();
    kernels::set_threads(3);
    const WaveContext ctx{2.5, 2};
    auto grid = DiskGrid::build(1.0, 18, 2);
    auto dirs = DirectionSet::build(20, 2);
    CMatrix a, b;
    kernels::assemble_potential_serial(*grid, ctx, a);
    kernels::assemble_potential_omp(*grid, ctx, b);
    CHECK(a == b);
    kernels::assemble_far_field_serial(*grid, *dirs, ctx.k, a);
    kernels::assemble_far_field_omp(*grid, *dirs, ctx.k, b);
    CHECK(a == b);
    kernels::assemble_herglotz_serial(*dirs, ctx.k, grid->nodes(), a);
    kernels::assemble_herglotz_omp(*dirs, ctx.k, grid->nodes(), b);
    CHECK(a == b);
    const CVector f = CVector::Constant(static_cast<Eigen::Index>(grid->size()), cplx(1.0, -0.5));
    std::vector<std::int64_t> coincident(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        coincident[i] = static_cast<std::int64_t>(i);
    }
    CVector x, y;
    kernels::point_potential_serial(*grid, ctx, f, grid->nodes(), coincident, x);
    kernels::point_potential_omp(*grid, ctx, f, grid->nodes(), coincident, y);
    CHECK(x == y);
    kernels::set_threads(saved);
}
