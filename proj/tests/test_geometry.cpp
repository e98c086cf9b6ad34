#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlscat/errors.hpp"
#include "nlscat/geometry.hpp"

using namespace nlscat;

TEST_CASE("node counts match a direct enumeration of cell centres") {
    CHECK(DiskGrid::build(1.0, 8, 2)->size() == 52);
    CHECK(DiskGrid::build(1.0, 8, 3)->size() == 280);
    CHECK(DiskGrid::build(1.0, 48, 2)->size() == 1804);
}

TEST_CASE("grid geometry") {
    auto g = DiskGrid::build(2.0, 16, 2);
    CHECK(g->spacing() == doctest::Approx(0.25));
    CHECK(g->cell_volume() == doctest::Approx(0.0625));
    CHECK(g->total_weight() == doctest::Approx(g->cell_volume() * static_cast<double>(g->size())));
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(norm(g->node(i)) < g->radius());
        const auto idx = g->lattice_index(i);
        REQUIRE(g->node_at(idx).has_value());
        CHECK(*g->node_at(idx) == i);
        CHECK(g->find_node(g->node(i)) == std::optional<std::size_t>(i));
    }
    CHECK_FALSE(g->node_at({0, 0, 0}).has_value());  // corner cell lies outside the disk
    CHECK_FALSE(g->find_node({0.01, 0.0, 0.0}).has_value());
    CHECK(g->same_layout(*DiskGrid::build(2.0, 16, 2)));
    CHECK_FALSE(g->same_layout(*DiskGrid::build(2.0, 18, 2)));
}

TEST_CASE("grid volume converges to the ball volume") {
    for (int d : {2, 3}) {
        const double e1 = std::abs(DiskGrid::build(1.0, 16, d)->total_weight() - ball_volume(1.0, d));
        const double e2 = std::abs(DiskGrid::build(1.0, 64, d == 2 ? 2 : 3)->total_weight() - ball_volume(1.0, d));
        CHECK(e2 < e1);
        CHECK(e2 / ball_volume(1.0, d) < 0.03);
    }
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(DiskGrid::build(0.0, 16, 2), ConstructionError);
    CHECK_THROWS_AS(DiskGrid::build(1.0, 4, 2), ConstructionError);
    CHECK_THROWS_AS(DiskGrid::build(1.0, 16, 1), ConstructionError);
}

TEST_CASE("direction sets") {
    auto d2 = DirectionSet::build(8, 2);
    CHECK(d2->size() == 8);
    CHECK(d2->angle(2) == doctest::Approx(kPi / 2.0));
    double sum = 0.0;
    for (double w : d2->weights()) {
        sum += w;
    }
    CHECK(sum == doctest::Approx(2.0 * kPi));

    auto d3 = DirectionSet::build(50, 3);
    sum = 0.0;
    Point mean{};
    for (std::size_t i = 0; i < d3->size(); ++i) {
        sum += d3->weight(i);
        CHECK(norm(d3->direction(i)) == doctest::Approx(1.0));
        for (int a = 0; a < 3; ++a) {
            mean[static_cast<std::size_t>(a)] += d3->direction(i)[static_cast<std::size_t>(a)] / 50.0;
        }
    }
    CHECK(sum == doctest::Approx(4.0 * kPi));
    CHECK(norm(mean) < 0.05);  // Fibonacci points are nearly balanced

    auto custom = DirectionSet::from_directions({{2.0, 0.0, 0.0}, {0.0, 3.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}}, 2);
    CHECK(custom->direction(1)[1] == 1.0);
    CHECK(custom->weight(0) == doctest::Approx(kPi / 2.0));
    CHECK_THROWS_AS(DirectionSet::build(3, 2), ConstructionError);
    CHECK_THROWS_AS(DirectionSet::from_directions({{0.0, 0.0, 0.0}}, 2), ConstructionError);
    CHECK(sphere_area(2) == doctest::Approx(2.0 * kPi));
    CHECK(ball_volume(2.0, 3) == doctest::Approx(32.0 * kPi / 3.0));
}
