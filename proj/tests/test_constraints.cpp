#include "bregbox/constraints.hpp"

#include <doctest.h>

#include <random>

using namespace bregbox;

namespace {

GridPtr unit_weight_grid(int n) {
    Vec nodes(n), weights(n);
    for (int i = 0; i < n; ++i) nodes[i] = i;
    weights.setOnes();
    return std::make_shared<const Grid>(nodes, weights);
}

}  // namespace

TEST_CASE("projection clips componentwise") {
    GridPtr g = unit_weight_grid(3);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    Vec v(3);
    v << 2.0, 0.5, -3.0;
    GridFunction p = box.project(GridFunction(g, v));
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.5);
    CHECK(p[2] == -1.0);

    // idempotence is exact
    GridFunction pp = box.project(p);
    CHECK(pp.values() == p.values());
}

TEST_CASE("degenerate box pins the value") {
    GridPtr g = unit_weight_grid(1);
    GridFunction lo(g), hi(g);
    lo.values()[0] = 0.3;
    hi.values()[0] = 0.3;
    BoxConstraints box(lo, hi);
    Vec v(1);
    v << -17.0;
    CHECK(box.project(GridFunction(g, v))[0] == doctest::Approx(0.3));
}

TEST_CASE("bound order and finiteness are validated") {
    GridPtr g = unit_weight_grid(2);
    GridFunction lo(g), hi(g);
    lo.values() << 1.0, 0.0;
    hi.values() << 0.0, 1.0;  // crossed at node 0
    CHECK_THROWS_AS(BoxConstraints(lo, hi), std::invalid_argument);
    lo.values() << 0.0, 0.0;
    hi.values() << 1.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(BoxConstraints(lo, hi), std::invalid_argument);
}

TEST_CASE("projection is nonexpansive") {
    GridPtr g = Grid::uniform(0.0, 1.0, 40);
    BoxConstraints box = BoxConstraints::constant(g, -0.7, 0.4);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        GridFunction v(g), w(g);
        for (int i = 0; i < g->size(); ++i) {
            v.values()[i] = normal(rng);
            w.values()[i] = normal(rng);
        }
        CHECK((box.project(v) - box.project(w)).norm() <= (v - w).norm() + 1e-14);
    }
}

TEST_CASE("normal cone residual") {
    GridPtr g = unit_weight_grid(3);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    const double tol = box.default_activity_tol();

    GridFunction u(g), w(g);
    u.values() << 0.0, 0.2, -0.5;  // strictly interior
    CHECK(normal_cone_residual(box, u, w, tol) == 0.0);

    u.values() << -1.0, 0.0, 0.0;  // at the lower bound at node 0
    w.values() << -1.0, 0.0, 0.0;
    CHECK(normal_cone_residual(box, u, w, tol) == 0.0);

    u.values() << 0.0, 0.3, 0.0;
    w.values() << 0.0, 0.5, 0.0;  // nonzero w at an interior node, unit weight
    CHECK(normal_cone_residual(box, u, w, tol) == doctest::Approx(0.5));

    GridFunction bad(g);
    bad.values() << 2.0, 0.0, 0.0;  // infeasible
    CHECK_THROWS_AS(normal_cone_residual(box, bad, w, tol), std::invalid_argument);
}

TEST_CASE("stationarity residual vanishes exactly at the clipped target") {
    GridPtr g = unit_weight_grid(3);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(3, 3));
    Vec zv(3);
    zv << 2.0, 0.5, -3.0;
    GridFunction z(g, zv);
    GridFunction u = box.project(z);  // (1, 0.5, -1)
    CHECK(stationarity_residual(op, z, box, u, 1.0) == doctest::Approx(0.0));

    // perturbing an interior node is detected
    GridFunction up = u;
    up.values()[1] += 0.1;
    CHECK(stationarity_residual(op, z, box, up, 1.0) >= 0.05);

    CHECK_THROWS_AS(stationarity_residual(op, z, box, u, 0.0), std::invalid_argument);
}

TEST_CASE("zero stationarity residual implies the variational inequality") {
    GridPtr g = unit_weight_grid(3);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(3, 3));
    Vec zv(3);
    zv << 2.0, 0.5, -3.0;
    GridFunction z(g, zv);
    GridFunction u = box.project(z);
    REQUIRE(stationarity_residual(op, z, box, u, 1.0) <= 1e-12);

    // p(u) = S*(z - Su); the VI (-p, v-u) >= 0 must hold for feasible v
    GridFunction p = op.apply_adjoint(z - op.apply(u));
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        GridFunction v = box.sample_uniform(rng);
        v -= u;
        CHECK(-p.dot(v) >= -1e-8);
    }
}

TEST_CASE("classify_active partitions the nodes") {
    GridPtr g = unit_weight_grid(5);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    const double tol = 1e-9;

    GridFunction u(g);
    u.values().setConstant(-1.0);
    ActiveSetReport all_lower = classify_active(box, u, tol);
    CHECK(all_lower.lower_active.size() == 5);
    CHECK(all_lower.upper_active.empty());
    CHECK(all_lower.inactive.empty());

    u.values().setConstant(0.25);
    ActiveSetReport interior = classify_active(box, u, tol);
    CHECK(interior.inactive.size() == 5);

    u.values() << -1.0, 0.0, 0.3, -0.2, 1.0;
    ActiveSetReport mixed = classify_active(box, u, tol);
    CHECK(mixed.lower_active == std::vector<int>{0});
    CHECK(mixed.upper_active == std::vector<int>{4});
    CHECK(mixed.inactive.size() == 3);
    CHECK(mixed.lower_active.size() + mixed.upper_active.size() + mixed.inactive.size() == 5);
}
