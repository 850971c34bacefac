#include "bregbox/operators.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace bregbox;

namespace {

GridPtr unit_weight_grid(int n) {
    Vec nodes(n), weights(n);
    for (int i = 0; i < n; ++i) nodes[i] = i;
    weights.setOnes();
    return std::make_shared<const Grid>(nodes, weights);
}

GridFunction random_fn(const GridPtr& g, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    GridFunction f(g);
    for (int i = 0; i < g->size(); ++i) f.values()[i] = normal(rng);
    return f;
}

}  // namespace

TEST_CASE("dense identity apply") {
    GridPtr g = unit_weight_grid(3);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(3, 3));
    Vec uv(3);
    uv << 2.0, 0.5, -3.0;
    GridFunction out = op.apply(GridFunction(g, uv));
    CHECK(out.values().isApprox(uv));
}

TEST_CASE("poisson1d reproduces the analytic solution of -y'' = 1") {
    GridPtr g = Grid::uniform(0.0, 1.0, 201);
    OperatorHandle op = OperatorHandle::poisson1d(g);
    GridFunction u(g);
    u.values().setOnes();
    GridFunction y = op.apply(u);
    // y(x) = x(1-x)/2, midpoint value 1/8
    CHECK(std::abs(y[100] - 0.125) < 1e-4);
    for (int i = 0; i < g->size(); ++i) {
        const double x = g->nodes()[i];
        CHECK(std::abs(y[i] - 0.5 * x * (1.0 - x)) < 1e-4);
    }
    CHECK(y[0] == 0.0);
    CHECK(y[200] == 0.0);
}

TEST_CASE("fredholm with constant kernel integrates exactly on a uniform grid") {
    GridPtr g = Grid::uniform(0.0, 1.0, 41);
    OperatorHandle op = OperatorHandle::fredholm(g, g, [](double, double) { return 1.0; });
    GridFunction u(g);
    u.values().setOnes();
    GridFunction y = op.apply(u);
    for (int i = 0; i < g->size(); ++i) CHECK(std::abs(y[i] - 1.0) < 1e-8);
}

TEST_CASE("adjoint is the transpose under unit weights") {
    GridPtr g = unit_weight_grid(2);
    Mat m(2, 2);
    m << 0, 1, 0, 0;
    OperatorHandle op = OperatorHandle::dense(g, g, m);
    Vec yv(2);
    yv << 1.0, 0.0;
    GridFunction out = op.apply_adjoint(GridFunction(g, yv));
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(1.0));
}

TEST_CASE("adjoint respects the weighted inner products") {
    // W_U = diag(2,2), W_Y = diag(1,1), M = I: S* y = W_U^{-1} y
    Vec nodes(2), wu(2), wy(2);
    nodes << 0.0, 1.0;
    wu << 2.0, 2.0;
    wy << 1.0, 1.0;
    auto gu = std::make_shared<const Grid>(nodes, wu);
    auto gy = std::make_shared<const Grid>(nodes, wy);
    OperatorHandle op = OperatorHandle::dense(gu, gy, Mat::Identity(2, 2));
    Vec yv(2);
    yv << 1.0, 1.0;
    GridFunction out = op.apply_adjoint(GridFunction(gy, yv));
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));
}

TEST_CASE("fredholm with symmetric kernel on equal grids is self-adjoint") {
    GridPtr g = Grid::uniform(0.0, 1.0, 31);
    OperatorHandle op = OperatorHandle::fredholm(
        g, g, [](double x, double t) { return std::exp(-8.0 * (x - t) * (x - t)); });
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        GridFunction y = random_fn(g, rng);
        CHECK((op.apply(y) - op.apply_adjoint(y)).norm() < 1e-10);
    }
}

TEST_CASE("poisson1d is self-adjoint on a uniform grid") {
    GridPtr g = Grid::uniform(0.0, 1.0, 64);
    OperatorHandle op = OperatorHandle::poisson1d(g);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        GridFunction y = random_fn(g, rng);
        CHECK((op.apply(y) - op.apply_adjoint(y)).norm() < 1e-12);
    }
    CHECK(adjoint_consistency_check(op, 100, 1) < 1e-10);
}

TEST_CASE("adjoint identity holds for random pairs on all kinds") {
    std::mt19937_64 rng(99);
    GridPtr g = Grid::uniform(0.0, 2.0, 27);
    Mat m(27, 27);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 27; ++i)
        for (int j = 0; j < 27; ++j) m(i, j) = normal(rng);

    const OperatorHandle kinds[] = {
        OperatorHandle::dense(g, g, m),
        OperatorHandle::fredholm(g, g, [](double x, double t) { return 1.0 + x * t; }),
        OperatorHandle::poisson1d(g)};
    for (const OperatorHandle& op : kinds) {
        const double scale = std::max(1.0, operator_norm_estimate(op, 50));
        CHECK(adjoint_consistency_check(op, 100, 2024) < 1e-10 * scale);
    }
}

TEST_CASE("a deliberately wrong adjoint is detected") {
    GridPtr g = unit_weight_grid(4);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = normal(rng);
    Mat bad = m.transpose();
    bad(1, 2) += 0.25;
    OperatorHandle op = OperatorHandle::dense_with_adjoint(g, g, m, bad);
    CHECK(adjoint_consistency_check(op, 100, 7) > 1e-3);
}

TEST_CASE("apply and apply_adjoint are linear") {
    GridPtr g = Grid::uniform(0.0, 1.0, 21);
    OperatorHandle op = OperatorHandle::fredholm(
        g, g, [](double x, double t) { return std::cos(3.0 * (x - t)); });
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction u = random_fn(g, rng), v = random_fn(g, rng);
        const double a = 1.7, b = -0.3;
        GridFunction comb = a * u + b * v;
        GridFunction lhs = op.apply(comb);
        GridFunction rhs = a * op.apply(u) + b * op.apply(v);
        CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        GridFunction lhs2 = op.apply_adjoint(comb);
        GridFunction rhs2 = a * op.apply_adjoint(u) + b * op.apply_adjoint(v);
        CHECK((lhs2 - rhs2).norm() <= 1e-12 * (1.0 + lhs2.norm()));
    }
}

TEST_CASE("grid mismatch in apply is a structural error") {
    GridPtr g = Grid::uniform(0.0, 1.0, 5);
    GridPtr other = Grid::uniform(0.0, 1.0, 6);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(5, 5));
    CHECK_THROWS_AS(op.apply(GridFunction(other)), std::invalid_argument);
    CHECK_THROWS_AS(op.apply_adjoint(GridFunction(other)), std::invalid_argument);
}

TEST_CASE("operator norm estimates") {
    GridPtr g2 = unit_weight_grid(2);
    OperatorHandle ident = OperatorHandle::dense(g2, g2, Mat::Identity(2, 2));
    CHECK(std::abs(operator_norm_estimate(ident, 10) - 1.0) < 1e-8);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    OperatorHandle diag = OperatorHandle::dense(g2, g2, d);
    CHECK(std::abs(operator_norm_estimate(diag, 50) - 3.0) < 1e-6);

    GridPtr g = Grid::uniform(0.0, 1.0, 201);
    OperatorHandle pois = OperatorHandle::poisson1d(g);
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(operator_norm_estimate(pois, 100) - 1.0 / pi_sq) < 0.01 / pi_sq);
}

TEST_CASE("norm estimate is nondecreasing in the iteration count") {
    GridPtr g = Grid::uniform(0.0, 1.0, 31);
    OperatorHandle op = OperatorHandle::fredholm(
        g, g, [](double x, double t) { return std::exp(-4.0 * (x - t) * (x - t)); });
    double prev = 0.0;
    for (int iters : {1, 2, 5, 10, 25, 60}) {
        const double est = operator_norm_estimate(op, iters);
        CHECK(est >= prev - 1e-12);
        prev = est;
    }
}

TEST_CASE("dense matrix round-trips through the text format") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "bregbox_matrix_test.txt";
    {
        std::ofstream out(path);
        out << "2 3\n1 2 3\n4 5 -6.5\n";
    }
    Mat m = load_dense_matrix(path.string());
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == doctest::Approx(-6.5));
    fs::remove(path);

    CHECK_THROWS_AS(load_dense_matrix("/nonexistent/bregbox.txt"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "2 2\n1 2 3\n";  // too few entries
    }
    CHECK_THROWS_AS(load_dense_matrix(path.string()), std::runtime_error);
    fs::remove(path);
}

TEST_CASE("poisson1d dense materialization matches apply") {
    GridPtr g = Grid::uniform(0.0, 1.0, 17);
    OperatorHandle op = OperatorHandle::poisson1d(g);
    Mat m = op.dense_matrix();
    std::mt19937_64 rng(4);
    GridFunction u = random_fn(g, rng);
    CHECK((m * u.values() - op.apply(u).values()).norm() < 1e-13);
    CHECK((m - m.transpose()).norm() < 1e-13);  // symmetric under equal interior weights
}
