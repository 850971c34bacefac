#include "bregbox/subproblem.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>

#include <random>

using namespace bregbox;

namespace {

GridPtr unit_weight_grid(int n) {
    Vec nodes(n), weights(n);
    for (int i = 0; i < n; ++i) nodes[i] = i;
    weights.setOnes();
    return std::make_shared<const Grid>(nodes, weights);
}

// T1: S = I (unit weights), z = (2, 0.5, -3), alpha = 1, box [-1,1]^3
QuadSubproblem t1_instance() {
    GridPtr g = unit_weight_grid(3);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(3, 3));
    Vec b(3);
    b << 2.0, 0.5, -3.0;
    return QuadSubproblem(op, GridFunction(g, b), 1.0,
                          BoxConstraints::constant(g, -1.0, 1.0));
}

QuadSubproblem random_instance(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GridPtr g = Grid::uniform(0.0, 1.0, n);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
    GridFunction b(g);
    for (int i = 0; i < n; ++i) b.values()[i] = 2.0 * normal(rng);
    const double alpha = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    BoxConstraints box =
        BoxConstraints::constant(g, -(0.2 + 1.3 * unit(rng)), 0.2 + 1.3 * unit(rng));
    return QuadSubproblem(OperatorHandle::dense(g, g, m), b, alpha, box);
}

}  // namespace

TEST_CASE("separable instance has the closed-form clipped solution") {
    QuadSubproblem sub = t1_instance();
    // per node: min (u-b)^2/2 + u^2/2 -> u = b/2, then clip
    Vec expect(3);
    expect << 1.0, 0.25, -1.0;

    SubproblemSolution pg = solve_projected_gradient(sub);
    CHECK((pg.u.values() - expect).norm() < 1e-9);
    CHECK(pg.kkt_residual <= 1e-10);
    CHECK(pg.w_cone_residual < 1e-8);

    SubproblemSolution pdas = solve_pdas(sub);
    CHECK((pdas.u.values() - expect).norm() < 1e-9);

    GridFunction oracle = brute_force_oracle(sub);
    CHECK((oracle.values() - expect).norm() < 1e-12);
}

TEST_CASE("pdas reports the activity pattern of the closed form") {
    QuadSubproblem sub = t1_instance();
    SubproblemSolution sol = solve_pdas(sub);
    ActiveSetReport report = classify_active(sub.box, sol.u, sub.box.default_activity_tol());
    CHECK(report.upper_active == std::vector<int>{0});
    CHECK(report.lower_active == std::vector<int>{2});
    CHECK(report.inactive == std::vector<int>{1});
}

TEST_CASE("huge alpha drives the solution to P(0)") {
    QuadSubproblem sub = t1_instance();
    sub.alpha = 1e8;
    SubproblemSolution sol = solve_projected_gradient(sub);
    GridFunction p0 = sub.box.project(GridFunction(sub.op.domain_grid()));
    CHECK((sol.u - p0).norm() < 1e-6);
}

TEST_CASE("point box is solved in one iteration") {
    GridPtr g = unit_weight_grid(3);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(3, 3));
    GridFunction lo(g), hi(g);
    lo.values().setConstant(0.4);
    hi.values().setConstant(0.4);
    Vec b(3);
    b << 5.0, -5.0, 0.0;
    QuadSubproblem sub(op, GridFunction(g, b), 1.0, BoxConstraints(lo, hi));

    SubproblemSolution pg = solve_projected_gradient(sub);
    CHECK(pg.iterations <= 1);
    CHECK(pg.u.values().isApproxToConstant(0.4));
    SubproblemSolution pdas = solve_pdas(sub);
    CHECK(pdas.iterations <= 1);
    CHECK(pdas.u.values().isApproxToConstant(0.4));
}

TEST_CASE("interior solution matches the unconstrained normal equations") {
    std::mt19937_64 rng(31);
    GridPtr g = Grid::uniform(0.0, 1.0, 5);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat m(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = normal(rng);
    GridFunction b(g);
    for (int i = 0; i < 5; ++i) b.values()[i] = normal(rng);
    const double alpha = 2.0;
    QuadSubproblem sub(OperatorHandle::dense(g, g, m), b, alpha,
                       BoxConstraints::constant(g, -1e6, 1e6));

    // (M^T W M + alpha W) u = M^T W b in the weighted formulation
    const Vec& w = g->weights();
    Mat gram = m.transpose() * w.asDiagonal() * m;
    gram += (alpha * w).asDiagonal();
    Vec direct = gram.ldlt().solve(m.transpose() * (w.asDiagonal() * b.values()));

    SubproblemSolution pdas = solve_pdas(sub);
    CHECK((pdas.u.values() - direct).norm() < 1e-9);
    ActiveSetReport report = classify_active(sub.box, pdas.u, sub.box.default_activity_tol());
    CHECK(report.lower_active.empty());
    CHECK(report.upper_active.empty());

    GridFunction oracle = brute_force_oracle(sub);
    CHECK((oracle.values() - direct).norm() < 1e-9);
}

TEST_CASE("zero operator reduces the oracle to the projection of zero") {
    GridPtr g = unit_weight_grid(4);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Zero(4, 4));
    Vec b(4);
    b << 1.0, -2.0, 3.0, -4.0;
    BoxConstraints box = BoxConstraints::constant(g, 0.25, 2.0);
    QuadSubproblem sub(op, GridFunction(g, b), 1.0, box);
    GridFunction oracle = brute_force_oracle(sub);
    CHECK(oracle.values().isApproxToConstant(0.25));
}

TEST_CASE("both solvers match the brute-force oracle on random instances") {
    std::mt19937_64 rng(424242);
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        QuadSubproblem sub = random_instance(rng, 4);
        GridFunction oracle = brute_force_oracle(sub);
        SolveOptions opts;
        opts.tol = 1e-12;
        worst = std::max(worst, (solve_projected_gradient(sub, opts).u - oracle).norm());
        worst = std::max(worst, (solve_pdas(sub, opts).u - oracle).norm());
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("solvers agree with each other within 10x tolerance") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        QuadSubproblem sub = random_instance(rng, 8);
        SolveOptions opts;
        opts.tol = 1e-11;
        SubproblemSolution a = solve_projected_gradient(sub, opts);
        SubproblemSolution b = solve_pdas(sub, opts);
        CHECK((a.u - b.u).norm() < 10.0 * 1e-10);
    }
}

TEST_CASE("solution dominates the projected start and random feasible points") {
    std::mt19937_64 rng(13);
    QuadSubproblem sub = random_instance(rng, 6);
    SubproblemSolution sol = solve_projected_gradient(sub);

    auto objective = [&](const GridFunction& u) {
        GridFunction r = sub.op.apply(u);
        r -= sub.target;
        return 0.5 * r.norm_sq() + 0.5 * sub.alpha * u.norm_sq();
    };
    const double f_star = objective(sol.u);
    CHECK(f_star <= objective(sub.box.project(GridFunction(sub.op.domain_grid()))) + 1e-12);
    for (int s = 0; s < 1000; ++s)
        CHECK(f_star <= objective(sub.box.sample_uniform(rng)) + 1e-12);
}

TEST_CASE("solution norm is nonincreasing in alpha") {
    std::mt19937_64 rng(17);
    QuadSubproblem sub = random_instance(rng, 6);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1e-2, 1e-1, 1.0, 1e1, 1e2}) {
        sub.alpha = alpha;
        SubproblemSolution sol = solve_projected_gradient(sub);
        CHECK(sol.u.norm() <= prev + 1e-8);
        prev = sol.u.norm();
    }
}

TEST_CASE("kkt_residual certifies the subgradient-form optimality") {
    QuadSubproblem sub = t1_instance();
    GridPtr g = sub.op.domain_grid();
    Vec uv(3);
    uv << 1.0, 0.25, -1.0;
    GridFunction u(g, uv);
    GridFunction lambda_prev(g);  // zero

    // recovered w = (0, 0, -1): correct signs at the active nodes
    CHECK(kkt_residual(sub, u, lambda_prev) == doctest::Approx(0.0).epsilon(1e-12));

    // interior unconstrained minimizer has w = 0
    QuadSubproblem wide = t1_instance();
    wide.box = BoxConstraints::constant(g, -100.0, 100.0);
    Vec half = wide.target.values() / 2.0;
    CHECK(kkt_residual(wide, GridFunction(g, half), lambda_prev) < 1e-12);

    // perturbation off the solution is visible
    GridFunction off = u;
    off.values()[1] += 0.1;
    CHECK(kkt_residual(sub, off, lambda_prev) > 1e-3);
}

TEST_CASE("max_iters exhaustion raises a SolveError carrying the best iterate") {
    QuadSubproblem sub = t1_instance();
    SolveOptions opts;
    opts.tol = 1e-16;
    opts.max_iters = 0;  // no iterations allowed from the cold start
    try {
        solve_projected_gradient(sub, opts);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.best().u.size() == 3);
        CHECK(sub.box.feasibility_violation(e.best().u) == 0.0);
    }
}

TEST_CASE("alpha must be positive") {
    GridPtr g = unit_weight_grid(2);
    OperatorHandle op = OperatorHandle::dense(g, g, Mat::Identity(2, 2));
    CHECK_THROWS_AS(QuadSubproblem(op, GridFunction(g), 0.0,
                                   BoxConstraints::constant(g, -1.0, 1.0)),
                    std::invalid_argument);
}
