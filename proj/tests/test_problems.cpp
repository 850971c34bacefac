#include "bregbox/problems.hpp"

#include "bregbox/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bregbox;

namespace {

void check_reference_certificates(const ProblemInstance& p, bool non_attainable) {
    REQUIRE(p.reference.has_value());
    const ReferenceSolution& ref = *p.reference;
    const double est = operator_norm_estimate(p.op, 200);
    const double theta0 = 1.0 / (est * est);
    for (double scale : {0.1, 1.0, 10.0})
        CHECK(stationarity_residual(p.op, p.z, p.box, ref.u_dagger, scale * theta0) <= 1e-8);

    // stored adjoint state matches its recomputation from (S, z, u+)
    GridFunction residual = p.z;
    residual -= p.op.apply(ref.u_dagger);
    GridFunction p_recomputed = p.op.apply_adjoint(residual);
    CHECK((p_recomputed - ref.p_dagger).norm() <= 1e-10 * (1.0 + ref.p_dagger.norm()));

    GridFunction gap = p.op.apply(ref.u_dagger);
    gap -= p.z;
    if (non_attainable)
        CHECK(gap.norm() > 1e-3);
    else
        CHECK(gap.norm() <= 1e-12);

    if (ref.source_w && ref.inactive_set &&
        static_cast<int>(ref.inactive_set->size()) == p.op.domain_grid()->size()) {
        GridFunction back = p.box.project(p.op.apply_adjoint(*ref.source_w));
        CHECK((back - ref.u_dagger).norm() <= 1e-8);
    }
    if (ref.active_set && ref.inactive_set)
        CHECK(ref.active_set->size() + ref.inactive_set->size() ==
              static_cast<size_t>(p.op.domain_grid()->size()));
}

}  // namespace

TEST_CASE("attainable builder with the default control") {
    // box [-1,1]: u+ = P(0) = 0 and z = 0
    GridPtr g = Grid::uniform(0.0, 1.0, 51);
    OperatorHandle op = OperatorHandle::poisson1d(g);
    ProblemInstance p = make_attainable(op, BoxConstraints::constant(g, -1.0, 1.0));
    CHECK(p.z.norm() == 0.0);
    CHECK(p.reference->u_dagger.norm() == 0.0);
    check_reference_certificates(p, false);

    // run stays at u_0 = 0
    RunResult res = run(p, Schedule::constant(1.0), StopRule{.epsilon = -1, .k_max = 5},
                        SolverConfig{});
    CHECK(res.state.u.norm() <= 1e-12);
}

TEST_CASE("attainable builder with an offset box") {
    ProblemInstance p = make_benchmark(canonical_benchmark("attainable"));
    CHECK(p.reference->u_dagger.values().isApproxToConstant(2.0));
    CHECK(p.z.norm() > 0.0);
    check_reference_certificates(p, false);
    // attainable: H(u+) = 0, so the gap equals the objective itself
    CHECK(objective_value(p, p.reference->u_dagger) <= 1e-20);
}

TEST_CASE("attainable builder rejects an inadmissible control") {
    GridPtr g = Grid::uniform(0.0, 1.0, 11);
    OperatorHandle op = OperatorHandle::poisson1d(g);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    GridFunction bad(g);
    bad.values().setConstant(4.0);
    CHECK_THROWS_AS(make_attainable(op, box, bad), ConstructionError);
}

TEST_CASE("source-condition builder produces a certified non-attainable instance") {
    ProblemInstance p = make_benchmark(canonical_benchmark("source_condition"));
    check_reference_certificates(p, true);
    const ReferenceSolution& ref = *p.reference;
    CHECK(ref.source_w.has_value());
    CHECK(ref.active_set->empty());

    // large amplitude: bang-bang except near the zero of the adjoint state
    const int n = p.op.domain_grid()->size();
    int clipped = 0;
    for (int i = 0; i < n; ++i)
        if (ref.u_dagger[i] == p.box.lower()[i] || ref.u_dagger[i] == p.box.upper()[i]) ++clipped;
    CHECK(clipped >= n - 3);
}

TEST_CASE("source-condition builder rejects a vanishing pattern") {
    GridPtr g = Grid::uniform(0.0, 1.0, 51);
    OperatorHandle op = make_benchmark_operator("fredholm", g, 0.1);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    CHECK_THROWS_AS(make_source_condition(op, box, GridFunction(g), 1e3), ConstructionError);
}

TEST_CASE("bang-bang builder delivers a two-valued control with kappa near 1") {
    ProblemInstance p = make_benchmark(canonical_benchmark("bang_bang_asc"));
    check_reference_certificates(p, true);
    const ReferenceSolution& ref = *p.reference;
    REQUIRE(ref.kappa.has_value());
    CHECK(*ref.kappa == doctest::Approx(1.0));

    for (int i : *ref.active_set) {
        const bool at_bound =
            ref.u_dagger[i] == p.box.lower()[i] || ref.u_dagger[i] == p.box.upper()[i];
        CHECK(at_bound);
    }
    // measured exponent close to 1 for transversal zeros; the epsilon range
    // starts where the counted set spans several nodes per zero crossing
    const double scale = ref.p_dagger.max_abs();
    std::vector<double> eps;
    for (int j = 0; j < 30; ++j) eps.push_back(scale * 0.08 * std::pow(5.0, j / 29.0));
    AscMeasureFit fit = verify_asc_measure(ref.p_dagger, *ref.active_set, eps);
    CHECK(std::abs(fit.kappa_est - 1.0) < 0.1);
}

TEST_CASE("mixed builder flattens the adjoint state on the plateau") {
    ProblemInstance p = make_benchmark(canonical_benchmark("mixed_asc"));
    check_reference_certificates(p, true);
    const ReferenceSolution& ref = *p.reference;
    const Vec& x = p.op.domain_grid()->nodes();
    for (int i = 0; i < p.op.domain_grid()->size(); ++i) {
        if (x[i] >= 0.4 && x[i] <= 0.6) CHECK(std::abs(ref.p_dagger[i]) <= 1e-10);
    }
    // off the plateau the active nodes are clipped
    for (int i : *ref.active_set) {
        const bool at_bound =
            ref.u_dagger[i] == p.box.lower()[i] || ref.u_dagger[i] == p.box.upper()[i];
        CHECK(at_bound);
    }
    CHECK(ref.source_w.has_value());
    CHECK(ref.kappa.has_value());
}

TEST_CASE("mixed builder guards its parameters") {
    GridPtr g = Grid::uniform(0.0, 1.0, 51);
    OperatorHandle op = make_benchmark_operator("fredholm", g, 0.05);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    GridFunction v(g);
    for (int i = 0; i < 51; ++i)
        v.values()[i] = std::cos(2.0 * std::numbers::pi * g->nodes()[i]);
    // empty plateau: no node between 1.5 and 1.6
    CHECK_THROWS_AS(make_mixed_asc(op, box, 1.5, 1.6, v, 0.0), ConstructionError);
}

TEST_CASE("benchmarks are bit-identical across rebuilds") {
    for (const char* name : {"attainable", "source_condition", "bang_bang_asc", "mixed_asc"}) {
        ProblemInstance a = make_benchmark(canonical_benchmark(name));
        ProblemInstance b = make_benchmark(canonical_benchmark(name));
        CHECK(a.z.values() == b.z.values());
        CHECK(a.reference->u_dagger.values() == b.reference->u_dagger.values());
        CHECK(a.reference->p_dagger.values() == b.reference->p_dagger.values());
    }
}

TEST_CASE("bang-bang builder rejects a pattern with a flat zero stretch") {
    GridPtr g = Grid::uniform(0.0, 1.0, 101);
    OperatorHandle op = make_benchmark_operator("fredholm", g, 0.05);
    BoxConstraints box = BoxConstraints::constant(g, -1.0, 1.0);
    // v supported far to the right: S* v is numerically zero on a left stretch
    GridFunction v(g);
    for (int i = 0; i < 101; ++i) {
        const double x = g->nodes()[i];
        v.values()[i] = x > 0.9 ? 1.0 : 0.0;
    }
    CHECK_THROWS_AS(make_bang_bang_asc(op, box, v), ConstructionError);
}
