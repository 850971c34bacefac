#include "bregbox/verify.hpp"

#include "bregbox/csv.hpp"
#include "bregbox/diagnostics.hpp"
#include "bregbox/problems.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace bregbox {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

double op_norm_sq_of(const ProblemInstance& p) {
    const double est = operator_norm_estimate(p.op, 200);
    return est * est;
}

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names = {"attainable", "source_condition",
                                                   "bang_bang_asc", "mixed_asc"};
    return names;
}

// ---------------------------------------------------------------- criterion 1

CheckResult c1_oracle_equivalence(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst_pg = 0.0, worst_pdas = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        GridPtr grid = Grid::uniform(0.0, 1.0, n);
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
        OperatorHandle op = OperatorHandle::dense(grid, grid, m);
        BoxConstraints box =
            BoxConstraints::constant(grid, -(0.2 + 1.3 * unit(rng)), 0.2 + 1.3 * unit(rng));
        GridFunction b(grid);
        for (int i = 0; i < n; ++i) b.values()[i] = 2.0 * normal(rng);
        const double alpha = std::pow(10.0, -2.0 + 4.0 * unit(rng));
        QuadSubproblem sub(op, b, alpha, box);

        const GridFunction oracle = brute_force_oracle(sub);
        SolveOptions opts;
        opts.tol = 1e-12;
        const SubproblemSolution pg = solve_projected_gradient(sub, opts);
        const SubproblemSolution pdas = solve_pdas(sub, opts);
        worst_pg = std::max(worst_pg, (pg.u - oracle).norm());
        worst_pdas = std::max(worst_pdas, (pdas.u - oracle).norm());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

    CheckResult r;
    r.name = "criterion 1: oracle equivalence (100 random subproblems)";
    r.pass = worst_pg <= 1e-8 && worst_pdas <= 1e-8 && secs < 10.0;
    r.detail = "max |u_pg - oracle| = " + fmt(worst_pg) + ", max |u_pdas - oracle| = " +
               fmt(worst_pdas) + ", " + fmt(secs) + " s";
    return r;
}

// ---------------------------------------------------------------- criterion 2

CheckResult c2_a2_a3_equivalence(std::uint64_t) {
    double worst = 0.0;
    std::string worst_name;
    for (const std::string& name : benchmark_names()) {
        const ProblemInstance p = make_benchmark(canonical_benchmark(name));
        const Schedule sched = Schedule::constant(1.0);
        SolverConfig cfg;
        cfg.method = SolverConfig::Method::pdas;
        cfg.tol = 1e-11;
        const double opn2 = op_norm_sq_of(p);
        BregmanState a3 = init_state(p);
        BregmanState a2 = init_state(p);
        for (int k = 1; k <= 50; ++k) {
            a3 = step(std::move(a3), p, sched, cfg, IterationMode::bregman, -1.0, opn2);
            a2 = step(std::move(a2), p, sched, cfg, IterationMode::bregman_a2, -1.0, opn2);
            const double dev = (a3.u - a2.u).norm();
            if (dev > worst) {
                worst = dev;
                worst_name = name + " k=" + std::to_string(k);
            }
        }
    }
    CheckResult r;
    r.name = "criterion 2: A2/A3 equivalence (4 benchmarks, 50 iterations)";
    r.pass = worst <= 1e-8;
    r.detail = "max |u_A2 - u_A3| = " + fmt(worst) + " at " + worst_name;
    return r;
}

// ---------------------------------------------------------------- criterion 3

CheckResult c3_monotonicity(std::uint64_t) {
    double worst_h = -1e300, worst_d = -1e300;
    std::string where_h = "-", where_d = "-";
    for (const std::string& name : benchmark_names()) {
        const ProblemInstance p = make_benchmark(canonical_benchmark(name));
        for (double s : {0.0, 0.5, 1.0}) {
            const Schedule sched = Schedule::polynomial(1.0, s);
            StopRule stop;
            stop.epsilon = 0.0;
            stop.k_max = 500;
            const RunResult res = run(p, sched, stop, SolverConfig{});
            const BregmanState start = init_state(p);
            double h_prev = objective_value(p, start.u);
            GridFunction e0 = p.reference->u_dagger;
            e0 -= start.u;
            // w_0 = lambda_0 - u_0 = -P(0), a valid normal-cone element at u_0
            double d_prev = 0.5 * e0.norm_sq() + e0.dot(start.u);
            for (const MetricRow& row : res.state.history) {
                const double dh = row.H_uk - h_prev;
                if (dh > worst_h) {
                    worst_h = dh;
                    where_h = name + " s=" + fmt(s) + " k=" + std::to_string(row.k);
                }
                h_prev = row.H_uk;
                if (row.breg_dist_ref) {
                    const double dd = *row.breg_dist_ref - d_prev;
                    if (dd > worst_d) {
                        worst_d = dd;
                        where_d = name + " s=" + fmt(s) + " k=" + std::to_string(row.k);
                    }
                    d_prev = *row.breg_dist_ref;
                }
            }
        }
    }
    CheckResult r;
    r.name = "criterion 3: monotonicity of H and of D(u+,u_k) (4 benchmarks x 3 schedules)";
    r.pass = worst_h <= 1e-10 && worst_d <= 1e-9;
    r.detail = "max H increase = " + fmt(worst_h) + " (" + where_h +
               "), max D increase = " + fmt(worst_d) + " (" + where_d + ")";
    return r;
}

// ---------------------------------------------------------------- criterion 4

CheckResult c4_h_gap_rate(std::uint64_t) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("bang_bang_asc"));
    StopRule stop;
    stop.epsilon = 0.0;
    stop.k_max = 1000;
    const RunResult res = run(p, Schedule::constant(1.0), stop, SolverConfig{});
    const RateFit fit = fit_rate(res.state.history, "H_gap", 10, 1000);
    CheckResult r;
    r.name = "criterion 4: H-gap rate on the bang-bang benchmark (alpha = 1)";
    r.pass = fit.slope <= -0.9;
    r.detail = "fitted slope = " + fmt(fit.slope) + " (r2 = " + fmt(fit.r2) + "), required <= -0.9";
    return r;
}

// ---------------------------------------------------------------- criterion 5

CheckResult c5_sc_rate(std::uint64_t) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("source_condition"));
    StopRule stop;
    stop.epsilon = 0.0;
    stop.k_max = 1000;
    const RunResult res = run(p, Schedule::constant(1.0), stop, SolverConfig{});
    const RateFit fu = fit_rate(res.state.history, "u_err_L2_sq", 10, 1000);
    const RateFit fl = fit_rate(res.state.history, "lambda_avg_err_sq", 10, 1000);
    CheckResult r;
    r.name = "criterion 5: source-condition rates (alpha = 1)";
    r.pass = fu.slope <= -0.8 && fl.slope <= -1.7;
    r.detail = "slope u_err_L2_sq = " + fmt(fu.slope) + " (<= -0.8), slope lambda_avg_err_sq = " +
               fmt(fl.slope) + " (<= -1.7)";
    return r;
}

// ---------------------------------------------------------------- criterion 6

CheckResult c6_asc_polynomial_rates(std::uint64_t) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("bang_bang_asc"));
    bool pass = true;
    std::ostringstream detail;
    for (double s : {0.0, 1.0}) {
        StopRule stop;
        stop.epsilon = 0.0;
        stop.k_max = 2000;
        const RunResult res = run(p, Schedule::polynomial(1.0, s), stop, SolverConfig{});
        const RateFit fit = fit_rate(res.state.history, "u_err_L2_sq", 100, 2000);
        const double required = -(s + 1.0) + 0.25;
        pass = pass && fit.slope <= required;
        detail << "s=" << fmt(s) << ": slope = " << fmt(fit.slope) << " (<= " << fmt(required)
               << "); ";
    }
    CheckResult r;
    r.name = "criterion 6: ASC rates under polynomial schedules (bang-bang, kappa = 1)";
    r.pass = pass;
    r.detail = detail.str();
    return r;
}

// ---------------------------------------------------------------- criterion 7

CheckResult c7_asc_measure(std::uint64_t) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("bang_bang_asc"));
    const ReferenceSolution& ref = *p.reference;
    // epsilon range chosen so each zero crossing contributes several nodes
    const double scale = ref.p_dagger.max_abs();
    std::vector<double> eps;
    for (int j = 0; j < 30; ++j) eps.push_back(scale * 0.08 * std::pow(5.0, j / 29.0));
    const AscMeasureFit bang = verify_asc_measure(ref.p_dagger, *ref.active_set, eps);

    // analytic contrast case: p(x) = (x - 1/2)^2 has measure 2 sqrt(eps)
    GridPtr grid = Grid::uniform(0.0, 1.0, 2001);
    GridFunction parab(grid);
    for (int i = 0; i < grid->size(); ++i) {
        const double d = grid->nodes()[i] - 0.5;
        parab.values()[i] = d * d;
    }
    std::vector<int> all(grid->size());
    for (int i = 0; i < grid->size(); ++i) all[i] = i;
    std::vector<double> eps2;
    for (int j = 0; j < 30; ++j) eps2.push_back(std::pow(10.0, -4.0 + 2.7 * j / 29.0));
    const AscMeasureFit sqrt_fit = verify_asc_measure(parab, all, eps2);

    CheckResult r;
    r.name = "criterion 7: active-set measure exponents";
    r.pass = bang.kappa_est >= 0.9 && bang.kappa_est <= 1.1 && sqrt_fit.kappa_est >= 0.45 &&
             sqrt_fit.kappa_est <= 0.55;
    r.detail = "bang-bang kappa_est = " + fmt(bang.kappa_est) +
               " (in [0.9,1.1]), parabola kappa_est = " + fmt(sqrt_fit.kappa_est) +
               " (in [0.45,0.55])";
    return r;
}

// ---------------------------------------------------------------- criterion 8

CheckResult c8_strengthened_vi(std::uint64_t seed) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("bang_bang_asc"));
    double c_a = 0.0;
    bool threw = false;
    std::string err;
    try {
        c_a = verify_strengthened_vi(p, *p.reference, 1000, seed);
    } catch (const std::runtime_error& e) {
        threw = true;
        err = e.what();
    }
    CheckResult r;
    r.name = "criterion 8: strengthened variational inequality positivity (1000 samples)";
    r.pass = !threw && c_a >= 1e-6;
    r.detail = threw ? err : "c_A estimate = " + fmt(c_a) + " (>= 1e-6)";
    return r;
}

// ---------------------------------------------------------------- criterion 9

CheckResult c9_fixed_point(std::uint64_t) {
    double worst = 0.0;
    std::string where = "-";
    struct Case {
        std::string name;
        double s;
    };
    const std::vector<Case> cases = {{"attainable", 0.0}, {"source_condition", 0.0},
                                     {"bang_bang_asc", 0.0}, {"bang_bang_asc", 1.0},
                                     {"mixed_asc", 0.0}};
    for (const Case& c : cases) {
        const ProblemInstance p = make_benchmark(canonical_benchmark(c.name));
        const ReferenceSolution& ref = *p.reference;
        const Schedule sched =
            c.s == 0.0 ? Schedule::constant(1.0) : Schedule::polynomial(1.0, c.s);
        const double opn2 = op_norm_sq_of(p);
        BregmanState st = init_state_at(p, ref.u_dagger, *ref.mu_seed);
        for (int k = 1; k <= 20; ++k) {
            st = step(std::move(st), p, sched, SolverConfig{}, IterationMode::bregman, -1.0, opn2);
            const double dev = (st.u - ref.u_dagger).norm();
            if (dev > worst) {
                worst = dev;
                where = c.name + " s=" + fmt(c.s) + " k=" + std::to_string(k);
            }
        }
    }
    CheckResult r;
    r.name = "criterion 9: runs seeded at the reference stay there (20 iterations)";
    r.pass = worst <= 1e-7;
    r.detail = "max |u_k - u+| = " + fmt(worst) + " at " + where;
    return r;
}

// --------------------------------------------------------------- criterion 10

CheckResult c10_state_convergence_nonunique(std::uint64_t seed) {
    const int n = 12;
    GridPtr grid = Grid::uniform(0.0, 1.0, n);
    std::mt19937_64 rng(seed ^ 0xa5a5a5a5ull);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto random_orthogonal = [&]() {
        Mat g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
        return Mat(Eigen::HouseholderQR<Mat>(g).householderQ());
    };
    Vec sigma(n);
    sigma << 1.5, 1.2, 1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.0, 0.0, 0.0, 0.0;  // rank 8
    const Mat m = random_orthogonal() * sigma.asDiagonal() * random_orthogonal().transpose();
    OperatorHandle op = OperatorHandle::dense(grid, grid, m);
    BoxConstraints box = BoxConstraints::constant(grid, -1.0, 1.0);

    GridFunction ustar(grid);
    for (int i = 0; i < n; ++i)
        ustar.values()[i] = 0.3 * std::sin(2.0 * std::numbers::pi * grid->nodes()[i]) + 0.1;
    GridFunction ydag = op.apply(ustar);

    // mismatch orthogonal to the range of S (in the weighted inner product),
    // so p+ = S*(z - y+) vanishes identically while u+ is non-unique
    Vec wy_sqrt = grid->weights().cwiseSqrt();
    Mat a = wy_sqrt.asDiagonal() * m;
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeFullU);
    Vec y0(n);
    for (int i = 0; i < n; ++i) y0[i] = normal(rng);
    Vec y0w = wy_sqrt.asDiagonal() * y0;
    Vec perp = y0w;
    for (int j = 0; j < n; ++j) {
        if (svd.singularValues()[j] <= 1e-10 * svd.singularValues()[0]) break;
        const Vec dir = svd.matrixU().col(j);
        perp -= dir * dir.dot(y0w);
    }
    GridFunction vperp(grid, perp.cwiseQuotient(wy_sqrt));
    vperp *= 0.5 / vperp.norm();

    GridFunction z = ydag;
    z += vperp;
    const double p_norm = op.apply_adjoint(vperp).norm();

    ProblemInstance p(op, z, box);
    const double opn2 = op_norm_sq_of(p);
    BregmanState st = init_state(p);
    const Schedule sched = Schedule::constant(1.0);
    int reached = -1;
    double final_gap = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        st = step(std::move(st), p, sched, SolverConfig{}, IterationMode::bregman, -1.0, opn2);
        final_gap = (op.apply(st.u) - ydag).norm();
        if (final_gap <= 1e-3) {
            reached = k;
            break;
        }
    }
    CheckResult r;
    r.name = "criterion 10: state convergence with non-injective S and p+ = 0";
    r.pass = reached > 0 && p_norm <= 1e-8;
    r.detail = reached > 0 ? "|S u_k - y+| <= 1e-3 at k = " + std::to_string(reached) +
                                 " (|p+| = " + fmt(p_norm) + ")"
                           : "not reached by k = 1000 (gap " + fmt(final_gap) + ")";
    return r;
}

// --------------------------------------------------------------- criterion 11

CheckResult c11_bregman_vs_ppm(std::uint64_t) {
    const ProblemInstance p = make_benchmark(canonical_benchmark("source_condition"));
    StopRule stop;
    stop.epsilon = 0.0;
    stop.k_max = 200;
    const RunResult breg = run(p, Schedule::constant(1.0), stop, SolverConfig{});
    const RunResult ppm = run_ppm(p, Schedule::constant(1.0), stop, SolverConfig{});

    bool aligned = breg.state.history.size() == ppm.state.history.size();
    if (aligned)
        for (size_t i = 0; i < breg.state.history.size(); ++i)
            aligned = aligned && breg.state.history[i].k == ppm.state.history[i].k;

    auto monotone = [&](const std::vector<MetricRow>& h) {
        double prev = objective_value(p, init_state(p).u);
        double worst = -1e300;
        for (const MetricRow& row : h) {
            worst = std::max(worst, row.H_uk - prev);
            prev = row.H_uk;
        }
        return worst;
    };
    const double wb = monotone(breg.state.history);
    const double wp = monotone(ppm.state.history);

    CheckResult r;
    r.name = "criterion 11: aligned Bregman vs PPM comparison histories";
    r.pass = aligned && wb <= 1e-10 && wp <= 1e-10;
    r.detail = std::string("aligned = ") + (aligned ? "yes" : "no") +
               ", max H increase bregman = " + fmt(wb) + ", ppm = " + fmt(wp);
    return r;
}

// ------------------------------------------------------------- adjoint suite

std::vector<CheckResult> adjoint_suite(std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto check = [&](const std::string& name, const OperatorHandle& op, double tol) {
        const double dev = adjoint_consistency_check(op, 100, seed);
        const double scale = std::max(1.0, operator_norm_estimate(op, 50));
        CheckResult r;
        r.name = "adjoint: " + name;
        r.pass = dev <= tol * scale;
        r.detail = "max relative defect = " + fmt(dev) + " (allowed " + fmt(tol * scale) + ")";
        out.push_back(std::move(r));
    };

    GridPtr g3 = Grid::uniform(0.0, 1.0, 33);
    check("dense identity", OperatorHandle::dense(g3, g3, Mat::Identity(33, 33)), 1e-12);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec nodes(17);
    double x = 0.0;
    std::uniform_real_distribution<double> gap(0.5, 1.5);
    for (int i = 0; i < 17; ++i) {
        nodes[i] = x;
        x += gap(rng);
    }
    GridPtr gwarp = Grid::from_nodes(nodes);
    Mat m(17, 17);
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) m(i, j) = normal(rng);
    check("dense random on a non-uniform grid", OperatorHandle::dense(gwarp, gwarp, m), 1e-10);

    GridPtr g101 = Grid::uniform(0.0, 1.0, 101);
    check("fredholm Gaussian kernel",
          make_benchmark_operator("fredholm", g101, 0.1), 1e-10);
    check("poisson1d", OperatorHandle::poisson1d(g101), 1e-10);

    {
        // deliberately inconsistent pair must be detected
        Mat bad = m;
        bad(0, 1) += 0.5;
        OperatorHandle broken = OperatorHandle::dense_with_adjoint(gwarp, gwarp, m, bad.transpose());
        const double dev = adjoint_consistency_check(broken, 100, seed);
        CheckResult r;
        r.name = "adjoint: corrupted adjoint pair is flagged";
        r.pass = dev > 1e-3;
        r.detail = "defect = " + fmt(dev) + " (> 1e-3 expected)";
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<CheckResult> acceptance_criteria(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(c1_oracle_equivalence(seed));
    out.push_back(c2_a2_a3_equivalence(seed));
    out.push_back(c3_monotonicity(seed));
    out.push_back(c4_h_gap_rate(seed));
    out.push_back(c5_sc_rate(seed));
    out.push_back(c6_asc_polynomial_rates(seed));
    out.push_back(c7_asc_measure(seed));
    out.push_back(c8_strengthened_vi(seed));
    out.push_back(c9_fixed_point(seed));
    out.push_back(c10_state_convergence_nonunique(seed));
    out.push_back(c11_bregman_vs_ppm(seed));
    return out;
}

std::vector<CheckResult> verify_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "adjoint") return adjoint_suite(seed);
    if (suite == "oracle") return {c1_oracle_equivalence(seed)};
    if (suite == "rates")
        return {c4_h_gap_rate(seed), c5_sc_rate(seed), c6_asc_polynomial_rates(seed),
                c7_asc_measure(seed)};
    if (suite == "invariants")
        return {c2_a2_a3_equivalence(seed), c3_monotonicity(seed), c8_strengthened_vi(seed),
                c9_fixed_point(seed), c10_state_convergence_nonunique(seed),
                c11_bregman_vs_ppm(seed)};
    if (suite == "all") return acceptance_criteria(seed);
    throw std::invalid_argument("unknown suite '" + suite +
                                "' (expected adjoint, oracle, rates, invariants, or all)");
}

}  // namespace bregbox
