#include "bregbox/subproblem.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

namespace bregbox {

QuadSubproblem::QuadSubproblem(OperatorHandle op_, GridFunction target_, double alpha_,
                               BoxConstraints box_, GridFunction shift_)
    : op(std::move(op_)),
      target(std::move(target_)),
      alpha(alpha_),
      box(std::move(box_)),
      shift(std::move(shift_)) {
    if (!(alpha > 0.0)) throw std::invalid_argument("QuadSubproblem: alpha > 0 required");
    require_grid(target, op.range_grid(), "QuadSubproblem target");
    require_grid(box.lower(), op.domain_grid(), "QuadSubproblem box");
    if (!shift.empty()) require_grid(shift, op.domain_grid(), "QuadSubproblem shift");
}

namespace {

struct Eval {
    double f;
    GridFunction grad;
};

Eval eval_objective(const QuadSubproblem& sub, const GridFunction& u) {
    GridFunction r = sub.op.apply(u);
    r -= sub.target;
    double f = 0.5 * r.norm_sq() + 0.5 * sub.alpha * u.norm_sq();
    GridFunction g = sub.op.apply_adjoint(r);
    g.values() += sub.alpha * u.values();
    if (!sub.shift.empty()) {
        f -= sub.alpha * u.dot(sub.shift);
        g.values() -= sub.alpha * sub.shift.values();
    }
    return {f, std::move(g)};
}

GridFunction recover_w(const QuadSubproblem& sub, const GridFunction& u) {
    GridFunction r = sub.op.apply(u);
    r -= sub.target;
    GridFunction w = sub.op.apply_adjoint(r);
    w.values() = -u.values() - w.values() / sub.alpha;
    if (!sub.shift.empty()) w.values() += sub.shift.values();
    return w;
}

SubproblemSolution finish(const QuadSubproblem& sub, GridFunction u, double fp_residual,
                          int iterations, const char* tag) {
    SubproblemSolution s;
    s.u = sub.box.project(u);  // shave round-off bound violations
    s.w = recover_w(sub, s.u);
    s.kkt_residual = fp_residual;
    s.w_cone_residual =
        normal_cone_residual(sub.box, s.u, s.w, sub.box.default_activity_tol());
    s.iterations = iterations;
    s.solver = tag;
    return s;
}

double resolve_norm_sq(const QuadSubproblem& sub, const SolveOptions& opts) {
    if (opts.op_norm_sq >= 0.0) return opts.op_norm_sq;
    const double est = operator_norm_estimate(sub.op, 200);
    return est * est;
}

GridFunction start_point(const QuadSubproblem& sub, const SolveOptions& opts) {
    if (opts.warm_start) return sub.box.project(*opts.warm_start);
    return sub.box.project(GridFunction(sub.op.domain_grid()));
}

}  // namespace

SubproblemSolution solve_projected_gradient(const QuadSubproblem& sub, const SolveOptions& opts) {
    const int max_iters = opts.max_iters < 0 ? 100000 : opts.max_iters;
    const double step = 1.0 / (resolve_norm_sq(sub, opts) + sub.alpha);

    GridFunction u = start_point(sub, opts);
    Eval eu = eval_objective(sub, u);

    auto fp_residual = [&](const GridFunction& x, const GridFunction& gx) {
        GridFunction trial = x;
        trial.values() -= step * gx.values();
        return (x - sub.box.project(trial)).norm();
    };

    double res = fp_residual(u, eu.grad);
    if (res <= opts.tol) return finish(sub, std::move(u), res, 0, "pg");

    GridFunction y = u;
    GridFunction gy = eu.grad;
    double t = 1.0;

    for (int it = 1; it <= max_iters; ++it) {
        GridFunction trial = y;
        trial.values() -= step * gy.values();
        GridFunction unew = sub.box.project(trial);
        Eval enew = eval_objective(sub, unew);
        if (enew.f > eu.f) {
            // momentum overshoot: restart from the current best iterate
            t = 1.0;
            trial = u;
            trial.values() -= step * eu.grad.values();
            unew = sub.box.project(trial);
            enew = eval_objective(sub, unew);
        }
        res = fp_residual(unew, enew.grad);
        if (res <= opts.tol) return finish(sub, std::move(unew), res, it, "pg");

        const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / tnext;
        GridFunction ynext = unew;
        ynext.values() += beta * (unew.values() - u.values());
        t = tnext;
        u = std::move(unew);
        eu = std::move(enew);
        y = std::move(ynext);
        gy = eval_objective(sub, y).grad;
    }

    SubproblemSolution best = finish(sub, std::move(u), res, max_iters, "pg");
    throw SolveError("solve_projected_gradient: max_iters exceeded (residual " +
                         std::to_string(res) + ")",
                     std::move(best));
}

namespace {

struct NormalEquations {
    Mat g;    // M^T W_Y M + alpha W_U (symmetric positive definite)
    Vec rhs;  // M^T W_Y target + alpha W_U shift
};

NormalEquations assemble(const QuadSubproblem& sub) {
    const Mat m = sub.op.dense_matrix();
    const Vec& wy = sub.op.range_grid()->weights();
    const Vec& wu = sub.op.domain_grid()->weights();
    NormalEquations ne;
    Mat mtwy = m.transpose() * wy.asDiagonal();
    ne.g = mtwy * m;
    ne.g += (sub.alpha * wu).asDiagonal();
    ne.rhs = mtwy * sub.target.values();
    if (!sub.shift.empty()) ne.rhs += sub.alpha * (wu.array() * sub.shift.values().array()).matrix();
    return ne;
}

// weighted-space multiplier: w = -(1/alpha) W_U^{-1} (G u - rhs)
Vec multiplier_from(const NormalEquations& ne, const Vec& wu, double alpha, const Vec& u) {
    return (ne.rhs - ne.g * u).cwiseQuotient(wu) / alpha;
}

}  // namespace

SubproblemSolution solve_pdas(const QuadSubproblem& sub, const SolveOptions& opts) {
    const int max_iters = opts.max_iters < 0 ? 100 : opts.max_iters;
    const double step = 1.0 / (resolve_norm_sq(sub, opts) + sub.alpha);
    const int n = sub.op.domain_grid()->size();
    const Vec& wu = sub.op.domain_grid()->weights();
    const Vec& la = sub.box.lower().values();
    const Vec& ub = sub.box.upper().values();
    const NormalEquations ne = assemble(sub);

    auto grad = [&](const Vec& x) { return Vec((ne.g * x - ne.rhs).cwiseQuotient(wu)); };
    auto clip = [&](Vec x) { return Vec(x.cwiseMax(la).cwiseMin(ub)); };
    auto fp_residual = [&](const Vec& x) {
        const Vec d = x - clip(x - step * grad(x));
        return std::sqrt((wu.array() * d.array().square()).sum());
    };
    auto value = [&](const Vec& x) { return 0.5 * x.dot(ne.g * x) - ne.rhs.dot(x); };

    Vec u = start_point(sub, opts).values();
    Vec best_u = clip(u);
    double best_f = value(best_u);
    double res = fp_residual(u);
    if (res <= opts.tol)
        return finish(sub, GridFunction(sub.op.domain_grid(), u), res, 0, "pdas");

    std::set<std::vector<int8_t>> seen;
    std::vector<int8_t> sets(n, 0);

    for (int it = 1; it <= max_iters; ++it) {
        // activity guess from a projected-gradient probe
        const Vec probe = u - step * grad(u);
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i) {
            if (la[i] >= ub[i]) {  // point constraint, never free
                sets[i] = -1;
            } else if (probe[i] < la[i]) {
                sets[i] = -1;
            } else if (probe[i] > ub[i]) {
                sets[i] = +1;
            } else {
                sets[i] = 0;
                free_idx.push_back(i);
            }
        }

        if (!seen.insert(sets).second) {
            // revisited guess: damp with projected-gradient steps from the
            // best point so the next guess differs
            u = best_u;
            for (int s = 0; s < 20; ++s) u = clip(u - step * grad(u));
            seen.clear();
            res = fp_residual(u);
            if (res <= opts.tol)
                return finish(sub, GridFunction(sub.op.domain_grid(), u), res, it, "pdas");
            continue;
        }

        Vec unew(n);
        for (int i = 0; i < n; ++i)
            unew[i] = sets[i] < 0 ? la[i] : (sets[i] > 0 ? ub[i] : 0.0);
        const int nf = static_cast<int>(free_idx.size());
        if (nf > 0) {
            Mat gff(nf, nf);
            Vec r(nf);
            for (int a = 0; a < nf; ++a) {
                const int i = free_idx[a];
                r[a] = ne.rhs[i];
                for (int b = 0; b < nf; ++b) gff(a, b) = ne.g(i, free_idx[b]);
                for (int j = 0; j < n; ++j)
                    if (sets[j] != 0) r[a] -= ne.g(i, j) * unew[j];
            }
            Vec uf = gff.ldlt().solve(r);
            for (int a = 0; a < nf; ++a) unew[free_idx[a]] = uf[a];
        }

        u = std::move(unew);
        const Vec u_feas = clip(u);
        const double f = value(u_feas);
        if (f < best_f) {
            best_f = f;
            best_u = u_feas;
        }
        res = fp_residual(u);
        if (res <= opts.tol)
            return finish(sub, GridFunction(sub.op.domain_grid(), u), res, it, "pdas");
    }

    SubproblemSolution best =
        finish(sub, GridFunction(sub.op.domain_grid(), u), res, max_iters, "pdas");
    throw SolveError("solve_pdas: active sets failed to converge (residual " +
                         std::to_string(res) + ")",
                     std::move(best));
}

GridFunction brute_force_oracle(const QuadSubproblem& sub) {
    const int n = sub.op.domain_grid()->size();
    if (n > 10) throw std::invalid_argument("brute_force_oracle: node count must be <= 10");
    const Vec& wu = sub.op.domain_grid()->weights();
    const Vec& la = sub.box.lower().values();
    const Vec& ub = sub.box.upper().values();
    const NormalEquations ne = assemble(sub);

    const double feas_slack = 1e-9 * (1.0 + (ub - la).cwiseAbs().maxCoeff());
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(ne.rhs[i]) / wu[i]);
    const double sign_slack = 1e-9 * (1.0 + scale / sub.alpha);

    long patterns = 1;
    for (int i = 0; i < n; ++i) patterns *= 3;

    bool found = false;
    double best_f = std::numeric_limits<double>::infinity();
    Vec best_u;

    std::vector<int8_t> code(n);
    for (long p = 0; p < patterns; ++p) {
        long rem = p;
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i) {
            code[i] = static_cast<int8_t>(rem % 3);  // 0 lower, 1 free, 2 upper
            rem /= 3;
            if (code[i] == 1) free_idx.push_back(i);
        }
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = code[i] == 0 ? la[i] : (code[i] == 2 ? ub[i] : 0.0);
        const int nf = static_cast<int>(free_idx.size());
        if (nf > 0) {
            Mat gff(nf, nf);
            Vec r(nf);
            for (int a = 0; a < nf; ++a) {
                const int i = free_idx[a];
                r[a] = ne.rhs[i];
                for (int b = 0; b < nf; ++b) gff(a, b) = ne.g(i, free_idx[b]);
                for (int j = 0; j < n; ++j)
                    if (code[j] != 1) r[a] -= ne.g(i, j) * u[j];
            }
            Vec uf = gff.ldlt().solve(r);
            for (int a = 0; a < nf; ++a) u[free_idx[a]] = uf[a];
        }

        // primal feasibility of the free part
        bool ok = true;
        for (int i = 0; i < n && ok; ++i)
            if (u[i] < la[i] - feas_slack || u[i] > ub[i] + feas_slack) ok = false;
        if (!ok) continue;

        // multiplier signs on the active part
        Vec w = multiplier_from(ne, wu, sub.alpha, u);
        for (int i = 0; i < n && ok; ++i) {
            if (code[i] == 0 && w[i] > sign_slack) ok = false;
            if (code[i] == 2 && w[i] < -sign_slack) ok = false;
        }
        if (!ok) continue;

        Eval e = eval_objective(sub, GridFunction(sub.op.domain_grid(), u));
        if (!found || e.f < best_f) {
            found = true;
            best_f = e.f;
            best_u = u;
        }
    }

    if (!found)
        throw std::logic_error("brute_force_oracle: no admissible KKT pattern (internal error)");
    GridFunction out(sub.op.domain_grid(), std::move(best_u));
    return sub.box.project(out);
}

double kkt_residual(const QuadSubproblem& sub, const GridFunction& u,
                    const GridFunction& lambda_prev) {
    GridFunction r = sub.op.apply(u);
    r -= sub.target;
    GridFunction w = sub.op.apply_adjoint(r);
    w.values() = lambda_prev.values() - u.values() - w.values() / sub.alpha;
    return normal_cone_residual(sub.box, u, w, sub.box.default_activity_tol());
}

}  // namespace bregbox
