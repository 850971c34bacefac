#include "bregbox/bregman.hpp"

#include "bregbox/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bregbox {

Schedule Schedule::constant(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("Schedule::constant: alpha > 0 required");
    Schedule s;
    s.kind_ = ScheduleKind::constant;
    s.c_alpha_ = alpha;
    return s;
}

Schedule Schedule::polynomial(double c_alpha, double s_exp) {
    if (!(c_alpha > 0.0)) throw std::invalid_argument("Schedule::polynomial: c_alpha > 0 required");
    if (!(s_exp >= 0.0))
        throw std::invalid_argument("Schedule::polynomial: s >= 0 required (bounded sequence)");
    Schedule s;
    s.kind_ = ScheduleKind::polynomial;
    s.c_alpha_ = c_alpha;
    s.s_ = s_exp;
    return s;
}

Schedule Schedule::explicit_list(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("Schedule::explicit_list: empty");
    for (double a : values)
        if (!(a > 0.0)) throw std::invalid_argument("Schedule::explicit_list: alpha_k > 0 required");
    Schedule s;
    s.kind_ = ScheduleKind::explicit_list;
    s.values_ = std::move(values);
    return s;
}

double Schedule::alpha(int k) const {
    if (k < 1) throw std::out_of_range("Schedule::alpha: k >= 1 required");
    switch (kind_) {
        case ScheduleKind::constant:
            return c_alpha_;
        case ScheduleKind::polynomial:
            return c_alpha_ * std::pow(static_cast<double>(k), -s_);
        case ScheduleKind::explicit_list:
            if (k > static_cast<int>(values_.size()))
                throw std::out_of_range("Schedule::alpha: past end of explicit list");
            return values_[k - 1];
    }
    return c_alpha_;
}

ProblemInstance::ProblemInstance(OperatorHandle op_, GridFunction z_, BoxConstraints box_,
                                 std::optional<ReferenceSolution> reference_)
    : op(std::move(op_)), z(std::move(z_)), box(std::move(box_)), reference(std::move(reference_)) {
    require_grid(z, op.range_grid(), "ProblemInstance z");
    require_grid(box.lower(), op.domain_grid(), "ProblemInstance box");
    if (reference) {
        require_grid(reference->u_dagger, op.domain_grid(), "ProblemInstance reference u");
        require_grid(reference->y_dagger, op.range_grid(), "ProblemInstance reference y");
    }
}

double objective_value(const ProblemInstance& p, const GridFunction& u) {
    GridFunction r = p.op.apply(u);
    r -= p.z;
    return 0.5 * r.norm_sq();
}

BregmanState init_state(const ProblemInstance& p) {
    BregmanState s;
    s.u = p.box.project(GridFunction(p.op.domain_grid()));
    s.mu = GridFunction(p.op.range_grid());
    s.lambda = GridFunction(p.op.domain_grid());
    s.v = GridFunction(p.op.range_grid());
    return s;
}

BregmanState init_state_at(const ProblemInstance& p, const GridFunction& u0,
                           const GridFunction& mu0) {
    require_grid(u0, p.op.domain_grid(), "init_state_at u0");
    require_grid(mu0, p.op.range_grid(), "init_state_at mu0");
    if (p.box.feasibility_violation(u0) > p.box.default_activity_tol())
        throw std::invalid_argument("init_state_at: u0 must lie in U_ad");
    BregmanState s;
    s.u = p.box.project(u0);
    s.mu = mu0;
    s.lambda = p.op.apply_adjoint(mu0);
    s.v = GridFunction(p.op.range_grid());
    return s;
}

namespace {

double resolve_op_norm_sq(const ProblemInstance& p, double hint) {
    if (hint >= 0.0) return hint;
    const double est = operator_norm_estimate(p.op, 200);
    return est * est;
}

double resolve_theta(double theta, double op_norm_sq) {
    if (theta > 0.0) return theta;
    return op_norm_sq > 0.0 ? 1.0 / op_norm_sq : 1.0;
}

SubproblemSolution solve_with(const QuadSubproblem& sub, const SolverConfig& cfg,
                              const GridFunction& warm, double op_norm_sq, int k) {
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iters = cfg.max_iters;
    opts.op_norm_sq = op_norm_sq;
    if (cfg.warm_start) opts.warm_start = warm;
    try {
        return cfg.method == SolverConfig::Method::pdas ? solve_pdas(sub, opts)
                                                        : solve_projected_gradient(sub, opts);
    } catch (const SolveError& e) {
        throw SolveError("iteration " + std::to_string(k) + ": " + e.what(), e.best());
    }
}

}  // namespace

BregmanState step(BregmanState state, const ProblemInstance& p, const Schedule& sched,
                  const SolverConfig& cfg, IterationMode mode, double theta, double op_norm_sq) {
    const int k = state.k + 1;
    const double a = sched.alpha(k);
    op_norm_sq = resolve_op_norm_sq(p, op_norm_sq);
    theta = resolve_theta(theta, op_norm_sq);

    QuadSubproblem sub = [&] {
        switch (mode) {
            case IterationMode::bregman: {
                GridFunction target = p.z;
                target.values() += a * state.mu.values();
                return QuadSubproblem(p.op, std::move(target), a, p.box);
            }
            case IterationMode::bregman_a2:
                return QuadSubproblem(p.op, p.z, a, p.box, state.lambda);
            case IterationMode::ppm:
            default:
                return QuadSubproblem(p.op, p.z, 2.0 * a, p.box, state.u);
        }
    }();

    const auto t0 = std::chrono::steady_clock::now();
    SubproblemSolution sol = solve_with(sub, cfg, state.u, op_norm_sq, k);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    GridFunction y = p.op.apply(sol.u);

    switch (mode) {
        case IterationMode::bregman:
            state.mu.values() += (p.z.values() - y.values()) / a;
            state.lambda = p.op.apply_adjoint(state.mu);
            break;
        case IterationMode::bregman_a2: {
            GridFunction incr = p.z;
            incr.values() -= y.values();
            state.mu.values() += incr.values() / a;
            GridFunction dl = p.op.apply_adjoint(incr);
            state.lambda.values() += dl.values() / a;
            break;
        }
        case IterationMode::ppm:
            state.lambda = sol.u;  // subgradient of 1/2||.||^2 at the iterate
            break;
    }

    if (p.reference) state.v.values() += (p.reference->y_dagger.values() - y.values()) / a;
    state.gamma += 1.0 / a;
    state.u = std::move(sol.u);
    state.k = k;
    state.history.push_back(
        record_metrics(state, p, a, theta, mode, sol.iterations, wall_ms, &y));
    return state;
}

RunResult run_from(BregmanState state, const ProblemInstance& p, const Schedule& sched,
                   const StopRule& stop, const SolverConfig& cfg, IterationMode mode) {
    const double op_norm_sq = resolve_op_norm_sq(p, -1.0);
    const double theta = resolve_theta(stop.theta, op_norm_sq);
    const double eps = stop.epsilon >= 0.0 ? stop.epsilon : 1e-8 * p.z.norm();

    RunResult result;
    result.stop_reason = "k_max";
    for (int it = state.k; it < stop.k_max; ++it) {
        state = step(std::move(state), p, sched, cfg, mode, theta, op_norm_sq);
        if (state.history.back().stat_res <= eps) {
            result.stop_reason = "epsilon";
            break;
        }
    }
    result.state = std::move(state);
    return result;
}

RunResult run(const ProblemInstance& p, const Schedule& sched, const StopRule& stop,
              const SolverConfig& cfg, IterationMode mode) {
    return run_from(init_state(p), p, sched, stop, cfg, mode);
}

RunResult run_ppm(const ProblemInstance& p, const Schedule& sched, const StopRule& stop,
                  const SolverConfig& cfg) {
    return run(p, sched, stop, cfg, IterationMode::ppm);
}

double bregman_distance(const BoxConstraints& box, const GridFunction& u, const GridFunction& v,
                        const GridFunction& w, double w_tol) {
    require_same_grid(u, v, "bregman_distance");
    require_same_grid(w, v, "bregman_distance");
    if (w_tol < 0.0) w_tol = 1e-6 * (1.0 + w.norm());
    const double cone = normal_cone_residual(box, v, w, box.default_activity_tol());
    if (cone > w_tol)
        throw std::invalid_argument("bregman_distance: w is not a normal-cone element at v");
    if (box.feasibility_violation(u) > box.default_activity_tol())
        return std::numeric_limits<double>::infinity();
    GridFunction d = u;
    d -= v;
    return 0.5 * d.norm_sq() - d.dot(w);
}

}  // namespace bregbox
