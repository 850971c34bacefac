#pragma once

#include "bregbox/constraints.hpp"
#include "bregbox/grid.hpp"
#include "bregbox/operators.hpp"
#include "bregbox/reference.hpp"
#include "bregbox/schedule.hpp"
#include "bregbox/subproblem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bregbox {

/// A box-constrained linear-quadratic tracking problem
///   minimize 1/2 ||Su - z||_Y^2 over u in U_ad,
/// optionally with an attached reference solution for error metrics.
struct ProblemInstance {
    OperatorHandle op;
    GridFunction z;
    BoxConstraints box;
    std::optional<ReferenceSolution> reference;

    ProblemInstance(OperatorHandle op_, GridFunction z_, BoxConstraints box_,
                    std::optional<ReferenceSolution> reference_ = std::nullopt);
};

/// State of the outer iteration. The dual accumulator mu lives in Y and
/// collects (1/alpha_i)(z - S u_i); lambda = S* mu is the subgradient;
/// gamma is the running sum of 1/alpha_i. v accumulates
/// (1/alpha_i) S(u_dagger - u_i) when a reference is available.
struct BregmanState {
    int k = 0;
    GridFunction u;
    GridFunction mu;
    GridFunction lambda;
    double gamma = 0.0;
    GridFunction v;
    std::vector<MetricRow> history;
};

enum class IterationMode {
    bregman,     // shifted-target subproblem, mu recursion (canonical path)
    bregman_a2,  // subgradient-form subproblem, independent lambda recursion
    ppm          // proximal point: penalize alpha ||u - u_k||^2, no mu/lambda
};

struct SolverConfig {
    enum class Method { pg, pdas };
    Method method = Method::pg;
    double tol = 1e-10;
    int max_iters = -1;  // <0: solver default
    bool warm_start = true;
};

struct StopRule {
    double epsilon = -1.0;  // <0: 1e-8 * ||z||
    int k_max = 10000;
    double theta = -1.0;  // <0: 1 / ||S||_est^2
};

struct RunResult {
    BregmanState state;
    std::string stop_reason;  // "epsilon" or "k_max"
};

/// k = 0 state: u_0 = P(0), mu_0 = 0, lambda_0 = 0, gamma_0 = 0.
BregmanState init_state(const ProblemInstance& p);

/// State seeded at a chosen feasible u0 with dual seed mu0 (lambda := S* mu0).
BregmanState init_state_at(const ProblemInstance& p, const GridFunction& u0,
                           const GridFunction& mu0);

/// One outer iteration: draws alpha_{k+1} from the schedule, solves the
/// subproblem of the selected mode, updates the dual bookkeeping and appends
/// a metric row. Subproblem non-convergence is rethrown with the iteration
/// index attached. theta/op_norm_sq < 0 are resolved internally.
BregmanState step(BregmanState state, const ProblemInstance& p, const Schedule& sched,
                  const SolverConfig& cfg, IterationMode mode = IterationMode::bregman,
                  double theta = -1.0, double op_norm_sq = -1.0);

/// Iterates until the stationarity residual drops below epsilon or k_max is
/// reached; returns the final state carrying the full metric history.
RunResult run(const ProblemInstance& p, const Schedule& sched, const StopRule& stop,
              const SolverConfig& cfg, IterationMode mode = IterationMode::bregman);

/// Same loop continued from an existing (possibly seeded) state.
RunResult run_from(BregmanState state, const ProblemInstance& p, const Schedule& sched,
                   const StopRule& stop, const SolverConfig& cfg,
                   IterationMode mode = IterationMode::bregman);

/// PPM comparison mode of run().
RunResult run_ppm(const ProblemInstance& p, const Schedule& sched, const StopRule& stop,
                  const SolverConfig& cfg);

/// Bregman distance D(u,v) = 1/2 ||u-v||^2 - <u-v, w> for the regularizer
/// 1/2||.||^2 + indicator of U_ad, with subgradient lambda = v + w. Requires
/// v in U_ad and w in the normal cone at v within w_tol (<0: 1e-6*(1+||w||));
/// returns +infinity when u is infeasible.
double bregman_distance(const BoxConstraints& box, const GridFunction& u, const GridFunction& v,
                        const GridFunction& w, double w_tol = -1.0);

/// H(u) = 1/2 ||Su - z||_Y^2.
double objective_value(const ProblemInstance& p, const GridFunction& u);

}  // namespace bregbox
