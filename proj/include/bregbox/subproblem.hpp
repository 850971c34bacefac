#pragma once

#include "bregbox/constraints.hpp"
#include "bregbox/grid.hpp"
#include "bregbox/operators.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace bregbox {

/// Box-constrained quadratic subproblem
///
///   minimize  F(u) = 1/2 ||Su - target||_Y^2 + alpha/2 ||u||_U^2 - alpha <u, shift>_U
///   over      u in U_ad.
///
/// The outer iteration uses it in two equivalent forms: the shifted-target
/// form (target = z + alpha*mu, shift = 0) and the subgradient form
/// (target = z, shift = previous subgradient). An empty shift means zero.
struct QuadSubproblem {
    OperatorHandle op;
    GridFunction target;  // in Y
    double alpha = 1.0;
    BoxConstraints box;
    GridFunction shift;  // in U, optional linear term

    QuadSubproblem(OperatorHandle op_, GridFunction target_, double alpha_, BoxConstraints box_,
                   GridFunction shift_ = GridFunction());
};

struct SubproblemSolution {
    GridFunction u;  // in U_ad
    GridFunction w;  // recovered normal-cone element: w = shift - u - (1/alpha) S*(Su - target)
    double kkt_residual = 0.0;     // fixed-point residual ||u - P(u - step grad F)||
    double w_cone_residual = 0.0;  // normal-cone violation of the recovered w
    int iterations = 0;
    std::string solver;
};

struct SolveOptions {
    double tol = 1e-10;   // on the fixed-point residual
    int max_iters = -1;   // <0: solver default (1e5 gradient steps / 100 set updates)
    std::optional<GridFunction> warm_start;
    double op_norm_sq = -1.0;  // ||S||^2 estimate; <0: estimated internally
};

/// Thrown when a solver exhausts its iteration budget; carries the best
/// iterate found so far.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, SubproblemSolution best)
        : std::runtime_error(msg), best_(std::move(best)) {}
    const SubproblemSolution& best() const { return best_; }

private:
    SubproblemSolution best_;
};

/// Accelerated projected gradient (monotone restart) with step
/// 1/(||S||_est^2 + alpha). Terminates when the fixed-point residual drops
/// below tol; throws SolveError past max_iters.
SubproblemSolution solve_projected_gradient(const QuadSubproblem& sub, const SolveOptions& opts = {});

/// Primal-dual active set iteration: fixes the guessed active nodes at their
/// bounds, solves the reduced normal equations on the inactive set, and
/// updates the guess from the multiplier signs. Finite and exact for this
/// strictly convex quadratic in the typical case; throws SolveError when the
/// sets cycle past max_iters.
SubproblemSolution solve_pdas(const QuadSubproblem& sub, const SolveOptions& opts = {});

/// Enumerates all 3^n lower/free/upper activity patterns, solves the reduced
/// equality-constrained quadratic for each, and returns the unique KKT point.
/// Validation oracle; requires n <= 10.
GridFunction brute_force_oracle(const QuadSubproblem& sub);

/// Normal-cone residual of w := lambda_prev - u - (1/alpha) S*(Su - target)
/// at u. With target = z this certifies u as the solution of the
/// subgradient-form subproblem with previous subgradient lambda_prev; the
/// subproblem's own shift field is not consulted.
double kkt_residual(const QuadSubproblem& sub, const GridFunction& u,
                    const GridFunction& lambda_prev);

}  // namespace bregbox
