#pragma once

#include "bregbox/bregman.hpp"
#include "bregbox/grid.hpp"
#include "bregbox/reference.hpp"
#include "bregbox/schedule.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bregbox {

/// gamma_k = sum_{j=1..k} 1/alpha_j, accumulated left to right; gamma_0 = 0.
double gamma_of(const Schedule& sched, int k);

/// Computes one metric row for the given state. y_of_u may pass the already
/// computed S u to save an operator application; theta < 0 resolves to
/// 1/||S||_est^2.
MetricRow record_metrics(const BregmanState& state, const ProblemInstance& p, double alpha_k,
                         double theta = -1.0, IterationMode mode = IterationMode::bregman,
                         long subproblem_iters = 0, double wall_ms = 0.0,
                         const GridFunction* y_of_u = nullptr);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least-squares line on (log k, log metric) over rows with k in
/// [k_min, k_max]. Requires at least 10 rows in range with the metric present
/// and strictly positive; throws std::invalid_argument otherwise.
/// Metric names follow the CSV schema (e.g. "H_gap", "u_err_L2_sq").
RateFit fit_rate(std::span<const MetricRow> history, const std::string& metric_name, int k_min,
                 int k_max);

struct AscMeasureFit {
    double kappa_est = 0.0;  // +infinity when the measure vanishes on the grid
    double c_est = 0.0;
};

/// Measures m(eps) = sum of weights of nodes in A with 0 < |p_dagger| < eps
/// and fits log m against log eps over the nontrivial range (points with
/// m = 0 or m = full measure of A are excluded).
AscMeasureFit verify_asc_measure(const GridFunction& p_dagger, std::span<const int> active_set,
                                 std::span<const double> eps_grid);

/// Samples random feasible u and returns the smallest observed ratio
///   <-p_dagger, u - u_dagger> / ||u - u_dagger||_{L1(A)}^{1 + 1/kappa}.
/// Positive results certify the strengthened variational inequality on the
/// sample; +infinity when A is empty; throws std::runtime_error when a
/// negative ratio is found (broken reference).
double verify_strengthened_vi(const ProblemInstance& p, const ReferenceSolution& ref, int samples,
                              std::uint64_t seed);

}  // namespace bregbox
