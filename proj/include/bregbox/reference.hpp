#pragma once

#include "bregbox/grid.hpp"

#include <optional>
#include <vector>

namespace bregbox {

/// Known solution of a benchmark problem: the optimizer u_dagger, its state
/// y_dagger = S u_dagger, the adjoint state p_dagger = S*(z - S u_dagger),
/// and optional certificates. source_w is the source element (u_dagger =
/// P(S* source_w)); inactive_set/active_set split the nodes into the part
/// carrying the local source condition and the part where p_dagger does not
/// vanish; kappa is the growth exponent of the active-set measure function.
/// mu_seed, when present, is a dual variable with S* mu_seed a subgradient at
/// u_dagger, so a run seeded with (u_dagger, mu_seed) stays put.
struct ReferenceSolution {
    GridFunction u_dagger;
    GridFunction y_dagger;
    GridFunction p_dagger;
    std::optional<GridFunction> source_w;
    std::optional<std::vector<int>> inactive_set;
    std::optional<std::vector<int>> active_set;
    std::optional<double> kappa;
    std::optional<GridFunction> mu_seed;
};

/// One iteration's worth of convergence metrics. Reference-dependent fields
/// stay empty when the problem has no reference solution attached;
/// lambda_avg_err_sq is additionally empty at k = 0 and in PPM mode.
struct MetricRow {
    int k = 0;
    double alpha_k = 0.0;
    double gamma_k = 0.0;
    double H_uk = 0.0;
    std::optional<double> H_gap;
    double stat_res = 0.0;
    std::optional<double> u_err_L2_sq;
    std::optional<double> u_err_L1_A;
    std::optional<double> breg_dist_ref;
    std::optional<double> v_k_norm;
    std::optional<double> lambda_avg_err_sq;
    long subproblem_iters = 0;
    double wall_ms = 0.0;
};

}  // namespace bregbox
