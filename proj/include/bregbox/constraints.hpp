#pragma once

#include "bregbox/grid.hpp"
#include "bregbox/operators.hpp"

#include <random>
#include <vector>

namespace bregbox {

/// The admissible set U_ad = { u : u_a <= u <= u_b } given by two bound
/// functions on a common grid. Both bounds must be finite and ordered.
class BoxConstraints {
public:
    BoxConstraints(GridFunction lower, GridFunction upper);
    static BoxConstraints constant(GridPtr grid, double lo, double hi);

    const GridFunction& lower() const { return lower_; }
    const GridFunction& upper() const { return upper_; }
    const GridPtr& grid() const { return lower_.grid(); }

    /// Componentwise median(u_a, v, u_b). Idempotent and nonexpansive.
    GridFunction project(const GridFunction& v) const;

    /// Max over nodes of the bound violation of u (0 when feasible).
    double feasibility_violation(const GridFunction& u) const;

    /// Activity band: 1e-9 * (1 + ||u_b - u_a||_inf).
    double default_activity_tol() const;

    /// Uniform sample from the box (independent per node).
    GridFunction sample_uniform(std::mt19937_64& rng) const;

private:
    GridFunction lower_;
    GridFunction upper_;
};

/// Partition of the node indices by activity at the bounds, decided with a
/// tolerance band.
struct ActiveSetReport {
    std::vector<int> lower_active;
    std::vector<int> upper_active;
    std::vector<int> inactive;
    double tol = 0.0;
};

ActiveSetReport classify_active(const BoxConstraints& box, const GridFunction& u, double tol);

/// Weighted L2 norm of the violation of the normal-cone conditions for w at
/// u: w <= 0 where u = u_a, w = 0 strictly inside, w >= 0 where u = u_b
/// (activity decided with the band tol). Zero means w lies in the normal
/// cone of U_ad at u. Throws when u is infeasible beyond tol.
double normal_cone_residual(const BoxConstraints& box, const GridFunction& u,
                            const GridFunction& w, double tol);

/// || u - P(u - theta * S*(Su - z)) || in the weighted norm. Vanishes exactly
/// at solutions of the constrained least-squares problem; used as the
/// stopping quantity of the outer iteration.
double stationarity_residual(const OperatorHandle& op, const GridFunction& z,
                             const BoxConstraints& box, const GridFunction& u, double theta);

}  // namespace bregbox
