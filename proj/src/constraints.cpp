#include "bregbox/constraints.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bregbox {

BoxConstraints::BoxConstraints(GridFunction lower, GridFunction upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_grid(lower_, upper_, "BoxConstraints");
    for (int i = 0; i < lower_.size(); ++i) {
        if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
            throw std::invalid_argument("BoxConstraints: bounds must be finite");
        if (lower_[i] > upper_[i])
            throw std::invalid_argument("BoxConstraints: u_a <= u_b violated");
    }
}

BoxConstraints BoxConstraints::constant(GridPtr grid, double lo, double hi) {
    GridFunction l(grid), u(grid);
    l.values().setConstant(lo);
    u.values().setConstant(hi);
    return BoxConstraints(std::move(l), std::move(u));
}

GridFunction BoxConstraints::project(const GridFunction& v) const {
    require_same_grid(v, lower_, "BoxConstraints::project");
    GridFunction out(v.grid(),
                     v.values().cwiseMax(lower_.values()).cwiseMin(upper_.values()));
    return out;
}

double BoxConstraints::feasibility_violation(const GridFunction& u) const {
    require_same_grid(u, lower_, "BoxConstraints::feasibility_violation");
    double worst = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        worst = std::max(worst, lower_[i] - u[i]);
        worst = std::max(worst, u[i] - upper_[i]);
    }
    return worst;
}

double BoxConstraints::default_activity_tol() const {
    const double width = (upper_.values() - lower_.values()).cwiseAbs().maxCoeff();
    return 1e-9 * (1.0 + width);
}

GridFunction BoxConstraints::sample_uniform(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GridFunction out(lower_.grid());
    for (int i = 0; i < out.size(); ++i)
        out.values()[i] = lower_[i] + unit(rng) * (upper_[i] - lower_[i]);
    return out;
}

ActiveSetReport classify_active(const BoxConstraints& box, const GridFunction& u, double tol) {
    require_same_grid(u, box.lower(), "classify_active");
    ActiveSetReport r;
    r.tol = tol;
    for (int i = 0; i < u.size(); ++i) {
        if (u[i] <= box.lower()[i] + tol)
            r.lower_active.push_back(i);
        else if (u[i] >= box.upper()[i] - tol)
            r.upper_active.push_back(i);
        else
            r.inactive.push_back(i);
    }
    return r;
}

double normal_cone_residual(const BoxConstraints& box, const GridFunction& u,
                            const GridFunction& w, double tol) {
    require_same_grid(u, box.lower(), "normal_cone_residual");
    require_same_grid(w, u, "normal_cone_residual");
    if (box.feasibility_violation(u) > tol)
        throw std::invalid_argument("normal_cone_residual: u infeasible beyond tol");
    const Vec& h = u.grid()->weights();
    double sq = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        const bool at_lower = u[i] <= box.lower()[i] + tol;
        const bool at_upper = u[i] >= box.upper()[i] - tol;
        double viol;
        if (at_lower && at_upper)
            viol = 0.0;  // degenerate box node, any w admissible
        else if (at_lower)
            viol = std::max(w[i], 0.0);
        else if (at_upper)
            viol = std::max(-w[i], 0.0);
        else
            viol = w[i];
        sq += h[i] * viol * viol;
    }
    return std::sqrt(sq);
}

double stationarity_residual(const OperatorHandle& op, const GridFunction& z,
                             const BoxConstraints& box, const GridFunction& u, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("stationarity_residual: theta > 0 required");
    GridFunction residual = op.apply(u);
    residual -= z;
    GridFunction grad = op.apply_adjoint(residual);
    GridFunction trial = u;
    trial.values() -= theta * grad.values();
    return (u - box.project(trial)).norm();
}

}  // namespace bregbox
