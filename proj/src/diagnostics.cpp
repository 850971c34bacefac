#include "bregbox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bregbox {

double gamma_of(const Schedule& sched, int k) {
    if (k < 0) throw std::invalid_argument("gamma_of: k >= 0 required");
    double g = 0.0;
    for (int j = 1; j <= k; ++j) g += 1.0 / sched.alpha(j);
    return g;
}

MetricRow record_metrics(const BregmanState& state, const ProblemInstance& p, double alpha_k,
                         double theta, IterationMode mode, long subproblem_iters, double wall_ms,
                         const GridFunction* y_of_u) {
    MetricRow row;
    row.k = state.k;
    row.alpha_k = alpha_k;
    row.gamma_k = state.gamma;
    row.subproblem_iters = subproblem_iters;
    row.wall_ms = wall_ms;

    GridFunction y = y_of_u ? *y_of_u : p.op.apply(state.u);
    {
        GridFunction r = y;
        r -= p.z;
        row.H_uk = 0.5 * r.norm_sq();
    }
    if (theta <= 0.0) {
        const double est = operator_norm_estimate(p.op, 200);
        theta = est > 0.0 ? 1.0 / (est * est) : 1.0;
    }
    row.stat_res = stationarity_residual(p.op, p.z, p.box, state.u, theta);

    if (p.reference) {
        const ReferenceSolution& ref = *p.reference;
        {
            GridFunction r = ref.y_dagger;
            r -= p.z;
            row.H_gap = row.H_uk - 0.5 * r.norm_sq();
        }
        GridFunction err = state.u;
        err -= ref.u_dagger;
        row.u_err_L2_sq = err.norm_sq();
        if (ref.active_set) row.u_err_L1_A = err.norm_l1(*ref.active_set);

        // D^{lambda_k}(u_dagger, u_k) with w_k = lambda_k - u_k; in PPM mode
        // the regularizer is 1/2||.||^2 and the distance is the plain half
        // squared norm.
        if (mode == IterationMode::ppm) {
            row.breg_dist_ref = 0.5 * err.norm_sq();
        } else {
            GridFunction w = state.lambda;
            w -= state.u;
            row.breg_dist_ref = 0.5 * err.norm_sq() - err.dot(w);
        }

        row.v_k_norm = state.v.norm();
        if (state.k >= 1 && mode != IterationMode::ppm && state.gamma > 0.0) {
            GridFunction avg = state.lambda;
            avg *= 1.0 / state.gamma;
            avg -= ref.p_dagger;
            row.lambda_avg_err_sq = avg.norm_sq();
        }
    }
    return row;
}

namespace {

std::optional<double> metric_value(const MetricRow& row, const std::string& name) {
    if (name == "alpha_k") return row.alpha_k;
    if (name == "gamma_k") return row.gamma_k;
    if (name == "H_uk") return row.H_uk;
    if (name == "H_gap") return row.H_gap;
    if (name == "stat_res") return row.stat_res;
    if (name == "u_err_L2_sq") return row.u_err_L2_sq;
    if (name == "u_err_L1_A") return row.u_err_L1_A;
    if (name == "breg_dist_ref") return row.breg_dist_ref;
    if (name == "v_k_norm") return row.v_k_norm;
    if (name == "lambda_avg_err_sq") return row.lambda_avg_err_sq;
    throw std::invalid_argument("fit_rate: unknown metric " + name);
}

RateFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double sst = syy - sy * sy / n;
    double sse = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += e * e;
    }
    fit.r2 = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    return fit;
}

}  // namespace

RateFit fit_rate(std::span<const MetricRow> history, const std::string& metric_name, int k_min,
                 int k_max) {
    std::vector<double> xs, ys;
    for (const MetricRow& row : history) {
        if (row.k < k_min || row.k > k_max) continue;
        const std::optional<double> m = metric_value(row, metric_name);
        if (!m) continue;
        if (!(*m > 0.0)) {
            std::ostringstream msg;
            msg << "fit_rate: metric " << metric_name << " nonpositive at k=" << row.k;
            throw std::invalid_argument(msg.str());
        }
        xs.push_back(std::log(static_cast<double>(row.k)));
        ys.push_back(std::log(*m));
    }
    if (xs.size() < 10)
        throw std::invalid_argument("fit_rate: need at least 10 rows in [k_min, k_max]");
    return fit_loglog(xs, ys);
}

AscMeasureFit verify_asc_measure(const GridFunction& p_dagger, std::span<const int> active_set,
                                 std::span<const double> eps_grid) {
    for (size_t i = 0; i + 1 < eps_grid.size(); ++i)
        if (!(eps_grid[i] < eps_grid[i + 1]))
            throw std::invalid_argument("verify_asc_measure: eps_grid must be increasing");
    for (double e : eps_grid)
        if (!(e > 0.0)) throw std::invalid_argument("verify_asc_measure: eps_grid must be positive");

    const Vec& h = p_dagger.grid()->weights();
    double full = 0.0;
    for (int i : active_set) full += h[i];

    std::vector<double> xs, ys;
    bool any_positive = false;
    for (double eps : eps_grid) {
        double m = 0.0;
        for (int i : active_set) {
            const double a = std::abs(p_dagger[i]);
            if (a > 0.0 && a < eps) m += h[i];
        }
        if (m > 0.0) any_positive = true;
        if (m > 0.0 && m < full) {
            xs.push_back(std::log(eps));
            ys.push_back(std::log(m));
        }
    }

    AscMeasureFit fit;
    if (!any_positive) {
        fit.kappa_est = std::numeric_limits<double>::infinity();  // vacuous condition
        fit.c_est = 0.0;
        return fit;
    }
    if (xs.size() < 2)
        throw std::invalid_argument("verify_asc_measure: too few nontrivial eps points to fit");
    const RateFit line = fit_loglog(xs, ys);
    fit.kappa_est = line.slope;
    fit.c_est = std::exp(line.intercept);
    return fit;
}

double verify_strengthened_vi(const ProblemInstance& p, const ReferenceSolution& ref, int samples,
                              std::uint64_t seed) {
    if (!ref.active_set || !ref.kappa)
        throw std::invalid_argument("verify_strengthened_vi: reference needs A and kappa");
    if (ref.active_set->empty()) return std::numeric_limits<double>::infinity();

    const double exponent = 1.0 + 1.0 / *ref.kappa;
    std::mt19937_64 rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        GridFunction u = p.box.sample_uniform(rng);
        GridFunction d = u;
        d -= ref.u_dagger;
        const double denom = std::pow(d.norm_l1(*ref.active_set), exponent);
        if (denom == 0.0) continue;  // u == u_dagger on A, excluded by convention
        const double num = -ref.p_dagger.dot(d);
        const double ratio = num / denom;
        if (ratio <= 0.0) {
            std::ostringstream msg;
            msg << "verify_strengthened_vi: nonpositive ratio " << ratio << " at sample " << s
                << " (reference is not optimal)";
            throw std::runtime_error(msg.str());
        }
        worst = std::min(worst, ratio);
    }
    return worst;
}

}  // namespace bregbox
