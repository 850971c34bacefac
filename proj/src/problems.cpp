#include "bregbox/problems.hpp"

#include "bregbox/diagnostics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace bregbox {

namespace {

constexpr double kReferenceResidualTol = 1e-8;
constexpr double kNonAttainabilityFloor = 1e-3;

double op_theta(const OperatorHandle& op) {
    const double est = operator_norm_estimate(op, 200);
    return est > 0.0 ? 1.0 / (est * est) : 1.0;
}

double max_abs_bound(const BoxConstraints& box) {
    return std::max(box.lower().max_abs(), box.upper().max_abs());
}

void check_reference(const OperatorHandle& op, const GridFunction& z, const BoxConstraints& box,
                     const ReferenceSolution& ref, const char* builder, bool non_attainable) {
    const double res = stationarity_residual(op, z, box, ref.u_dagger, op_theta(op));
    if (res > kReferenceResidualTol) {
        std::ostringstream msg;
        msg << builder << ": constructed reference fails the stationarity check (residual " << res
            << "); amplitude too small or degenerate pattern";
        throw ConstructionError(msg.str());
    }
    if (non_attainable) {
        GridFunction gap = op.apply(ref.u_dagger);
        gap -= z;
        if (gap.norm() <= kNonAttainabilityFloor) {
            std::ostringstream msg;
            msg << builder << ": instance is attainable within " << kNonAttainabilityFloor
                << "; mismatch pattern too small";
            throw ConstructionError(msg.str());
        }
    }
    if (ref.mu_seed) {
        GridFunction back = box.project(op.apply_adjoint(*ref.mu_seed));
        back -= ref.u_dagger;
        if (back.norm() > kReferenceResidualTol)
            throw ConstructionError(std::string(builder) +
                                    ": dual seed does not reproduce the reference");
    }
}

std::vector<int> all_indices(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace

ProblemInstance make_attainable(const OperatorHandle& op, const BoxConstraints& box,
                                std::optional<GridFunction> u_interior) {
    GridFunction u = u_interior ? box.project(*u_interior)
                                : box.project(GridFunction(op.domain_grid()));
    if (u_interior && box.feasibility_violation(*u_interior) > box.default_activity_tol())
        throw ConstructionError("make_attainable: u_interior is not admissible");

    ReferenceSolution ref;
    ref.u_dagger = u;
    ref.y_dagger = op.apply(u);
    ref.p_dagger = GridFunction(op.domain_grid());
    ref.inactive_set = all_indices(op.domain_grid()->size());
    ref.active_set = std::vector<int>{};

    GridFunction zero_start = box.project(GridFunction(op.domain_grid()));
    zero_start -= u;
    if (zero_start.norm() <= 1e-12 * (1.0 + u.norm())) {
        // u = P(0) = P(S* 0): trivial source certificate
        ref.source_w = GridFunction(op.range_grid());
        ref.mu_seed = GridFunction(op.range_grid());
    }

    GridFunction z = ref.y_dagger;
    check_reference(op, z, box, ref, "make_attainable", /*non_attainable=*/false);
    return ProblemInstance(op, std::move(z), box, std::move(ref));
}

ProblemInstance make_source_condition(const OperatorHandle& op, const BoxConstraints& box,
                                      const GridFunction& v_pattern, double amplitude) {
    require_grid(v_pattern, op.range_grid(), "make_source_condition v_pattern");
    if (v_pattern.norm() == 0.0)
        throw ConstructionError("make_source_condition: v_pattern must be nonzero");
    if (!(amplitude > 0.0))
        throw ConstructionError("make_source_condition: amplitude M > 0 required");

    ReferenceSolution ref;
    ref.p_dagger = op.apply_adjoint(v_pattern);
    GridFunction w = v_pattern;
    w *= amplitude;
    GridFunction scaled = ref.p_dagger;
    scaled *= amplitude;
    ref.u_dagger = box.project(scaled);
    ref.y_dagger = op.apply(ref.u_dagger);
    ref.source_w = w;
    ref.mu_seed = std::move(w);
    ref.inactive_set = all_indices(op.domain_grid()->size());
    ref.active_set = std::vector<int>{};

    GridFunction z = ref.y_dagger;
    z += v_pattern;
    check_reference(op, z, box, ref, "make_source_condition", /*non_attainable=*/true);
    return ProblemInstance(op, std::move(z), box, std::move(ref));
}

ProblemInstance make_bang_bang_asc(const OperatorHandle& op, const BoxConstraints& box,
                                   const GridFunction& v_pattern) {
    require_grid(v_pattern, op.range_grid(), "make_bang_bang_asc v_pattern");
    GridFunction p = op.apply_adjoint(v_pattern);
    const double scale = p.max_abs();
    if (scale == 0.0) throw ConstructionError("make_bang_bang_asc: S* v vanishes");
    const double tol_zero = 1e-12 * scale;

    const int n = op.domain_grid()->size();
    std::vector<int> inactive, active;
    for (int i = 0; i < n; ++i)
        (std::abs(p[i]) <= tol_zero ? inactive : active).push_back(i);
    for (size_t j = 0; j + 1 < inactive.size(); ++j)
        if (inactive[j + 1] == inactive[j] + 1)
            throw ConstructionError(
                "make_bang_bang_asc: adjoint state has a flat zero plateau; use make_mixed_asc");
    if (active.empty()) throw ConstructionError("make_bang_bang_asc: no active nodes");

    GridFunction u = box.project(GridFunction(op.domain_grid()));  // P(0) on the zero set
    for (int i : active) u.values()[i] = p[i] > 0.0 ? box.upper()[i] : box.lower()[i];

    double min_active = scale;
    for (int i : active) min_active = std::min(min_active, std::abs(p[i]));
    const double seed_amp = 2.0 * (1.0 + max_abs_bound(box)) / min_active;
    if (seed_amp > 1e12)
        throw ConstructionError("make_bang_bang_asc: adjoint state nearly vanishes off its zeros");

    ReferenceSolution ref;
    ref.u_dagger = std::move(u);
    ref.y_dagger = op.apply(ref.u_dagger);
    ref.p_dagger = std::move(p);
    ref.source_w = GridFunction(op.range_grid());  // w = 0; chi_I u = P(0) on the zero set
    ref.inactive_set = std::move(inactive);
    ref.active_set = std::move(active);
    ref.kappa = 1.0;
    GridFunction seed = v_pattern;
    seed *= seed_amp;
    ref.mu_seed = std::move(seed);

    GridFunction z = ref.y_dagger;
    z += v_pattern;
    check_reference(op, z, box, ref, "make_bang_bang_asc", /*non_attainable=*/true);
    return ProblemInstance(op, std::move(z), box, std::move(ref));
}

ProblemInstance make_mixed_asc(const OperatorHandle& op, const BoxConstraints& box,
                               double plateau_lo, double plateau_hi,
                               const GridFunction& v_pattern, double amplitude) {
    require_grid(v_pattern, op.range_grid(), "make_mixed_asc v_pattern");
    if (v_pattern.norm() == 0.0)
        throw ConstructionError("make_mixed_asc: v_pattern must be nonzero");
    const int n = op.domain_grid()->size();
    const Vec& x = op.domain_grid()->nodes();

    std::vector<int> plateau;
    for (int i = 0; i < n; ++i)
        if (x[i] >= plateau_lo && x[i] <= plateau_hi) plateau.push_back(i);
    if (plateau.empty())
        throw ConstructionError("make_mixed_asc: plateau contains no nodes; use make_bang_bang_asc");

    const Mat m = op.dense_matrix();
    const Vec& wu = op.domain_grid()->weights();
    const Vec& wy = op.range_grid()->weights();
    const Mat madj = wu.cwiseInverse().asDiagonal() * m.transpose() * wy.asDiagonal();

    // projection of the pattern onto the null space of the selected rows of S*
    auto flatten = [&](const std::vector<int>& zero_rows) {
        Mat rows(static_cast<int>(zero_rows.size()), madj.cols());
        for (size_t r = 0; r < zero_rows.size(); ++r)
            rows.row(static_cast<int>(r)) = madj.row(zero_rows[r]);
        Eigen::BDCSVD<Mat> svd(rows, Eigen::ComputeFullV);
        const Vec& sv = svd.singularValues();
        const double sigma_cut = sv.size() ? 1e-13 * sv[0] : 0.0;
        Vec v = v_pattern.values();
        for (int j = 0; j < sv.size(); ++j) {
            if (sv[j] <= sigma_cut) break;
            const Vec dir = svd.matrixV().col(j);
            v -= dir * dir.dot(v);
        }
        GridFunction out(op.range_grid(), std::move(v));
        if (out.norm() <= 1e-8 * v_pattern.norm())
            throw ConstructionError(
                "make_mixed_asc: pattern lies in the span of the plateau constraints");
        out *= v_pattern.norm() / out.norm();
        return out;
    };

    // Smooth kernels leak the adjoint state gradually off the plateau, which
    // would force an enormous clipping amplitude. Grow the flattened set until
    // the adjoint-state values split into a near-zero group and a decisively
    // nonzero group.
    const double scale0 = op.apply_adjoint(v_pattern).max_abs();
    if (scale0 == 0.0)
        throw ConstructionError("make_mixed_asc: adjoint state vanishes for the raw pattern");
    std::vector<int> inactive = plateau;
    GridFunction vflat, p;
    bool fully_flat = false;
    for (int round = 0;; ++round) {
        if (round > 60)
            throw ConstructionError("make_mixed_asc: flat/active classification did not settle");
        vflat = flatten(inactive);
        p = op.apply_adjoint(vflat);
        const double scale = p.max_abs();
        if (scale <= 1e-8 * scale0) {
            fully_flat = true;  // the constraints span everything S* can see
            break;
        }
        const double tau_split = 1e-6 * scale;
        std::vector<int> next;
        for (int i = 0; i < n; ++i)
            if (std::abs(p[i]) <= tau_split) next.push_back(i);
        if (next == inactive) break;
        inactive = std::move(next);
    }

    std::vector<int> active;
    {
        std::vector<bool> flat(n, false);
        for (int i : inactive) flat[i] = true;
        for (int i = 0; i < n; ++i)
            if (!flat[i]) active.push_back(i);
    }

    double amp;
    if (fully_flat) {
        active.clear();
        inactive.resize(n);
        for (int i = 0; i < n; ++i) inactive[i] = i;
        amp = amplitude > 0.0 ? amplitude : 1.0;
    } else {
        if (active.empty())
            throw ConstructionError("make_mixed_asc: no active nodes left off the plateau");
        double min_active = p.max_abs();
        for (int i : active) min_active = std::min(min_active, std::abs(p[i]));
        amp = amplitude > 0.0 ? amplitude : 2.0 * (1.0 + max_abs_bound(box)) / min_active;
    }

    double plateau_max = 0.0;
    for (int i : plateau) plateau_max = std::max(plateau_max, std::abs(p[i]));
    if (plateau_max > 1e-10)
        throw ConstructionError("make_mixed_asc: could not flatten the adjoint state below 1e-10");

    ReferenceSolution ref;
    GridFunction scaled = p;
    scaled *= amp;
    ref.u_dagger = box.project(scaled);
    for (int i : active) {
        if (ref.u_dagger[i] != box.lower()[i] && ref.u_dagger[i] != box.upper()[i])
            throw ConstructionError("make_mixed_asc: amplitude too small to clip the active set");
    }
    ref.y_dagger = op.apply(ref.u_dagger);
    ref.p_dagger = p;
    GridFunction w = vflat;
    w *= amp;
    ref.source_w = w;
    ref.mu_seed = std::move(w);

    if (!active.empty()) {
        const double scale = p.max_abs();
        std::vector<double> eps_grid;
        for (int j = 0; j < 25; ++j)
            eps_grid.push_back(scale * 0.002 * std::pow(200.0, j / 24.0));  // 0.002 .. 0.4
        const AscMeasureFit fit = verify_asc_measure(p, active, eps_grid);
        ref.kappa = fit.kappa_est;
    }
    ref.inactive_set = std::move(inactive);
    ref.active_set = std::move(active);

    GridFunction z = ref.y_dagger;
    z += vflat;
    check_reference(op, z, box, ref, "make_mixed_asc", /*non_attainable=*/true);
    return ProblemInstance(op, std::move(z), box, std::move(ref));
}

BenchmarkSpec canonical_benchmark(const std::string& name) {
    BenchmarkSpec spec;
    spec.name = name;
    if (name == "attainable") {
        spec.n = 51;
        spec.op_kind = "poisson1d";
        spec.box_lo = 2.0;
        spec.box_hi = 3.0;
    } else if (name == "source_condition") {
        spec.n = 101;
        spec.op_kind = "fredholm";
        spec.kernel_sigma = 0.1;
        spec.amplitude = 1e3;
    } else if (name == "bang_bang_asc") {
        spec.n = 201;
        spec.op_kind = "poisson1d";
    } else if (name == "mixed_asc") {
        spec.n = 201;
        spec.op_kind = "fredholm";
        spec.kernel_sigma = 0.05;
        spec.amplitude = 0.0;  // auto
    } else {
        throw std::invalid_argument("canonical_benchmark: unknown name " + name);
    }
    return spec;
}

OperatorHandle make_benchmark_operator(const std::string& op_kind, const GridPtr& grid,
                                       double kernel_sigma) {
    if (op_kind == "poisson1d") return OperatorHandle::poisson1d(grid);
    if (op_kind == "fredholm") {
        const double two_sig_sq = 2.0 * kernel_sigma * kernel_sigma;
        return OperatorHandle::fredholm(grid, grid, [two_sig_sq](double xx, double t) {
            return std::exp(-(xx - t) * (xx - t) / two_sig_sq);
        });
    }
    throw std::invalid_argument("make_benchmark_operator: unknown kind " + op_kind);
}

ProblemInstance make_benchmark(const BenchmarkSpec& spec) {
    GridPtr grid = Grid::uniform(0.0, 1.0, spec.n);
    OperatorHandle op = make_benchmark_operator(spec.op_kind, grid, spec.kernel_sigma);
    BoxConstraints box = BoxConstraints::constant(grid, spec.box_lo, spec.box_hi);

    auto sine = [&](double amp) {
        GridFunction v(grid);
        for (int i = 0; i < spec.n; ++i)
            v.values()[i] = amp * std::sin(2.0 * std::numbers::pi * spec.v_frequency *
                                           grid->nodes()[i]);
        return v;
    };

    if (spec.name == "attainable") return make_attainable(op, box);
    if (spec.name == "source_condition")
        return make_source_condition(op, box, sine(1.0), spec.amplitude);
    if (spec.name == "bang_bang_asc") {
        // unit-amplitude adjoint state: -p'' = v gives p ~ v/(2 pi f)^2
        const double f = 2.0 * std::numbers::pi * spec.v_frequency;
        return make_bang_bang_asc(op, box, sine(f * f));
    }
    if (spec.name == "mixed_asc") {
        GridFunction v(grid);
        for (int i = 0; i < spec.n; ++i)
            v.values()[i] = std::cos(2.0 * std::numbers::pi * grid->nodes()[i]);
        return make_mixed_asc(op, box, spec.plateau_lo, spec.plateau_hi, v, spec.amplitude);
    }
    throw std::invalid_argument("make_benchmark: unknown benchmark " + spec.name);
}

}  // namespace bregbox
