#include "bregbox/operators.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bregbox {

namespace {

// Solves tridiag(-1, 2, -1) x = d with precomputed elimination coefficients
// cp[i] = 1/(2 - cp[i-1]).
Vec thomas_solve(const Vec& cp, const Vec& d) {
    const int m = static_cast<int>(d.size());
    Vec dp(m), x(m);
    dp[0] = d[0] * cp[0];
    for (int i = 1; i < m; ++i) dp[i] = (d[i] + dp[i - 1]) * cp[i];
    x[m - 1] = dp[m - 1];
    for (int i = m - 2; i >= 0; --i) x[i] = dp[i] + cp[i] * x[i + 1];
    return x;
}

Vec make_thomas_cp(int m) {
    Vec cp(m);
    cp[0] = 0.5;
    for (int i = 1; i < m; ++i) cp[i] = 1.0 / (2.0 - cp[i - 1]);
    return cp;
}

}  // namespace

struct OperatorHandle::Impl {
    OperatorKind kind;
    GridPtr domain;
    GridPtr range;
    Mat m;     // dense, fredholm
    Mat madj;  // matrix of S* (same kinds)
    // poisson1d
    double h2 = 0.0;
    Vec thomas_cp;
};

OperatorHandle OperatorHandle::dense(GridPtr domain, GridPtr range, Mat m) {
    if (m.rows() != range->size() || m.cols() != domain->size())
        throw std::invalid_argument("OperatorHandle::dense: matrix shape does not match grids");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::dense;
    // S* = W_U^{-1} M^T W_Y
    impl->madj = domain->weights().cwiseInverse().asDiagonal() * m.transpose() *
                 range->weights().asDiagonal();
    impl->m = std::move(m);
    impl->domain = std::move(domain);
    impl->range = std::move(range);
    return OperatorHandle(std::move(impl));
}

OperatorHandle OperatorHandle::dense_with_adjoint(GridPtr domain, GridPtr range, Mat m,
                                                  Mat adjoint) {
    if (m.rows() != range->size() || m.cols() != domain->size())
        throw std::invalid_argument("OperatorHandle::dense_with_adjoint: bad matrix shape");
    if (adjoint.rows() != domain->size() || adjoint.cols() != range->size())
        throw std::invalid_argument("OperatorHandle::dense_with_adjoint: bad adjoint shape");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::dense;
    impl->m = std::move(m);
    impl->madj = std::move(adjoint);
    impl->domain = std::move(domain);
    impl->range = std::move(range);
    return OperatorHandle(std::move(impl));
}

OperatorHandle OperatorHandle::fredholm(GridPtr domain, GridPtr range,
                                        const std::function<double(double, double)>& kernel) {
    const int nu = domain->size(), ny = range->size();
    Mat k(ny, nu);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nu; ++i) k(j, i) = kernel(range->nodes()[j], domain->nodes()[i]);
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::fredholm;
    impl->m = k * domain->weights().asDiagonal();            // (Su)_j = sum_i h_i k(x_j,t_i) u_i
    impl->madj = k.transpose() * range->weights().asDiagonal();  // (S*y)_i = sum_j h_j k(x_j,t_i) y_j
    impl->domain = std::move(domain);
    impl->range = std::move(range);
    return OperatorHandle(std::move(impl));
}

OperatorHandle OperatorHandle::poisson1d(GridPtr grid) {
    const int n = grid->size();
    if (n < 3) throw std::invalid_argument("OperatorHandle::poisson1d: need at least 3 nodes");
    const double h = grid->nodes()[1] - grid->nodes()[0];
    for (int i = 0; i + 1 < n; ++i) {
        const double hi = grid->nodes()[i + 1] - grid->nodes()[i];
        if (std::abs(hi - h) > 1e-12 * std::abs(h))
            throw std::invalid_argument("OperatorHandle::poisson1d: grid must be uniform");
    }
    // self-adjointness of the handle relies on equal interior weights
    for (int i = 2; i + 1 < n; ++i) {
        if (std::abs(grid->weights()[i] - grid->weights()[1]) > 1e-12 * grid->weights()[1])
            throw std::invalid_argument("OperatorHandle::poisson1d: interior weights must be equal");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::poisson1d;
    impl->h2 = h * h;
    impl->thomas_cp = make_thomas_cp(n - 2);
    impl->domain = grid;
    impl->range = std::move(grid);
    return OperatorHandle(std::move(impl));
}

OperatorKind OperatorHandle::kind() const { return impl_->kind; }
const GridPtr& OperatorHandle::domain_grid() const { return impl_->domain; }
const GridPtr& OperatorHandle::range_grid() const { return impl_->range; }

GridFunction OperatorHandle::apply(const GridFunction& u) const {
    require_grid(u, impl_->domain, "OperatorHandle::apply");
    if (impl_->kind == OperatorKind::poisson1d) {
        const int n = impl_->domain->size();
        Vec y = Vec::Zero(n);
        y.segment(1, n - 2) =
            impl_->h2 * thomas_solve(impl_->thomas_cp, u.values().segment(1, n - 2));
        return GridFunction(impl_->range, std::move(y));
    }
    return GridFunction(impl_->range, impl_->m * u.values());
}

GridFunction OperatorHandle::apply_adjoint(const GridFunction& y) const {
    require_grid(y, impl_->range, "OperatorHandle::apply_adjoint");
    if (impl_->kind == OperatorKind::poisson1d) {
        // zero boundary rows and columns make the handle self-adjoint in the
        // weighted inner products
        const int n = impl_->domain->size();
        Vec u = Vec::Zero(n);
        u.segment(1, n - 2) =
            impl_->h2 * thomas_solve(impl_->thomas_cp, y.values().segment(1, n - 2));
        return GridFunction(impl_->domain, std::move(u));
    }
    return GridFunction(impl_->domain, impl_->madj * y.values());
}

Mat OperatorHandle::dense_matrix() const {
    if (impl_->kind != OperatorKind::poisson1d) return impl_->m;
    const int n = impl_->domain->size();
    Mat m = Mat::Zero(n, n);
    for (int j = 1; j + 1 < n; ++j) {
        Vec e = Vec::Zero(n - 2);
        e[j - 1] = 1.0;
        m.col(j).segment(1, n - 2) = impl_->h2 * thomas_solve(impl_->thomas_cp, e);
    }
    return m;
}

double operator_norm_estimate(const OperatorHandle& op, int iters) {
    if (iters < 1) throw std::invalid_argument("operator_norm_estimate: iters >= 1 required");
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vec v0(op.domain_grid()->size());
    for (int i = 0; i < v0.size(); ++i) v0[i] = dist(rng);
    GridFunction v(op.domain_grid(), std::move(v0));

    double rayleigh = 0.0;
    for (int t = 0; t < iters; ++t) {
        const double vv = v.norm_sq();
        if (vv == 0.0) return 0.0;
        GridFunction sv = op.apply(v);
        rayleigh = sv.norm_sq() / vv;  // <S*Sv, v>/<v,v>, nondecreasing in t
        GridFunction next = op.apply_adjoint(sv);
        const double nn = next.norm();
        if (nn == 0.0) return 0.0;
        next *= 1.0 / nn;
        v = std::move(next);
    }
    return std::sqrt(rayleigh);
}

double adjoint_consistency_check(const OperatorHandle& op, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("adjoint_consistency_check: trials >= 1 required");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vec uv(op.domain_grid()->size()), yv(op.range_grid()->size());
        for (int i = 0; i < uv.size(); ++i) uv[i] = dist(rng);
        for (int i = 0; i < yv.size(); ++i) yv[i] = dist(rng);
        GridFunction u(op.domain_grid(), std::move(uv));
        GridFunction y(op.range_grid(), std::move(yv));
        const double lhs = op.apply(u).dot(y);
        const double rhs = u.dot(op.apply_adjoint(y));
        const double denom = u.norm() * y.norm();
        if (denom > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    return worst;
}

Mat load_dense_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dense_matrix: cannot open " + path);
    long rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
        throw std::runtime_error("load_dense_matrix: bad header in " + path);
    Mat m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c)
            if (!(in >> m(r, c)))
                throw std::runtime_error("load_dense_matrix: too few entries in " + path);
    return m;
}

}  // namespace bregbox
