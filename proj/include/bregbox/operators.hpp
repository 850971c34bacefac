#pragma once

#include "bregbox/grid.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace bregbox {

enum class OperatorKind { dense, fredholm, poisson1d };

/// A discretized linear operator S: U -> Y between weighted grid spaces,
/// together with its exact discrete adjoint. Handles are immutable after
/// construction and cheap to copy; concurrent read-only use is safe.
///
/// The adjoint is taken with respect to the weighted inner products of the
/// two grids: for a dense matrix M it is S* = W_U^{-1} M^T W_Y.
class OperatorHandle {
public:
    /// Dense matrix operator. m has range_grid->size() rows and
    /// domain_grid->size() columns; the adjoint matrix is derived.
    static OperatorHandle dense(GridPtr domain, GridPtr range, Mat m);

    /// Dense operator with a caller-supplied adjoint matrix. Intended for
    /// custom operator pairs; adjoint_consistency_check() validates them.
    static OperatorHandle dense_with_adjoint(GridPtr domain, GridPtr range, Mat m, Mat adjoint);

    /// Fredholm integral operator (Su)(x) = int k(x,t) u(t) dt discretized by
    /// the grids' quadrature; the adjoint reuses the same kernel samples, so
    /// the discrete adjoint identity holds exactly.
    static OperatorHandle fredholm(GridPtr domain, GridPtr range,
                                   const std::function<double(double, double)>& kernel);

    /// Solution operator of -y'' = u, y=0 on both ends, on a uniform grid
    /// (standard 3-point Laplacian, Dirichlet rows eliminated). Maps a right
    /// hand side u to the solution y on the same grid; self-adjoint.
    static OperatorHandle poisson1d(GridPtr grid);

    OperatorKind kind() const;
    const GridPtr& domain_grid() const;
    const GridPtr& range_grid() const;

    /// Su. Throws std::invalid_argument unless u lives on the domain grid.
    GridFunction apply(const GridFunction& u) const;

    /// S*y. Throws std::invalid_argument unless y lives on the range grid.
    GridFunction apply_adjoint(const GridFunction& y) const;

    /// Materializes the matrix of S (columns = images of unit vectors).
    Mat dense_matrix() const;

private:
    struct Impl;
    explicit OperatorHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Power-iteration estimate of ||S|| = sup ||Su||_Y / ||u||_U, started from a
/// fixed deterministic vector. Nondecreasing in iters up to round-off.
double operator_norm_estimate(const OperatorHandle& op, int iters);

/// Max over random pairs (u,y) of |<Su,y>_Y - <u,S*y>_U| / (||u|| ||y||).
/// Deterministic given the seed.
double adjoint_consistency_check(const OperatorHandle& op, int trials, std::uint64_t seed);

/// Reads a dense matrix from a plain-text file: first line "rows cols", then
/// row-major whitespace-separated entries. Throws std::runtime_error on
/// malformed input.
Mat load_dense_matrix(const std::string& path);

}  // namespace bregbox
