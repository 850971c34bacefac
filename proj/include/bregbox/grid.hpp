#pragma once

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace bregbox {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One-dimensional quadrature grid: strictly increasing nodes together with
/// positive weights h_i. All inner products and norms of functions living on
/// the grid are taken in the weighted (discrete L2) sense.
class Grid {
public:
    /// Throws std::invalid_argument unless nodes are strictly increasing,
    /// weights are strictly positive, and the two have equal length.
    Grid(Vec nodes, Vec weights);

    /// Uniform grid on [a,b] with trapezoidal weights (h at interior nodes,
    /// h/2 at the two ends). Trapezoid makes the discrete adjoints of the
    /// integral-operator kinds exact.
    static std::shared_ptr<const Grid> uniform(double a, double b, int n);

    /// Non-uniform grid with composite-midpoint weights.
    static std::shared_ptr<const Grid> from_nodes(Vec nodes);

    int size() const { return static_cast<int>(nodes_.size()); }
    const Vec& nodes() const { return nodes_; }
    const Vec& weights() const { return weights_; }
    double measure() const { return weights_.sum(); }

    bool same_as(const Grid& other) const;

private:
    Vec nodes_;
    Vec weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A real-valued function on a Grid, one value per node.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid);          // zero function
    GridFunction(GridPtr grid, Vec values);       // throws on size mismatch

    bool empty() const { return grid_ == nullptr; }
    int size() const { return grid_ ? grid_->size() : 0; }
    const GridPtr& grid() const { return grid_; }
    const Vec& values() const { return values_; }
    Vec& values() { return values_; }
    double operator[](int i) const { return values_[i]; }

    /// Weighted inner product <u,v> = sum_i h_i u_i v_i. Throws on grid mismatch.
    double dot(const GridFunction& other) const;
    double norm_sq() const;
    double norm() const { return std::sqrt(norm_sq()); }
    double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

    /// Discrete L1 norm over an index subset: sum_{i in subset} h_i |u_i|.
    double norm_l1(std::span<const int> subset) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);

private:
    GridPtr grid_;
    Vec values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

/// True when the two functions live on the same discretization (shared grid
/// object, or identical nodes and weights).
bool same_grid(const GridFunction& a, const GridFunction& b);

/// Throws std::invalid_argument when the grids differ.
void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where);
void require_grid(const GridFunction& a, const GridPtr& g, const char* where);

}  // namespace bregbox
