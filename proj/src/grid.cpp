#include "bregbox/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bregbox {

Grid::Grid(Vec nodes, Vec weights) : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.size() == 0) throw std::invalid_argument("Grid: empty node list");
    if (nodes_.size() != weights_.size())
        throw std::invalid_argument("Grid: node/weight count mismatch");
    for (int i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i] < nodes_[i + 1]))
            throw std::invalid_argument("Grid: nodes must be strictly increasing");
    for (int i = 0; i < weights_.size(); ++i)
        if (!(weights_[i] > 0.0)) throw std::invalid_argument("Grid: weights must be positive");
}

GridPtr Grid::uniform(double a, double b, int n) {
    if (n < 2) throw std::invalid_argument("Grid::uniform: need n >= 2");
    if (!(a < b)) throw std::invalid_argument("Grid::uniform: need a < b");
    const double h = (b - a) / (n - 1);
    Vec nodes(n), weights(n);
    for (int i = 0; i < n; ++i) nodes[i] = a + i * h;
    nodes[n - 1] = b;
    weights.setConstant(h);
    weights[0] = weights[n - 1] = 0.5 * h;
    return std::make_shared<const Grid>(std::move(nodes), std::move(weights));
}

GridPtr Grid::from_nodes(Vec nodes) {
    const int n = static_cast<int>(nodes.size());
    if (n < 2) throw std::invalid_argument("Grid::from_nodes: need n >= 2");
    Vec weights(n);
    // composite midpoint: each node owns half of each adjacent interval
    for (int i = 0; i < n; ++i) {
        double w = 0.0;
        if (i > 0) w += 0.5 * (nodes[i] - nodes[i - 1]);
        if (i + 1 < n) w += 0.5 * (nodes[i + 1] - nodes[i]);
        weights[i] = w;
    }
    return std::make_shared<const Grid>(std::move(nodes), std::move(weights));
}

bool Grid::same_as(const Grid& other) const {
    if (this == &other) return true;
    return nodes_.size() == other.nodes_.size() && nodes_ == other.nodes_ &&
           weights_ == other.weights_;
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)) {
    values_ = Vec::Zero(grid_->size());
}

GridFunction::GridFunction(GridPtr grid, Vec values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

double GridFunction::dot(const GridFunction& other) const {
    require_same_grid(*this, other, "GridFunction::dot");
    return (grid_->weights().array() * values_.array() * other.values_.array()).sum();
}

double GridFunction::norm_sq() const {
    return (grid_->weights().array() * values_.array().square()).sum();
}

double GridFunction::norm_l1(std::span<const int> subset) const {
    double s = 0.0;
    for (int i : subset) s += grid_->weights()[i] * std::abs(values_[i]);
    return s;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other, "GridFunction::operator+=");
    values_ += other.values_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other, "GridFunction::operator-=");
    values_ -= other.values_;
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    values_ *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

bool same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.grid() == b.grid()) return true;
    if (!a.grid() || !b.grid()) return false;
    return a.grid()->same_as(*b.grid());
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where) {
    if (!same_grid(a, b))
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

void require_grid(const GridFunction& a, const GridPtr& g, const char* where) {
    if (a.grid() != g && !(a.grid() && g && a.grid()->same_as(*g)))
        throw std::invalid_argument(std::string(where) + ": function not on expected grid");
}

}  // namespace bregbox
