#include "fdlab/grid.hpp"

#include "fdlab/error.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

namespace fdlab {

RadialGrid::RadialGrid(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < min_cells + 1)
        throw ValidationError("grid", "need at least " + std::to_string(min_cells) + " cells");
    if (nodes_.front() != 0.0)
        throw ValidationError("grid", "first node must be r = 0");
    double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        const double h = nodes_[i + 1] - nodes_[i];
        if (!(h > 0.0) || !std::isfinite(nodes_[i + 1]))
            throw ValidationError("grid", "nodes must be finite and strictly increasing (at " + std::to_string(i) + ")");
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    if (hmax / hmin > max_grading * (1.0 + 1e-12))
        throw ValidationError("grid", "max spacing / min spacing exceeds 1e3");
}

RadialGrid RadialGrid::uniform(double R, std::size_t cells)
{
    if (!(R > 0.0) || !std::isfinite(R))
        throw ValidationError("grid.R", "outer radius must be positive");
    std::vector<double> nodes(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        nodes[i] = R * static_cast<double>(i) / static_cast<double>(cells);
    nodes[cells] = R;
    return RadialGrid(std::move(nodes));
}

RadialGrid RadialGrid::graded(double R, std::size_t cells, double ratio)
{
    if (!(ratio >= 1.0) || ratio > max_grading)
        throw ValidationError("grid.grading", "ratio must be in [1, 1e3]");
    if (ratio == 1.0 || cells < 2)
        return uniform(R, cells);
    // h_i = h_0 * g^i, g^(cells-1) = 1/ratio
    const double g = std::pow(1.0 / ratio, 1.0 / static_cast<double>(cells - 1));
    std::vector<double> h(cells);
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        h[i] = std::pow(g, static_cast<double>(i));
        total += h[i];
    }
    std::vector<double> nodes(cells + 1, 0.0);
    for (std::size_t i = 0; i < cells; ++i)
        nodes[i + 1] = nodes[i] + R * h[i] / total;
    nodes[cells] = R;
    return RadialGrid(std::move(nodes));
}

std::size_t RadialGrid::last_node_at_or_below(double r) const
{
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    if (it == nodes_.begin())
        return 0;
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

bool same_grid(const GridPtr& a, const GridPtr& b)
{
    return a == b || (a && b && *a == *b);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_)
        throw std::invalid_argument("RadialField: null grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("RadialField: " + std::to_string(values_.size()) + " values for " +
                                    std::to_string(grid_->size()) + " nodes");
}

RadialField::RadialField(GridPtr grid) : grid_(std::move(grid))
{
    if (!grid_)
        throw std::invalid_argument("RadialField: null grid");
    values_.assign(grid_->size(), 0.0);
}

double RadialField::interpolate(double r) const
{
    const RadialGrid& g = *grid_;
    if (r <= 0.0)
        return values_.front();
    if (r >= g.radius())
        return values_.back();
    const std::size_t i = std::min(g.last_node_at_or_below(r), g.size() - 2);
    const double t = (r - g[i]) / g.spacing(i);
    return (1.0 - t) * values_[i] + t * values_[i + 1];
}

double RadialField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double RadialField::min() const { return *std::min_element(values_.begin(), values_.end()); }

}  // namespace fdlab
