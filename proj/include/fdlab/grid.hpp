#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fdlab {

/// Nodes 0 = r_0 < r_1 < ... < r_N = R discretizing the closed geodesic ball.
class RadialGrid {
public:
    static constexpr std::size_t min_cells = 8;
    static constexpr double max_grading = 1e3;

    explicit RadialGrid(std::vector<double> nodes);

    static RadialGrid uniform(double R, std::size_t cells);
    /// Spacing shrinks geometrically toward r = R; h_max / h_min = ratio.
    static RadialGrid graded(double R, std::size_t cells, double ratio);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    double radius() const noexcept { return nodes_.back(); }
    double operator[](std::size_t i) const noexcept { return nodes_[i]; }
    double spacing(std::size_t i) const noexcept { return nodes_[i + 1] - nodes_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Index of the last node with r_i <= r (0 if r < 0).
    std::size_t last_node_at_or_below(double r) const;

    bool operator==(const RadialGrid& other) const = default;

private:
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr share(RadialGrid grid) { return std::make_shared<const RadialGrid>(std::move(grid)); }

bool same_grid(const GridPtr& a, const GridPtr& b);

/// Values of a radial function at the nodes of a grid.
class RadialField {
public:
    /// Empty field with no grid; a placeholder until assigned.
    RadialField() = default;
    RadialField(GridPtr grid, std::vector<double> values);
    /// Zero field.
    explicit RadialField(GridPtr grid);

    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const RadialGrid& grid() const noexcept { return *grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Piecewise-linear interpolation; r must lie in [0, R].
    double interpolate(double r) const;

    double max() const;
    double min() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

}  // namespace fdlab
