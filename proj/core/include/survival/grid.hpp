#pragma once

#include <optional>
#include <span>
#include <vector>

namespace survival {

// Strictly increasing mesh 0 = u_0 < u_1 < ... < u_N = U_max with N >= 8.
class Grid {
public:
    explicit Grid(std::vector<double> nodes);

    std::span<const double> nodes() const noexcept { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    // Number of cells N; there are N + 1 nodes.
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double u_max() const noexcept { return nodes_.back(); }
    double spacing(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }

    bool operator==(const Grid&) const = default;

private:
    std::vector<double> nodes_;
};

// Nodal values of a candidate function plus the constant used for u > U_max.
struct GridFunction {
    std::vector<double> values;
    double far_field = 1.0;

    // Piecewise-linear interpolation on `grid`; far_field beyond U_max and 0
    // for u < 0 (the function is extended by zero on the ruin set).
    double at(const Grid& grid, double u) const;
};

// Graded mesh on [0, u_max]. Spacing grows linearly from the origin so that
// h(u_max) / h(0) is roughly `stretch`; when `cluster` is set an extra
// refinement bump is placed around that point (typically c/a, where the
// drift changes sign). stretch == 1 gives a uniform mesh.
Grid make_grid(double u_max, int n, double stretch = 1.0, std::optional<double> cluster = std::nullopt);

// Appends nodes beyond grid.u_max() up to new_u_max keeping the relative
// spacing h/u of the last cell. Existing nodes are kept bit-for-bit.
Grid extend_grid(const Grid& grid, double new_u_max);

} // namespace survival
