#include "survival/grid.hpp"

#include "survival/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace survival {

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.size() < 9) throw ModelError("grid: need at least 8 cells");
    if (nodes_.front() != 0.0) throw ModelError("grid: first node must be exactly 0");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i + 1] > nodes_[i]) || !std::isfinite(nodes_[i + 1]))
            throw ModelError("grid: nodes must be finite and strictly increasing (index " +
                             std::to_string(i + 1) + ")");
    }
}

double GridFunction::at(const Grid& grid, double u) const
{
    const auto nodes = grid.nodes();
    if (u < 0.0) return 0.0;
    if (u > nodes.back()) return far_field;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), u);
    if (it == nodes.end()) return values.back();
    const auto j = static_cast<std::size_t>(it - nodes.begin());
    const double t = (u - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    return values[j - 1] + t * (values[j] - values[j - 1]);
}

Grid make_grid(double u_max, int n, double stretch, std::optional<double> cluster)
{
    if (!(u_max > 0.0) || !std::isfinite(u_max)) throw ModelError("grid: U_max must be > 0");
    if (n < 8) throw ModelError("grid: N must be >= 8, got " + std::to_string(n));
    if (!(stretch >= 1.0) || !std::isfinite(stretch)) throw ModelError("grid: stretch must be >= 1");

    std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
    nodes.front() = 0.0;
    nodes.back() = u_max;

    if (stretch == 1.0) {
        for (int k = 1; k < n; ++k) nodes[static_cast<std::size_t>(k)] = u_max * k / n;
        return Grid(std::move(nodes));
    }

    // Target spacing g(u); node density is 1/g. Equidistribute the density.
    const double depth = 0.5 * (1.0 - 1.0 / stretch);
    const double width = cluster ? std::max(0.05 * u_max, 0.5 * *cluster) : 1.0;
    auto spacing = [&](double u) {
        double g = 1.0 + (stretch - 1.0) * u / u_max;
        if (cluster && *cluster > 0.0 && *cluster < u_max) {
            const double z = (u - *cluster) / width;
            g *= 1.0 - depth * std::exp(-z * z);
        }
        return g;
    };

    const std::size_t samples = 64 * static_cast<std::size_t>(n) + 4096;
    std::vector<double> xs(samples + 1), cum(samples + 1);
    cum[0] = 0.0;
    xs[0] = 0.0;
    double prev = 1.0 / spacing(0.0);
    for (std::size_t s = 1; s <= samples; ++s) {
        xs[s] = u_max * static_cast<double>(s) / static_cast<double>(samples);
        const double cur = 1.0 / spacing(xs[s]);
        cum[s] = cum[s - 1] + 0.5 * (prev + cur) * (xs[s] - xs[s - 1]);
        prev = cur;
    }
    const double total = cum.back();
    std::size_t s = 1;
    for (int k = 1; k < n; ++k) {
        const double target = total * k / n;
        while (cum[s] < target) ++s;
        const double t = (target - cum[s - 1]) / (cum[s] - cum[s - 1]);
        nodes[static_cast<std::size_t>(k)] = xs[s - 1] + t * (xs[s] - xs[s - 1]);
    }
    return Grid(std::move(nodes));
}

Grid extend_grid(const Grid& grid, double new_u_max)
{
    const double old_max = grid.u_max();
    if (!(new_u_max > old_max)) throw ModelError("grid: extension must increase U_max");
    std::vector<double> nodes(grid.nodes().begin(), grid.nodes().end());
    const double h_last = grid.spacing(grid.cells() - 1);
    const double ratio = h_last / old_max;
    double u = old_max;
    for (;;) {
        const double h = std::max(h_last, ratio * u);
        if (u + 1.5 * h >= new_u_max) break;
        u += h;
        nodes.push_back(u);
    }
    nodes.push_back(new_u_max);
    return Grid(std::move(nodes));
}

} // namespace survival
