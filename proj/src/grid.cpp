#include "warped/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "warped/errors.hpp"

namespace warped {

double Grid::spacing_ratio() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double h = x[i] - x[i - 1];
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    return hi / lo;
}

double Grid::min_dx() const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i)
        lo = std::min(lo, x[i] - x[i - 1]);
    return lo;
}

Grid build_grid(double L, int M, double stretch, double ratio_bound) {
    if (!std::isfinite(L) || L <= 0.0)
        throw ConfigError("build_grid: L must be a positive finite length");
    if (M < 8)
        throw ConfigError("build_grid: M must be at least 8");
    if (!std::isfinite(stretch) || stretch < 0.0)
        throw ConfigError("build_grid: stretch must be a finite nonnegative real");

    Grid g;
    g.x.resize(M + 1);
    if (stretch == 0.0) {
        for (int i = 0; i <= M; ++i)
            g.x[i] = L * static_cast<double>(i) / M;
    } else {
        const double denom = std::expm1(stretch);
        for (int i = 0; i <= M; ++i) {
            const double u = static_cast<double>(i) / M;
            g.x[i] = L * std::expm1(stretch * u) / denom;
        }
    }
    g.x[0] = 0.0;
    g.x[M] = L;
    validate_grid(g, ratio_bound);
    return g;
}

void validate_grid(const Grid& grid, double ratio_bound) {
    if (grid.node_count() < 9)
        throw ConfigError("grid: need at least 9 nodes (M >= 8)");
    if (grid.x[0] != 0.0)
        throw ConfigError("grid: x[0] must be exactly 0");
    for (std::size_t i = 1; i < grid.x.size(); ++i) {
        if (!std::isfinite(grid.x[i]) || grid.x[i] <= grid.x[i - 1])
            throw ConfigError("grid: nodes must be finite and strictly increasing (node " +
                              std::to_string(i) + ")");
    }
    if (grid.spacing_ratio() > ratio_bound * (1.0 + 1e-12))
        throw ConfigError("grid: spacing ratio " + std::to_string(grid.spacing_ratio()) +
                          " exceeds bound " + std::to_string(ratio_bound));
}

} // namespace warped
