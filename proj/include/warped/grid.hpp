#pragma once

#include <vector>

namespace warped {

// Spatial discretization of [0, L]: strictly increasing nodes with x[0] = 0.
struct Grid {
    std::vector<double> x;

    int node_count() const { return static_cast<int>(x.size()); }
    int M() const { return static_cast<int>(x.size()) - 1; }
    double L() const { return x.back(); }
    double spacing_ratio() const;
    double min_dx() const;
};

// stretch = 0 gives a uniform partition; stretch > 0 clusters nodes near
// x = 0 via the smooth map x(u) = L (e^{stretch*u} - 1)/(e^{stretch} - 1),
// keeping the cell-size ratio bounded by e^{stretch}.
Grid build_grid(double L, int M, double stretch, double ratio_bound = 10.0);

void validate_grid(const Grid& grid, double ratio_bound = 10.0);

} // namespace warped
