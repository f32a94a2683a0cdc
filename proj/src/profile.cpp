#include "warped/profile.hpp"

#include <cmath>
#include <string>

#include "warped/errors.hpp"

namespace warped {

void validate_profile(const Profile& p) {
    validate_grid(p.grid, 1e300); // spacing bound is checked at construction time
    const std::size_t nn = p.grid.x.size();
    if (p.phi.size() != nn || p.psi.size() != nn)
        throw ShapeError("profile: phi/psi length does not match grid");
    if (p.n < 2)
        throw UnsupportedDimensionError("profile: sphere dimension n must be >= 2");
    if (p.psi[0] != 0.0)
        throw DegenerateMetricError("profile: psi must vanish exactly at the origin");
    for (std::size_t i = 0; i < nn; ++i) {
        if (!std::isfinite(p.phi[i]) || p.phi[i] <= 0.0)
            throw DegenerateMetricError("profile: phi must be finite and positive (node " +
                                        std::to_string(i) + ")");
        if (!std::isfinite(p.psi[i]) || (i > 0 && p.psi[i] <= 0.0))
            throw DegenerateMetricError("profile: psi must be finite and positive away from the origin (node " +
                                        std::to_string(i) + ")");
    }
}

double origin_slope(const Profile& p) {
    const double s1 = 0.5 * (p.phi[0] + p.phi[1]) * (p.grid.x[1] - p.grid.x[0]);
    return p.psi[1] / s1;
}

OriginGhosts apply_origin_bc(Profile& p) {
    p.psi[0] = 0.0;
    OriginGhosts g;
    g.x = {-p.grid.x[1], -p.grid.x[2]};
    g.psi = {-p.psi[1], -p.psi[2]};
    g.phi = {p.phi[1], p.phi[2]};
    return g;
}

} // namespace warped
