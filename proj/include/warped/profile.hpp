#pragma once

#include <array>
#include <vector>

#include "warped/grid.hpp"

namespace warped {

// Metric degrees of freedom g = phi^2 dx^2 + psi^2 ghat on [0, L] x S^n at
// one instant. psi[0] = 0 (the spheres collapse at the origin), psi > 0 and
// phi > 0 elsewhere.
struct Profile {
    Grid grid;
    std::vector<double> phi;
    std::vector<double> psi;
    int n = 2; // sphere dimension, >= 2
};

// Hard invariants: shapes, psi[0] = 0, positivity, finiteness, n >= 2.
void validate_profile(const Profile& p);

// Discrete d(psi)/ds at the origin from the parity stencil; smooth metrics
// give 1 + O(dx^2).
double origin_slope(const Profile& p);

// Ghost values across x = 0: psi extends as an odd function, phi as an even
// function of x. psi[0] is pinned to exactly 0.
struct OriginGhosts {
    std::array<double, 2> x;   // ghost coordinates -x1, -x2
    std::array<double, 2> psi; // -psi1, -psi2
    std::array<double, 2> phi; // phi1, phi2
};

OriginGhosts apply_origin_bc(Profile& p);

} // namespace warped
