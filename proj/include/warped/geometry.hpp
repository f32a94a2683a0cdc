#pragma once

#include <span>
#include <utility>
#include <vector>

#include "warped/profile.hpp"

namespace warped {

// Pointwise geometric quantities derived from a Profile. s-derivatives use
// stencils on the arclength grid s_i = int_0^{x_i} phi. At the origin the
// curvatures are the regularized limit K0(0) = K1(0) = -psi_sss(0) obtained
// from the parity extension (psi odd, phi even), and H carries a +inf
// sentinel since H ~ n/s there.
struct CurvatureField {
    int n = 2;
    std::vector<double> s;
    std::vector<double> psi_s;
    std::vector<double> psi_ss;
    std::vector<double> K0;        // sectional curvature, planes containing the radial direction
    std::vector<double> K1;        // sectional curvature, planes tangent to the spheres
    std::vector<double> R;         // scalar curvature = 2n K0 + n(n-1) K1
    std::vector<double> H;         // mean curvature of the sphere through the node
    std::vector<double> V;         // sphere volume psi^n V(S^n)
    std::vector<double> Rc_radial; // Ricci coefficient of ds^2  (= n K0)
    std::vector<double> Rc_sphere; // Ricci coefficient of psi^2 ghat (= K0 + (n-1) K1)
    double psi_sss0 = 0.0;         // regularized third derivative at the origin

    int node_count() const { return static_cast<int>(s.size()); }
};

double unit_sphere_volume(int n);

std::vector<double> arclength(const Profile& p);

// (1/phi) d/dx of an arbitrary per-node field; one-sided stencils at both ends.
std::vector<double> d_ds(std::span<const double> field, const Profile& p);

CurvatureField curvature(const Profile& p);

// Ricci tensor coefficients of dx^2 and ghat computed directly with
// x-derivative stencils (no arclength grid). Cross-checks the K-form:
// first  ~ n K0 phi^2, second ~ [K0 + (n-1) K1] psi^2.
std::pair<std::vector<double>, std::vector<double>> ricci_xform(const Profile& p);

std::vector<double> mean_curvature(const Profile& p);

std::vector<double> sphere_volume(const Profile& p);

// Quasi-local mass m = (H0 - H) V at each node's arclength radius, against
// the unit-curvature reference H0(s) = n cosh(s)/sinh(s). n = 2 only.
std::vector<double> brown_york_mass(const Profile& p);

// Reference mean curvature at arclength s in the hyperbolic model of scale
// c (curvature -1/c); scale = 1 is the standard model.
double reference_mean_curvature(int n, double s, double scale = 1.0);

// Tail pinching of phi/x and psi/sinh(x) against [C1, C2] on x >= tail_start.
struct ClassMembership {
    double tail_start = 0.0;
    double c1 = 0.0; // min over both ratio families on the tail
    double c2 = 0.0; // max over both ratio families on the tail
    bool within_class = false;
    // per-family records, so a report can state which normalization holds
    double phi_ratio_min = 0.0, phi_ratio_max = 0.0;
    double psi_ratio_min = 0.0, psi_ratio_max = 0.0;
    bool phi_within = false;
    bool psi_within = false;
    std::vector<double> ratio_phi;
    std::vector<double> ratio_psi;
    int first_tail_node = 0;
};

ClassMembership class_membership(const Profile& p, double tail_start, double C1, double C2);

} // namespace warped
