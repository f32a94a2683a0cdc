#include "warped/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "warped/errors.hpp"
#include "warped/numerics.hpp"

namespace warped {

namespace {

void require_positive_psi(const Profile& p) {
    for (std::size_t i = 1; i < p.psi.size(); ++i)
        if (!(p.psi[i] > 0.0))
            throw DegenerateMetricError("degenerate metric: psi <= 0 at node " + std::to_string(i));
}

// psi_sss at the origin from the 5-node parity stencil (-s2,-s1,0,s1,s2)
// with psi extended as an odd function.
double origin_psi_sss(std::span<const double> s, std::span<const double> psi) {
    const double nodes[5] = {-s[2], -s[1], 0.0, s[1], s[2]};
    double w[5];
    fd_weights(0.0, nodes, 5, 3, w);
    return w[0] * (-psi[2]) + w[1] * (-psi[1]) + w[3] * psi[1] + w[4] * psi[2];
}

} // namespace

double unit_sphere_volume(int n) {
    if (n < 1)
        throw UnsupportedDimensionError("unit_sphere_volume: n must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

std::vector<double> arclength(const Profile& p) {
    return cumtrapz(p.grid.x, p.phi);
}

std::vector<double> d_ds(std::span<const double> field, const Profile& p) {
    if (field.size() != p.grid.x.size())
        throw ShapeError("d_ds: field length does not match grid");
    std::vector<double> d = deriv1(p.grid.x, field);
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] /= p.phi[i];
    return d;
}

CurvatureField curvature(const Profile& p) {
    require_positive_psi(p);
    const int nn = p.grid.node_count();
    const int n = p.n;
    CurvatureField f;
    f.n = n;
    f.s = arclength(p);
    f.psi_s.resize(nn);
    f.psi_ss.resize(nn);

    const auto& s = f.s;
    const auto& psi = p.psi;

    // origin: parity stencils (exact odd extension)
    f.psi_s[0] = psi[1] / s[1];
    f.psi_ss[0] = 0.0;
    for (int i = 1; i + 1 < nn; ++i) {
        f.psi_s[i] = d1_mid(s[i - 1], s[i], s[i + 1], psi[i - 1], psi[i], psi[i + 1]);
        f.psi_ss[i] = d2_mid(s[i - 1], s[i], s[i + 1], psi[i - 1], psi[i], psi[i + 1]);
    }
    const int m = nn - 1;
    f.psi_s[m] = -d1_edge(-s[m], -s[m - 1], -s[m - 2], psi[m], psi[m - 1], psi[m - 2]);
    {
        double w[4];
        fd_weights(s[m], s.data() + (m - 3), 4, 2, w);
        f.psi_ss[m] = w[0] * psi[m - 3] + w[1] * psi[m - 2] + w[2] * psi[m - 1] + w[3] * psi[m];
    }
    f.psi_sss0 = origin_psi_sss(s, psi);

    f.K0.resize(nn);
    f.K1.resize(nn);
    f.R.resize(nn);
    f.H.resize(nn);
    f.V.resize(nn);
    f.Rc_radial.resize(nn);
    f.Rc_sphere.resize(nn);

    const double vsn = unit_sphere_volume(n);
    for (int i = 0; i < nn; ++i) {
        if (i == 0) {
            f.K0[0] = -f.psi_sss0;
            f.K1[0] = -f.psi_sss0;
            f.H[0] = std::numeric_limits<double>::infinity();
        } else {
            f.K0[i] = -f.psi_ss[i] / psi[i];
            f.K1[i] = (1.0 - f.psi_s[i] * f.psi_s[i]) / (psi[i] * psi[i]);
            f.H[i] = n * f.psi_s[i] / psi[i];
        }
        f.Rc_radial[i] = n * f.K0[i];
        f.Rc_sphere[i] = f.K0[i] + (n - 1) * f.K1[i];
        f.R[i] = n * f.K0[i] + n * f.Rc_sphere[i];
        f.V[i] = std::pow(psi[i], n) * vsn;
    }
    return f;
}

std::pair<std::vector<double>, std::vector<double>> ricci_xform(const Profile& p) {
    require_positive_psi(p);
    const int nn = p.grid.node_count();
    const int n = p.n;
    const auto& x = p.grid.x;
    const auto& psi = p.psi;
    const auto& phi = p.phi;

    std::vector<double> psi_x = deriv1(x, psi);
    std::vector<double> psi_xx = deriv2(x, psi);
    std::vector<double> phi_x = deriv1(x, phi);

    // parity values at the origin (psi odd, phi even in x)
    psi_x[0] = psi[1] / x[1];
    psi_xx[0] = 0.0;
    phi_x[0] = 0.0;

    std::vector<double> cdx(nn), cg(nn);
    for (int i = 0; i < nn; ++i) {
        const double p3 = phi[i] * phi[i] * phi[i];
        cg[i] = -(phi[i] * psi[i] * psi_xx[i] - psi[i] * psi_x[i] * phi_x[i] +
                  (n - 1) * phi[i] * psi_x[i] * psi_x[i]) / p3 + (n - 1);
        if (i == 0) {
            // n K0 phi^2 with the regularized origin curvature
            const auto s = arclength(p);
            cdx[0] = -n * origin_psi_sss(s, psi) * phi[0] * phi[0];
        } else {
            cdx[i] = -n * (psi_xx[i] * phi[i] - psi_x[i] * phi_x[i]) / (phi[i] * psi[i]);
        }
    }
    return {std::move(cdx), std::move(cg)};
}

std::vector<double> mean_curvature(const Profile& p) {
    CurvatureField f = curvature(p);
    return std::move(f.H);
}

std::vector<double> sphere_volume(const Profile& p) {
    const double vsn = unit_sphere_volume(p.n);
    std::vector<double> v(p.psi.size());
    for (std::size_t i = 0; i < p.psi.size(); ++i)
        v[i] = std::pow(p.psi[i], p.n) * vsn;
    return v;
}

double reference_mean_curvature(int n, double s, double scale) {
    const double r = std::sqrt(scale);
    return n / (r * std::tanh(s / r));
}

std::vector<double> brown_york_mass(const Profile& p) {
    if (p.n != 2)
        throw UnsupportedDimensionError("brown_york_mass: defined for n = 2 only");
    CurvatureField f = curvature(p);
    std::vector<double> m(f.s.size(), 0.0);
    for (std::size_t i = 1; i < f.s.size(); ++i)
        m[i] = (reference_mean_curvature(p.n, f.s[i]) - f.H[i]) * f.V[i];
    return m;
}

ClassMembership class_membership(const Profile& p, double tail_start, double C1, double C2) {
    if (!(C1 > 0.0) || !(C2 >= C1))
        throw ConfigError("class_membership: need 0 < C1 <= C2");
    if (!(tail_start < p.grid.L()))
        throw ConfigError("class_membership: tail_start must lie inside the domain");

    ClassMembership r;
    r.tail_start = tail_start;
    r.phi_ratio_min = r.psi_ratio_min = std::numeric_limits<double>::infinity();
    r.phi_ratio_max = r.psi_ratio_max = -std::numeric_limits<double>::infinity();
    r.first_tail_node = -1;
    for (int i = 1; i < p.grid.node_count(); ++i) {
        const double x = p.grid.x[i];
        if (x < tail_start)
            continue;
        if (r.first_tail_node < 0)
            r.first_tail_node = i;
        const double rp = p.phi[i] / x;
        const double rs = p.psi[i] / std::sinh(x);
        r.ratio_phi.push_back(rp);
        r.ratio_psi.push_back(rs);
        r.phi_ratio_min = std::min(r.phi_ratio_min, rp);
        r.phi_ratio_max = std::max(r.phi_ratio_max, rp);
        r.psi_ratio_min = std::min(r.psi_ratio_min, rs);
        r.psi_ratio_max = std::max(r.psi_ratio_max, rs);
    }
    if (r.ratio_phi.empty())
        throw ConfigError("class_membership: empty tail region");
    r.c1 = std::min(r.phi_ratio_min, r.psi_ratio_min);
    r.c2 = std::max(r.phi_ratio_max, r.psi_ratio_max);
    r.phi_within = r.phi_ratio_min >= C1 && r.phi_ratio_max <= C2;
    r.psi_within = r.psi_ratio_min >= C1 && r.psi_ratio_max <= C2;
    r.within_class = r.c1 >= C1 && r.c2 <= C2;
    return r;
}

} // namespace warped
