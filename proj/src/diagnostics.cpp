#include "warped/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "warped/errors.hpp"
#include "warped/numerics.hpp"

namespace warped {

namespace {

// interior nodes: everything except the origin and the controlled boundary
struct Interior {
    int lo, hi; // inclusive
};

Interior interior_of(const CurvatureField& f) {
    return {1, f.node_count() - 2};
}

CheckRecord open_condition_record(const std::string& name, double margin, int worst) {
    CheckRecord r;
    r.name = name;
    r.margin = margin;
    r.worst_node = worst;
    r.boundary_case = std::abs(margin) <= kBoundaryTol;
    r.pass = margin > 0.0;
    return r;
}

double mass_at_probe(const CurvatureField& f, double r, double scale) {
    const int nn = f.node_count();
    if (!(r > 0.0) || !(r < f.s[nn - 1]))
        throw ConfigError("mass probe radius must lie strictly inside (0, s(L))");
    auto it = std::upper_bound(f.s.begin() + 1, f.s.end(), r);
    int i = static_cast<int>(it - f.s.begin()) - 1;
    const int lo = std::clamp(i - 1, 1, nn - 4); // windows never touch the origin sentinel
    const std::span<const double> sw(f.s.data() + lo, 4);
    const double H = lagrange_interp(sw, std::span<const double>(f.H.data() + lo, 4), r);
    const double V = lagrange_interp(sw, std::span<const double>(f.V.data() + lo, 4), r);
    return (reference_mean_curvature(f.n, r, scale) - H) * V;
}

} // namespace

CheckRecord check_psi_monotone(const CurvatureField& f) {
    const auto [lo, hi] = interior_of(f);
    double worst = std::numeric_limits<double>::infinity();
    int node = lo;
    for (int i = lo; i <= hi; ++i)
        if (f.psi_s[i] < worst) {
            worst = f.psi_s[i];
            node = i;
        }
    return open_condition_record("psi_monotone", worst - 1.0, node);
}

CheckRecord check_psi_convex(const CurvatureField& f) {
    const auto [lo, hi] = interior_of(f);
    double worst = std::numeric_limits<double>::infinity();
    int node = lo;
    for (int i = lo; i <= hi; ++i)
        if (f.psi_ss[i] < worst) {
            worst = f.psi_ss[i];
            node = i;
        }
    return open_condition_record("psi_convex", worst, node);
}

CheckRecord check_negative_curvature(const CurvatureField& f) {
    const auto [lo, hi] = interior_of(f);
    double worst = -std::numeric_limits<double>::infinity();
    int node = lo;
    for (int i = lo; i <= hi; ++i) {
        const double k = std::max(f.K0[i], f.K1[i]);
        if (k > worst) {
            worst = k;
            node = i;
        }
    }
    return open_condition_record("negative_curvature", -worst, node);
}

CheckRecord check_scalar_bound(const CurvatureField& f, double t, double R0_inf,
                               ScalarBoundVariant variant, double saturation_tol) {
    if (!(R0_inf < 0.0))
        throw ContractError("check_scalar_bound: requires inf R(0) < 0");
    const auto [lo, hi] = interior_of(f);
    double min_R = std::numeric_limits<double>::infinity();
    int node = lo;
    for (int i = lo; i <= hi; ++i)
        if (f.R[i] < min_R) {
            min_R = f.R[i];
            node = i;
        }
    auto bound = [&](double d) { return -1.0 / (2.0 * t / d - 1.0 / R0_inf); };
    const double b_n = bound(static_cast<double>(f.n));
    const double b_n1 = bound(static_cast<double>(f.n + 1));
    const double m_n = min_R - b_n;
    const double m_n1 = min_R - b_n1;

    CheckRecord r;
    r.name = "scalar_bound";
    r.worst_node = node;
    const double b = variant == ScalarBoundVariant::d_n ? b_n : b_n1;
    r.margin = variant == ScalarBoundVariant::d_n ? m_n : m_n1;
    r.pass = r.margin >= -saturation_tol * std::abs(b);
    r.boundary_case = std::abs(r.margin) <= saturation_tol * std::abs(b);
    r.details = {{"min_R", min_R},
                 {"bound_d_n", b_n},
                 {"margin_d_n", m_n},
                 {"bound_d_n_plus_1", b_n1},
                 {"margin_d_n_plus_1", m_n1}};
    return r;
}

CheckRecord check_pinching(const CurvatureField& f, const Profile& p) {
    double sup = 0.0;
    int node = 0;
    bool finite = true;
    for (int i = 0; i < f.node_count(); ++i) {
        const double a = p.psi[i] * p.psi[i] * (f.K1[i] - f.K0[i]);
        if (!std::isfinite(a))
            finite = false;
        if (std::abs(a) > sup) {
            sup = std::abs(a);
            node = i;
        }
    }
    CheckRecord r;
    r.name = "pinching";
    r.pass = finite;
    r.margin = sup;
    r.worst_node = node;
    r.details = {{"sup_abs_a", sup}};
    return r;
}

CheckRecord check_origin_regularity(const Profile& p) {
    const double dx1 = p.grid.x[1] - p.grid.x[0];
    const double tol = 10.0 * dx1 * dx1;
    const double dev = std::abs(origin_slope(p) - 1.0);
    CheckRecord r;
    r.name = "origin_regularity";
    r.margin = tol - dev;
    r.worst_node = 0;
    r.pass = r.margin >= 0.0 && p.psi[0] == 0.0;
    r.details = {{"origin_slope", origin_slope(p)}, {"tolerance", tol}};
    return r;
}

CheckRecord check_positivity(const Profile& p) {
    double worst = std::numeric_limits<double>::infinity();
    int node = 0;
    for (int i = 0; i < p.grid.node_count(); ++i) {
        if (p.phi[i] < worst) {
            worst = p.phi[i];
            node = i;
        }
        if (i > 0 && p.psi[i] < worst) {
            worst = p.psi[i];
            node = i;
        }
    }
    CheckRecord r;
    r.name = "positivity";
    r.margin = worst;
    r.worst_node = node;
    r.pass = worst > 0.0;
    return r;
}

namespace {

struct FactorizationAccumulator {
    std::vector<double> I_psi; // integral of K0 + (n-1) K1
    std::vector<double> I_phi; // integral of n K0
    std::vector<double> prev_rc_sphere, prev_rc_radial;
    double prev_t = 0.0;
    bool primed = false;

    void prime(const CurvatureField& f, double t) {
        I_psi.assign(f.Rc_sphere.size(), 0.0);
        I_phi.assign(f.Rc_radial.size(), 0.0);
        prev_rc_sphere = f.Rc_sphere;
        prev_rc_radial = f.Rc_radial;
        prev_t = t;
        primed = true;
    }

    void advance(const CurvatureField& f, double t) {
        const double h = 0.5 * (t - prev_t);
        for (std::size_t i = 0; i < I_psi.size(); ++i) {
            I_psi[i] += h * (f.Rc_sphere[i] + prev_rc_sphere[i]);
            I_phi[i] += h * (f.Rc_radial[i] + prev_rc_radial[i]);
        }
        prev_rc_sphere = f.Rc_sphere;
        prev_rc_radial = f.Rc_radial;
        prev_t = t;
    }

    // max relative deviation of psi, phi from the integrated-curvature
    // factorization over tail interior nodes
    std::pair<double, int> deviation(const Profile& p0, const Profile& p, double tail_start) const {
        double dev = 0.0;
        int node = -1;
        for (int i = 1; i + 1 < p.grid.node_count(); ++i) {
            if (p.grid.x[i] < tail_start)
                continue;
            const double dpsi = std::abs(p.psi[i] * std::exp(I_psi[i]) / p0.psi[i] - 1.0);
            const double dphi = std::abs(p.phi[i] * std::exp(I_phi[i]) / p0.phi[i] - 1.0);
            const double d = std::max(dpsi, dphi);
            if (d > dev) {
                dev = d;
                node = i;
            }
        }
        return {dev, node};
    }
};

CheckRecord factorization_record(double dev, int node, double tolerance) {
    CheckRecord r;
    r.name = "asymptotic_factorization";
    r.margin = tolerance - dev;
    r.worst_node = node;
    r.pass = r.margin >= 0.0;
    r.details = {{"max_rel_deviation", dev}, {"tolerance", tolerance}};
    return r;
}

} // namespace

CheckRecord check_asymptotic_factorization(const Trajectory& traj, double tail_start,
                                           double tolerance) {
    if (traj.size() < 3)
        throw InsufficientDataError("asymptotic_factorization: need at least 3 recorded states");
    FactorizationAccumulator acc;
    double dev = 0.0;
    int node = -1;
    for (int k = 0; k < traj.size(); ++k) {
        const FlowState& s = traj.states[k];
        CurvatureField f = curvature(s.profile);
        if (!acc.primed) {
            acc.prime(f, s.t);
            continue;
        }
        acc.advance(f, s.t);
        auto [d, nd] = acc.deviation(traj.states.front().profile, s.profile, tail_start);
        if (d > dev) {
            dev = d;
            node = nd;
        }
    }
    return factorization_record(dev, node, tolerance);
}

CheckRecord check_class_persistence(const Trajectory& traj, double tail_start, double C1,
                                    double C2) {
    CheckRecord r;
    r.name = "class_persistence";
    r.pass = true;
    r.margin = std::numeric_limits<double>::infinity();
    r.worst_node = -1;
    for (int k = 0; k < traj.size(); ++k) {
        const ClassMembership m =
            class_membership(traj.states[k].profile, tail_start, C1, C2);
        const double margin = std::min(m.c1 - C1, C2 - m.c2);
        if (margin < r.margin) {
            r.margin = margin;
            r.worst_node = k; // state index, not a grid node
        }
        if (!m.within_class && r.pass) {
            r.pass = false;
            r.details.emplace_back("first_fail_t", traj.states[k].t);
        }
    }
    return r;
}

namespace {

CheckRecord flat_convergence_from_series(std::span<const double> times, std::span<const double> D,
                                         std::span<const double> sup_abs_R, int n,
                                         double rate_tol, double step_tol) {
    CheckRecord r;
    r.name = "flat_convergence";
    const double t_end = times.back();
    r.applicable = t_end >= 1.0;

    const double rate_cap = 0.5 * (n + 1) * (1.0 + rate_tol);
    double margin_rate = std::numeric_limits<double>::infinity();
    double margin_mono = std::numeric_limits<double>::infinity();
    double worst_t_supR = 0.0;
    int worst = -1;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.5 * t_end)
            continue;
        const double ts = times[k] * sup_abs_R[k];
        worst_t_supR = std::max(worst_t_supR, ts);
        if (rate_cap - ts < margin_rate) {
            margin_rate = rate_cap - ts;
            worst = static_cast<int>(k);
        }
        if (k + 1 < times.size()) {
            const double m = D[k] * (1.0 + step_tol) - D[k + 1];
            margin_mono = std::min(margin_mono, m);
        }
    }
    r.margin = std::min(margin_rate, margin_mono);
    r.worst_node = worst; // state index
    r.pass = margin_rate >= 0.0 && margin_mono >= 0.0;
    r.details = {{"max_t_sup_abs_R", worst_t_supR},
                 {"rate_cap", rate_cap},
                 {"monotonicity_margin", margin_mono}};
    return r;
}

} // namespace

CheckRecord check_flat_convergence(const Trajectory& traj, double rate_tol, double step_tol) {
    std::vector<double> times, D, supR;
    for (const FlowState& s : traj.states) {
        CurvatureField f = curvature(s.profile);
        const auto [lo, hi] = interior_of(f);
        double d = 0.0, sr = 0.0;
        for (int i = lo; i <= hi; ++i) {
            d = std::max(d, std::abs(f.K0[i]) + std::abs(f.K1[i]));
            sr = std::max(sr, std::abs(f.R[i]));
        }
        times.push_back(s.t);
        D.push_back(d);
        supR.push_back(sr);
    }
    return flat_convergence_from_series(times, D, supR, traj.states.front().profile.n,
                                        rate_tol, step_tol);
}

MassProbeSeries track_mass(const Trajectory& traj, const std::vector<double>& probes,
                           const std::function<double(double)>& reference_scale) {
    if (traj.states.empty())
        throw InsufficientDataError("track_mass: empty trajectory");
    if (traj.states.front().profile.n != 2)
        throw UnsupportedDimensionError("track_mass: defined for n = 2 only");
    MassProbeSeries series;
    series.radii = probes;
    for (const FlowState& s : traj.states) {
        CurvatureField f = curvature(s.profile);
        const double scale = reference_scale ? reference_scale(s.t) : 1.0;
        std::vector<double> row;
        row.reserve(probes.size());
        for (double r : probes)
            row.push_back(mass_at_probe(f, r, scale));
        series.times.push_back(s.t);
        series.masses.push_back(std::move(row));
    }
    return series;
}

DiagnosticsOptions diagnostics_options_for(const FlowConfig& config) {
    DiagnosticsOptions o;
    o.tail_start = config.effective_tail_start();
    o.class_c1 = config.class_c1;
    o.class_c2 = config.class_c2;
    o.variant = config.scalar_bound_variant;
    if (config.n == 2)
        o.mass_probes = config.mass_probes;
    if (config.preset.kind == PresetKind::flat) {
        o.mass_reference_scale = [](double) { return 1.0; };
    } else {
        ExactSolution model;
        model.family = ExactSolution::Family::hyperbolic;
        model.lambda2 = config.preset.kind == PresetKind::scaled_hyperbolic
                            ? config.preset.lambda2
                            : 1.0;
        model.modified = config.modified;
        model.n = config.n;
        o.mass_reference_scale = [model](double t) { return model.scale(t); };
    }
    return o;
}

bool TrajectoryDiagnostics::all_gated_pass() const {
    static const std::set<std::string> gated = {
        "psi_monotone", "psi_convex", "negative_curvature", "scalar_bound",
        "asymptotic_factorization", "origin_regularity", "positivity",
        "flat_convergence", "pinching",
    };
    auto ok = [&](const CheckRecord& r) { return !gated.count(r.name) || r.ok(); };
    for (const StateReport& s : states)
        for (const CheckRecord& r : s.checks)
            if (!ok(r))
                return false;
    for (const CheckRecord& r : trajectory_checks)
        if (!ok(r))
            return false;
    return true;
}

TrajectoryDiagnostics run_diagnostics(const Trajectory& traj, const DiagnosticsOptions& opts) {
    if (traj.states.empty())
        throw InsufficientDataError("run_diagnostics: empty trajectory");
    TrajectoryDiagnostics out;
    const Profile& p0 = traj.states.front().profile;
    const int n = p0.n;
    const bool with_mass = n == 2 && !opts.mass_probes.empty();
    if (with_mass)
        out.mass.radii = opts.mass_probes;

    FactorizationAccumulator acc;
    double R0_inf = 0.0;
    double sup_a0 = 0.0, sup_a_max = 0.0;
    bool pinching_finite = true;
    std::vector<double> times, Dseq, supRseq;

    for (int k = 0; k < traj.size(); ++k) {
        const FlowState& s = traj.states[k];
        CurvatureField f = curvature(s.profile);

        StateReport rep;
        rep.t = s.t;

        // series row over interior nodes
        const auto [lo, hi] = interior_of(f);
        SeriesRow row;
        row.t = s.t;
        row.inf_R = std::numeric_limits<double>::infinity();
        row.sup_R = -std::numeric_limits<double>::infinity();
        row.min_psi_s = std::numeric_limits<double>::infinity();
        row.min_psi_ss = std::numeric_limits<double>::infinity();
        double decay_D = 0.0;
        for (int i = lo; i <= hi; ++i) {
            row.sup_abs_K0 = std::max(row.sup_abs_K0, std::abs(f.K0[i]));
            row.sup_abs_K1 = std::max(row.sup_abs_K1, std::abs(f.K1[i]));
            row.inf_R = std::min(row.inf_R, f.R[i]);
            row.sup_R = std::max(row.sup_R, f.R[i]);
            row.min_psi_s = std::min(row.min_psi_s, f.psi_s[i]);
            row.min_psi_ss = std::min(row.min_psi_ss, f.psi_ss[i]);
            decay_D = std::max(decay_D, std::abs(f.K0[i]) + std::abs(f.K1[i]));
        }
        if (with_mass) {
            const double scale = opts.mass_reference_scale ? opts.mass_reference_scale(s.t) : 1.0;
            for (double r : opts.mass_probes)
                row.mass.push_back(mass_at_probe(f, r, scale));
            out.mass.times.push_back(s.t);
            out.mass.masses.push_back(row.mass);
        }

        if (k == 0)
            R0_inf = row.inf_R;

        rep.checks.push_back(check_psi_monotone(f));
        rep.checks.push_back(check_psi_convex(f));
        rep.checks.push_back(check_negative_curvature(f));
        if (R0_inf < -kBoundaryTol) {
            rep.checks.push_back(check_scalar_bound(f, s.t, R0_inf, opts.variant, opts.saturation_tol));
        } else {
            CheckRecord r;
            r.name = "scalar_bound";
            r.applicable = false;
            r.pass = true;
            r.details = {{"inf_R0", R0_inf}};
            rep.checks.push_back(r);
        }
        rep.checks.push_back(check_origin_regularity(s.profile));
        rep.checks.push_back(check_positivity(s.profile));

        const CheckRecord pinch = check_pinching(f, s.profile);
        if (k == 0)
            sup_a0 = pinch.margin;
        sup_a_max = std::max(sup_a_max, pinch.margin);
        pinching_finite = pinching_finite && pinch.pass;
        rep.checks.push_back(pinch);

        {
            CheckRecord cm;
            cm.name = "class_membership";
            const ClassMembership m =
                class_membership(s.profile, opts.tail_start, opts.class_c1, opts.class_c2);
            cm.pass = m.within_class;
            cm.margin = std::min(m.c1 - opts.class_c1, opts.class_c2 - m.c2);
            cm.worst_node = m.first_tail_node;
            cm.details = {{"phi_ratio_min", m.phi_ratio_min}, {"phi_ratio_max", m.phi_ratio_max},
                          {"psi_ratio_min", m.psi_ratio_min}, {"psi_ratio_max", m.psi_ratio_max},
                          {"phi_within", m.phi_within ? 1.0 : 0.0},
                          {"psi_within", m.psi_within ? 1.0 : 0.0}};
            rep.checks.push_back(cm);
        }

        if (!acc.primed) {
            acc.prime(f, s.t);
        } else {
            acc.advance(f, s.t);
            if (traj.size() >= 3) {
                auto [dev, node] = acc.deviation(p0, s.profile, opts.tail_start);
                rep.checks.push_back(factorization_record(dev, node, opts.factorization_tol));
            }
        }

        rep.series = std::move(row);
        out.states.push_back(std::move(rep));
        times.push_back(s.t);
        Dseq.push_back(decay_D);
        supRseq.push_back(std::max(std::abs(out.states.back().series.inf_R),
                                   std::abs(out.states.back().series.sup_R)));
    }

    out.trajectory_checks.push_back(
        flat_convergence_from_series(times, Dseq, supRseq, n, opts.flat_rate_tol, opts.flat_step_tol));
    out.trajectory_checks.push_back(
        check_class_persistence(traj, opts.tail_start, opts.class_c1, opts.class_c2));
    {
        CheckRecord r;
        r.name = "pinching";
        r.pass = pinching_finite;
        r.margin = sup_a0 - sup_a_max; // >= 0 when sup|a| never expands (observation)
        r.details = {{"sup_abs_a_initial", sup_a0},
                     {"sup_abs_a_max", sup_a_max},
                     {"nonexpanding", sup_a_max <= sup_a0 * (1.0 + 1e-12) ? 1.0 : 0.0}};
        out.trajectory_checks.push_back(r);
    }
    return out;
}

} // namespace warped
