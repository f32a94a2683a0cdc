#include "warped/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "warped/errors.hpp"
#include "warped/io.hpp"
#include "warped/numerics.hpp"

namespace warped {

namespace {

constexpr double kBlowupCurvature = 1e6;

double origin_psi_sss_from(const Profile& p) {
    const auto& x = p.grid.x;
    const double s1 = 0.5 * (p.phi[0] + p.phi[1]) * (x[1] - x[0]);
    const double s2 = s1 + 0.5 * (p.phi[1] + p.phi[2]) * (x[2] - x[1]);
    const double nodes[5] = {-s2, -s1, 0.0, s1, s2};
    double w[5];
    fd_weights(0.0, nodes, 5, 3, w);
    return w[0] * (-p.psi[2]) + w[1] * (-p.psi[1]) + w[3] * p.psi[1] + w[4] * p.psi[2];
}

// s-form first and second derivatives of psi out of compact x-stencils:
// psi_s = psi_x/phi, psi_ss = (phi psi_xx - psi_x phi_x)/phi^3.
void psi_s_derivatives(const Profile& p, std::vector<double>& psi_s, std::vector<double>& psi_ss) {
    const auto& x = p.grid.x;
    const auto& psi = p.psi;
    const auto& phi = p.phi;
    const int m = p.grid.M();
    psi_s.resize(m + 1);
    psi_ss.resize(m + 1);

    // origin by parity: psi odd, phi even
    psi_s[0] = psi[1] / (x[1] * phi[0]);
    psi_ss[0] = 0.0;

    for (int i = 1; i < m; ++i) {
        const double px = d1_mid(x[i - 1], x[i], x[i + 1], psi[i - 1], psi[i], psi[i + 1]);
        const double pxx = d2_mid(x[i - 1], x[i], x[i + 1], psi[i - 1], psi[i], psi[i + 1]);
        const double fx = d1_mid(x[i - 1], x[i], x[i + 1], phi[i - 1], phi[i], phi[i + 1]);
        psi_s[i] = px / phi[i];
        psi_ss[i] = (phi[i] * pxx - px * fx) / (phi[i] * phi[i] * phi[i]);
    }

    const double px = -d1_edge(-x[m], -x[m - 1], -x[m - 2], psi[m], psi[m - 1], psi[m - 2]);
    const double fx = -d1_edge(-x[m], -x[m - 1], -x[m - 2], phi[m], phi[m - 1], phi[m - 2]);
    double w[4];
    fd_weights(x[m], x.data() + (m - 3), 4, 2, w);
    const double pxx = w[0] * psi[m - 3] + w[1] * psi[m - 2] + w[2] * psi[m - 1] + w[3] * psi[m];
    psi_s[m] = px / phi[m];
    psi_ss[m] = (phi[m] * pxx - px * fx) / (phi[m] * phi[m] * phi[m]);
}

void check_finite_positive(const Profile& p, double t) {
    for (std::size_t i = 0; i < p.psi.size(); ++i) {
        if (!std::isfinite(p.psi[i]) || !std::isfinite(p.phi[i]))
            throw BlowUpError("non-finite field value at node " + std::to_string(i), static_cast<int>(i), t);
        if (p.phi[i] <= 0.0)
            throw BlowUpError("phi lost positivity at node " + std::to_string(i), static_cast<int>(i), t);
        if (i > 0 && p.psi[i] <= 0.0)
            throw BlowUpError("psi lost positivity at node " + std::to_string(i), static_cast<int>(i), t);
    }
}

} // namespace

void validate_config(const FlowConfig& c) {
    if (c.n < 2)
        throw ConfigError("config: n must be >= 2");
    if (!(c.L > 0.0) || !std::isfinite(c.L))
        throw ConfigError("config: L must be positive and finite");
    if (c.M < 8)
        throw ConfigError("config: M must be >= 8");
    if (!(c.stretch >= 0.0) || !std::isfinite(c.stretch))
        throw ConfigError("config: stretch must be >= 0");
    if (!(c.cfl > 0.0 && c.cfl <= 0.5))
        throw ConfigError("config: cfl must satisfy 0 < cfl <= 0.5");
    if (!(c.t_end > 0.0) || !std::isfinite(c.t_end))
        throw ConfigError("config: t_end must be positive");
    if (c.record_every < 1)
        throw ConfigError("config: record_every must be >= 1");
    if (!(c.class_c1 > 0.0 && c.class_c2 >= c.class_c1))
        throw ConfigError("config: class bounds must satisfy 0 < class_c1 <= class_c2");
    if (c.tail_start >= c.L)
        throw ConfigError("config: tail_start must lie inside the domain");
    for (double r : c.mass_probes)
        if (!(r > 0.0) || !std::isfinite(r))
            throw ConfigError("config: mass probes must be positive arclength radii");
    if (c.preset.kind == PresetKind::from_csv && c.preset.csv_path.empty())
        throw ConfigError("config: preset from_csv requires psi_csv");
}

std::pair<std::vector<double>, std::vector<double>> rhs_xt(const FlowState& state, RhsWork* work) {
    const Profile& p = state.profile;
    const int n = p.n;
    const int m = p.grid.M();

    RhsWork local;
    RhsWork& w = work ? *work : local;
    psi_s_derivatives(p, w.psi_s, w.psi_ss);
    w.psi_sss0 = origin_psi_sss_from(p);

    std::vector<double> dpsi(m + 1), dphi(m + 1);
    dpsi[0] = 0.0;
    dphi[0] = n * p.phi[0] * w.psi_sss0;
    double sup_k0 = std::abs(w.psi_sss0);
    for (int i = 1; i <= m; ++i) {
        const double psi = p.psi[i];
        const double k0 = -w.psi_ss[i] / psi;
        dpsi[i] = w.psi_ss[i] - (n - 1) * (1.0 - w.psi_s[i] * w.psi_s[i]) / psi;
        dphi[i] = n * p.phi[i] * w.psi_ss[i] / psi;
        sup_k0 = std::max(sup_k0, std::abs(k0));
    }
    w.sup_abs_K0 = sup_k0;
    return {std::move(dpsi), std::move(dphi)};
}

std::pair<std::vector<double>, std::vector<double>> modified_rhs(const FlowState& state, RhsWork* work) {
    auto [dpsi, dphi] = rhs_xt(state, work);
    const Profile& p = state.profile;
    for (std::size_t i = 0; i < dpsi.size(); ++i) {
        dpsi[i] -= p.n * p.psi[i];
        dphi[i] -= p.n * p.phi[i];
    }
    return {std::move(dpsi), std::move(dphi)};
}

double stable_dt(const FlowState& state, double cfl) {
    const Profile& p = state.profile;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.grid.M(); ++i) {
        const double ds = 0.5 * (p.phi[i] + p.phi[i + 1]) * (p.grid.x[i + 1] - p.grid.x[i]);
        lo = std::min(lo, ds * ds);
    }
    const double dt = cfl * lo;
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw DegenerateMetricError("stable_dt: nonpositive or non-finite stability scale");
    return dt;
}

void apply_outer_bc(FlowState& state, const StepContext& ctx) {
    Profile& p = state.profile;
    const int m = p.grid.M();
    const auto& x = p.grid.x;

    if (ctx.outer_bc == OuterBc::dirichlet_exact_hyperbolic) {
        const ExactSolution& e = *ctx.exact;
        p.phi[m] = e.phi(x[m], state.t);
        p.psi[m] = e.psi(x[m], state.t);
        return;
    }

    // extrapolate_zero_curvature_gradient: copy K0, K1 from the last interior
    // node and rebuild (psi, phi) at the boundary. phi is extrapolated in x;
    // psi continues the constant-curvature profile psi'' = -K0 psi exactly
    // over the last cell.
    const double xs[3] = {x[m - 3], x[m - 2], x[m - 1]};
    const double fs[3] = {p.phi[m - 3], p.phi[m - 2], p.phi[m - 1]};
    p.phi[m] = lagrange_interp(std::span<const double>(xs, 3), std::span<const double>(fs, 3), x[m]);
    if (!(p.phi[m] > 0.0))
        p.phi[m] = p.phi[m - 1];

    // interior-only arclength spacings of the trailing cells
    const double ds1 = 0.5 * (p.phi[m - 3] + p.phi[m - 2]) * (x[m - 2] - x[m - 3]);
    const double ds2 = 0.5 * (p.phi[m - 2] + p.phi[m - 1]) * (x[m - 1] - x[m - 2]);
    const double ds = 0.5 * (p.phi[m - 1] + p.phi[m]) * (x[m] - x[m - 1]);
    const double s3 = 0.0, s2 = ds1, s1 = ds1 + ds2; // s measured from node m-3

    const double psi_s = -d1_edge(-s1, -s2, -s3, p.psi[m - 1], p.psi[m - 2], p.psi[m - 3]);
    // one-sided second derivative at node m-1 from interior data only,
    // 4 points when available to stay second order
    double psi_ss;
    if (m >= 4) {
        const double ds0 = 0.5 * (p.phi[m - 4] + p.phi[m - 3]) * (x[m - 3] - x[m - 4]);
        const double sn[4] = {-ds0, s3, s2, s1};
        double w4[4];
        fd_weights(s1, sn, 4, 2, w4);
        psi_ss = w4[0] * p.psi[m - 4] + w4[1] * p.psi[m - 3] + w4[2] * p.psi[m - 2] + w4[3] * p.psi[m - 1];
    } else {
        const double sn[3] = {s3, s2, s1};
        double w3[3];
        fd_weights(s1, sn, 3, 2, w3);
        psi_ss = w3[0] * p.psi[m - 3] + w3[1] * p.psi[m - 2] + w3[2] * p.psi[m - 1];
    }

    const double psi1 = p.psi[m - 1];
    const double K0 = -psi_ss / psi1;
    double psi_new;
    if (std::abs(K0) * ds * ds < 1e-12) {
        psi_new = psi1 + ds * psi_s + 0.5 * ds * ds * psi_ss;
    } else if (K0 < 0.0) {
        const double k = std::sqrt(-K0);
        psi_new = psi1 * std::cosh(k * ds) + psi_s / k * std::sinh(k * ds);
    } else {
        const double k = std::sqrt(K0);
        psi_new = psi1 * std::cos(k * ds) + psi_s / k * std::sin(k * ds);
    }
    p.psi[m] = psi_new;
}

namespace {

void apply_bcs(FlowState& state, const StepContext& ctx) {
    state.profile.psi[0] = 0.0;
    apply_outer_bc(state, ctx);
}

} // namespace

FlowState step(const FlowState& state, double dt, const StepContext& ctx, RhsWork* work) {
    const auto rhs = [&](const FlowState& s, RhsWork* wk) {
        return ctx.modified ? modified_rhs(s, wk) : rhs_xt(s, wk);
    };
    const std::size_t nn = state.profile.psi.size();

    FlowState y1 = state;
    auto [k1p, k1f] = rhs(y1, work);

    FlowState y2 = state;
    y2.t = state.t + 0.5 * dt;
    for (std::size_t i = 0; i < nn; ++i) {
        y2.profile.psi[i] += 0.5 * dt * k1p[i];
        y2.profile.phi[i] += 0.5 * dt * k1f[i];
    }
    apply_bcs(y2, ctx);
    auto [k2p, k2f] = rhs(y2, nullptr);

    FlowState y3 = state;
    y3.t = state.t + 0.5 * dt;
    for (std::size_t i = 0; i < nn; ++i) {
        y3.profile.psi[i] += 0.5 * dt * k2p[i];
        y3.profile.phi[i] += 0.5 * dt * k2f[i];
    }
    apply_bcs(y3, ctx);
    auto [k3p, k3f] = rhs(y3, nullptr);

    FlowState y4 = state;
    y4.t = state.t + dt;
    for (std::size_t i = 0; i < nn; ++i) {
        y4.profile.psi[i] += dt * k3p[i];
        y4.profile.phi[i] += dt * k3f[i];
    }
    apply_bcs(y4, ctx);
    auto [k4p, k4f] = rhs(y4, nullptr);

    FlowState out = state;
    out.t = state.t + dt;
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < nn; ++i) {
        out.profile.psi[i] += c * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
        out.profile.phi[i] += c * (k1f[i] + 2.0 * k2f[i] + 2.0 * k3f[i] + k4f[i]);
    }
    apply_bcs(out, ctx);
    check_finite_positive(out.profile, out.t);
    return out;
}

EvolveResult evolve(const FlowConfig& config, const RecordSink& sink) {
    validate_config(config);

    Profile initial;
    if (config.preset.kind == PresetKind::from_csv) {
        initial = load_profile_csv(config.preset.csv_path);
        initial.n = config.n;
        validate_profile(initial);
    } else {
        Grid grid = build_grid(config.L, config.M, config.stretch);
        initial = make_profile(config.preset, grid, config.n);
    }

    StepContext ctx;
    ctx.modified = config.modified;
    ctx.outer_bc = config.outer_bc;

    EvolveResult result;
    result.trajectory.config = config;

    ctx.exact = exact_solution_for(config.preset, config.n, config.modified);
    if (!ctx.exact) {
        if (config.outer_bc == OuterBc::dirichlet_exact_hyperbolic) {
            // permitted, but the boundary model does not match the data
            result.trajectory.boundary_model_mismatch = true;
        }
        PresetSpec hyper;
        hyper.kind = PresetKind::hyperbolic;
        ctx.exact = exact_solution_for(hyper, config.n, config.modified);
    }

    FlowState state;
    state.t = 0.0;
    state.profile = std::move(initial);
    apply_bcs(state, ctx);

    auto record = [&](const FlowState& s) {
        const int idx = result.trajectory.size();
        result.trajectory.states.push_back(s);
        if (sink)
            sink(s, idx);
    };
    record(state);

    long steps = 0;
    RhsWork work;
    const double t_eps = 1e-12 * config.t_end;
    while (state.t < config.t_end - t_eps) {
        double dt = stable_dt(state, config.cfl);
        bool final_step = false;
        if (state.t + dt >= config.t_end - t_eps) {
            dt = config.t_end - state.t;
            final_step = true;
        }
        try {
            state = step(state, dt, ctx, &work);
        } catch (const BlowUpError& e) {
            result.status = EvolveResult::Status::blew_up;
            result.blowup_node = e.node;
            result.blowup_time = e.time;
            result.blowup_what = e.what();
            result.steps_taken = steps;
            record(state); // last healthy state closes the partial trajectory
            return result;
        }
        ++steps;
        if (work.sup_abs_K0 > kBlowupCurvature) {
            result.status = EvolveResult::Status::blew_up;
            result.blowup_node = -1;
            result.blowup_time = state.t;
            result.blowup_what = "curvature magnitude exceeded threshold";
            result.steps_taken = steps;
            record(state);
            return result;
        }
        if (final_step || steps % config.record_every == 0)
            record(state);
    }
    result.steps_taken = steps;
    return result;
}

ScalingPair scaling_pair_quoted(int n) {
    ScalingPair p;
    p.name = "c=1+n*tau, t=log(1+n*tau)/n";
    p.c = [n](double tau) { return 1.0 + n * tau; };
    p.t_of_tau = [n](double tau) { return std::log1p(n * tau) / n; };
    p.tau_of_t = [n](double t) { return std::expm1(n * t) / n; };
    return p;
}

ScalingPair scaling_pair_derived(int n) {
    ScalingPair p;
    p.name = "c=1+2n*tau, t=log(1+2n*tau)/(2n)";
    p.c = [n](double tau) { return 1.0 + 2.0 * n * tau; };
    p.t_of_tau = [n](double tau) { return std::log1p(2.0 * n * tau) / (2.0 * n); };
    p.tau_of_t = [n](double t) { return std::expm1(2.0 * n * t) / (2.0 * n); };
    return p;
}

double scaling_pair_residual(const ScalingPair& pair, int n, double tau_end) {
    // d/dtau [c(tau) g(t(tau))] = -2 Rc  requires  c t' = 1  and  c' = 2n c t'.
    double worst = 0.0;
    const int samples = 64;
    for (int j = 0; j <= samples; ++j) {
        const double tau = tau_end * j / samples;
        const double h = 1e-4 * (1.0 + tau);
        auto d5 = [&](const std::function<double(double)>& f) {
            return (-f(tau + 2 * h) + 8 * f(tau + h) - 8 * f(tau - h) + f(tau - 2 * h)) / (12 * h);
        };
        const double cp = d5(pair.c);
        const double tp = d5(pair.t_of_tau);
        const double ct = pair.c(tau) * tp;
        worst = std::max(worst, std::abs(ct - 1.0));
        worst = std::max(worst, std::abs(cp - 2.0 * n * ct) / (2.0 * n));
    }
    return worst;
}

Trajectory reparameterize_modified(const Trajectory& traj, const ScalingPair& pair) {
    if (!traj.config.modified)
        throw ContractError("reparameterize_modified: trajectory was not produced by the modified flow");
    Trajectory out;
    out.config = traj.config;
    out.config.modified = false;
    out.boundary_model_mismatch = traj.boundary_model_mismatch;
    out.states.reserve(traj.states.size());
    for (const FlowState& s : traj.states) {
        const double tau = pair.tau_of_t(s.t);
        const double r = std::sqrt(pair.c(tau));
        FlowState mapped = s;
        mapped.t = tau;
        for (std::size_t i = 0; i < mapped.profile.psi.size(); ++i) {
            mapped.profile.psi[i] *= r;
            mapped.profile.phi[i] *= r;
        }
        out.states.push_back(std::move(mapped));
    }
    return out;
}

CompareModifiedReport compare_modified(const FlowConfig& config, double tolerance) {
    CompareModifiedReport report;
    report.tolerance = tolerance;

    FlowConfig cfg_mod = config;
    cfg_mod.modified = true;

    const ScalingPair quoted = scaling_pair_quoted(config.n);
    const ScalingPair derived = scaling_pair_derived(config.n);
    const ScalingPair* candidates[] = {&quoted, &derived};
    const ScalingPair* selected = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const ScalingPair* cand : candidates) {
        CompareModifiedReport::Candidate c;
        c.name = cand->name;
        c.chain_residual = scaling_pair_residual(*cand, config.n, cand->tau_of_t(config.t_end));
        c.verified = c.chain_residual <= 1e-6;
        report.candidates.push_back(c);
        if (c.verified && c.chain_residual < best) {
            best = c.chain_residual;
            selected = cand;
        }
    }
    if (!selected)
        return report; // no admissible pair; pass stays false

    report.selected = selected->name;
    report.tau_end = selected->tau_of_t(config.t_end);

    EvolveResult mod = evolve(cfg_mod);
    if (mod.status != EvolveResult::Status::completed)
        throw BlowUpError("compare_modified: modified run blew up: " + mod.blowup_what,
                          mod.blowup_node, mod.blowup_time);
    Trajectory mapped = reparameterize_modified(mod.trajectory, *selected);

    FlowConfig cfg_plain = config;
    cfg_plain.modified = false;
    cfg_plain.t_end = report.tau_end;
    EvolveResult plain = evolve(cfg_plain);
    if (plain.status != EvolveResult::Status::completed)
        throw BlowUpError("compare_modified: plain run blew up: " + plain.blowup_what,
                          plain.blowup_node, plain.blowup_time);

    const int nk = static_cast<int>(mapped.states.size());
    std::vector<double> taus(nk);
    for (int k = 0; k < nk; ++k)
        taus[k] = mapped.states[k].t;

    const int nn = plain.trajectory.states.front().profile.grid.node_count();
    double sup = 0.0;
    for (const FlowState& s : plain.trajectory.states) {
        const double tau = std::min(s.t, taus.back());
        // shared 4-point window in tau, Lagrange weights reused for all nodes
        auto it = std::upper_bound(taus.begin(), taus.end(), tau);
        int lo = std::clamp(static_cast<int>(it - taus.begin()) - 2, 0, std::max(0, nk - 4));
        const int wlen = std::min(4, nk);
        double wts[4];
        for (int a = 0; a < wlen; ++a) {
            double w = 1.0;
            for (int b = 0; b < wlen; ++b)
                if (b != a)
                    w *= (tau - taus[lo + b]) / (taus[lo + a] - taus[lo + b]);
            wts[a] = w;
        }
        for (int i = 1; i + 1 < nn; ++i) {
            double interp = 0.0;
            for (int a = 0; a < wlen; ++a)
                interp += wts[a] * mapped.states[lo + a].profile.psi[i];
            sup = std::max(sup, std::abs(interp - s.profile.psi[i]) / std::abs(s.profile.psi[i]));
        }
    }
    report.sup_rel_diff_psi = sup;
    report.pass = sup <= tolerance;
    return report;
}

} // namespace warped
