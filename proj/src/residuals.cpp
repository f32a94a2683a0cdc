#include "warped/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "warped/errors.hpp"
#include "warped/geometry.hpp"
#include "warped/io.hpp"
#include "warped/numerics.hpp"

namespace warped {

const std::vector<ResidualFormInfo>& residual_forms() {
    static const std::vector<ResidualFormInfo> forms = {
        {"commutator", "commutator", false, true, false,
         "[d/dt, d/ds] psi = n K0 psi_s"},
        {"arclength", "arclength", false, true, false,
         "ds/dt = n int_0^s (psi_ss/psi), pre-integration form"},
        {"volume", "volume", false, true, false,
         "V_t = V_ss - n(n-1) V(N)^{2/n} V^{(n-2)/n}"},
        {"volume_variant", "volume", true, true, false,
         "coefficient variant (n-1); fails the flat oracle"},
        {"psi_heat", "psi_heat", false, true, false,
         "(d/dt - Lap) psi = K1 psi - n/psi"},
        {"psi_s", "psi_s", false, true, false,
         "psi_s_t - (psi_s)_ss = [-(n-2)K0 + (n-1)K1] psi_s"},
        {"psi_s_laplacian", "psi_s", false, true, false,
         "psi_s_t - Lap(psi_s) = [2K0 + (n-1)K1] psi_s"},
        {"w_eq", "w_eq", false, true, false,
         "w_t - w_ss, w = psi_ss, derived zeroth-order bracket"},
        {"w_eq_variant", "w_eq", true, true, false,
         "bracket with opposite sign; fails the exact-solution oracle"},
        {"K_eq", "K_eq", false, true, false,
         "K_t - K_ss, K = -K0, derived coefficients"},
        {"K_eq_variant", "K_eq", true, true, false,
         "quoted coefficients (n^2 K_s drift, -4(n-1)K1 K)"},
        {"H_eq", "H_eq", false, true, false,
         "H_t = H_ss + H H_s - H^3/n + 2(n-1) V(N)^{2/n} V^{-2/n} H"},
        {"H_eq_variant", "H_eq", true, true, false,
         "quoted coefficients (2n-1)/n and 1/n^2"},
        {"a_eq", "a_eq", false, true, false,
         "a_t = a_ss + (n-4)(psi_s/psi) a_s - 4(n-1)(psi_s/psi)^2 a"},
        {"f_of_psi", "f_of_psi", false, true, true,
         "u = psi^k: u_t - u_ss = -k(n-1) K1 u - ((k-1)/k) u^{-1} u_s^2"},
        {"f_of_psi_variant_k0", "f_of_psi", true, true, true,
         "quoted form with k((n-1)K0 + n) u"},
        {"f_of_psi_variant_k1", "f_of_psi", true, true, true,
         "K1 variant with the extra +n term (the modified-flow version)"},
        {"curv_deriv_K0", "curv_deriv_K0", false, false, false,
         "(K0)_s = -psi_sss/psi - K0 psi_s/psi"},
        {"curv_deriv_K1", "curv_deriv_K1", false, false, false,
         "(K1)_s = -2 (psi_s/psi)(K1 - K0)"},
        {"curv_deriv_K1_variant", "curv_deriv_K1", true, false, false,
         "variant without the factor 2"},
    };
    return forms;
}

namespace {

const ResidualFormInfo& form_info(const std::string& id) {
    for (const auto& f : residual_forms())
        if (f.id == id)
            return f;
    throw ConfigError("residuals: unknown form '" + id + "'");
}

} // namespace

struct ResidualEvaluator::Bundle {
    double t = 0.0;
    std::vector<double> s, psi, phi, psi_s, w, K0, K1, K, H, V, a, u;
    double psi_sss0 = 0.0;
};

ResidualEvaluator::ResidualEvaluator(const Trajectory& traj, int mask_band, int k_exponent)
    : traj_(traj), band_(mask_band), k_(k_exponent) {
    if (traj_.size() < 3)
        throw InsufficientDataError("residuals: need at least 3 recorded states");
    if (k_ == 0)
        throw ConfigError("residuals: k must be a nonzero integer");
}

const ResidualEvaluator::Bundle& ResidualEvaluator::bundle(int idx) {
    auto it = cache_.find(idx);
    if (it != cache_.end())
        return it->second;
    const FlowState& st = traj_.states[idx];
    CurvatureField f = curvature(st.profile);
    Bundle b;
    b.t = st.t;
    b.s = std::move(f.s);
    b.psi = st.profile.psi;
    b.phi = st.profile.phi;
    b.psi_s = std::move(f.psi_s);
    b.w = std::move(f.psi_ss);
    b.K0 = std::move(f.K0);
    b.K1 = std::move(f.K1);
    b.H = std::move(f.H);
    b.V = std::move(f.V);
    b.psi_sss0 = f.psi_sss0;
    const int nn = static_cast<int>(b.s.size());
    b.K.resize(nn);
    b.a.resize(nn);
    b.u.resize(nn);
    for (int i = 0; i < nn; ++i) {
        b.K[i] = -b.K0[i];
        b.a[i] = b.psi[i] * b.psi[i] * (b.K1[i] - b.K0[i]);
        b.u[i] = i == 0 ? 0.0 : std::pow(b.psi[i], k_);
    }
    return cache_.emplace(idx, std::move(b)).first->second;
}

std::vector<double> ResidualEvaluator::evaluate(const std::string& id, int idx) {
    const ResidualFormInfo& info = form_info(id);
    const int last = traj_.size() - 1;
    if (info.needs_time_derivative && (idx < 1 || idx > last - 1))
        throw InsufficientDataError("residuals: index needs both time neighbors");

    const Bundle& b = bundle(idx);
    const int nn = static_cast<int>(b.s.size());
    const int n = traj_.states[idx].profile.n;
    const double nd = n;

    // centered nonuniform time derivative of a per-node field
    auto dt_of = [&](auto&& field_of) {
        const Bundle& bm = bundle(idx - 1);
        const Bundle& bp = bundle(idx + 1);
        std::vector<double> d(nn);
        for (int i = 0; i < nn; ++i)
            d[i] = d1_mid(bm.t, b.t, bp.t, field_of(bm, i), field_of(b, i), field_of(bp, i));
        return d;
    };
    auto ds = [&](const std::vector<double>& f) { return deriv1(b.s, f); };
    auto dss = [&](const std::vector<double>& f) { return deriv2(b.s, f); };

    std::vector<double> r(nn, 0.0);

    if (id == "commutator") {
        auto dt_psi_s = dt_of([](const Bundle& q, int i) { return q.psi_s[i]; });
        auto dt_psi = dt_of([](const Bundle& q, int i) { return q.psi[i]; });
        auto ds_dt_psi = ds(dt_psi);
        for (int i = 0; i < nn; ++i)
            r[i] = dt_psi_s[i] - ds_dt_psi[i] - nd * b.K0[i] * b.psi_s[i];
    } else if (id == "arclength") {
        auto dt_s = dt_of([](const Bundle& q, int i) { return q.s[i]; });
        std::vector<double> g(nn);
        g[0] = b.psi_sss0;
        for (int i = 1; i < nn; ++i)
            g[i] = b.w[i] / b.psi[i];
        auto I = cumtrapz(b.s, g);
        for (int i = 0; i < nn; ++i)
            r[i] = dt_s[i] - nd * I[i];
    } else if (id == "volume" || id == "volume_variant") {
        const double coef = (id == "volume") ? nd * (nd - 1.0) : (nd - 1.0);
        const double vsn = unit_sphere_volume(n);
        auto dt_V = dt_of([](const Bundle& q, int i) { return q.V[i]; });
        auto V_ss = dss(b.V);
        for (int i = 1; i < nn; ++i)
            r[i] = dt_V[i] - V_ss[i] + coef * vsn * std::pow(b.psi[i], nd - 2.0);
    } else if (id == "psi_heat") {
        auto dt_psi = dt_of([](const Bundle& q, int i) { return q.psi[i]; });
        for (int i = 1; i < nn; ++i) {
            const double lap = b.w[i] + nd * (b.psi_s[i] / b.psi[i]) * b.psi_s[i];
            r[i] = dt_psi[i] - lap - b.K1[i] * b.psi[i] + nd / b.psi[i];
        }
    } else if (id == "psi_s" || id == "psi_s_laplacian") {
        auto dt_ps = dt_of([](const Bundle& q, int i) { return q.psi_s[i]; });
        auto ps_ss = dss(b.psi_s);
        if (id == "psi_s") {
            for (int i = 1; i < nn; ++i) {
                const double ps = b.psi_s[i];
                r[i] = dt_ps[i] - ps_ss[i] - (nd - 2.0) * b.w[i] * ps / b.psi[i] -
                       (nd - 1.0) * (1.0 - ps * ps) * ps / (b.psi[i] * b.psi[i]);
            }
        } else {
            auto ps_s = ds(b.psi_s);
            for (int i = 1; i < nn; ++i) {
                const double lap = ps_ss[i] + nd * (b.psi_s[i] / b.psi[i]) * ps_s[i];
                r[i] = dt_ps[i] - lap - (2.0 * b.K0[i] + (nd - 1.0) * b.K1[i]) * b.psi_s[i];
            }
        }
    } else if (id == "w_eq" || id == "w_eq_variant") {
        auto dt_w = dt_of([](const Bundle& q, int i) { return q.w[i]; });
        auto w_ss = dss(b.w);
        auto w_s = ds(b.w);
        for (int i = 1; i < nn; ++i) {
            const double ps = b.psi_s[i], psi = b.psi[i];
            const double ratio2 = ps * ps / (psi * psi);
            const double bracket = 2.0 * b.K0[i] + (nd - 1.0) / (psi * psi) - (4.0 * nd - 5.0) * ratio2;
            const double drift = (nd - 2.0) * (ps / psi) * w_s[i];
            const double forcing = 2.0 * (nd - 1.0) * b.K1[i] * ps * ps / psi;
            if (id == "w_eq")
                r[i] = dt_w[i] - w_ss[i] - drift - bracket * b.w[i] + forcing;
            else
                r[i] = dt_w[i] - w_ss[i] - drift + bracket * b.w[i] + forcing;
        }
    } else if (id == "K_eq" || id == "K_eq_variant") {
        auto dt_K = dt_of([](const Bundle& q, int i) { return q.K[i]; });
        auto K_ss = dss(b.K);
        auto K_s = ds(b.K);
        for (int i = 1; i < nn; ++i) {
            const double K = b.K[i], K1 = b.K1[i];
            const double ratio2 = b.psi_s[i] * b.psi_s[i] / (b.psi[i] * b.psi[i]);
            if (id == "K_eq")
                r[i] = dt_K[i] - K_ss[i] - nd * (b.psi_s[i] / b.psi[i]) * K_s[i] + 2.0 * K * K -
                       2.0 * (nd - 1.0) * K1 * K + 2.0 * (nd - 1.0) * (K + K1) * ratio2;
            else
                r[i] = dt_K[i] - K_ss[i] - nd * nd * (b.psi_s[i] / b.psi[i]) * K_s[i] +
                       2.0 * K * K + 4.0 * (nd - 1.0) * K1 * K + 2.0 * (nd - 1.0) * K1 * ratio2;
        }
    } else if (id == "H_eq" || id == "H_eq_variant") {
        auto dt_H = dt_of([](const Bundle& q, int i) { return q.H[i]; });
        auto w_s = ds(b.w);
        for (int i = 1; i < nn; ++i) {
            const double psi = b.psi[i], ps = b.psi_s[i], H = b.H[i];
            // H_s and H_ss written through psi-quantities; direct stencils on
            // H would blow up near the origin where H ~ n/s
            const double H_s = nd * (b.w[i] / psi - ps * ps / (psi * psi));
            const double H_ss = nd * (w_s[i] / psi - 3.0 * ps * b.w[i] / (psi * psi) +
                                      2.0 * ps * ps * ps / (psi * psi * psi));
            const double src = 2.0 * (nd - 1.0) * H / (psi * psi);
            if (id == "H_eq")
                r[i] = dt_H[i] - H_ss - H * H_s + H * H * H / nd - src;
            else
                r[i] = dt_H[i] - H_ss - (2.0 * nd - 1.0) / nd * H * H_s + H * H * H / (nd * nd) - src;
        }
    } else if (id == "a_eq") {
        auto dt_a = dt_of([](const Bundle& q, int i) { return q.a[i]; });
        auto a_ss = dss(b.a);
        auto a_s = ds(b.a);
        for (int i = 1; i < nn; ++i) {
            const double ratio = b.psi_s[i] / b.psi[i];
            r[i] = dt_a[i] - a_ss[i] - (nd - 4.0) * ratio * a_s[i] +
                   4.0 * (nd - 1.0) * ratio * ratio * b.a[i];
        }
    } else if (id == "f_of_psi" || id == "f_of_psi_variant_k0" || id == "f_of_psi_variant_k1") {
        const double k = k_;
        auto dt_u = dt_of([](const Bundle& q, int i) { return q.u[i]; });
        for (int i = 1; i < nn; ++i) {
            const double psi = b.psi[i], ps = b.psi_s[i];
            const double u_s = k * std::pow(psi, k - 1) * ps;
            const double u_ss = k * (k - 1.0) * std::pow(psi, k - 2) * ps * ps +
                                k * std::pow(psi, k - 1) * b.w[i];
            const double grad = (k - 1.0) / k * u_s * u_s / b.u[i];
            double zeroth;
            if (id == "f_of_psi")
                zeroth = k * (nd - 1.0) * b.K1[i];
            else if (id == "f_of_psi_variant_k0")
                zeroth = k * ((nd - 1.0) * b.K0[i] + nd);
            else
                zeroth = k * ((nd - 1.0) * b.K1[i] + nd);
            r[i] = dt_u[i] - u_ss + zeroth * b.u[i] + grad;
        }
    } else if (id == "curv_deriv_K0") {
        auto K0_s = ds(b.K0);
        auto w_s = ds(b.w);
        for (int i = 1; i < nn; ++i)
            r[i] = K0_s[i] + w_s[i] / b.psi[i] + b.K0[i] * b.psi_s[i] / b.psi[i];
    } else if (id == "curv_deriv_K1" || id == "curv_deriv_K1_variant") {
        auto K1_s = ds(b.K1);
        const double factor = (id == "curv_deriv_K1") ? 2.0 : 1.0;
        for (int i = 1; i < nn; ++i)
            r[i] = K1_s[i] + factor * (b.psi_s[i] / b.psi[i]) * (b.K1[i] - b.K0[i]);
    } else {
        throw ConfigError("residuals: unhandled form '" + id + "'");
    }

    // masked extraction
    std::vector<double> masked;
    for (int i = band_; i <= nn - 1 - band_; ++i) {
        if (info.psi_below_one && !(b.psi[i] < 1.0))
            continue;
        masked.push_back(r[i]);
    }
    if (masked.empty())
        throw InsufficientDataError("residuals: empty mask for form '" + id + "'");
    return masked;
}

ResidualReport ResidualEvaluator::report(const std::string& id, int idx) {
    const std::vector<double> r = evaluate(id, idx);
    ResidualReport rep;
    rep.equation = id;
    rep.t = traj_.states[idx].t;
    double sq = 0.0;
    for (double v : r) {
        rep.max_residual = std::max(rep.max_residual, std::abs(v));
        sq += v * v;
    }
    rep.rms_residual = std::sqrt(sq / static_cast<double>(r.size()));
    return rep;
}

OrderStudy run_order_study(const FlowConfig& finest_config, double pass_tol, double min_order,
                           int probe_count, int k_exponent) {
    if (finest_config.M % 4 != 0 || finest_config.M / 4 < 8)
        throw ConfigError("order study: M must be divisible by 4 with M/4 >= 8");

    OrderStudy study;
    study.grid_sizes = {finest_config.M / 4, finest_config.M / 2, finest_config.M};
    for (int j = 1; j <= probe_count; ++j)
        study.probe_times.push_back(finest_config.t_end * j / (probe_count + 1.0));

    const auto& forms = residual_forms();
    // max residual per [form][grid][probe]
    std::vector<std::vector<std::vector<double>>> res(
        forms.size(), std::vector<std::vector<double>>(study.grid_sizes.size()));

    for (std::size_t gi = 0; gi < study.grid_sizes.size(); ++gi) {
        FlowConfig cfg = finest_config;
        cfg.M = study.grid_sizes[gi];
        cfg.record_every = 1;
        EvolveResult run = evolve(cfg);
        if (run.status != EvolveResult::Status::completed)
            throw BlowUpError("order study: run blew up: " + run.blowup_what, run.blowup_node,
                              run.blowup_time);
        ResidualEvaluator ev(run.trajectory, 3, k_exponent);
        const bool finest = gi + 1 == study.grid_sizes.size();
        for (double tq : study.probe_times) {
            // nearest interior recorded index
            int idx = 1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 1; i + 1 < ev.size(); ++i) {
                const double d = std::abs(ev.time_at(i) - tq);
                if (d < best) {
                    best = d;
                    idx = i;
                }
            }
            for (std::size_t fi = 0; fi < forms.size(); ++fi) {
                ResidualReport rep = ev.report(forms[fi].id, idx);
                res[fi][gi].push_back(rep.max_residual);
                if (finest)
                    study.finest_reports.push_back(rep);
            }
        }
    }

    // classify
    std::map<std::string, bool> family_primary_pass;
    std::vector<OrderStudyRow> rows(forms.size());
    for (std::size_t fi = 0; fi < forms.size(); ++fi) {
        OrderStudyRow& row = rows[fi];
        row.equation = forms[fi].id;
        for (std::size_t gi = 0; gi < study.grid_sizes.size(); ++gi)
            row.max_by_grid.push_back(*std::max_element(res[fi][gi].begin(), res[fi][gi].end()));
        row.finest_max_residual = row.max_by_grid.back();
        row.monotone = row.max_by_grid[0] > row.max_by_grid[1] && row.max_by_grid[1] > row.max_by_grid[2];

        double order_sum = 0.0;
        int order_cnt = 0;
        for (std::size_t pi = 0; pi < study.probe_times.size(); ++pi) {
            for (std::size_t gi = 0; gi + 1 < study.grid_sizes.size(); ++gi) {
                const double c = res[fi][gi][pi];
                const double f = res[fi][gi + 1][pi];
                if (c > 0.0 && f > 0.0) {
                    order_sum += std::log2(c / f);
                    ++order_cnt;
                }
            }
        }
        row.observed_order = order_cnt ? order_sum / order_cnt : 0.0;

        const bool vanishing = row.finest_max_residual <= 1e-10;
        const bool passes = row.finest_max_residual <= pass_tol &&
                            (vanishing || (row.monotone && row.observed_order >= min_order));
        if (!forms[fi].variant)
            family_primary_pass[forms[fi].family] = passes;
        row.verdict = passes ? "pass" : "inconclusive";
    }
    for (std::size_t fi = 0; fi < forms.size(); ++fi) {
        if (forms[fi].variant && rows[fi].verdict != "pass" &&
            family_primary_pass[forms[fi].family])
            rows[fi].verdict = "discrepancy";
    }
    study.rows = std::move(rows);
    return study;
}

std::string residuals_csv(const OrderStudy& study) {
    std::string out = "equation,t,max_residual,rms_residual\n";
    for (const ResidualReport& r : study.finest_reports) {
        out += r.equation;
        out += ',';
        out += fmt17(r.t);
        out += ',';
        out += fmt17(r.max_residual);
        out += ',';
        out += fmt17(r.rms_residual);
        out += '\n';
    }
    return out;
}

std::string orders_csv(const OrderStudy& study) {
    std::string out = "equation,observed_order,verdict\n";
    for (const OrderStudyRow& r : study.rows) {
        out += r.equation;
        out += ',';
        out += fmt17(r.observed_order);
        out += ',';
        out += r.verdict;
        out += '\n';
    }
    return out;
}

} // namespace warped
