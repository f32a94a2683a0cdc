#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "warped/flow.hpp"
#include "warped/geometry.hpp"

namespace warped {

// margin is the signed distance to violation (positive = pass) in the
// natural units of the check. boundary_case marks margins within roundoff
// of an open condition's boundary (the flat fixed point); such records do
// not gate.
struct CheckRecord {
    std::string name;
    bool pass = false;
    bool boundary_case = false;
    bool applicable = true;
    double margin = 0.0;
    int worst_node = -1;
    std::vector<std::pair<std::string, double>> details;

    bool ok() const { return !applicable || pass || boundary_case; }
};

// roundoff floor separating "sits exactly on the open boundary" from a
// genuine violation; real failures are at least O(dx^2) above this
inline constexpr double kBoundaryTol = 1e-10;

CheckRecord check_psi_monotone(const CurvatureField& f);
CheckRecord check_psi_convex(const CurvatureField& f);
CheckRecord check_negative_curvature(const CurvatureField& f);

// Comparison-ODE lower bound R(t) >= -1/(2t/d - 1/R0_inf). Both d = n and
// d = n+1 margins are recorded; the configured variant gates. The Einstein
// family saturates the d = n+1 bound, so pass allows a relative slack of
// saturation_tol.
CheckRecord check_scalar_bound(const CurvatureField& f, double t, double R0_inf,
                               ScalarBoundVariant variant, double saturation_tol = 1e-2);

// sup |a| with a = psi^2 (K1 - K0); gated only on finiteness.
CheckRecord check_pinching(const CurvatureField& f, const Profile& p);

CheckRecord check_origin_regularity(const Profile& p);
CheckRecord check_positivity(const Profile& p);

// Trajectory-level checks (each computes curvature per recorded state).
CheckRecord check_asymptotic_factorization(const Trajectory& traj, double tail_start,
                                           double tolerance = 1e-2);
CheckRecord check_class_persistence(const Trajectory& traj, double tail_start,
                                    double C1, double C2);
CheckRecord check_flat_convergence(const Trajectory& traj, double rate_tol = 0.1,
                                   double step_tol = 1e-3);

struct MassProbeSeries {
    std::vector<double> radii;
    std::vector<double> times;
    std::vector<std::vector<double>> masses; // [time][probe]
};

// Quasi-local mass at probe arclength radii for each recorded state;
// reference_scale(t) selects the hyperbolic comparison model so the
// reference scales with the flow.
MassProbeSeries track_mass(const Trajectory& traj, const std::vector<double>& probes,
                           const std::function<double(double)>& reference_scale);

struct SeriesRow {
    double t = 0.0;
    double sup_abs_K0 = 0.0;
    double sup_abs_K1 = 0.0;
    double inf_R = 0.0;
    double sup_R = 0.0;
    double min_psi_s = 0.0;
    double min_psi_ss = 0.0;
    std::vector<double> mass; // one entry per probe (n = 2 runs)
};

struct StateReport {
    double t = 0.0;
    std::vector<CheckRecord> checks;
    SeriesRow series;
};

struct DiagnosticsOptions {
    double tail_start = 3.0;
    double class_c1 = 0.5;
    double class_c2 = 2.0;
    ScalarBoundVariant variant = ScalarBoundVariant::d_n_plus_1;
    double saturation_tol = 1e-2;
    double factorization_tol = 1e-2;
    double flat_rate_tol = 0.1;
    double flat_step_tol = 1e-3;
    std::vector<double> mass_probes;
    std::function<double(double)> mass_reference_scale; // defaults to 1
};

DiagnosticsOptions diagnostics_options_for(const FlowConfig& config);

struct TrajectoryDiagnostics {
    std::vector<StateReport> states;
    std::vector<CheckRecord> trajectory_checks;
    MassProbeSeries mass;

    bool all_gated_pass() const;
};

// Runs every per-state monitor on every recorded state plus the
// trajectory-level monitors, sharing one curvature evaluation per state.
TrajectoryDiagnostics run_diagnostics(const Trajectory& traj, const DiagnosticsOptions& opts);

} // namespace warped
