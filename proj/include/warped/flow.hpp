#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "warped/geometry.hpp"
#include "warped/presets.hpp"
#include "warped/profile.hpp"

namespace warped {

enum class OuterBc {
    dirichlet_exact_hyperbolic,
    extrapolate_zero_curvature_gradient,
};

enum class ScalarBoundVariant {
    d_n,          // comparison ODE constant 2/n
    d_n_plus_1,   // comparison ODE constant 2/(n+1), saturated by the Einstein family
};

struct FlowConfig {
    int n = 2;
    double L = 6.0;
    int M = 512;
    double stretch = 0.0;
    double cfl = 0.2;
    double t_end = 1.0;
    OuterBc outer_bc = OuterBc::dirichlet_exact_hyperbolic;
    PresetSpec preset;
    bool modified = false;
    int record_every = 100;
    std::string out_dir = "out";

    // diagnostics knobs
    double tail_start = -1.0; // < 0 means L/2
    double class_c1 = 0.5;
    double class_c2 = 2.0;
    ScalarBoundVariant scalar_bound_variant = ScalarBoundVariant::d_n_plus_1;
    std::vector<double> mass_probes = {1.0, 2.0, 3.0};

    double effective_tail_start() const { return tail_start < 0.0 ? 0.5 * L : tail_start; }
};

void validate_config(const FlowConfig& c);

struct FlowState {
    double t = 0.0;
    Profile profile;
};

struct Trajectory {
    std::vector<FlowState> states;
    FlowConfig config;
    bool boundary_model_mismatch = false;

    int size() const { return static_cast<int>(states.size()); }
};

// Scratch quantities the right-hand side computes along the way.
struct RhsWork {
    std::vector<double> psi_s;
    std::vector<double> psi_ss;
    double psi_sss0 = 0.0;
    double sup_abs_K0 = 0.0;
};

// dpsi/dt and dphi/dt of the flow in xt coordinates:
//   psi_t = psi_ss - (n-1)(1 - psi_s^2)/psi,   phi_t = n phi psi_ss/psi,
// with psi_s = psi_x/phi and psi_ss = (phi psi_xx - psi_x phi_x)/phi^3
// evaluated with compact x-stencils; origin handled by parity limits
// (psi_t(0) = 0, phi_t(0) = n phi(0) psi_sss(0)).
std::pair<std::vector<double>, std::vector<double>> rhs_xt(const FlowState& state,
                                                           RhsWork* work = nullptr);

// rhs of d/dt g = -2 Rc - 2 n g: the plain rhs minus (n psi, n phi).
std::pair<std::vector<double>, std::vector<double>> modified_rhs(const FlowState& state,
                                                                 RhsWork* work = nullptr);

double stable_dt(const FlowState& state, double cfl);

// Context shared by step/evolve: which flow, which outer boundary, and the
// closed-form boundary model when one exists.
struct StepContext {
    bool modified = false;
    OuterBc outer_bc = OuterBc::dirichlet_exact_hyperbolic;
    std::optional<ExactSolution> exact; // boundary model for the Dirichlet option
};

void apply_outer_bc(FlowState& state, const StepContext& ctx);

// One classical RK4 update; boundary conditions applied at every stage.
// Throws BlowUpError if the result is non-finite or loses positivity.
FlowState step(const FlowState& state, double dt, const StepContext& ctx);

struct EvolveResult {
    Trajectory trajectory;
    enum class Status { completed, blew_up } status = Status::completed;
    int blowup_node = -1;
    double blowup_time = 0.0;
    std::string blowup_what;
    long steps_taken = 0;
};

using RecordSink = std::function<void(const FlowState&, int record_index)>;

// Integrate from the preset initial data to t_end with dt = stable_dt
// recomputed every step; records every record_every steps plus the final
// state. On blow-up the partial trajectory is retained.
EvolveResult evolve(const FlowConfig& config, const RecordSink& sink = nullptr);

// Time-dependent scaling pair (c(tau), t(tau)) mapping a modified-flow
// trajectory to a plain Ricci flow trajectory g_bar(tau) = c(tau) g(t(tau)).
struct ScalingPair {
    std::string name;
    std::function<double(double)> c;
    std::function<double(double)> t_of_tau;
    std::function<double(double)> tau_of_t;
};

ScalingPair scaling_pair_quoted(int n);   // c = 1 + n tau,  t = log(1 + n tau)/n
ScalingPair scaling_pair_derived(int n);  // c = 1 + 2n tau, t = log(1 + 2n tau)/(2n)

// Chain-rule check residual: g_bar solves d/dtau g_bar = -2 Rc(g_bar) iff
// c t' = 1 and c' = 2n c t'. Derivatives are taken numerically.
double scaling_pair_residual(const ScalingPair& pair, int n, double tau_end);

// Map each recorded state (t_k, psi, phi) to (tau_k, sqrt(c) psi, sqrt(c) phi).
// Requires a trajectory produced with modified = true.
Trajectory reparameterize_modified(const Trajectory& traj, const ScalingPair& pair);

struct CompareModifiedReport {
    struct Candidate {
        std::string name;
        double chain_residual = 0.0;
        bool verified = false;
    };
    std::vector<Candidate> candidates;
    std::string selected;
    double tau_end = 0.0;
    double sup_rel_diff_psi = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Run the modified flow to config.t_end, reparameterize with the verified
// scaling pair, run the plain flow to the mapped final time, and compare
// psi at matched times.
CompareModifiedReport compare_modified(const FlowConfig& config, double tolerance = 1e-3);

} // namespace warped
