#pragma once

#include <map>
#include <string>
#include <vector>

#include "warped/flow.hpp"

namespace warped {

// Each evolution identity is certified as a numerical residual along a
// computed trajectory: the time derivative comes from differencing recorded
// states, the spatial side from stencils, and the residual must vanish
// under grid refinement. Forms marked as variants carry alternative
// coefficients kept for cross-checking; a variant that fails while its
// primary form passes is reported as a discrepancy.
struct ResidualFormInfo {
    std::string id;
    std::string family;
    bool variant = false;
    bool needs_time_derivative = true;
    bool psi_below_one = false; // mask restricted to the psi < 1 region
    std::string description;
};

const std::vector<ResidualFormInfo>& residual_forms();

struct ResidualReport {
    std::string equation;
    double t = 0.0;
    double max_residual = 0.0;
    double rms_residual = 0.0;
};

class ResidualEvaluator {
  public:
    // mask_band nodes are excluded at each end of the grid; k_exponent is
    // the power in u = psi^k.
    explicit ResidualEvaluator(const Trajectory& traj, int mask_band = 3, int k_exponent = -1);

    // Residual over masked nodes of form `id` at recorded index idx
    // (1 <= idx <= size-2 for forms with time derivatives).
    std::vector<double> evaluate(const std::string& id, int idx);
    ResidualReport report(const std::string& id, int idx);

    int size() const { return traj_.size(); }
    double time_at(int idx) const { return traj_.states[idx].t; }

  private:
    struct Bundle;
    const Bundle& bundle(int idx);

    const Trajectory& traj_;
    int band_;
    int k_;
    std::map<int, Bundle> cache_;
};

struct OrderStudyRow {
    std::string equation;
    double observed_order = 0.0;
    double finest_max_residual = 0.0;
    bool monotone = false;
    std::string verdict; // pass | inconclusive | discrepancy
    std::vector<double> max_by_grid;
};

struct OrderStudy {
    std::vector<int> grid_sizes;                 // coarse to fine
    std::vector<double> probe_times;
    std::vector<OrderStudyRow> rows;
    std::vector<ResidualReport> finest_reports;  // rows of residuals.csv
};

// Runs the trajectory at M/4, M/2 and M (every step recorded), evaluates all
// forms at matched probe times, and classifies each form.
OrderStudy run_order_study(const FlowConfig& finest_config, double pass_tol = 1e-3,
                           double min_order = 1.8, int probe_count = 9, int k_exponent = -1);

std::string residuals_csv(const OrderStudy& study);
std::string orders_csv(const OrderStudy& study);

} // namespace warped
