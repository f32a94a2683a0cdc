#pragma once

#include <optional>
#include <string>

#include "warped/profile.hpp"

namespace warped {

enum class PresetKind {
    hyperbolic,           // phi = 1, psi = sinh(x)
    flat,                 // phi = 1, psi = x
    scaled_hyperbolic,    // phi = lambda, psi = lambda sinh(x), lambda^2 = lambda2
    perturbed_hyperbolic, // psi = sinh(x) (1 + eps x^2 exp(-((x-x_c)/width)^2))
    from_csv,
};

struct PresetSpec {
    PresetKind kind = PresetKind::hyperbolic;
    double lambda2 = 1.0;
    double eps = 0.1;
    double x_c = 2.0;
    double width = 0.5;
    std::string csv_path;
};

const char* preset_name(PresetKind k);
std::optional<PresetKind> preset_from_name(const std::string& name);

Profile make_profile(const PresetSpec& spec, const Grid& grid, int n);

// Closed-form solution family for presets that have one, used for the
// Dirichlet outer boundary and as the accuracy oracle.
//
//   plain flow,    hyperbolic family:  scale c(t) = lambda2 + 2 n t
//   modified flow, hyperbolic family:  scale c(t) = 1 + (lambda2 - 1) e^{-2nt}
//   flat:          stationary under the plain flow, scale e^{-2nt} under the
//                  modified flow.
struct ExactSolution {
    enum class Family { hyperbolic, flat } family = Family::hyperbolic;
    double lambda2 = 1.0;
    bool modified = false;
    int n = 2;

    double scale(double t) const;
    double phi(double x, double t) const;
    double psi(double x, double t) const;
};

// Empty when the preset has no closed-form solution (perturbed, from_csv).
std::optional<ExactSolution> exact_solution_for(const PresetSpec& spec, int n, bool modified);

} // namespace warped
