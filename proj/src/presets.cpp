#include "warped/presets.hpp"

#include <cmath>

#include "warped/errors.hpp"

namespace warped {

const char* preset_name(PresetKind k) {
    switch (k) {
    case PresetKind::hyperbolic: return "hyperbolic";
    case PresetKind::flat: return "flat";
    case PresetKind::scaled_hyperbolic: return "scaled_hyperbolic";
    case PresetKind::perturbed_hyperbolic: return "perturbed_hyperbolic";
    case PresetKind::from_csv: return "from_csv";
    }
    return "?";
}

std::optional<PresetKind> preset_from_name(const std::string& name) {
    for (PresetKind k : {PresetKind::hyperbolic, PresetKind::flat, PresetKind::scaled_hyperbolic,
                         PresetKind::perturbed_hyperbolic, PresetKind::from_csv})
        if (name == preset_name(k))
            return k;
    return std::nullopt;
}

Profile make_profile(const PresetSpec& spec, const Grid& grid, int n) {
    if (n < 2)
        throw UnsupportedDimensionError("preset: sphere dimension n must be >= 2");
    Profile p;
    p.grid = grid;
    p.n = n;
    const std::size_t nn = grid.x.size();
    p.phi.resize(nn);
    p.psi.resize(nn);
    switch (spec.kind) {
    case PresetKind::hyperbolic:
        for (std::size_t i = 0; i < nn; ++i) {
            p.phi[i] = 1.0;
            p.psi[i] = std::sinh(grid.x[i]);
        }
        break;
    case PresetKind::flat:
        for (std::size_t i = 0; i < nn; ++i) {
            p.phi[i] = 1.0;
            p.psi[i] = grid.x[i];
        }
        break;
    case PresetKind::scaled_hyperbolic: {
        if (!(spec.lambda2 > 0.0) || !std::isfinite(spec.lambda2))
            throw ConfigError("preset: lambda2 must be a positive finite real");
        const double lambda = std::sqrt(spec.lambda2);
        for (std::size_t i = 0; i < nn; ++i) {
            p.phi[i] = lambda;
            p.psi[i] = lambda * std::sinh(grid.x[i]);
        }
        break;
    }
    case PresetKind::perturbed_hyperbolic: {
        if (!(spec.eps > -0.2 && spec.eps < 0.2))
            throw ConfigError("preset: eps must lie in (-0.2, 0.2)");
        if (!(spec.width > 0.0) || !std::isfinite(spec.x_c))
            throw ConfigError("preset: perturbation needs width > 0 and finite x_c");
        for (std::size_t i = 0; i < nn; ++i) {
            const double x = grid.x[i];
            const double u = (x - spec.x_c) / spec.width;
            p.phi[i] = 1.0;
            p.psi[i] = std::sinh(x) * (1.0 + spec.eps * x * x * std::exp(-u * u));
        }
        break;
    }
    case PresetKind::from_csv:
        throw ConfigError("preset: from_csv profiles are built by the loader, not by make_profile");
    }
    p.psi[0] = 0.0;
    validate_profile(p);
    return p;
}

double ExactSolution::scale(double t) const {
    if (family == Family::flat)
        return modified ? std::exp(-2.0 * n * t) : 1.0;
    if (modified)
        return 1.0 + (lambda2 - 1.0) * std::exp(-2.0 * n * t);
    return lambda2 + 2.0 * n * t;
}

double ExactSolution::phi(double /*x*/, double t) const {
    return std::sqrt(scale(t));
}

double ExactSolution::psi(double x, double t) const {
    const double r = std::sqrt(scale(t));
    return family == Family::flat ? r * x : r * std::sinh(x);
}

std::optional<ExactSolution> exact_solution_for(const PresetSpec& spec, int n, bool modified) {
    ExactSolution e;
    e.n = n;
    e.modified = modified;
    switch (spec.kind) {
    case PresetKind::hyperbolic:
        e.family = ExactSolution::Family::hyperbolic;
        e.lambda2 = 1.0;
        return e;
    case PresetKind::scaled_hyperbolic:
        e.family = ExactSolution::Family::hyperbolic;
        e.lambda2 = spec.lambda2;
        return e;
    case PresetKind::flat:
        e.family = ExactSolution::Family::flat;
        e.lambda2 = 1.0;
        return e;
    default:
        return std::nullopt;
    }
}

} // namespace warped
