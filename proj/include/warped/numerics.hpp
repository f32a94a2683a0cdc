#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace warped {

// Finite-difference weights on arbitrarily spaced nodes (Fornberg recurrence).
// Fills out[0..n) with the weights of the m-th derivative at z. n <= 8, m <= 4.
void fd_weights(double z, const double* nodes, int n, int m, double* out);

std::vector<double> fd_weights(double z, std::span<const double> nodes, int m);

// First derivative at the middle node of a 3-point stencil.
double d1_mid(double xa, double xb, double xc, double fa, double fb, double fc);

// Second derivative at the middle node of a 3-point stencil.
double d2_mid(double xa, double xb, double xc, double fa, double fb, double fc);

// First derivative at xa from the 3 leftmost nodes (one-sided).
double d1_edge(double xa, double xb, double xc, double fa, double fb, double fc);

// Per-node first/second derivative of f over nodes x, 3-point interior
// stencils, one-sided stencils at both ends (4 points for d2 to stay
// second order).
std::vector<double> deriv1(std::span<const double> x, std::span<const double> f);
std::vector<double> deriv2(std::span<const double> x, std::span<const double> f);

// Cumulative trapezoid integral of f over x; result[0] = 0.
std::vector<double> cumtrapz(std::span<const double> x, std::span<const double> f);

// Lagrange interpolation through all given points, evaluated at xq.
double lagrange_interp(std::span<const double> x, std::span<const double> f, double xq);

// 4-point (piecewise-cubic) interpolation of tabulated data; windows are
// clamped at the ends. x must be strictly increasing, xq within [x.front(), x.back()].
double interp_cubic(std::span<const double> x, std::span<const double> f, double xq);

std::uint64_t fnv1a64(std::string_view bytes);

} // namespace warped
