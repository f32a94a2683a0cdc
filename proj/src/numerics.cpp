#include "warped/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "warped/errors.hpp"

namespace warped {

void fd_weights(double z, const double* x, int n, int m, double* out) {
    assert(n >= 1 && n <= 8);
    assert(m >= 0 && m <= 4);
    double c[8][5] = {};
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = x[0] - z;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    for (int j = 0; j < n; ++j)
        out[j] = c[j][m];
}

std::vector<double> fd_weights(double z, std::span<const double> nodes, int m) {
    std::vector<double> w(nodes.size());
    fd_weights(z, nodes.data(), static_cast<int>(nodes.size()), m, w.data());
    return w;
}

double d1_mid(double xa, double xb, double xc, double fa, double fb, double fc) {
    const double h1 = xb - xa;
    const double h2 = xc - xb;
    return -h2 / (h1 * (h1 + h2)) * fa + (h2 - h1) / (h1 * h2) * fb +
           h1 / (h2 * (h1 + h2)) * fc;
}

double d2_mid(double xa, double xb, double xc, double fa, double fb, double fc) {
    const double h1 = xb - xa;
    const double h2 = xc - xb;
    return 2.0 * (fa / (h1 * (h1 + h2)) - fb / (h1 * h2) + fc / (h2 * (h1 + h2)));
}

double d1_edge(double xa, double xb, double xc, double fa, double fb, double fc) {
    const double h1 = xb - xa;
    const double h2 = xc - xb;
    return -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * fa + (h1 + h2) / (h1 * h2) * fb -
           h1 / (h2 * (h1 + h2)) * fc;
}

std::vector<double> deriv1(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size())
        throw ShapeError("deriv1: field length does not match node count");
    const int n = static_cast<int>(x.size());
    if (n < 3)
        throw ShapeError("deriv1: need at least 3 nodes");
    std::vector<double> d(n);
    d[0] = d1_edge(x[0], x[1], x[2], f[0], f[1], f[2]);
    for (int i = 1; i + 1 < n; ++i)
        d[i] = d1_mid(x[i - 1], x[i], x[i + 1], f[i - 1], f[i], f[i + 1]);
    d[n - 1] = -d1_edge(-x[n - 1], -x[n - 2], -x[n - 3], f[n - 1], f[n - 2], f[n - 3]);
    return d;
}

std::vector<double> deriv2(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size())
        throw ShapeError("deriv2: field length does not match node count");
    const int n = static_cast<int>(x.size());
    if (n < 4)
        throw ShapeError("deriv2: need at least 4 nodes");
    std::vector<double> d(n);
    double w[4];
    fd_weights(x[0], x.data(), 4, 2, w);
    d[0] = w[0] * f[0] + w[1] * f[1] + w[2] * f[2] + w[3] * f[3];
    for (int i = 1; i + 1 < n; ++i)
        d[i] = d2_mid(x[i - 1], x[i], x[i + 1], f[i - 1], f[i], f[i + 1]);
    fd_weights(x[n - 1], x.data() + (n - 4), 4, 2, w);
    d[n - 1] = w[0] * f[n - 4] + w[1] * f[n - 3] + w[2] * f[n - 2] + w[3] * f[n - 1];
    return d;
}

std::vector<double> cumtrapz(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size())
        throw ShapeError("cumtrapz: field length does not match node count");
    std::vector<double> s(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        s[i] = s[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

double lagrange_interp(std::span<const double> x, std::span<const double> f, double xq) {
    double acc = 0.0;
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        double w = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i)
                w *= (xq - x[j]) / (x[i] - x[j]);
        acc += w * f[i];
    }
    return acc;
}

double interp_cubic(std::span<const double> x, std::span<const double> f, double xq) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || x.size() != f.size())
        throw ShapeError("interp_cubic: bad table");
    if (xq < x.front() - 1e-12 * (1.0 + std::abs(x.front())) ||
        xq > x.back() + 1e-12 * (1.0 + std::abs(x.back())))
        throw ConfigError("interp_cubic: query outside tabulated range");
    if (n < 4)
        return lagrange_interp(x, f, xq);
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    int i = static_cast<int>(it - x.begin()) - 1;
    int lo = std::clamp(i - 1, 0, n - 4);
    return lagrange_interp(x.subspan(lo, 4), f.subspan(lo, 4), xq);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace warped
