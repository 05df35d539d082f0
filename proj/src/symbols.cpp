#include "conical/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace conical {

namespace {

// s7(u) = 35 u^4 - 84 u^5 + 70 u^6 - 20 u^7 on [0, 1]; C^3 at both ends.
double smoothstep7(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double u4 = u * u * u * u;
    return u4 * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
}

double smoothstep7_d(int order, double u) {
    if (u <= 0.0 || u >= 1.0) return (order == 0) ? smoothstep7(u) : 0.0;
    switch (order) {
        case 0:
            return smoothstep7(u);
        case 1:
            return u * u * u * (140.0 - 420.0 * u + 420.0 * u * u - 140.0 * u * u * u);
        case 2:
            return u * u * (420.0 - 1680.0 * u + 2100.0 * u * u - 840.0 * u * u * u);
        case 3:
            return u * (840.0 - 5040.0 * u + 8400.0 * u * u - 4200.0 * u * u * u);
        default:
            return 840.0 - 10080.0 * u + 25200.0 * u * u - 16800.0 * u * u * u;
    }
}

// Probabilists' Hermite polynomials for Gaussian derivatives.
double hermite_he(int n, double x) {
    double h0 = 1.0, h1 = x;
    if (n == 0) return h0;
    if (n == 1) return h1;
    for (int k = 2; k <= n; ++k) {
        const double h2 = x * h1 - double(k - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Radial C^3 plateau profile and its u-derivatives: 1 on |u|<=1, falls to 0
// across [1, 2] as s7(2 - |u|).
double plateau(int order, double u) {
    const double r = std::abs(u);
    const double sgn = (u < 0.0) ? -1.0 : 1.0;
    if (r <= 1.0 || r >= 2.0) return (order == 0) ? ((r <= 1.0) ? 1.0 : 0.0) : 0.0;
    const double v = 2.0 - r;  // in (0, 1)
    if (order == 0) return smoothstep7(v);
    // d/du = -sgn d/dv
    const double par = smoothstep7_d(order, v);
    double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(sgn, order) * par;
}

}  // namespace

double chi_cutoff(double u) { return plateau(0, u); }

double chi_cutoff_radial(const Vec& y) { return plateau(0, norm(y)); }

double Factor1D::operator()(double u) const { return derivative(0, u); }

double Factor1D::derivative(int order, double u) const {
    switch (kind) {
        case Kind::one:
            return (order == 0) ? 1.0 : 0.0;
        case Kind::gaussian: {
            const double s = (u - center) / width;
            const double g = std::exp(-0.5 * s * s);
            if (order == 0) return g;
            const double sign = (order % 2 == 0) ? 1.0 : -1.0;
            return sign * hermite_he(order, s) * g / std::pow(width, order);
        }
        case Kind::bump:
            return plateau(order, (u - center) / width) / std::pow(width, order);
        case Kind::monomial_bump: {
            // Leibniz on u^deg * plateau((u - c)/w).
            double total = 0.0;
            double binom = 1.0;
            for (int k = 0; k <= order; ++k) {
                // d^k u^deg
                double mono = 0.0;
                if (degree - k >= 0) {
                    mono = 1.0;
                    for (int j = 0; j < k; ++j) mono *= double(degree - j);
                    mono *= std::pow(u, degree - k);
                } else {
                    mono = 0.0;
                }
                const double cut = plateau(order - k, (u - center) / width) /
                                   std::pow(width, order - k);
                total += binom * mono * cut;
                binom *= double(order - k) / double(k + 1);
            }
            return total;
        }
    }
    return 0.0;
}

double Factor1D::support_radius() const {
    switch (kind) {
        case Kind::one:
            return std::numeric_limits<double>::infinity();
        case Kind::gaussian:
            return 8.0 * width;
        default:
            return 2.0 * width;
    }
}

double Factor1D::mass_fraction_outside(double lo, double hi) const {
    if (kind == Kind::one) return 0.0;
    const double r = support_radius();
    if (center - r >= lo && center + r <= hi) return 0.0;
    // 1D quadrature of |f| over the support vs the clipped window.
    const int n = 2048;
    double total = 0.0, inside = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = center - r + (2.0 * r) * (double(i) + 0.5) / double(n);
        const double v = std::abs(derivative(0, u));
        total += v;
        if (u >= lo && u <= hi) inside += v;
    }
    if (total <= 0.0) return 0.0;
    return 1.0 - inside / total;
}

double SymbolSpec::operator()(const Vec& x, const Vec& xi) const {
    double v = scale;
    for (std::size_t i = 0; i < fx.size(); ++i) v *= fx[i].derivative(0, x[i]);
    for (std::size_t i = 0; i < fxi.size(); ++i) v *= fxi[i].derivative(0, xi[i]);
    return v;
}

double SymbolSpec::xi_derivative(const std::vector<int>& alpha, const Vec& x,
                                 const Vec& xi) const {
    double v = scale;
    for (std::size_t i = 0; i < fx.size(); ++i) v *= fx[i].derivative(0, x[i]);
    for (std::size_t i = 0; i < fxi.size(); ++i) v *= fxi[i].derivative(alpha[i], xi[i]);
    return v;
}

double SymbolSpec::mass_fraction_outside(const Box& x_window, const Box& xi_window) const {
    double inside = 1.0;
    for (std::size_t i = 0; i < fx.size(); ++i)
        inside *= 1.0 - fx[i].mass_fraction_outside(x_window[i].first, x_window[i].second);
    for (std::size_t i = 0; i < fxi.size(); ++i)
        inside *= 1.0 - fxi[i].mass_fraction_outside(xi_window[i].first, xi_window[i].second);
    return 1.0 - inside;
}

bool SymbolSpec::avoids_tube(const ConicalPotential& pot, double r_excl, double xi_excl) const {
    // Sample the tube slab {|g| < r_excl, |xi| < xi_excl}; the symbol must
    // vanish there. Supports are finite for every non-trivial factor.
    const std::size_t d = dim();
    const int ns = 9;
    std::vector<std::size_t> idx(2 * d, 0);
    Vec x(d), xi(d);
    while (true) {
        bool in_tube = true;
        for (std::size_t i = 0; i < d; ++i) {
            const auto [lo, hi] = pot.box()[i];
            x[i] = lo + (hi - lo) * double(idx[i]) / double(ns - 1);
            xi[i] = -xi_excl + 2.0 * xi_excl * double(idx[d + i]) / double(ns - 1);
        }
        if (pot.g_norm(x) >= r_excl) in_tube = false;
        if (in_tube && std::abs((*this)(x, xi)) > 1e-12) return false;
        std::size_t ax = 0;
        while (ax < 2 * d && ++idx[ax] == ns) idx[ax++] = 0;
        if (ax == 2 * d) break;
    }
    return true;
}

double symbol_norm_M(const SymbolSpec& a) {
    const std::size_t d = a.dim();
    const int max_order = int(d) + 1;

    // sup_x of the x part factors through the product.
    double x_sup = std::abs(a.scale);
    for (const auto& f : a.fx) {
        double s = 0.0;
        const double r = std::min(f.support_radius(), 50.0);
        for (int i = 0; i <= 512; ++i) {
            const double u = f.center - r + 2.0 * r * double(i) / 512.0;
            s = std::max(s, std::abs(f.derivative(0, u)));
        }
        x_sup *= s;
    }

    // xi lattice: supports plus a margin where the growth weight can peak.
    std::vector<std::vector<double>> grids(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& f = a.fxi[i];
        const double r = std::min(f.support_radius(), 50.0) + 12.0;
        const int n = 513;
        grids[i].resize(n);
        for (int k = 0; k < n; ++k)
            grids[i][k] = f.center - r + 2.0 * r * double(k) / double(n - 1);
    }

    double best = 0.0;
    std::vector<int> alpha(d, 0);
    // Enumerate |alpha| <= d + 1.
    std::function<void(std::size_t, int)> rec = [&](std::size_t axis, int remaining) {
        if (axis == d) {
            if (d == 1) {
                for (double u : grids[0]) {
                    const double w = std::pow(1.0 + std::abs(u), double(max_order));
                    best = std::max(best,
                                    std::abs(a.fxi[0].derivative(alpha[0], u)) * w);
                }
            } else {
                for (double u0 : grids[0])
                    for (double u1 : grids[1]) {
                        const double w = std::pow(
                            1.0 + std::sqrt(u0 * u0 + u1 * u1), double(max_order));
                        best = std::max(best, std::abs(a.fxi[0].derivative(alpha[0], u0)) *
                                                  std::abs(a.fxi[1].derivative(alpha[1], u1)) *
                                                  w);
                    }
            }
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            alpha[axis] = k;
            rec(axis + 1, remaining - k);
        }
    };
    rec(0, max_order);
    return x_sup * best;
}

std::vector<SymbolSpec> standard_symbol_catalog(std::size_t d,
                                                const std::vector<std::pair<Vec, Vec>>& centers,
                                                double width) {
    // The plateau cutoff carries larger derivative constants than a Gaussian
    // of the same width; 2.2x widening equalizes the M(a) inflation across
    // catalog kinds so the operator-bound ratio stays within one decade.
    const double bw = 2.2 * width;
    std::vector<SymbolSpec> out;
    int n = 0;
    for (const auto& [q, p] : centers) {
        SymbolSpec g;
        g.id = "gauss_" + std::to_string(n);
        for (std::size_t i = 0; i < d; ++i) {
            g.fx.push_back(Factor1D::gaussian(q[i], width));
            g.fxi.push_back(Factor1D::gaussian(p[i], width));
        }
        out.push_back(g);

        SymbolSpec b;
        b.id = "bump_" + std::to_string(n);
        for (std::size_t i = 0; i < d; ++i) {
            b.fx.push_back(Factor1D::bump(q[i], bw));
            b.fxi.push_back(Factor1D::bump(p[i], bw));
        }
        out.push_back(b);
        ++n;
    }
    if (!centers.empty()) {
        // One monomial-typed observable around the first center.
        SymbolSpec m;
        m.id = "monomial_0";
        const auto& [q, p] = centers.front();
        for (std::size_t i = 0; i < d; ++i) {
            m.fx.push_back(Factor1D::monomial_bump(q[i], bw, i == 0 ? 1 : 0));
            m.fxi.push_back(Factor1D::bump(p[i], bw));
        }
        out.push_back(m);
    }
    return out;
}

}  // namespace conical
