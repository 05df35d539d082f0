#include "conical/microlocal.hpp"

#include <cmath>

#include "conical/errors.hpp"

namespace conical {

double TwoMicrolocalSymbol::y_profile(double y) const {
    switch (ykind) {
        case YKind::constant:
            return 1.0;
        case YKind::direction:
            return y / std::sqrt(1.0 + y * y);
        case YKind::compact:
            return chi_cutoff(y / ywidth);
    }
    return 0.0;
}

double TwoMicrolocalSymbol::eval(const Vec& x, const Vec& xi, double y) const {
    double v = y_profile(y);
    for (std::size_t i = 0; i < fx.size(); ++i) v *= fx[i](x[i]);
    for (std::size_t i = 0; i < fxi.size(); ++i) v *= fxi[i](xi[i]);
    return v;
}

WavefunctionGrid rescale_concentration(const WavefunctionGrid& psi, std::size_t codim,
                                       double y_max, std::size_t n_y) {
    const std::size_t d = psi.dim();
    if (codim < 1 || codim > d) throw ConfigError("codim out of range for the zoom");
    const double eps = psi.eps;
    for (std::size_t i = 0; i < codim; ++i)
        if (eps * y_max > std::max(std::abs(psi.axes[i].lo), std::abs(psi.axes[i].hi)))
            throw ZoomWindowExceedsGrid("eps * y_max exceeds the grid extent on a zoomed axis");
    if (!is_power_of_two(n_y)) throw ConfigError("zoom points must be a power of two");

    WavefunctionGrid out;
    out.eps = eps;
    const double scale = std::pow(eps, double(codim) / 2.0);

    if (d == 1) {
        // Direct Fourier evaluation of psi at the zoom points eps*y.
        std::vector<cplx> hat = psi.values;
        fft_forward(hat);
        const std::size_t n = psi.axes[0].n;
        out.axes = {{-y_max, y_max, n_y}};
        out.values.assign(n_y, cplx(0.0, 0.0));
        for (std::size_t iy = 0; iy < n_y; ++iy) {
            const double x = eps * out.axes[0].point(iy);
            cplx s(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const double kw = fft_wavenumber(k, n, psi.axes[0].length());
                s += hat[k] * std::exp(cplx(0.0, kw * (x - psi.axes[0].lo)));
            }
            out.values[iy] = scale * s / double(n);
        }
        return out;
    }

    // d = 2. Zoom the first axis (codim 1) or both (codim 2).
    const std::size_t n0 = psi.axes[0].n, n1 = psi.axes[1].n;
    std::vector<cplx> work = psi.values;
    if (codim == 1) {
        fft_forward_axis(work, n0, n1, 0);
        out.axes = {{-y_max, y_max, n_y}, psi.axes[1]};
        out.values.assign(n_y * n1, cplx(0.0, 0.0));
        for (std::size_t iy = 0; iy < n_y; ++iy) {
            const double x = eps * out.axes[0].point(iy);
            for (std::size_t k = 0; k < n0; ++k) {
                const double kw = fft_wavenumber(k, n0, psi.axes[0].length());
                const cplx ph =
                    std::exp(cplx(0.0, kw * (x - psi.axes[0].lo))) / double(n0);
                for (std::size_t j1 = 0; j1 < n1; ++j1)
                    out.values[iy * n1 + j1] += scale * ph * work[k * n1 + j1];
            }
        }
        return out;
    }

    fft_forward_axis(work, n0, n1, 0);
    fft_forward_axis(work, n0, n1, 1);
    out.axes = {{-y_max, y_max, n_y}, {-y_max, y_max, n_y}};
    out.values.assign(n_y * n_y, cplx(0.0, 0.0));
    for (std::size_t iy = 0; iy < n_y; ++iy) {
        const double x0 = eps * out.axes[0].point(iy);
        std::vector<cplx> partial(n1, cplx(0.0, 0.0));
        for (std::size_t k0 = 0; k0 < n0; ++k0) {
            const double kw0 = fft_wavenumber(k0, n0, psi.axes[0].length());
            const cplx ph0 = std::exp(cplx(0.0, kw0 * (x0 - psi.axes[0].lo)));
            for (std::size_t k1 = 0; k1 < n1; ++k1) partial[k1] += ph0 * work[k0 * n1 + k1];
        }
        for (std::size_t jy = 0; jy < n_y; ++jy) {
            const double x1 = eps * out.axes[1].point(jy);
            cplx s(0.0, 0.0);
            for (std::size_t k1 = 0; k1 < n1; ++k1) {
                const double kw1 = fft_wavenumber(k1, n1, psi.axes[1].length());
                s += partial[k1] * std::exp(cplx(0.0, kw1 * (x1 - psi.axes[1].lo)));
            }
            out.values[iy * n_y + jy] = scale * s / double(n0 * n1);
        }
    }
    return out;
}

namespace {

void require_zoomable(const WavefunctionGrid& psi) {
    if (psi.dim() != 1)
        throw SpecUnsupported("two-microlocal pairings are implemented for d = 1");
}

double pair_sampled(const SampledSymbol& a, const WavefunctionGrid& psi) {
    const WavefunctionGrid op = apply_weyl_sampled(a, psi);
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < op.values.size(); ++i)
        s += op.values[i] * std::conj(psi.values[i]);
    return (s * psi.cell_volume()).real();
}

}  // namespace

double pair_two_microlocal(const TwoMicrolocalSymbol& b, const WavefunctionGrid& psi) {
    require_zoomable(psi);
    const double eps = psi.eps;
    auto a = [&](double x, double xi) { return b.eval({x}, {xi}, x / eps); };
    return pair_sampled(a, psi);
}

SplitObservable split_observable(const TwoMicrolocalSymbol& b, const WavefunctionGrid& psi,
                                 double R, double delta) {
    require_zoomable(psi);
    const double eps = psi.eps;
    if (!(R > 0.0) || !(delta > 0.0) || R * eps >= delta / 2.0)
        throw ScaleOrderingViolated("need 1 << R << delta/eps (enforced as R eps < delta/2)");

    SplitObservable out;
    auto inner = [&](double x, double xi) {
        return b.eval({x}, {xi}, x / eps) * chi_cutoff(x / (R * eps));
    };
    auto outer = [&](double x, double xi) {
        return b.eval({x}, {xi}, x / eps) * (1.0 - chi_cutoff(x / (R * eps))) *
               chi_cutoff(x / delta);
    };
    auto bulk = [&](double x, double xi) {
        return b.eval({x}, {xi}, x / eps) * (1.0 - chi_cutoff(x / (R * eps))) *
               (1.0 - chi_cutoff(x / delta));
    };
    out.inner = pair_sampled(inner, psi);
    out.outer = pair_sampled(outer, psi);
    out.bulk = pair_sampled(bulk, psi);
    return out;
}

double mass_near_S(const PhaseSpaceField& field, const ConicalPotential& pot, double r,
                   double xi_window) {
    const double sstar = pot.tols().sstar_tol;
    const std::size_t d = field.dim();
    double s = 0.0;
    if (d == 1) {
        const auto& xa = field.x_axes[0];
        const auto& ka = field.xi_axes[0];
        for (std::size_t j = 0; j < xa.n; ++j) {
            const Vec x{xa.point(j)};
            if (pot.g_norm(x) >= r) continue;
            const Mat dg = pot.dg(x);
            for (std::size_t l = 0; l < ka.n; ++l) {
                const Vec xi{ka.point(l)};
                if (xi_window > 0.0 && std::abs(xi[0]) > xi_window) continue;
                if (norm(dg.apply(xi)) <= sstar) continue;
                s += field.values[j * ka.n + l];
            }
        }
        return s * field.cell();
    }
    const std::size_t n0 = field.x_axes[0].n, n1 = field.x_axes[1].n;
    const std::size_t m0 = field.xi_axes[0].n, m1 = field.xi_axes[1].n;
    std::size_t idx = 0;
    for (std::size_t j0 = 0; j0 < n0; ++j0)
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            const Vec x{field.x_axes[0].point(j0), field.x_axes[1].point(j1)};
            const bool near = pot.g_norm(x) < r;
            const Mat dg = near ? pot.dg(x) : Mat();
            for (std::size_t l0 = 0; l0 < m0; ++l0)
                for (std::size_t l1 = 0; l1 < m1; ++l1, ++idx) {
                    if (!near) continue;
                    const Vec xi{field.xi_axes[0].point(l0), field.xi_axes[1].point(l1)};
                    if (xi_window > 0.0 && norm(xi) > xi_window) continue;
                    if (norm(dg.apply(xi)) <= sstar) continue;
                    s += field.values[idx];
                }
        }
    return s * field.cell();
}

double mass_near_S(const ParticleMeasure& mu, const ConicalPotential& pot, double r,
                   double xi_window) {
    const double sstar = pot.tols().sstar_tol;
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& p = mu.points[i];
        if (pot.g_norm(p.x) >= r) continue;
        if (xi_window > 0.0 && norm(p.xi) > xi_window) continue;
        if (pot.dg_xi_norm(p.x, p.xi) <= sstar) continue;
        s += mu.weights[i];
    }
    return s;
}

}  // namespace conical
