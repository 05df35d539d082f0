#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "conical/phase_space.hpp"

using namespace conical;

namespace {

const double kEps = 1.0 / 64;

std::vector<AxisSpec> axes1(double lo, double hi, std::size_t n) { return {{lo, hi, n}}; }

WavefunctionGrid coherent_state(double q, double p, double eps = kEps, std::size_t n = 512,
                                double half = 3.0) {
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::coherent;
    s.q = {q};
    s.p = {p};
    return make_initial_state(s, axes1(-half, half, n), eps);
}

WavefunctionGrid two_gaussian_state() {
    auto a = coherent_state(-0.8, 0.5);
    auto b = coherent_state(0.8, -0.5);
    WavefunctionGrid out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a.values[i] + b.values[i];
    const double n = out.norm();
    for (auto& v : out.values) v /= n;
    return out;
}

WavefunctionGrid wkb_state(double eps = kEps, std::size_t n = 512) {
    // A = (1 - (x/2.6)^2)^4, S = x^2/2 on [-2.6, 2.6]; A vanishes to high
    // order at the seam so the periodic extension stays smooth.
    std::vector<Poly::Term> terms;
    const double c[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    for (int k = 0; k <= 4; ++k)
        terms.push_back({c[k] / std::pow(2.6, 2 * k), {2 * k}});
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::wkb;
    s.amplitude = Poly(1, terms);
    s.phase = Poly(1, {Poly::Term{0.5, {2}}});
    return make_initial_state(s, axes1(-2.6, 2.6, n), eps);
}

// Overlap of a normalized Gaussian density N(q, s2) with exp(-(u-c)^2/2w^2).
double gauss_overlap(double q, double s2, double c, double w) {
    const double var = w * w + s2;
    return w / std::sqrt(var) * std::exp(-(q - c) * (q - c) / (2.0 * var));
}

SymbolSpec plateau_symbol(double half_width) {
    SymbolSpec a;
    a.id = "window";
    a.fx = {Factor1D::bump(0.0, half_width)};
    a.fxi = {Factor1D::bump(0.0, half_width)};
    return a;
}

cplx inner(const WavefunctionGrid& f, const WavefunctionGrid& g) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
    return s * f.cell_volume();
}

}  // namespace

TEST_CASE("wigner of a coherent state is the eps-Gaussian") {
    const double q = -1.0, p = 1.0;
    auto psi = coherent_state(q, p);
    auto w = wigner_transform(psi);

    CHECK(w.mass() == doctest::Approx(1.0).epsilon(1e-9));

    // Pointwise agreement with the closed form away from the antipodal
    // point x = q + L/2, where the periodic wrap correlation lives.
    const double peak = 1.0 / (M_PI * kEps);
    double max_err = 0.0;
    for (std::size_t j = 0; j < w.x_axes[0].n; j += 7) {
        const double x = w.x_axes[0].point(j);
        if (std::abs(x - q) > 1.8) continue;
        for (std::size_t l = 0; l < w.xi_axes[0].n; l += 7) {
            const double xi = w.xi_axes[0].point(l);
            const double expect =
                peak * std::exp(-((x - q) * (x - q) + (xi - p) * (xi - p)) / kEps);
            max_err = std::max(max_err,
                               std::abs(w.values[j * w.xi_axes[0].n + l] - expect));
        }
    }
    CHECK(max_err <= 1e-6 * peak);
}

TEST_CASE("wigner marginals") {
    auto psi = two_gaussian_state();
    auto w = wigner_transform(psi);

    const auto mx = marginal_x(w);
    for (std::size_t j = 0; j < psi.axes[0].n; j += 3)
        CHECK(mx[j] == doctest::Approx(std::norm(psi.values[j])).epsilon(1e-8).scale(1.0));

    const auto mxi = marginal_xi(w);
    const auto rho = momentum_density(psi);
    REQUIRE(mxi.size() == rho.size());
    for (std::size_t l = 0; l < mxi.size(); l += 3)
        CHECK(mxi[l] == doctest::Approx(rho[l]).epsilon(1e-8).scale(1.0));

    CHECK(w.mass() == doctest::Approx(1.0).epsilon(1e-9));

    // Interference fringes midway make the Wigner function negative.
    CHECK(w.min_value() < -0.05 / (M_PI * kEps));
}

TEST_CASE("husimi is a nonnegative mass-preserving smoothing") {
    auto psi = coherent_state(0.3, -0.4);
    auto w = wigner_transform(psi);
    auto h = husimi(w);

    CHECK(h.mass() == doctest::Approx(w.mass()).epsilon(1e-8));
    CHECK(h.min_value() >= -1e-12);

    // Coherent state: doubled variance Gaussian.
    const double peak = 1.0 / (2.0 * M_PI * kEps);
    for (std::size_t j = 0; j < h.x_axes[0].n; j += 11)
        for (std::size_t l = 0; l < h.xi_axes[0].n; l += 11) {
            const double x = h.x_axes[0].point(j), xi = h.xi_axes[0].point(l);
            const double expect =
                peak * std::exp(-((x - 0.3) * (x - 0.3) + (xi + 0.4) * (xi + 0.4)) /
                                (2.0 * kEps));
            CHECK(h.values[j * h.xi_axes[0].n + l] ==
                  doctest::Approx(expect).epsilon(1e-4).scale(peak));
        }

    auto w2 = wigner_transform(two_gaussian_state());
    CHECK(husimi(w2).min_value() >= -1e-12);
    CHECK(husimi(w2).mass() == doctest::Approx(w2.mass()).epsilon(1e-8));
}

TEST_CASE("pair_symbol against closed forms") {
    const double q = -0.5, p = 0.7;
    auto psi = coherent_state(q, p);
    auto w = wigner_transform(psi);

    // Plateau symbol that covers the state: total mass.
    CHECK(pair_symbol(plateau_symbol(1.4), w) == doctest::Approx(1.0).epsilon(1e-6));

    // Gaussian bump on the state's center: product of 1D overlaps.
    SymbolSpec g;
    g.id = "probe";
    g.fx = {Factor1D::gaussian(q, 0.35)};
    g.fxi = {Factor1D::gaussian(p, 0.35)};
    const double expect = gauss_overlap(q, kEps / 2, q, 0.35) * gauss_overlap(p, kEps / 2, p, 0.35);
    CHECK(pair_symbol(g, w) == doctest::Approx(expect).epsilon(1e-6));

    // Misplaced probe sees nothing.
    SymbolSpec far;
    far.fx = {Factor1D::bump(q + 2.0, 0.3)};
    far.fxi = {Factor1D::bump(p, 0.3)};
    CHECK(std::abs(pair_symbol(far, w)) <= 1e-8);

    // A symbol whose support leaks out of the window is rejected.
    SymbolSpec wide;
    wide.fx = {Factor1D::gaussian(2.9, 1.0)};
    wide.fxi = {Factor1D::gaussian(0.0, 0.5)};
    CHECK_THROWS_AS(pair_symbol(wide, w), SupportClipped);
}

TEST_CASE("apply_weyl recovers multiplication and differentiation") {
    auto psi = coherent_state(0.2, 0.4);

    SymbolSpec ident = plateau_symbol(1.6);
    auto out = apply_weyl(ident, psi);
    for (std::size_t i = 0; i < psi.values.size(); ++i)
        CHECK(std::abs(out.values[i] - psi.values[i]) <= 1e-8);

    // a = x (times a plateau over the state support): multiplication by x.
    SymbolSpec mx;
    mx.fx = {Factor1D::monomial_bump(0.2, 1.2, 1)};
    mx.fxi = {Factor1D::bump(0.4, 1.6)};
    auto mout = apply_weyl(mx, psi);
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double x = psi.axes[0].point(i);
        if (std::abs(x - 0.2) < 1.0)
            CHECK(std::abs(mout.values[i] - x * psi.values[i]) <= 1e-7);
    }

    // a = xi: -i eps d/dx via the spectral derivative.
    SymbolSpec mxi;
    mxi.fx = {Factor1D::bump(0.2, 1.2)};
    mxi.fxi = {Factor1D::monomial_bump(0.4, 1.6, 1)};
    auto dout = apply_weyl(mxi, psi);
    WavefunctionGrid ref = psi;
    to_fourier(ref);
    for (std::size_t k = 0; k < ref.axes[0].n; ++k)
        ref.values[k] *= cplx(0.0, -psi.eps) *
                         cplx(0.0, fft_wavenumber(k, ref.axes[0].n, ref.axes[0].length()));
    // -i eps (i k) = eps k
    from_fourier(ref);
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        const double x = psi.axes[0].point(i);
        if (std::abs(x - 0.2) < 1.0)
            CHECK(std::abs(dout.values[i] - ref.values[i]) <= 1e-7);
    }
}

TEST_CASE("pairing identity across the catalog") {
    std::vector<std::pair<Vec, Vec>> centers = {{{-0.8}, {0.5}}, {{0.0}, {0.0}}, {{0.5}, {-0.5}}};
    const auto catalog = standard_symbol_catalog(1, centers);

    std::vector<WavefunctionGrid> states = {coherent_state(-0.8, 0.5), two_gaussian_state(),
                                            wkb_state()};
    for (const auto& psi : states) {
        auto w = wigner_transform(psi);
        for (const auto& a : catalog) {
            const double lhs = pair_symbol(a, w);
            const double rhs = inner(apply_weyl(a, psi), psi).real();
            // 1e-6 relative, with an absolute floor of 1e-8 for pairings that
            // are themselves near zero.
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-2});
            CHECK(std::abs(lhs - rhs) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("symbol_norm_M") {
    SymbolSpec zero = plateau_symbol(0.5);
    zero.scale = 0.0;
    CHECK(symbol_norm_M(zero) == doctest::Approx(0.0));

    SymbolSpec g;
    g.fx = {Factor1D::gaussian(0.0, 1.0)};
    g.fxi = {Factor1D::gaussian(0.0, 1.0)};
    const double m1 = symbol_norm_M(g);
    SymbolSpec g3 = g;
    g3.scale = -3.0;
    CHECK(symbol_norm_M(g3) == doctest::Approx(3.0 * m1).epsilon(1e-12));

    // Brute-force lattice oracle with finite-difference xi derivatives.
    double best = 0.0;
    const double h = 1e-4;
    for (double xi = -14.0; xi <= 14.0; xi += 0.002) {
        const double w = std::pow(1.0 + std::abs(xi), 2.0);
        const double f0 = g.fxi[0](xi);
        const double f1 = (g.fxi[0](xi + h) - g.fxi[0](xi - h)) / (2 * h);
        const double f2 = (g.fxi[0](xi + h) - 2 * f0 + g.fxi[0](xi - h)) / (h * h);
        best = std::max({best, std::abs(f0) * w, std::abs(f1) * w, std::abs(f2) * w});
    }
    CHECK(m1 == doctest::Approx(best).epsilon(1e-2));
}

TEST_CASE("operator bound tracks M(a) across the catalog") {
    std::vector<std::pair<Vec, Vec>> centers = {{{-0.8}, {0.5}}, {{0.3}, {-0.2}}};
    const auto catalog = standard_symbol_catalog(1, centers);
    auto psi = two_gaussian_state();

    std::vector<double> ratios;
    for (const auto& a : catalog) {
        auto out = apply_weyl(a, psi);
        ratios.push_back(out.norm() / (symbol_norm_M(a) * psi.norm()));
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (double r : ratios) CHECK(r <= 10.0 * median);
}

TEST_CASE("wigner and streaming pairing in two dimensions") {
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::coherent;
    s.q = {0.1, -0.2};
    s.p = {0.3, 0.0};
    const double eps = 1.0 / 32;
    std::vector<AxisSpec> axes = {{-1.2, 1.2, 64}, {-1.2, 1.2, 64}};
    auto psi = make_initial_state(s, axes, eps);

    auto w = wigner_transform(psi);
    CHECK(w.mass() == doctest::Approx(1.0).epsilon(1e-8));

    SymbolSpec g;
    g.fx = {Factor1D::gaussian(0.1, 0.2), Factor1D::gaussian(-0.2, 0.2)};
    g.fxi = {Factor1D::gaussian(0.3, 0.2), Factor1D::gaussian(0.0, 0.2)};
    const double dense = pair_symbol(g, w);
    const double streamed = pair_symbol_streaming(g, psi);
    CHECK(dense == doctest::Approx(streamed).epsilon(1e-9));

    double expect = 1.0;
    const double cq[2] = {0.1, -0.2}, cp[2] = {0.3, 0.0};
    for (int i = 0; i < 2; ++i)
        expect *= gauss_overlap(cq[i], eps / 2, cq[i], 0.2) *
                  gauss_overlap(cp[i], eps / 2, cp[i], 0.2);
    CHECK(dense == doctest::Approx(expect).epsilon(1e-5));

    // Pairing identity via the tensor Weyl application. The folded d=2
    // field subsamples the xi quadrature (even bins only), which costs
    // ~1e-5 at eps = 1/32; the d=1 half-spaced grid is machine-exact.
    const double rhs = inner(apply_weyl(g, psi), psi).real();
    CHECK(dense == doctest::Approx(rhs).epsilon(2e-5));
}
