#ifndef CONICAL_PHASE_SPACE_HPP
#define CONICAL_PHASE_SPACE_HPP

#include <functional>

#include "conical/quantum.hpp"
#include "conical/symbols.hpp"

namespace conical {

// Real-valued sampled field on the phase-space grid. In d = 1 the xi axis is
// the half-spaced grid with 2n points (spacing pi eps / L), which makes the
// discrete marginal identities exact; in d = 2 the xi axes are the plain
// Fourier grids (n points, spacing 2 pi eps / L).
struct PhaseSpaceField {
    std::vector<AxisSpec> x_axes;
    std::vector<AxisSpec> xi_axes;
    double eps = 0.0;
    std::vector<double> values;  // row-major, x axes first then xi axes

    std::size_t dim() const { return x_axes.size(); }
    double cell() const {
        double c = 1.0;
        for (const auto& a : x_axes) c *= a.dx();
        for (const auto& a : xi_axes) c *= a.dx();
        return c;
    }
    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * cell();
    }
    double min_value() const;

    Box x_window() const {
        Box b;
        for (const auto& a : x_axes) b.push_back({a.lo, a.hi});
        return b;
    }
    Box xi_window() const {
        Box b;
        for (const auto& a : xi_axes) b.push_back({a.lo, a.hi});
        return b;
    }
};

// Spectral interpolation of psi onto the 2x refined grid (per axis).
std::vector<cplx> spectral_double(const WavefunctionGrid& psi);

PhaseSpaceField wigner_transform(const WavefunctionGrid& psi);

// Gaussian smoothing of variance eps/2 in every x and xi axis (periodic).
PhaseSpaceField husimi(const PhaseSpaceField& wigner);

// Riemann-sum pairing <a, W> over the field's grid. Throws SupportClipped
// when >= 1e-6 of the symbol's mass lies outside the window.
double pair_symbol(const SymbolSpec& a, const PhaseSpaceField& field);

// <a, W(psi)> accumulated per x-slice without materializing the field.
double pair_symbol_streaming(const SymbolSpec& a, const WavefunctionGrid& psi);

// Weyl operator op_eps(a) applied through the midpoint kernel scheme on the
// doubled grid (d = 1) or its per-axis tensor factorization (d = 2).
WavefunctionGrid apply_weyl(const SymbolSpec& a, const WavefunctionGrid& psi);

// Same machinery for an arbitrary sampled symbol in d = 1 (used by the
// two-microlocal observables, whose scaled symbols are not products).
using SampledSymbol = std::function<double(double x, double xi)>;
WavefunctionGrid apply_weyl_sampled(const SampledSymbol& a, const WavefunctionGrid& psi);

// Marginals of a d = 1 field. marginal_x returns |psi(x)|^2 on the x grid;
// marginal_xi pools the half-spaced bins onto the n-point Fourier xi grid
// (use momentum_xi_grid for the matching abscissae).
std::vector<double> marginal_x(const PhaseSpaceField& f);
std::vector<double> marginal_xi(const PhaseSpaceField& f);
std::vector<double> momentum_xi_grid(const PhaseSpaceField& field);

// |eps-scaled Fourier transform|^2 of psi at xi = eps k, ordered to match
// marginal_xi. Independent of the Wigner machinery.
std::vector<double> momentum_density(const WavefunctionGrid& psi);

}  // namespace conical

#endif
