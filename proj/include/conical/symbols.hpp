#ifndef CONICAL_SYMBOLS_HPP
#define CONICAL_SYMBOLS_HPP

#include <string>
#include <vector>

#include "conical/linalg.hpp"
#include "conical/potential.hpp"

namespace conical {

// C^3 plateau cutoff: 1 for |u| <= 1, 0 for |u| >= 2, order-7 smoothstep in
// between (coefficients 35, -84, 70, -20).
double chi_cutoff(double u);
double chi_cutoff_radial(const Vec& y);

// One-dimensional factor of a catalog symbol. Closed-form derivatives keep
// M(a) and the Weyl machinery exact.
struct Factor1D {
    enum class Kind { one, gaussian, bump, monomial_bump };
    Kind kind = Kind::one;
    double center = 0.0;
    double width = 1.0;
    int degree = 0;  // monomial_bump only

    double operator()(double u) const;
    double derivative(int order, double u) const;  // exact for order <= 3
    // Half-width outside which the factor is zero (bumps) or negligible
    // (gaussian, 8 widths).
    double support_radius() const;
    // Fraction of the factor's |.| mass outside [lo, hi].
    double mass_fraction_outside(double lo, double hi) const;

    static Factor1D one() { return {}; }
    static Factor1D gaussian(double c, double w) { return {Kind::gaussian, c, w, 0}; }
    static Factor1D bump(double c, double w) { return {Kind::bump, c, w, 0}; }
    static Factor1D monomial_bump(double c, double w, int deg) {
        return {Kind::monomial_bump, c, w, deg};
    }
};

// Product-form test observable a(x, xi) = scale * prod_i fx_i(x_i) * fxi_i(xi_i).
// The catalog keeps every symbol axis-separable, which makes the Weyl
// operator a tensor product over axes.
struct SymbolSpec {
    std::string id;
    double scale = 1.0;
    std::vector<Factor1D> fx;
    std::vector<Factor1D> fxi;

    std::size_t dim() const { return fx.size(); }
    double operator()(const Vec& x, const Vec& xi) const;
    double xi_derivative(const std::vector<int>& alpha, const Vec& x, const Vec& xi) const;
    double mass_fraction_outside(const Box& x_window, const Box& xi_window) const;

    // True when the symbol vanishes on the exclusion tube
    // {|g| < r_excl} x {|xi| < xi_excl} around S \ S*.
    bool avoids_tube(const ConicalPotential& pot, double r_excl, double xi_excl) const;
};

// max_{|alpha| <= d+1} sup |d_xi^alpha a| (1 + |xi|)^{d+1} over a dense
// sampling lattice.
double symbol_norm_M(const SymbolSpec& a);

// Gaussian bump at a phase-space point, one per supplied center, plus a
// pair of compactly supported bump symbols. Widths default to 0.35.
std::vector<SymbolSpec> standard_symbol_catalog(std::size_t d,
                                                const std::vector<std::pair<Vec, Vec>>& centers,
                                                double width = 0.35);

}  // namespace conical

#endif
