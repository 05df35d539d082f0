#ifndef CONICAL_MICROLOCAL_HPP
#define CONICAL_MICROLOCAL_HPP

#include "conical/phase_space.hpp"
#include "conical/transport_types.hpp"

namespace conical {

// Two-microlocal test symbol b(x, xi, y): compactly supported factors in
// (x, xi) and a y-profile that is either constant (homogeneous limit 1),
// a smooth odd direction profile y/sqrt(1+y^2) (limit = omega), or a
// compactly supported bump (limit 0, probes the eps-scale part).
struct TwoMicrolocalSymbol {
    enum class YKind { constant, direction, compact };
    std::string id;
    YKind ykind = YKind::constant;
    double ywidth = 1.0;
    std::vector<Factor1D> fx, fxi;

    double y_profile(double y) const;
    double eval(const Vec& x, const Vec& xi, double y) const;
};

// Zoomed representative eps^{p/2} psi(eps y, x'') on |y| <= y_max, for the
// canonical coordinate family. The first codim axes are rescaled.
WavefunctionGrid rescale_concentration(const WavefunctionGrid& psi, std::size_t codim,
                                       double y_max, std::size_t n_y);

struct SplitObservable {
    double inner = 0.0;  // chi(x'/(R eps)) part, the eps-scale term
    double outer = 0.0;  // (1 - chi(x'/(R eps))) chi(x'/delta), the direction term
    double bulk = 0.0;   // remainder, the bulk measure term
    double total() const { return inner + outer + bulk; }
};

// Pairings <op_eps(b . cutoff) psi, psi> for the three-way cutoff split.
// Requires R eps < delta / 2. Canonical g with codim 1, d = 1.
SplitObservable split_observable(const TwoMicrolocalSymbol& b, const WavefunctionGrid& psi,
                                 double R, double delta);

// Untruncated pairing <op_eps(b(x, xi, x/eps)) psi, psi> for the partition check.
double pair_two_microlocal(const TwoMicrolocalSymbol& b, const WavefunctionGrid& psi);

// Measure mass in {|g(x)| < r} ∩ {|dg(x) xi| > sstar_tol} within an optional
// |xi| window.
double mass_near_S(const PhaseSpaceField& field, const ConicalPotential& pot, double r,
                   double xi_window = 0.0);
double mass_near_S(const ParticleMeasure& mu, const ConicalPotential& pot, double r,
                   double xi_window = 0.0);

}  // namespace conical

#endif
