#ifndef CONICAL_TRANSPORT_HPP
#define CONICAL_TRANSPORT_HPP

#include <optional>

#include "conical/phase_space.hpp"
#include "conical/rng.hpp"
#include "conical/transport_types.hpp"

namespace conical {

// Wigner measure of the initial data as a particle cloud: a single point for
// a coherent family, a midpoint-rule sampling of |A|^2 on the Lagrangian
// graph xi = grad S for a WKB family.
ParticleMeasure initial_measure(const InitialStateSpec& spec, std::size_t n_particles,
                                const Box& box);

// Pushes every particle through the generalized flow; weights are carried
// unchanged. NonGenericCrossing failures are annotated with the particle id.
ParticleMeasure pushforward(const ConicalPotential& pot, const ParticleMeasure& mu, double t,
                            int threads = 1, const FlowOptions& opt = {});

double pair_measure(const SymbolSpec& a, const ParticleMeasure& mu);

// max over the symbol list of |<a, muA> - <a, muB>|.
double weak_star_distance(const ParticleMeasure& a, const ParticleMeasure& b,
                          const std::vector<SymbolSpec>& symbols);

// Particle realization of the Wigner function: systematic resampling from
// the Husimi density (the positive proposal) with Wigner/Husimi importance
// weights, normalized to the Wigner mass.
ParticleMeasure sample_wigner_measure(const PhaseSpaceField& wigner,
                                      const PhaseSpaceField& husimi_field,
                                      std::size_t n_particles, std::uint64_t seed);

struct EgorovOptions {
    std::vector<AxisSpec> axes;     // base grid; refined per eps by the resolution rule
    std::size_t n_particles = 20000;
    double dt = 0.0;                // 0: dt_max rule
    std::uint64_t seed = 1;
    int threads = 1;
    double xi_max = 0.0;            // momentum window for the per-eps resolution rule
};

struct EgorovRow {
    double eps = 0.0;
    double gap = 0.0;  // max over symbols
    std::vector<double> quantum;
    std::vector<double> classical;
};

struct EgorovResult {
    std::vector<EgorovRow> rows;
    double slope = 0.0;  // least-squares log-log fit of gap vs eps
};

// For each eps: evolve the quantum state to t, pair the Wigner transform
// with every symbol, and compare with the pushforward pairing of the
// particle realization of W(psi_0).
EgorovResult egorov_gap(const ConicalPotential& pot, const InitialStateSpec& spec,
                        const std::vector<SymbolSpec>& symbols, double t,
                        const std::vector<double>& eps_list, const EgorovOptions& opt);

// Grid sized per axis by n >= 1.5 * len * xi_max / (pi eps), rounded up to a
// power of two and clamped below by the coherent-width rule.
std::vector<AxisSpec> refine_axes_for_eps(const std::vector<AxisSpec>& base, double eps,
                                          double xi_max);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace conical

#endif
