#ifndef CONICAL_QUANTUM_HPP
#define CONICAL_QUANTUM_HPP

#include <complex>
#include <vector>

#include "conical/fft.hpp"
#include "conical/fields.hpp"
#include "conical/potential.hpp"

namespace conical {

struct AxisSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;  // power of two

    double length() const { return hi - lo; }
    double dx() const { return length() / double(n); }
    double point(std::size_t i) const { return lo + double(i) * dx(); }
};

// Periodic uniform grid with complex samples and the semiclassical parameter.
struct WavefunctionGrid {
    std::vector<AxisSpec> axes;
    double eps = 0.0;
    std::vector<cplx> values;  // row-major over the axes

    std::size_t dim() const { return axes.size(); }
    std::size_t total() const {
        std::size_t t = 1;
        for (const auto& a : axes) t *= a.n;
        return t;
    }
    double cell_volume() const {
        double v = 1.0;
        for (const auto& a : axes) v *= a.dx();
        return v;
    }
    double norm2() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return s * cell_volume();
    }
    double norm() const { return std::sqrt(norm2()); }
};

struct InitialStateSpec {
    enum class Kind { coherent, wkb };
    Kind kind = Kind::coherent;
    Vec q, p;      // coherent center
    Poly amplitude, phase;  // wkb data A, S
};

void validate_grid(const std::vector<AxisSpec>& axes);

// Coherent: (pi eps)^{-d/4} exp(-|x-q|^2 / 2eps) exp(i p.(x-q)/eps).
// WKB: A(x) exp(i S(x)/eps). Both renormalized on the grid.
WavefunctionGrid make_initial_state(const InitialStateSpec& spec,
                                    const std::vector<AxisSpec>& axes, double eps);

// Forward/backward full-grid transforms with 1/N on the way back.
void to_fourier(WavefunctionGrid& psi);
void from_fourier(WavefunctionGrid& psi);

// Half potential phase, exact kinetic phase in Fourier space, half potential
// phase. Unitary up to round-off.
void strang_step(const ConicalPotential& pot, WavefunctionGrid& psi, double dt);

double kinetic_energy(const WavefunctionGrid& psi);
double potential_energy(const ConicalPotential& pot, const WavefunctionGrid& psi);

// Fraction of |psi-hat|^2 mass in the top eighth of any axis band.
double spectral_tail_fraction(const WavefunctionGrid& psi);

Vec position_mean(const WavefunctionGrid& psi);
Vec momentum_mean(const WavefunctionGrid& psi);

double dt_max_rule(const ConicalPotential& pot, const WavefunctionGrid& psi);

struct EvolveResult {
    std::vector<double> times;
    std::vector<WavefunctionGrid> snapshots;
    double norm_drift = 0.0;
    double energy_drift_rel = 0.0;
};

// Repeated strang_step; snapshots at the requested times (snapped to the dt
// lattice). Throws UnderResolved when the spectral tail exceeds 1e-6.
EvolveResult evolve(const ConicalPotential& pot, const WavefunctionGrid& psi0, double t_final,
                    double dt, const std::vector<double>& snapshot_times);

}  // namespace conical

#endif
