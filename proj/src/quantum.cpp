#include "conical/quantum.hpp"

#include <algorithm>
#include <cmath>

#include "conical/errors.hpp"

namespace conical {

namespace {

// Applies fn(flat_index, x) over the grid.
template <typename F>
void for_each_point(const std::vector<AxisSpec>& axes, F&& fn) {
    const std::size_t d = axes.size();
    if (d == 1) {
        Vec x(1);
        for (std::size_t i = 0; i < axes[0].n; ++i) {
            x[0] = axes[0].point(i);
            fn(i, x);
        }
    } else if (d == 2) {
        Vec x(2);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < axes[0].n; ++i) {
            x[0] = axes[0].point(i);
            for (std::size_t j = 0; j < axes[1].n; ++j, ++idx) {
                x[1] = axes[1].point(j);
                fn(idx, x);
            }
        }
    } else {
        throw SpecUnsupported("grids with d > 2 are not supported");
    }
}

template <typename F>
void for_each_mode(const std::vector<AxisSpec>& axes, F&& fn) {
    const std::size_t d = axes.size();
    if (d == 1) {
        for (std::size_t k = 0; k < axes[0].n; ++k)
            fn(k, Vec{fft_wavenumber(k, axes[0].n, axes[0].length())});
    } else {
        std::size_t idx = 0;
        for (std::size_t k0 = 0; k0 < axes[0].n; ++k0) {
            const double w0 = fft_wavenumber(k0, axes[0].n, axes[0].length());
            for (std::size_t k1 = 0; k1 < axes[1].n; ++k1, ++idx)
                fn(idx, Vec{w0, fft_wavenumber(k1, axes[1].n, axes[1].length())});
        }
    }
}

void renormalize(WavefunctionGrid& psi) {
    const double n = psi.norm();
    if (n <= 0.0) throw NumericalError("state has zero norm on the grid");
    for (auto& v : psi.values) v /= n;
}

}  // namespace

void validate_grid(const std::vector<AxisSpec>& axes) {
    if (axes.empty() || axes.size() > 2)
        throw ConfigError("grid must have 1 or 2 axes");
    for (const auto& a : axes) {
        if (!is_power_of_two(a.n)) throw ConfigError("grid points per axis must be a power of two");
        if (!(a.hi > a.lo)) throw ConfigError("grid axis has empty extent");
    }
}

WavefunctionGrid make_initial_state(const InitialStateSpec& spec,
                                    const std::vector<AxisSpec>& axes, double eps) {
    validate_grid(axes);
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    WavefunctionGrid psi;
    psi.axes = axes;
    psi.eps = eps;
    psi.values.assign(psi.total(), cplx(0.0, 0.0));
    const std::size_t d = axes.size();

    if (spec.kind == InitialStateSpec::Kind::coherent) {
        for (const auto& a : axes)
            if (a.dx() > std::sqrt(eps) / 4.0)
                throw UnderResolved("coherent width sqrt(eps) needs grid spacing <= sqrt(eps)/4");
        if (spec.q.size() != d || spec.p.size() != d)
            throw ConfigError("coherent center (q, p) must match the grid dimension");
        const double amp = std::pow(M_PI * eps, -double(d) / 4.0);
        for_each_point(axes, [&](std::size_t idx, const Vec& x) {
            double r2 = 0.0, phase = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double dxq = x[i] - spec.q[i];
                r2 += dxq * dxq;
                phase += spec.p[i] * dxq;
            }
            psi.values[idx] = amp * std::exp(-r2 / (2.0 * eps)) *
                              std::exp(cplx(0.0, phase / eps));
        });
    } else {
        // WKB: check the phase gradient stays inside the momentum window.
        for (std::size_t i = 0; i < d; ++i) {
            const double xi_nyq = eps * M_PI / axes[i].dx();
            double worst = 0.0;
            const Poly dsi = spec.phase.partial(i);
            for_each_point(axes, [&](std::size_t, const Vec& x) {
                worst = std::max(worst, std::abs(dsi(x)));
            });
            if (worst + 3.0 * std::sqrt(eps) > 0.9 * xi_nyq)
                throw UnderResolved("wkb phase gradient exceeds the grid momentum window");
        }
        for_each_point(axes, [&](std::size_t idx, const Vec& x) {
            psi.values[idx] =
                spec.amplitude(x) * std::exp(cplx(0.0, spec.phase(x) / eps));
        });
    }
    renormalize(psi);
    return psi;
}

void to_fourier(WavefunctionGrid& psi) {
    if (psi.dim() == 1) {
        fft_forward(psi.values);
    } else {
        fft_forward_axis(psi.values, psi.axes[0].n, psi.axes[1].n, 0);
        fft_forward_axis(psi.values, psi.axes[0].n, psi.axes[1].n, 1);
    }
}

void from_fourier(WavefunctionGrid& psi) {
    if (psi.dim() == 1) {
        fft_inverse(psi.values);
    } else {
        fft_inverse_axis(psi.values, psi.axes[0].n, psi.axes[1].n, 0);
        fft_inverse_axis(psi.values, psi.axes[0].n, psi.axes[1].n, 1);
    }
    const double scale = 1.0 / double(psi.total());
    for (auto& v : psi.values) v *= scale;
}

void strang_step(const ConicalPotential& pot, WavefunctionGrid& psi, double dt) {
    if (dt == 0.0) return;
    const double eps = psi.eps;
    std::vector<cplx> half_pot(psi.total());
    for_each_point(psi.axes, [&](std::size_t idx, const Vec& x) {
        half_pot[idx] = std::exp(cplx(0.0, -pot.V(x) * dt / (2.0 * eps)));
    });
    for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= half_pot[i];
    to_fourier(psi);
    for_each_mode(psi.axes, [&](std::size_t idx, const Vec& k) {
        psi.values[idx] *= std::exp(cplx(0.0, -0.5 * eps * dot(k, k) * dt));
    });
    from_fourier(psi);
    for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= half_pot[i];
}

double kinetic_energy(const WavefunctionGrid& psi) {
    WavefunctionGrid hat = psi;
    to_fourier(hat);
    double num = 0.0, den = 0.0;
    const double eps = psi.eps;
    for_each_mode(psi.axes, [&](std::size_t idx, const Vec& k) {
        const double m = std::norm(hat.values[idx]);
        num += 0.5 * eps * eps * dot(k, k) * m;
        den += m;
    });
    return (den > 0.0) ? num / den * psi.norm2() : 0.0;
}

double potential_energy(const ConicalPotential& pot, const WavefunctionGrid& psi) {
    double s = 0.0;
    for_each_point(psi.axes, [&](std::size_t idx, const Vec& x) {
        s += pot.V(x) * std::norm(psi.values[idx]);
    });
    return s * psi.cell_volume();
}

double spectral_tail_fraction(const WavefunctionGrid& psi) {
    WavefunctionGrid hat = psi;
    to_fourier(hat);
    double tail = 0.0, total = 0.0;
    const std::size_t d = psi.dim();
    auto band = [&](std::size_t k, std::size_t n) {
        return std::abs(double(fft_signed_index(k, n))) >= 0.875 * double(n) / 2.0;
    };
    if (d == 1) {
        for (std::size_t k = 0; k < psi.axes[0].n; ++k) {
            const double m = std::norm(hat.values[k]);
            total += m;
            if (band(k, psi.axes[0].n)) tail += m;
        }
    } else {
        std::size_t idx = 0;
        for (std::size_t k0 = 0; k0 < psi.axes[0].n; ++k0)
            for (std::size_t k1 = 0; k1 < psi.axes[1].n; ++k1, ++idx) {
                const double m = std::norm(hat.values[idx]);
                total += m;
                if (band(k0, psi.axes[0].n) || band(k1, psi.axes[1].n)) tail += m;
            }
    }
    return (total > 0.0) ? tail / total : 0.0;
}

Vec position_mean(const WavefunctionGrid& psi) {
    Vec mean(psi.dim(), 0.0);
    double mass = 0.0;
    for_each_point(psi.axes, [&](std::size_t idx, const Vec& x) {
        const double m = std::norm(psi.values[idx]);
        mass += m;
        for (std::size_t i = 0; i < x.size(); ++i) mean[i] += m * x[i];
    });
    for (auto& c : mean) c /= mass;
    return mean;
}

Vec momentum_mean(const WavefunctionGrid& psi) {
    WavefunctionGrid hat = psi;
    to_fourier(hat);
    Vec mean(psi.dim(), 0.0);
    double mass = 0.0;
    for_each_mode(psi.axes, [&](std::size_t idx, const Vec& k) {
        const double m = std::norm(hat.values[idx]);
        mass += m;
        for (std::size_t i = 0; i < k.size(); ++i) mean[i] += m * psi.eps * k[i];
    });
    for (auto& c : mean) c /= mass;
    return mean;
}

double dt_max_rule(const ConicalPotential& pot, const WavefunctionGrid& psi) {
    double v_max = 0.0;
    for_each_point(psi.axes, [&](std::size_t, const Vec& x) {
        v_max = std::max(v_max, std::abs(pot.V(x)));
    });
    if (v_max <= 0.0) return 0.01;
    return std::min(0.01, psi.eps * M_PI / (4.0 * v_max));
}

EvolveResult evolve(const ConicalPotential& pot, const WavefunctionGrid& psi0, double t_final,
                    double dt, const std::vector<double>& snapshot_times) {
    EvolveResult out;
    if (t_final <= 0.0) {
        out.times = {0.0};
        out.snapshots = {psi0};
        return out;
    }
    const double dt_cap = dt_max_rule(pot, psi0);
    if (dt <= 0.0) dt = dt_cap;
    if (dt > dt_cap) throw ConfigError("dt exceeds dt_max(eps, grid)");
    const std::size_t n_steps = std::size_t(std::ceil(t_final / dt - 1e-12));
    dt = t_final / double(n_steps);

    // Snap requested observation times to the step lattice.
    std::vector<std::size_t> snap_steps;
    for (double ts : snapshot_times) {
        const double clamped = std::clamp(ts, 0.0, t_final);
        snap_steps.push_back(std::size_t(std::llround(clamped / dt)));
    }
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    WavefunctionGrid psi = psi0;
    const double norm0 = psi.norm2();
    const double e0 = kinetic_energy(psi) + potential_energy(pot, psi);
    auto take = [&](std::size_t step) {
        out.times.push_back(double(step) * dt);
        out.snapshots.push_back(psi);
        if (spectral_tail_fraction(psi) > 1e-6)
            throw UnderResolved("spectral tail mass exceeded 1e-6 during evolve");
    };

    // The phase tables are constant across the run; build them once.
    std::vector<cplx> half_pot(psi.total()), kin(psi.total());
    for_each_point(psi.axes, [&](std::size_t idx, const Vec& x) {
        half_pot[idx] = std::exp(cplx(0.0, -pot.V(x) * dt / (2.0 * psi.eps)));
    });
    for_each_mode(psi.axes, [&](std::size_t idx, const Vec& k) {
        kin[idx] = std::exp(cplx(0.0, -0.5 * psi.eps * dot(k, k) * dt));
    });

    std::size_t next = 0;
    if (next < snap_steps.size() && snap_steps[next] == 0) {
        take(0);
        ++next;
    }
    for (std::size_t s = 1; s <= n_steps; ++s) {
        for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= half_pot[i];
        to_fourier(psi);
        for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= kin[i];
        from_fourier(psi);
        for (std::size_t i = 0; i < psi.values.size(); ++i) psi.values[i] *= half_pot[i];
        if (next < snap_steps.size() && snap_steps[next] == s) {
            take(s);
            ++next;
        }
    }
    out.norm_drift = std::abs(psi.norm2() - norm0);
    const double e1 = kinetic_energy(psi) + potential_energy(pot, psi);
    out.energy_drift_rel = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-12);
    if (out.norm_drift > 1e-10)
        throw NumericalError("L2 norm drifted by more than 1e-10 during evolve");
    return out;
}

}  // namespace conical
