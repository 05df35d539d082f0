#include "conical/phase_space.hpp"

#include <algorithm>
#include <cmath>

#include "conical/errors.hpp"

namespace conical {

namespace {

// Zero-pad the spectrum to twice the length, splitting the Nyquist bin.
std::vector<cplx> double_spectrum_1d(const std::vector<cplx>& hat) {
    const std::size_t n = hat.size();
    std::vector<cplx> out(2 * n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const long ks = fft_signed_index(k, n);
        if (std::size_t(std::labs(ks)) < n / 2) {
            out[(ks + long(2 * n)) % long(2 * n)] = hat[k];
        } else {
            // k = n/2: share between +n/2 and -n/2.
            out[n / 2] += 0.5 * hat[k];
            out[2 * n - n / 2] += 0.5 * hat[k];
        }
    }
    return out;
}

}  // namespace

double PhaseSpaceField::min_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
}

std::vector<cplx> spectral_double(const WavefunctionGrid& psi) {
    if (psi.dim() == 1) {
        std::vector<cplx> hat = psi.values;
        fft_forward(hat);
        std::vector<cplx> pad = double_spectrum_1d(hat);
        fft_inverse(pad);
        const double scale = 1.0 / double(psi.axes[0].n);
        for (auto& v : pad) v *= scale;
        return pad;
    }
    // Two axes: double each in turn.
    const std::size_t n0 = psi.axes[0].n, n1 = psi.axes[1].n;
    std::vector<cplx> work = psi.values;
    fft_forward_axis(work, n0, n1, 0);
    fft_forward_axis(work, n0, n1, 1);
    std::vector<cplx> big(4 * n0 * n1, cplx(0.0, 0.0));
    // Pad both axes at once on the spectral grid.
    for (std::size_t k0 = 0; k0 < n0; ++k0) {
        const long s0 = fft_signed_index(k0, n0);
        for (std::size_t k1 = 0; k1 < n1; ++k1) {
            const long s1 = fft_signed_index(k1, n1);
            const cplx v = work[k0 * n1 + k1];
            auto put = [&](long a, long b, cplx val) {
                const std::size_t ia = std::size_t((a + long(2 * n0)) % long(2 * n0));
                const std::size_t ib = std::size_t((b + long(2 * n1)) % long(2 * n1));
                big[ia * (2 * n1) + ib] += val;
            };
            const bool ny0 = std::size_t(std::labs(s0)) >= n0 / 2;
            const bool ny1 = std::size_t(std::labs(s1)) >= n1 / 2;
            if (!ny0 && !ny1) {
                put(s0, s1, v);
            } else if (ny0 && !ny1) {
                put(long(n0) / 2, s1, 0.5 * v);
                put(-long(n0) / 2, s1, 0.5 * v);
            } else if (!ny0 && ny1) {
                put(s0, long(n1) / 2, 0.5 * v);
                put(s0, -long(n1) / 2, 0.5 * v);
            } else {
                put(long(n0) / 2, long(n1) / 2, 0.25 * v);
                put(long(n0) / 2, -long(n1) / 2, 0.25 * v);
                put(-long(n0) / 2, long(n1) / 2, 0.25 * v);
                put(-long(n0) / 2, -long(n1) / 2, 0.25 * v);
            }
        }
    }
    fft_inverse_axis(big, 2 * n0, 2 * n1, 0);
    fft_inverse_axis(big, 2 * n0, 2 * n1, 1);
    const double scale = 1.0 / double(n0 * n1);
    for (auto& v : big) v *= scale;
    return big;
}

PhaseSpaceField wigner_transform(const WavefunctionGrid& psi) {
    validate_grid(psi.axes);
    const std::size_t d = psi.dim();
    PhaseSpaceField f;
    f.eps = psi.eps;
    f.x_axes = psi.axes;

    if (d == 1) {
        const std::size_t n = psi.axes[0].n;
        const double L = psi.axes[0].length();
        const double dx = psi.axes[0].dx();
        const double dxi = M_PI * psi.eps / L;
        f.xi_axes = {{-double(n) * dxi, double(n) * dxi, 2 * n}};
        f.values.assign(n * 2 * n, 0.0);

        const std::vector<cplx> psi2 = spectral_double(psi);
        const double scale = dx / (2.0 * M_PI * psi.eps);
        std::vector<cplx> corr(2 * n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < 2 * n; ++k) {
                const long m = fft_signed_index(k, 2 * n);
                const std::size_t a = std::size_t((long(2 * j) - m + long(4 * n)) % long(2 * n));
                const std::size_t b = std::size_t((long(2 * j) + m + long(4 * n)) % long(2 * n));
                corr[k] = psi2[a] * std::conj(psi2[b]);
            }
            fft_inverse(corr);  // positive-exponent transform
            for (std::size_t l = 0; l < 2 * n; ++l) {
                const long ls = fft_signed_index(l, 2 * n);
                f.values[j * 2 * n + std::size_t(ls + long(n))] = scale * corr[l].real();
            }
        }
        return f;
    }

    // d = 2: plain Fourier xi grids, dense output guarded by memory.
    const std::size_t n0 = psi.axes[0].n, n1 = psi.axes[1].n;
    if (n0 > 64 || n1 > 64)
        throw SpecUnsupported(
            "dense d=2 Wigner fields are limited to 64 points per axis; use "
            "pair_symbol_streaming for larger grids");
    const double L0 = psi.axes[0].length(), L1 = psi.axes[1].length();
    const double dxi0 = 2.0 * M_PI * psi.eps / L0, dxi1 = 2.0 * M_PI * psi.eps / L1;
    f.xi_axes = {{-double(n0) / 2 * dxi0, double(n0) / 2 * dxi0, n0},
                 {-double(n1) / 2 * dxi1, double(n1) / 2 * dxi1, n1}};
    f.values.assign(n0 * n1 * n0 * n1, 0.0);

    const std::vector<cplx> psi2 = spectral_double(psi);
    const double scale = (psi.axes[0].dx() / (2.0 * M_PI * psi.eps)) *
                         (psi.axes[1].dx() / (2.0 * M_PI * psi.eps));
    const std::size_t N0 = 2 * n0, N1 = 2 * n1;
    std::vector<cplx> corr(n0 * n1);
    for (std::size_t j0 = 0; j0 < n0; ++j0)
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            std::fill(corr.begin(), corr.end(), cplx(0.0, 0.0));
            // Fold the (2n0 x 2n1) correlation onto the even-frequency grid.
            // The m = -n lines would alias antipodal-wrap mass onto the
            // xi = 0 bins, so they are dropped (exponentially small for
            // resolved states).
            for (std::size_t k0 = 0; k0 < N0; ++k0) {
                if (k0 == n0) continue;
                const long m0 = fft_signed_index(k0, N0);
                const std::size_t a0 = std::size_t((long(2 * j0) - m0 + long(2 * N0)) % long(N0));
                const std::size_t b0 = std::size_t((long(2 * j0) + m0 + long(2 * N0)) % long(N0));
                for (std::size_t k1 = 0; k1 < N1; ++k1) {
                    if (k1 == n1) continue;
                    const long m1 = fft_signed_index(k1, N1);
                    const std::size_t a1 =
                        std::size_t((long(2 * j1) - m1 + long(2 * N1)) % long(N1));
                    const std::size_t b1 =
                        std::size_t((long(2 * j1) + m1 + long(2 * N1)) % long(N1));
                    corr[(k0 % n0) * n1 + (k1 % n1)] +=
                        psi2[a0 * N1 + a1] * std::conj(psi2[b0 * N1 + b1]);
                }
            }
            fft_inverse_axis(corr, n0, n1, 0);
            fft_inverse_axis(corr, n0, n1, 1);
            double* row = &f.values[(j0 * n1 + j1) * n0 * n1];
            for (std::size_t l0 = 0; l0 < n0; ++l0) {
                const long s0 = fft_signed_index(l0, n0);
                for (std::size_t l1 = 0; l1 < n1; ++l1) {
                    const long s1 = fft_signed_index(l1, n1);
                    row[std::size_t(s0 + long(n0) / 2) * n1 + std::size_t(s1 + long(n1) / 2)] =
                        scale * corr[l0 * n1 + l1].real();
                }
            }
        }
    return f;
}

namespace {

// Gaussian multiplier smoothing along one axis of a flattened array.
void gauss_smooth_axis(std::vector<double>& vals, const std::vector<std::size_t>& shape,
                       std::size_t axis, double axis_len, double variance) {
    const std::size_t n = shape[axis];
    std::size_t before = 1, after = 1;
    for (std::size_t i = 0; i < axis; ++i) before *= shape[i];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) after *= shape[i];

    std::vector<cplx> line(n);
    std::vector<double> mult(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kap = fft_wavenumber(k, n, axis_len);
        mult[k] = std::exp(-0.5 * variance * kap * kap);
    }
    for (std::size_t b = 0; b < before; ++b)
        for (std::size_t a = 0; a < after; ++a) {
            const std::size_t base = b * n * after + a;
            for (std::size_t k = 0; k < n; ++k) line[k] = vals[base + k * after];
            fft_forward(line);
            for (std::size_t k = 0; k < n; ++k) line[k] *= mult[k];
            fft_inverse(line);
            for (std::size_t k = 0; k < n; ++k)
                vals[base + k * after] = line[k].real() / double(n);
        }
}

}  // namespace

PhaseSpaceField husimi(const PhaseSpaceField& wigner) {
    PhaseSpaceField out = wigner;
    std::vector<std::size_t> shape;
    std::vector<double> lens;
    for (const auto& a : wigner.x_axes) {
        shape.push_back(a.n);
        lens.push_back(a.length());
    }
    for (const auto& a : wigner.xi_axes) {
        shape.push_back(a.n);
        lens.push_back(a.length());
    }
    const double var = 0.5 * wigner.eps;
    for (std::size_t ax = 0; ax < shape.size(); ++ax)
        gauss_smooth_axis(out.values, shape, ax, lens[ax], var);
    return out;
}

double pair_symbol(const SymbolSpec& a, const PhaseSpaceField& field) {
    if (a.mass_fraction_outside(field.x_window(), field.xi_window()) >= 1e-6)
        throw SupportClipped("symbol mass outside the phase-space window exceeds 1e-6");
    const std::size_t d = field.dim();
    double s = 0.0;
    if (d == 1) {
        const auto& xa = field.x_axes[0];
        const auto& ka = field.xi_axes[0];
        std::vector<double> ax(xa.n), ak(ka.n);
        for (std::size_t j = 0; j < xa.n; ++j) ax[j] = a.fx[0].derivative(0, xa.point(j));
        for (std::size_t l = 0; l < ka.n; ++l) ak[l] = a.fxi[0].derivative(0, ka.point(l));
        for (std::size_t j = 0; j < xa.n; ++j) {
            if (ax[j] == 0.0) continue;
            const double* row = &field.values[j * ka.n];
            double r = 0.0;
            for (std::size_t l = 0; l < ka.n; ++l) r += ak[l] * row[l];
            s += ax[j] * r;
        }
        return a.scale * s * field.cell();
    }
    const std::size_t n0 = field.x_axes[0].n, n1 = field.x_axes[1].n;
    const std::size_t m0 = field.xi_axes[0].n, m1 = field.xi_axes[1].n;
    std::size_t idx = 0;
    for (std::size_t j0 = 0; j0 < n0; ++j0)
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            const double axv = a.fx[0].derivative(0, field.x_axes[0].point(j0)) *
                               a.fx[1].derivative(0, field.x_axes[1].point(j1));
            for (std::size_t l0 = 0; l0 < m0; ++l0)
                for (std::size_t l1 = 0; l1 < m1; ++l1, ++idx) {
                    if (axv == 0.0) continue;
                    s += axv * a.fxi[0].derivative(0, field.xi_axes[0].point(l0)) *
                         a.fxi[1].derivative(0, field.xi_axes[1].point(l1)) *
                         field.values[idx];
                }
        }
    return a.scale * s * field.cell();
}

namespace {

// Midpoint-kernel application of a 1D Weyl operator on the doubled grid,
// streamed one midpoint diagonal at a time: for J = j + j' the kernel row is
// the positive-exponent transform of a(m_J, zeta) over the half-spaced zeta
// grid, and out[j] accumulates F_J[(j - j') mod 2n] f[j'] dx along the
// diagonal. O(n) memory, 2n FFTs of length 2n plus n^2 multiply-adds.
std::vector<cplx> apply_weyl_axis(const std::function<double(double, double)>& a,
                                  const AxisSpec& axis, double eps,
                                  const std::vector<cplx>& f) {
    const std::size_t n = axis.n;
    const double L = axis.length();
    const double dxi = M_PI * eps / L;  // zeta spacing
    const double scale = dxi / (2.0 * M_PI * eps) * axis.dx();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    std::vector<cplx> line(2 * n);
    for (std::size_t J = 0; J + 1 < 2 * n; ++J) {
        const double m = axis.lo + double(J) * axis.dx() / 2.0;
        for (std::size_t l = 0; l < 2 * n; ++l) {
            const long ls = fft_signed_index(l, 2 * n);
            line[l] = a(m, double(ls) * dxi);
        }
        fft_inverse(line);  // positive exponent: sum_l a e^{+2 pi i l u / 2n}
        const std::size_t j_lo = (J >= n) ? J - n + 1 : 0;
        const std::size_t j_hi = std::min(J, n - 1);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const std::size_t jp = J - j;
            const std::size_t u =
                std::size_t((long(j) - long(jp) + long(2 * n)) % long(2 * n));
            out[j] += scale * line[u] * f[jp];
        }
    }
    return out;
}

}  // namespace

WavefunctionGrid apply_weyl_sampled(const SampledSymbol& a, const WavefunctionGrid& psi) {
    if (psi.dim() != 1)
        throw SpecUnsupported("sampled-symbol Weyl application is 1D only");
    WavefunctionGrid out = psi;
    out.values = apply_weyl_axis(a, psi.axes[0], psi.eps, psi.values);
    return out;
}

WavefunctionGrid apply_weyl(const SymbolSpec& a, const WavefunctionGrid& psi) {
    const std::size_t d = psi.dim();
    WavefunctionGrid out = psi;
    if (d == 1) {
        auto fn = [&](double x, double xi) {
            return a.fx[0].derivative(0, x) * a.fxi[0].derivative(0, xi);
        };
        out.values = apply_weyl_axis(fn, psi.axes[0], psi.eps, psi.values);
        for (auto& v : out.values) v *= a.scale;
        return out;
    }
    // Tensor application: the catalog symbols factor per axis, and Weyl
    // quantization of a product over disjoint variables is the tensor
    // product of the axis operators.
    const std::size_t n0 = psi.axes[0].n, n1 = psi.axes[1].n;
    auto f0 = [&](double x, double xi) {
        return a.fx[0].derivative(0, x) * a.fxi[0].derivative(0, xi);
    };
    auto f1 = [&](double x, double xi) {
        return a.fx[1].derivative(0, x) * a.fxi[1].derivative(0, xi);
    };
    // axis 1 (contiguous rows)
    for (std::size_t i = 0; i < n0; ++i) {
        std::vector<cplx> row(psi.values.begin() + i * n1, psi.values.begin() + (i + 1) * n1);
        std::vector<cplx> res = apply_weyl_axis(f1, psi.axes[1], psi.eps, row);
        std::copy(res.begin(), res.end(), out.values.begin() + i * n1);
    }
    // axis 0 (strided columns)
    for (std::size_t j = 0; j < n1; ++j) {
        std::vector<cplx> col(n0);
        for (std::size_t i = 0; i < n0; ++i) col[i] = out.values[i * n1 + j];
        std::vector<cplx> res = apply_weyl_axis(f0, psi.axes[0], psi.eps, col);
        for (std::size_t i = 0; i < n0; ++i) out.values[i * n1 + j] = res[i] * a.scale;
    }
    return out;
}

double pair_symbol_streaming(const SymbolSpec& a, const WavefunctionGrid& psi) {
    if (psi.dim() == 1) {
        const PhaseSpaceField f = wigner_transform(psi);
        return pair_symbol(a, f);
    }
    // Stream over x points; never materialize the 4D field.
    const std::size_t n0 = psi.axes[0].n, n1 = psi.axes[1].n;
    const std::size_t N0 = 2 * n0, N1 = 2 * n1;
    const std::vector<cplx> psi2 = spectral_double(psi);
    const double scale = (psi.axes[0].dx() / (2.0 * M_PI * psi.eps)) *
                         (psi.axes[1].dx() / (2.0 * M_PI * psi.eps));
    const double dxi0 = 2.0 * M_PI * psi.eps / psi.axes[0].length();
    const double dxi1 = 2.0 * M_PI * psi.eps / psi.axes[1].length();

    std::vector<double> ak0(n0), ak1(n1);
    for (std::size_t l = 0; l < n0; ++l)
        ak0[l] = a.fxi[0].derivative(0, double(fft_signed_index(l, n0)) * dxi0);
    for (std::size_t l = 0; l < n1; ++l)
        ak1[l] = a.fxi[1].derivative(0, double(fft_signed_index(l, n1)) * dxi1);

    double total = 0.0;
    std::vector<cplx> corr(n0 * n1);
    for (std::size_t j0 = 0; j0 < n0; ++j0) {
        const double ax0 = a.fx[0].derivative(0, psi.axes[0].point(j0));
        if (ax0 == 0.0) continue;
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
            const double axv = ax0 * a.fx[1].derivative(0, psi.axes[1].point(j1));
            if (axv == 0.0) continue;
            std::fill(corr.begin(), corr.end(), cplx(0.0, 0.0));
            for (std::size_t k0 = 0; k0 < N0; ++k0) {
                if (k0 == n0) continue;
                const long m0 = fft_signed_index(k0, N0);
                const std::size_t a0 = std::size_t((long(2 * j0) - m0 + long(2 * N0)) % long(N0));
                const std::size_t b0 = std::size_t((long(2 * j0) + m0 + long(2 * N0)) % long(N0));
                for (std::size_t k1 = 0; k1 < N1; ++k1) {
                    if (k1 == n1) continue;
                    const long m1 = fft_signed_index(k1, N1);
                    const std::size_t a1 =
                        std::size_t((long(2 * j1) - m1 + long(2 * N1)) % long(N1));
                    const std::size_t b1 =
                        std::size_t((long(2 * j1) + m1 + long(2 * N1)) % long(N1));
                    corr[(k0 % n0) * n1 + (k1 % n1)] +=
                        psi2[a0 * N1 + a1] * std::conj(psi2[b0 * N1 + b1]);
                }
            }
            fft_inverse_axis(corr, n0, n1, 0);
            fft_inverse_axis(corr, n0, n1, 1);
            double slice = 0.0;
            for (std::size_t l0 = 0; l0 < n0; ++l0)
                for (std::size_t l1 = 0; l1 < n1; ++l1)
                    slice += ak0[l0] * ak1[l1] * corr[l0 * n1 + l1].real();
            total += axv * slice;
        }
    }
    const double cell = psi.axes[0].dx() * psi.axes[1].dx() * dxi0 * dxi1;
    return a.scale * scale * total * cell;
}

std::vector<double> marginal_x(const PhaseSpaceField& f) {
    const std::size_t n = f.x_axes[0].n, m = f.xi_axes[0].n;
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < m; ++l) s += f.values[j * m + l];
        out[j] = s * f.xi_axes[0].dx();
    }
    return out;
}

std::vector<double> marginal_xi(const PhaseSpaceField& f) {
    // The half-spaced grid concentrates the x-marginal on its even (Fourier)
    // bins; pool each pair of fine cells to read the density on the n-point
    // Fourier grid.
    const std::size_t n = f.x_axes[0].n, m = f.xi_axes[0].n;
    std::vector<double> fine(m, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < m; ++l) fine[l] += f.values[j * m + l];
    for (auto& v : fine) v *= f.x_axes[0].dx();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = 0.5 * (fine[2 * k] + fine[(2 * k + 1) % m]);
    return out;
}

std::vector<double> momentum_xi_grid(const PhaseSpaceField& field) {
    // Fourier bins of the half-spaced xi axis: every second point.
    const std::size_t n = field.x_axes[0].n;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = field.xi_axes[0].point(2 * k);
    return out;
}

std::vector<double> momentum_density(const WavefunctionGrid& psi) {
    // |F_eps psi|^2 at xi = eps k from the plain n-point transform; kept
    // independent of the doubled-grid Wigner machinery.
    const std::size_t n = psi.axes[0].n;
    const double dx = psi.axes[0].dx();
    std::vector<cplx> hat = psi.values;
    fft_forward(hat);
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const long ks = fft_signed_index(k, n);
        const std::size_t storage = std::size_t(ks + long(n) / 2);
        out[storage] = std::norm(hat[k] * dx) / (2.0 * M_PI * psi.eps);
    }
    return out;
}

}  // namespace conical
