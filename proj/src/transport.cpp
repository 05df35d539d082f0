#include "conical/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "conical/errors.hpp"

namespace conical {

namespace {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const int nt = std::min<std::size_t>(threads, n);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

ParticleMeasure initial_measure(const InitialStateSpec& spec, std::size_t n_particles,
                                const Box& box) {
    if (n_particles < 1) throw ConfigError("n_particles must be at least 1");
    ParticleMeasure mu;
    if (spec.kind == InitialStateSpec::Kind::coherent) {
        mu.points.push_back({spec.q, spec.p});
        mu.weights.push_back(1.0);
        return mu;
    }
    const std::size_t d = box.size();
    // Midpoint lattice with floor(N^(1/d)) nodes per axis.
    std::size_t per_axis = std::max<std::size_t>(
        1, std::size_t(std::floor(std::pow(double(n_particles), 1.0 / double(d)))));
    std::vector<std::size_t> idx(d, 0);
    Vec x(d);
    double cell = 1.0;
    for (const auto& [lo, hi] : box) cell *= (hi - lo) / double(per_axis);
    while (true) {
        for (std::size_t i = 0; i < d; ++i) {
            const auto [lo, hi] = box[i];
            x[i] = lo + (hi - lo) * (double(idx[i]) + 0.5) / double(per_axis);
        }
        const double a = spec.amplitude(x);
        mu.points.push_back({x, spec.phase.gradient(x)});
        mu.weights.push_back(a * a * cell);
        std::size_t ax = 0;
        while (ax < d && ++idx[ax] == per_axis) idx[ax++] = 0;
        if (ax == d) break;
    }
    return mu;
}

ParticleMeasure pushforward(const ConicalPotential& pot, const ParticleMeasure& mu, double t,
                            int threads, const FlowOptions& opt) {
    ParticleMeasure out;
    out.points.resize(mu.size());
    out.weights = mu.weights;
    std::vector<std::string> failures(mu.size());
    parallel_for(mu.size(), threads, [&](std::size_t i) {
        try {
            out.points[i] = flow_endpoint(pot, mu.points[i], t, opt);
        } catch (const NonGenericCrossing& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < failures.size(); ++i)
        if (!failures[i].empty()) {
            std::ostringstream os;
            os << "particle " << i << ": " << failures[i];
            throw NonGenericCrossing(os.str());
        }
    return out;
}

double pair_measure(const SymbolSpec& a, const ParticleMeasure& mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        s += mu.weights[i] * a(mu.points[i].x, mu.points[i].xi);
    return s;
}

double weak_star_distance(const ParticleMeasure& a, const ParticleMeasure& b,
                          const std::vector<SymbolSpec>& symbols) {
    if (symbols.empty()) throw ConfigError("weak_star_distance needs at least one symbol");
    double best = 0.0;
    for (const auto& s : symbols)
        best = std::max(best, std::abs(pair_measure(s, a) - pair_measure(s, b)));
    return best;
}

ParticleMeasure sample_wigner_measure(const PhaseSpaceField& wigner,
                                      const PhaseSpaceField& husimi_field,
                                      std::size_t n_particles, std::uint64_t seed) {
    if (wigner.dim() != 1)
        throw SpecUnsupported("the particle realization is implemented for d = 1");
    const std::size_t nx = wigner.x_axes[0].n, nk = wigner.xi_axes[0].n;
    const std::size_t ncells = nx * nk;

    // Positive proposal mass per cell.
    std::vector<double> cumulative(ncells);
    double total = 0.0;
    for (std::size_t c = 0; c < ncells; ++c) {
        total += std::max(husimi_field.values[c], 0.0);
        cumulative[c] = total;
    }
    if (total <= 0.0) throw NumericalError("husimi proposal has no positive mass");

    const double mass_w = wigner.mass();
    ParticleMeasure mu;
    mu.points.resize(n_particles);
    mu.weights.resize(n_particles);

    // Systematic resampling: one uniform offset, stratified positions.
    CounterRng offset_rng(seed, 0);
    const double u0 = offset_rng.uniform();
    const double dx = wigner.x_axes[0].dx(), dk = wigner.xi_axes[0].dx();
    double wsum = 0.0;
    std::size_t cell = 0;
    for (std::size_t i = 0; i < n_particles; ++i) {
        const double target = total * (double(i) + u0) / double(n_particles);
        while (cell + 1 < ncells && cumulative[cell] < target) ++cell;
        const std::size_t j = cell / nk, l = cell % nk;
        CounterRng jitter(seed, i + 1);
        const double x = wigner.x_axes[0].point(j) + (jitter.uniform() - 0.5) * dx;
        const double xi = wigner.xi_axes[0].point(l) + (jitter.uniform() - 0.5) * dk;
        mu.points[i] = {{x}, {xi}};
        const double h = std::max(husimi_field.values[cell], 0.0);
        const double ratio = (h > 0.0) ? wigner.values[cell] / h : 0.0;
        mu.weights[i] = ratio;
        wsum += ratio;
    }
    // Normalize the self-weighted estimator to the Wigner mass.
    if (std::abs(wsum) <= 1e-12) throw NumericalError("degenerate importance weights");
    const double scale = mass_w / wsum;
    for (auto& w : mu.weights) w *= scale;
    return mu;
}

std::vector<AxisSpec> refine_axes_for_eps(const std::vector<AxisSpec>& base, double eps,
                                          double xi_max) {
    std::vector<AxisSpec> out = base;
    for (auto& a : out) {
        double need = 1.5 * a.length() * xi_max / (M_PI * eps);
        need = std::max(need, a.length() / (std::sqrt(eps) / 4.0));  // coherent width rule
        std::size_t n = 1;
        while (double(n) < need) n *= 2;
        a.n = std::max<std::size_t>(n, 64);
    }
    return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

EgorovResult egorov_gap(const ConicalPotential& pot, const InitialStateSpec& spec,
                        const std::vector<SymbolSpec>& symbols, double t,
                        const std::vector<double>& eps_list, const EgorovOptions& opt) {
    if (symbols.empty()) throw ConfigError("egorov_gap needs at least one symbol");
    EgorovResult out;
    for (double eps : eps_list) {
        const std::vector<AxisSpec> axes =
            (opt.xi_max > 0.0) ? refine_axes_for_eps(opt.axes, eps, opt.xi_max) : opt.axes;
        const WavefunctionGrid psi0 = make_initial_state(spec, axes, eps);

        // Quantum side.
        const EvolveResult ev = evolve(pot, psi0, t, opt.dt, {t});
        const PhaseSpaceField wt = wigner_transform(ev.snapshots.back());

        // Classical side: particles realized from the initial Wigner data.
        const PhaseSpaceField w0 = wigner_transform(psi0);
        const PhaseSpaceField h0 = husimi(w0);
        ParticleMeasure mu0 = sample_wigner_measure(w0, h0, opt.n_particles, opt.seed);
        ParticleMeasure mut = pushforward(pot, mu0, t, opt.threads);

        EgorovRow row;
        row.eps = eps;
        for (const auto& a : symbols) {
            const double q = pair_symbol(a, wt);
            const double c = pair_measure(a, mut);
            row.quantum.push_back(q);
            row.classical.push_back(c);
            row.gap = std::max(row.gap, std::abs(q - c));
        }
        out.rows.push_back(std::move(row));
    }
    if (out.rows.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& r : out.rows) {
            xs.push_back(r.eps);
            ys.push_back(r.gap);
        }
        out.slope = fit_loglog_slope(xs, ys);
    }
    return out;
}

}  // namespace conical
