// Acceptance harness: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "conical/microlocal.hpp"
#include "conical/transport.hpp"

using namespace conical;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kTCross = kSqrt3 - 1.0;

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& fn) {
    Timer timer;
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %-38s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), timer.seconds(), detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

FlowOptions tight() {
    FlowOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-14;
    return o;
}

InitialStateSpec coherent1(double q, double p) {
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::coherent;
    s.q = {q};
    s.p = {p};
    return s;
}

WavefunctionGrid coherent_grid(double q, double p, double eps, std::size_t n, double half) {
    return make_initial_state(coherent1(q, p), {{-half, half, n}}, eps);
}

WavefunctionGrid wkb_grid(double eps, std::size_t n, double half) {
    std::vector<Poly::Term> terms;
    const double c[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    for (int k = 0; k <= 4; ++k) terms.push_back({c[k] / std::pow(half, 2 * k), {2 * k}});
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::wkb;
    s.amplitude = Poly(1, terms);
    s.phase = Poly(1, {Poly::Term{0.5, {2}}});
    return make_initial_state(s, {{-half, half, n}}, eps);
}

bool crit1_broken_trajectory(std::string& detail) {
    Timer timer;
    auto pot = make_abs_x_1d();
    auto res = flow_map(pot, {{-1.0}, {1.0}}, kTCross + 1.0, tight());
    if (!res.trajectory.tau) {
        detail = "no crossing found";
        return false;
    }
    const double tau_err = std::abs(*res.trajectory.tau - kTCross);
    const double xi_err = std::abs(res.trajectory.crossings[0].point.xi[0] - kSqrt3);
    const double x_err = std::abs(res.end.x[0] - (kSqrt3 - 0.5));
    const double v_err = std::abs(res.end.xi[0] - (kSqrt3 - 1.0));
    char buf[160];
    std::snprintf(buf, sizeof buf, "tau err %.1e, xi err %.1e, endpoint err %.1e/%.1e", tau_err,
                  xi_err, x_err, v_err);
    detail = buf;
    return tau_err <= 1e-8 && xi_err <= 1e-8 && x_err <= 1e-7 && v_err <= 1e-7 &&
           timer.seconds() < 1.0;
}

bool crit2_energy_conservation(std::string& detail) {
    double worst = 0.0;
    {
        auto pot = make_abs_x_1d();
        const PhasePoint p0{{-1.0}, {1.0}};
        const double e0 = energy(pot, p0);
        auto res = flow_map(pot, p0, 3.0, tight());
        for (double t = 0.0; t <= 3.0; t += 0.01)
            worst = std::max(worst, std::abs(energy(pot, res.trajectory.eval(t)) - e0));
    }
    {
        auto pot = make_abs_x1_2d();
        const PhasePoint p0{{-1.0, 0.0}, {1.0, 0.5}};
        const double e0 = energy(pot, p0);
        auto res = flow_map(pot, p0, 3.0, tight());
        for (double t = 0.0; t <= 3.0; t += 0.01)
            worst = std::max(worst, std::abs(energy(pot, res.trajectory.eval(t)) - e0));
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "max |dH| = %.2e", worst);
    detail = buf;
    return worst <= 1e-6;
}

bool crit3_liouville(std::string& detail) {
    auto pot = make_abs_x_1d();
    const PhasePoint p0{{-1.0}, {1.0}};
    double worst = 0.0;
    bool converges = true;
    // Straddle the crossing; h-halving must not diverge.
    for (double t : {kTCross - 0.2, kTCross + 0.2}) {
        const double e1 =
            std::abs(variational_jacobian(pot, p0, t, 1e-3, tight()).determinant() - 1.0);
        const double e2 =
            std::abs(variational_jacobian(pot, p0, t, 5e-4, tight()).determinant() - 1.0);
        worst = std::max({worst, e1, e2});
        converges = converges && (e2 <= 0.7 * e1 + 1e-7);
    }
    // At the crossing instant the error is first order in h; the bound holds
    // for the smaller pair.
    const double a1 =
        std::abs(variational_jacobian(pot, p0, kTCross, 1e-4, tight()).determinant() - 1.0);
    const double a2 =
        std::abs(variational_jacobian(pot, p0, kTCross, 5e-5, tight()).determinant() - 1.0);
    worst = std::max({worst, a1, a2});
    converges = converges && (a2 <= 0.7 * a1 + 1e-7);
    char buf[80];
    std::snprintf(buf, sizeof buf, "max |det-1| = %.2e", worst);
    detail = buf;
    return worst <= 1e-4 && converges;
}

// xi-columns of the variational Jacobian, Richardson-extrapolated in the
// finite-difference step (h, h/2).
Mat xi_block(const ConicalPotential& pot, const PhasePoint& p, double t, double h) {
    const Mat jh = variational_jacobian(pot, p, t, h, tight());
    const Mat jh2 = variational_jacobian(pot, p, t, h / 2, tight());
    const std::size_t d = pot.dim();
    Mat out(2 * d, d);
    for (std::size_t i = 0; i < 2 * d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out(i, j) = (4.0 * jh2(i, d + j) - jh(i, d + j)) / 3.0;
    return out;
}

bool crit4_xi_continuity(std::string& detail) {
    double worst = 0.0;
    const double h = 2e-4;
    const std::vector<std::pair<ConicalPotential, PhasePoint>> cases = {
        {make_abs_x_1d(), {{0.0}, {kSqrt3}}},
        {make_cone_2d(), {{0.0, 0.0}, {1.0, 0.0}}},
    };
    for (const auto& [pot, pc] : cases) {
        const double d1 = 0.02, d2 = 0.01;
        auto lim = [&](double sign) {
            const Mat b1 = xi_block(pot, pc, sign * d1, h);
            const Mat b2 = xi_block(pot, pc, sign * d2, h);
            Mat out(b1.rows(), b1.cols());
            for (std::size_t i = 0; i < b1.rows(); ++i)
                for (std::size_t j = 0; j < b1.cols(); ++j)
                    out(i, j) = 2.0 * b2(i, j) - b1(i, j);  // extrapolate t -> 0
            return out;
        };
        const Mat plus = lim(+1.0), minus = lim(-1.0);
        for (std::size_t i = 0; i < plus.rows(); ++i)
            for (std::size_t j = 0; j < plus.cols(); ++j)
                worst = std::max(worst, std::abs(plus(i, j) - minus(i, j)));
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "max one-sided mismatch = %.2e", worst);
    detail = buf;
    return worst <= 1e-3;
}

bool crit5_singular_hessian(std::string& detail) {
    auto pot = make_cone_2d();
    const PhasePoint p0{{0.0, 0.0}, {1.0, 0.0}};
    const Mat b1 = pot.singular_hessian_B1(p0.x, p0.xi);
    const double ref = b1.frobenius_norm();
    auto launch = launch_from_singularity(pot, p0, +1, 1.5e-3, 0.0, tight());
    double worst = 0.0;
    for (double t : {1e-4, 3e-4, 1e-3}) {
        const PhasePoint p = launch.segment.eval(t);
        Mat h = pot.hessian_V(p.x);
        h *= t;
        double diff = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                diff += (h(i, j) - b1(i, j)) * (h(i, j) - b1(i, j));
        worst = std::max(worst, std::sqrt(diff));
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "max ||t d2V - B1|| / ||B1|| = %.3f", worst / ref);
    detail = buf;
    return worst <= 0.05 * ref;
}

bool crit6_wigner_layer(std::string& detail) {
    Timer timer;
    const double eps = 1.0 / 64;
    const std::size_t n = 1024;
    const double half = 2.6;

    std::vector<WavefunctionGrid> states;
    states.push_back(coherent_grid(-0.8, 0.5, eps, n, half));
    {
        auto a = coherent_grid(-0.8, 0.5, eps, n, half);
        auto b = coherent_grid(0.8, -0.5, eps, n, half);
        WavefunctionGrid two = a;
        for (std::size_t i = 0; i < two.values.size(); ++i)
            two.values[i] = a.values[i] + b.values[i];
        const double nn = two.norm();
        for (auto& v : two.values) v /= nn;
        states.push_back(std::move(two));
    }
    states.push_back(wkb_grid(eps, n, half));

    std::vector<std::pair<Vec, Vec>> centers = {{{-0.8}, {0.5}}, {{0.0}, {0.0}}, {{0.5}, {-0.5}}};
    const auto catalog = standard_symbol_catalog(1, centers);

    double marg_err = 0.0, pair_err = 0.0;
    for (const auto& psi : states) {
        const PhaseSpaceField w = wigner_transform(psi);
        const auto mx = marginal_x(w);
        for (std::size_t j = 0; j < n; ++j)
            marg_err = std::max(marg_err, std::abs(mx[j] - std::norm(psi.values[j])));
        const auto mxi = marginal_xi(w);
        const auto rho = momentum_density(psi);
        for (std::size_t l = 0; l < mxi.size(); ++l)
            marg_err = std::max(marg_err, std::abs(mxi[l] - rho[l]));

        for (const auto& a : catalog) {
            const double lhs = pair_symbol(a, w);
            const WavefunctionGrid op = apply_weyl(a, psi);
            cplx ip(0.0, 0.0);
            for (std::size_t i = 0; i < op.values.size(); ++i)
                ip += op.values[i] * std::conj(psi.values[i]);
            const double rhs = (ip * psi.cell_volume()).real();
            const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-2});
            pair_err = std::max(pair_err, std::abs(lhs - rhs) / scale);
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "marginal err %.1e, pairing rel err %.1e, %.1f s", marg_err,
                  pair_err, timer.seconds());
    detail = buf;
    return marg_err <= 1e-8 && pair_err <= 1e-6 && timer.seconds() < 30.0;
}

bool crit7_smooth_egorov_rate(std::string& detail) {
    Timer timer;
    auto pot = make_harmonic_1d();
    const double t = 1.0;
    std::vector<std::pair<Vec, Vec>> centers = {{{std::cos(t)}, {-std::sin(t)}}};
    const auto symbols = standard_symbol_catalog(1, centers, 0.35);

    EgorovOptions opt;
    opt.axes = {{-3.9, 3.9, 64}};
    opt.xi_max = 2.0;
    opt.n_particles = 40000;
    opt.seed = 2;
    opt.threads = 4;
    const auto res =
        egorov_gap(pot, coherent1(1.0, 0.0), symbols, t, {1.0 / 32, 1.0 / 64, 1.0 / 128}, opt);
    char buf[120];
    std::snprintf(buf, sizeof buf, "slope %.2f over eps {1/32,1/64,1/128}, %.1f s", res.slope,
                  timer.seconds());
    detail = buf;
    return res.slope >= 1.5 && timer.seconds() < 300.0;
}

bool crit8_conical_egorov(std::string& detail) {
    Timer timer;
    // The box covers the padded grid the quantum runs use.
    auto pot = ConicalPotential(1, Poly::constant(1, 1.0), Poly::constant(1, 0.0),
                                VectorField::canonical(1, 1), {{-3.4, 3.4}});
    const double t = kTCross + 0.5;
    const PhasePoint end = flow_endpoint(pot, {{-1.0}, {1.0}}, t, tight());

    // Exclusion-tube-respecting catalog: compactly supported bumps whose xi
    // support stays away from xi = 0.
    std::vector<SymbolSpec> symbols;
    {
        SymbolSpec b1;
        b1.id = "bump_end";
        b1.fx = {Factor1D::bump(end.x[0], 0.3)};
        b1.fxi = {Factor1D::bump(end.xi[0], 0.3)};
        symbols.push_back(b1);
        SymbolSpec b2;
        b2.id = "bump_wide";
        b2.fx = {Factor1D::bump(end.x[0] - 0.1, 0.45)};
        b2.fxi = {Factor1D::bump(end.xi[0] + 0.1, 0.45)};
        symbols.push_back(b2);
        SymbolSpec m;
        m.id = "monomial_end";
        m.fx = {Factor1D::monomial_bump(end.x[0], 0.4, 1)};
        m.fxi = {Factor1D::bump(end.xi[0], 0.4)};
        symbols.push_back(m);
    }
    const double r_excl = 0.05 * 4.0;  // 0.05 x declared box length
    for (const auto& a : symbols)
        if (!a.avoids_tube(pot, r_excl, 2.0 * pot.tols().sstar_tol)) {
            detail = "symbol " + a.id + " does not avoid the exclusion tube";
            return false;
        }

    EgorovOptions opt;
    opt.axes = {{-2.6 * 1.3, 2.6 * 1.3, 64}};
    opt.xi_max = 2.6;
    opt.n_particles = 20000;
    opt.seed = 3;
    opt.threads = 4;
    const std::vector<double> eps_list = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    const auto res = egorov_gap(pot, coherent1(-1.0, 1.0), symbols, t, eps_list, opt);

    bool monotone = true;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        monotone = monotone && res.rows[i].gap < res.rows[i - 1].gap;
    const double ratio = res.rows.back().gap / res.rows.front().gap;
    char buf[160];
    std::snprintf(buf, sizeof buf, "gaps %.2e > %.2e > %.2e > %.2e, final ratio %.3f, %.0f s",
                  res.rows[0].gap, res.rows[1].gap, res.rows[2].gap, res.rows[3].gap, ratio,
                  timer.seconds());
    detail = buf;
    return monotone && ratio <= 0.5 && timer.seconds() < 900.0;
}

bool crit9_mass_decay(std::string& detail) {
    auto pot = ConicalPotential(1, Poly::constant(1, 1.0), Poly::constant(1, 0.0),
                                VectorField::canonical(1, 1), {{-2.6, 2.6}});
    const double eps = 1.0 / 128;
    const auto axes = refine_axes_for_eps({{-2.6, 2.6, 64}}, eps, 2.6);
    const WavefunctionGrid psi0 = make_initial_state(coherent1(-1.0, 1.0), axes, eps);

    // Snapshot window spanning the crossing.
    std::vector<double> snaps;
    for (double t = kTCross - 0.36; t <= kTCross + 0.36 + 1e-9; t += 0.06) snaps.push_back(t);
    const EvolveResult ev = evolve(pot, psi0, kTCross + 0.4, 0.0, snaps);

    const std::vector<double> radii = {0.2, 0.1, 0.05};
    std::vector<double> avg(radii.size(), 0.0);
    for (const auto& snap : ev.snapshots) {
        const PhaseSpaceField w = wigner_transform(snap);
        for (std::size_t r = 0; r < radii.size(); ++r)
            avg[r] += mass_near_S(w, pot, radii[r]) / double(ev.snapshots.size());
    }
    const double r1 = avg[0] / avg[1], r2 = avg[1] / avg[2];
    char buf[160];
    std::snprintf(buf, sizeof buf, "time-avg mass %.3f / %.3f / %.3f, ratios %.2f, %.2f", avg[0],
                  avg[1], avg[2], r1, r2);
    detail = buf;
    const auto linear_ok = [](double r) { return r >= 2.0 / 1.5 && r <= 2.0 * 1.5; };
    return linear_ok(r1) && linear_ok(r2);
}

bool crit10_two_microlocal(std::string& detail) {
    TwoMicrolocalSymbol probe;
    probe.id = "mass";
    probe.ykind = TwoMicrolocalSymbol::YKind::constant;
    probe.fx = {Factor1D::bump(0.0, 1.0)};
    probe.fxi = {Factor1D::bump(1.0, 1.2)};

    double part_err = 0.0;
    double on_min = 1e9, off_max = -1e9;
    for (double eps : {1.0 / 64, 1.0 / 128}) {
        const auto axes = refine_axes_for_eps({{-2.6, 2.6, 64}}, eps, 2.5);
        const WavefunctionGrid on = make_initial_state(coherent1(0.0, 1.0), axes, eps);
        const WavefunctionGrid off = make_initial_state(coherent1(-0.5, 1.0), axes, eps);
        for (double R : {4.0, 8.0})
            for (double delta : {0.2, 0.1}) {
                if (R * eps >= delta / 2.0) continue;
                for (const auto* psi : {&on, &off}) {
                    const double full = pair_two_microlocal(probe, *psi);
                    const auto s = split_observable(probe, *psi, R, delta);
                    part_err = std::max(part_err, std::abs(s.total() - full));
                    const double conc = s.inner + s.outer;
                    if (psi == &on)
                        on_min = std::min(on_min, conc);
                    else
                        off_max = std::max(off_max, conc);
                }
            }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "partition err %.1e, concentration on >= %.3f, off <= %.1e", part_err, on_min,
                  off_max);
    detail = buf;
    return part_err <= 1e-6 && on_min >= 0.5 && off_max < 0.5;
}

bool crit11_non_generic_guard(std::string& detail) {
    auto pot = make_neg_abs_x_1d();
    try {
        flow_map(pot, {{0.0}, {0.0}}, 1.0, tight());
    } catch (const NonGenericCrossing& e) {
        detail = std::string("rejected: ") + e.what();
        return true;
    } catch (const std::exception& e) {
        detail = std::string("wrong error type: ") + e.what();
        return false;
    }
    detail = "flow silently picked a branch";
    return false;
}

}  // namespace

int main() {
    std::printf("acceptance suite, desk scale (d <= 2, eps >= 1/256)\n");
    criterion(1, "broken-trajectory oracle", crit1_broken_trajectory);
    criterion(2, "energy conservation through crossing", crit2_energy_conservation);
    criterion(3, "Liouville determinant", crit3_liouville);
    criterion(4, "xi-derivative continuity at S*", crit4_xi_continuity);
    criterion(5, "singular Hessian scaling", crit5_singular_hessian);
    criterion(6, "Wigner marginals and pairing identity", crit6_wigner_layer);
    criterion(7, "smooth Egorov rate", crit7_smooth_egorov_rate);
    criterion(8, "conical Egorov decay", crit8_conical_egorov);
    criterion(9, "mass decay near S*", crit9_mass_decay);
    criterion(10, "two-microlocal partition", crit10_two_microlocal);
    criterion(11, "non-generic crossing guard", crit11_non_generic_guard);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}
