#include <doctest.h>

#include <cmath>

#include "conical/microlocal.hpp"
#include "conical/transport.hpp"

using namespace conical;

namespace {

const double kSqrt3 = std::sqrt(3.0);

InitialStateSpec coherent_spec(double q, double p) {
    InitialStateSpec s;
    s.kind = InitialStateSpec::Kind::coherent;
    s.q = {q};
    s.p = {p};
    return s;
}

}  // namespace

TEST_CASE("initial_measure") {
    auto mu = initial_measure(coherent_spec(-1.0, 1.0), 100, {{-2.0, 2.0}});
    REQUIRE(mu.size() == 1);
    CHECK(mu.points[0].x[0] == doctest::Approx(-1.0));
    CHECK(mu.points[0].xi[0] == doctest::Approx(1.0));
    CHECK(mu.total_mass() == doctest::Approx(1.0));

    // WKB: particles on the graph xi = grad S with |A|^2 midpoint weights.
    InitialStateSpec wkb;
    wkb.kind = InitialStateSpec::Kind::wkb;
    wkb.amplitude = Poly::constant(1, 1.0);
    wkb.phase = Poly(1, {Poly::Term{0.5, {2}}});  // S = x^2/2
    auto muw = initial_measure(wkb, 100, {{0.0, 1.0}});
    REQUIRE(muw.size() == 100);
    for (std::size_t i = 0; i < muw.size(); i += 13) {
        CHECK(muw.points[i].xi[0] == doctest::Approx(muw.points[i].x[0]));
        CHECK(muw.weights[i] == doctest::Approx(0.01));
    }
    CHECK(muw.total_mass() == doctest::Approx(1.0));

    auto mu1 = initial_measure(wkb, 1, {{0.0, 1.0}});
    REQUIRE(mu1.size() == 1);
    CHECK(mu1.points[0].x[0] == doctest::Approx(0.5));
    CHECK(mu1.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("pushforward through the crossing") {
    auto absx = make_abs_x_1d();
    auto mu = initial_measure(coherent_spec(-1.0, 1.0), 1, {{-2.0, 2.0}});

    auto same = pushforward(absx, mu, 0.0);
    CHECK(same.points[0].x[0] == doctest::Approx(-1.0));

    const double T = kSqrt3;  // past the crossing at sqrt(3)-1
    auto pushed = pushforward(absx, mu, T);
    // Closed form: s = T - (sqrt(3)-1) = 1 + ... after-crossing parabola.
    const double s = T - (kSqrt3 - 1.0);
    CHECK(pushed.points[0].x[0] == doctest::Approx(kSqrt3 * s - 0.5 * s * s).epsilon(1e-8));
    CHECK(pushed.points[0].xi[0] == doctest::Approx(kSqrt3 - s).epsilon(1e-8));
    CHECK(pushed.total_mass() == doctest::Approx(1.0));

    // Free motion sanity.
    auto free1 = make_free_1d();
    ParticleMeasure cloud;
    cloud.points = {{{0.5}, {-1.0}}, {{-0.25}, {0.5}}};
    cloud.weights = {0.25, 0.75};
    auto moved = pushforward(free1, cloud, 2.0);
    CHECK(moved.points[0].x[0] == doctest::Approx(0.5 - 2.0).epsilon(1e-10));
    CHECK(moved.points[1].x[0] == doctest::Approx(-0.25 + 1.0).epsilon(1e-10));
    CHECK(moved.total_mass() == doctest::Approx(1.0));

    // Composition consistency.
    auto two_leg = pushforward(absx, pushforward(absx, mu, 0.7), T - 0.7);
    CHECK(two_leg.points[0].x[0] == doctest::Approx(pushed.points[0].x[0]).epsilon(1e-8));
    CHECK(two_leg.points[0].xi[0] == doctest::Approx(pushed.points[0].xi[0]).epsilon(1e-8));

    // Non-generic propagation carries the particle index.
    auto neg = make_neg_abs_x_1d();
    ParticleMeasure bad;
    bad.points = {{{0.0}, {0.0}}};
    bad.weights = {1.0};
    CHECK_THROWS_AS(pushforward(neg, bad, 1.0), NonGenericCrossing);
}

TEST_CASE("weak_star_distance") {
    std::vector<std::pair<Vec, Vec>> centers = {{{0.0}, {0.0}}, {{1.0}, {0.5}}};
    auto symbols = standard_symbol_catalog(1, centers);

    ParticleMeasure a, b;
    a.points = {{{0.0}, {0.0}}};
    a.weights = {1.0};
    b.points = {{{1.0}, {0.5}}};
    b.weights = {1.0};

    CHECK(weak_star_distance(a, a, symbols) == doctest::Approx(0.0));

    double expect = 0.0;
    for (const auto& s : symbols)
        expect = std::max(expect, std::abs(s(a.points[0].x, a.points[0].xi) -
                                           s(b.points[0].x, b.points[0].xi)));
    CHECK(weak_star_distance(a, b, symbols) == doctest::Approx(expect));

    // Delta far outside every support vs the zero measure.
    ParticleMeasure farp, zero;
    farp.points = {{{-50.0}, {40.0}}};
    farp.weights = {1.0};
    CHECK(weak_star_distance(farp, zero, symbols) <= 1e-8);
}

TEST_CASE("wigner importance sampling reproduces pairings") {
    const double eps = 1.0 / 64;
    InitialStateSpec spec = coherent_spec(-0.5, 0.5);
    auto psi = make_initial_state(spec, {{-2.6, 2.6, 512}}, eps);
    auto w = wigner_transform(psi);
    auto h = husimi(w);
    auto mu = sample_wigner_measure(w, h, 20000, 7);

    CHECK(mu.total_mass() == doctest::Approx(w.mass()).epsilon(1e-10));

    std::vector<std::pair<Vec, Vec>> centers = {{{-0.5}, {0.5}}, {{-0.3}, {0.6}}};
    for (const auto& a : standard_symbol_catalog(1, centers)) {
        const double grid = pair_symbol(a, w);
        const double particles = pair_measure(a, mu);
        CHECK(particles == doctest::Approx(grid).epsilon(2e-3).scale(1.0));
    }

    // Determinism: same seed, same cloud.
    auto mu2 = sample_wigner_measure(w, h, 20000, 7);
    CHECK(mu2.points[12345].x[0] == mu.points[12345].x[0]);
    CHECK(mu2.weights[777] == mu.weights[777]);
}

TEST_CASE("egorov gap for free motion is sampling-limited") {
    auto free1 = make_free_1d();
    InitialStateSpec spec = coherent_spec(-1.0, 1.0);
    std::vector<std::pair<Vec, Vec>> centers = {{{-0.5}, {1.0}}, {{-0.6}, {0.9}}};
    auto symbols = standard_symbol_catalog(1, centers, 0.3);

    EgorovOptions opt;
    opt.axes = {{-4.0, 4.0, 512}};
    opt.n_particles = 10000;
    opt.seed = 11;
    auto res = egorov_gap(free1, spec, symbols, 0.5, {1.0 / 64}, opt);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].gap <= 1e-3);
}

TEST_CASE("egorov gaps do not depend on the thread count") {
    auto absx = make_abs_x_1d();
    InitialStateSpec spec = coherent_spec(-1.0, 1.0);
    std::vector<std::pair<Vec, Vec>> centers = {{{-0.3}, {1.3}}};
    auto symbols = standard_symbol_catalog(1, centers, 0.25);

    EgorovOptions opt;
    opt.axes = {{-2.6, 2.6, 256}};
    opt.n_particles = 2000;
    opt.seed = 21;
    opt.threads = 1;
    auto a = egorov_gap(absx, spec, symbols, 0.9, {1.0 / 32}, opt);
    opt.threads = 4;
    auto b = egorov_gap(absx, spec, symbols, 0.9, {1.0 / 32}, opt);
    REQUIRE(a.rows.size() == b.rows.size());
    CHECK(a.rows[0].gap == b.rows[0].gap);  // bitwise
    for (std::size_t s = 0; s < symbols.size(); ++s)
        CHECK(a.rows[0].classical[s] == b.rows[0].classical[s]);
}

TEST_CASE("coherent center tracks the classical trajectory") {
    // Smooth case: O(sqrt(eps)) with a frozen constant, before and after a
    // conical crossing for V = |x|.
    auto absx = make_abs_x_1d();
    const double eps = 1.0 / 64;
    auto psi0 = make_initial_state(coherent_spec(-1.0, 1.0), {{-2.6, 2.6, 512}}, eps);
    const double tc = kSqrt3 - 1.0;
    for (double t : {0.5 * tc, tc + 0.4}) {
        auto ev = evolve(absx, psi0, t, 0.0, {t});
        const PhasePoint cl = flow_endpoint(absx, {{-1.0}, {1.0}}, t);
        CHECK(std::abs(position_mean(ev.snapshots.back())[0] - cl.x[0]) <=
              1.0 * std::sqrt(eps));
        CHECK(std::abs(momentum_mean(ev.snapshots.back())[0] - cl.xi[0]) <=
              1.0 * std::sqrt(eps));
    }
}

TEST_CASE("transport equation residual on particle ensembles") {
    // d/dt <a, mu_t> = <xi . grad_x a - grad V . grad_xi a, mu_t> for a
    // supported away from S.
    auto absx = make_abs_x_1d();
    InitialStateSpec wkb;
    wkb.kind = InitialStateSpec::Kind::wkb;
    wkb.amplitude = Poly::constant(1, 1.0);
    wkb.phase = Poly(1, {Poly::Term{0.5, {2}}});
    auto mu0 = initial_measure(wkb, 400, {{0.3, 1.3}});

    SymbolSpec a;
    a.fx = {Factor1D::gaussian(1.0, 0.25)};
    a.fxi = {Factor1D::gaussian(1.0, 0.35)};

    const double t = 0.15, dt = 1e-4;
    auto mu_t = pushforward(absx, mu0, t);
    auto mu_p = pushforward(absx, mu0, t + dt);
    auto mu_m = pushforward(absx, mu0, t - dt);
    const double lhs = (pair_measure(a, mu_p) - pair_measure(a, mu_m)) / (2.0 * dt);

    double rhs = 0.0;
    for (std::size_t i = 0; i < mu_t.size(); ++i) {
        const Vec& x = mu_t.points[i].x;
        const Vec& xi = mu_t.points[i].xi;
        const Vec gv = absx.grad_V(x);
        const double dax = a.fx[0].derivative(1, x[0]) * a.fxi[0].derivative(0, xi[0]);
        const double daxi = a.fx[0].derivative(0, x[0]) * a.fxi[0].derivative(1, xi[0]);
        rhs += mu_t.weights[i] * (xi[0] * dax - gv[0] * daxi);
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5).scale(1.0));
}
