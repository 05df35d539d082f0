#include "conical/rk45.hpp"

#include <algorithm>

namespace conical {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// y5 - y4 error weights (e2 = 0).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

Rk45Result integrate_rk45(const Rhs& f, double t0, const Vec& y0, double t1,
                          const Rk45Options& opt) {
    const std::size_t n = y0.size();
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    Rk45Result res;
    res.t_end = t0;
    res.y_end = y0;
    if (span == 0.0) return res;

    Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), yerr(n);
    double t = t0;
    f(t, y, k1);

    double h = opt.initial_step;
    if (h == 0.0) {
        // Crude starter; the controller fixes it within a step or two.
        double ynorm = norm(y), fnorm = norm(k1);
        h = (fnorm > 1e-30) ? 0.01 * std::max(ynorm, 1.0) / fnorm : 0.01 * span;
        h = std::min(h, 0.1 * span);
        if (h <= 0.0) h = 1e-6 * span;
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    h *= dir;

    const double underflow = 1e-14 * std::max({std::abs(t0), std::abs(t1), 1.0});

    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        if (std::abs(t1 - t) < underflow) break;  // span exhausted to round-off
        if (std::abs(h) < underflow)
            throw StepSizeUnderflow("rk45 step size underflow near t = " + std::to_string(t));

        auto stage = [&](Vec& out, std::initializer_list<std::pair<double, const Vec*>> terms) {
            out = y;
            for (const auto& [c, k] : terms) axpy(h * c, *k, out);
        };
        stage(ytmp, {{a21, &k1}});
        f(t + h / 5, ytmp, k2);
        stage(ytmp, {{a31, &k1}, {a32, &k2}});
        f(t + 3 * h / 10, ytmp, k3);
        stage(ytmp, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        f(t + 4 * h / 5, ytmp, k4);
        stage(ytmp, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        f(t + 8 * h / 9, ytmp, k5);
        stage(ytmp, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        f(t + h, ytmp, k6);
        Vec ynew = y;
        axpy(h * b1, k1, ynew);
        axpy(h * b3, k3, ynew);
        axpy(h * b4, k4, ynew);
        axpy(h * b5, k5, ynew);
        axpy(h * b6, k6, ynew);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double sk = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sk) * (e / sk);
        }
        err = std::sqrt(err / double(n));

        if (err <= 1.0) {
            DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            ds.c1 = y;
            ds.c2.resize(n);
            ds.c3.resize(n);
            ds.c4.resize(n);
            ds.c5.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.c2[i] = ydiff;
                ds.c3[i] = bspl;
                ds.c4[i] = ydiff - h * k7[i] - bspl;
                ds.c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                d6 * k6[i] + d7 * k7[i]);
            }

            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++res.n_accepted;

            if (opt.on_step && !opt.on_step(ds)) {
                res.stopped_by_callback = true;
                res.t_end = t;
                res.y_end = y;
                return res;
            }
        } else {
            ++res.n_rejected;
        }

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
        if (opt.max_step > 0.0 && std::abs(h) > opt.max_step) h = dir * opt.max_step;
    }

    res.t_end = t;
    res.y_end = y;
    return res;
}

}  // namespace conical
