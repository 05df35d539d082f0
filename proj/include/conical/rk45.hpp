#ifndef CONICAL_RK45_HPP
#define CONICAL_RK45_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "conical/errors.hpp"
#include "conical/linalg.hpp"

namespace conical {

// One accepted Dormand-Prince 5(4) step together with its 4th-order
// continuous extension. eval(t) is valid for t in [t0, t0 + h] (or the
// reversed interval when h < 0).
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    Vec c1, c2, c3, c4, c5;  // contd5 coefficients, one entry per component

    Vec eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec y(c1.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
        return y;
    }

    Vec derivative(double t) const {
        // Analytic derivative of the quartic interpolant; used by event
        // localization, accuracy matches the interpolant order.
        const double th = (t - t0) / h;
        Vec y(c1.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double a = c2[i], b = c3[i], c = c4[i], d = c5[i];
            // d/dth of a*th + b*th(1-th) + c*th^2(1-th) + d*th^2(1-th)^2
            y[i] = a + b * (1.0 - 2.0 * th) + c * th * (2.0 - 3.0 * th) +
                   d * th * (2.0 - 6.0 * th + 4.0 * th * th);
            y[i] /= h;
        }
        return y;
    }
};

using Rhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct Rk45Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0: choose automatically
    double max_step = 0.0;      // 0: no cap beyond span
    // Called after every accepted step; return false to stop integration
    // (used for event handling). May inspect the dense step.
    std::function<bool(const DenseStep&)> on_step;
};

struct Rk45Result {
    double t_end = 0.0;
    Vec y_end;
    bool stopped_by_callback = false;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
};

// Integrates y' = f(t, y) from (t0, y0) to t1 (t1 < t0 integrates backward).
// Throws StepSizeUnderflow when the controller collapses.
Rk45Result integrate_rk45(const Rhs& f, double t0, const Vec& y0, double t1,
                          const Rk45Options& opt);

}  // namespace conical

#endif
