#include "conical/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace conical {

namespace {

constexpr int kEventScanSamples = 12;
constexpr int kMaxLaunchRetries = 8;
constexpr std::size_t kMaxCrossings = 10000;

Vec pack(const PhasePoint& p) {
    Vec y(p.x.size() + p.xi.size());
    std::copy(p.x.begin(), p.x.end(), y.begin());
    std::copy(p.xi.begin(), p.xi.end(), y.begin() + p.x.size());
    return y;
}

PhasePoint unpack(const Vec& y, std::size_t d) {
    PhasePoint p;
    p.x.assign(y.begin(), y.begin() + d);
    p.xi.assign(y.begin() + d, y.begin() + 2 * d);
    return p;
}

PhasePoint reversed(PhasePoint p) {
    for (auto& c : p.xi) c = -c;
    return p;
}

// Flip the time axis and the momentum components of a recorded segment,
// mapping the forward solution of the reversed system onto backward time.
Segment reverse_segment(Segment s) {
    const std::size_t d = s.dim;
    for (auto& st : s.steps) {
        st.t0 = -st.t0;
        st.h = -st.h;
        auto flip = [&](Vec& c) {
            for (std::size_t i = d; i < 2 * d && i < c.size(); ++i) c[i] = -c[i];
        };
        flip(st.c1);
        flip(st.c2);
        flip(st.c3);
        flip(st.c4);
        flip(st.c5);
    }
    std::reverse(s.steps.begin(), s.steps.end());
    std::swap(s.t_begin, s.t_end);
    s.t_begin = -s.t_begin;
    s.t_end = -s.t_end;
    return s;
}

double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 80) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Snap a near-hit onto S; for the canonical family this zeroes the leading
// coordinates, otherwise one Newton step on g (the residual is already at
// most hit_tol).
void snap_to_s(const ConicalPotential& pot, Vec& x) {
    if (pot.g_field().is_canonical()) {
        for (std::size_t i = 0; i < pot.codim(); ++i) x[i] = 0.0;
        return;
    }
    for (int it = 0; it < 5; ++it) {
        Vec gv = pot.g(x);
        if (norm(gv) <= pot.tols().g_zero_tol) return;
        const Mat j = pot.dg(x);  // p x d, full rank on the box
        // Least-norm correction dx = -J^T (J J^T)^{-1} g, p <= 2 here.
        const std::size_t p = j.rows();
        Mat jjt(p, p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) {
                double s = 0.0;
                for (std::size_t k = 0; k < j.cols(); ++k) s += j(a, k) * j(b, k);
                jjt(a, b) = s;
            }
        Vec lam(p, 0.0);
        if (p == 1) {
            lam[0] = gv[0] / jjt(0, 0);
        } else {
            const double det = jjt(0, 0) * jjt(1, 1) - jjt(0, 1) * jjt(1, 0);
            lam[0] = (jjt(1, 1) * gv[0] - jjt(0, 1) * gv[1]) / det;
            lam[1] = (jjt(0, 0) * gv[1] - jjt(1, 0) * gv[0]) / det;
        }
        const Vec dx = j.apply_transposed(lam);
        for (std::size_t k = 0; k < x.size(); ++k) x[k] -= dx[k];
    }
}

struct EventScan {
    std::optional<double> t_hit;
    double min_g = std::numeric_limits<double>::infinity();
};

// Scans one dense step for a crossing: a sign change of g (p = 1) or a local
// minimum of |g|^2 dipping below hit_tol^2 (any p). Also tracks min |g|.
EventScan scan_step(const ConicalPotential& pot, const DenseStep& ds, std::size_t d) {
    EventScan out;
    const std::size_t p = pot.codim();
    const double ta = ds.t0, tb = ds.t0 + ds.h;

    auto g_at = [&](double t) { return pot.g(unpack(ds.eval(t), d).x); };
    auto m_at = [&](double t) {
        const Vec gv = g_at(t);
        return dot(gv, gv);
    };

    std::array<double, kEventScanSamples> ts, ms;
    std::array<double, kEventScanSamples> s1;  // first component, sign tracking for p = 1
    for (int i = 0; i < kEventScanSamples; ++i) {
        ts[i] = ta + (tb - ta) * double(i) / double(kEventScanSamples - 1);
        const Vec gv = g_at(ts[i]);
        ms[i] = dot(gv, gv);
        s1[i] = gv[0];
        out.min_g = std::min(out.min_g, std::sqrt(ms[i]));
    }

    const double hit2 = pot.tols().hit_tol * pot.tols().hit_tol;

    if (p == 1) {
        for (int i = 0; i + 1 < kEventScanSamples; ++i) {
            if (s1[i] == 0.0) {
                out.t_hit = ts[i];
                return out;
            }
            if (s1[i] * s1[i + 1] < 0.0) {
                double a = ts[i], b = ts[i + 1], fa = s1[i];
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = g_at(mid)[0];
                    if (fm == 0.0 || (b - a) < 1e-16 * (1.0 + std::abs(mid))) {
                        a = b = mid;
                        break;
                    }
                    if (fa * fm < 0.0) {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                out.t_hit = 0.5 * (a + b);
                return out;
            }
        }
    }

    // Local minima of |g|^2 over the interior samples.
    for (int i = 1; i + 1 < kEventScanSamples; ++i) {
        if (ms[i] <= ms[i - 1] && ms[i] <= ms[i + 1]) {
            const double tmin = golden_min(m_at, ts[i - 1], ts[i + 1]);
            const double mmin = m_at(tmin);
            out.min_g = std::min(out.min_g, std::sqrt(mmin));
            if (mmin < hit2) {
                out.t_hit = tmin;
                return out;
            }
        }
    }
    return out;
}

double launch_window(const ConicalPotential& pot, const PhasePoint& p) {
    const Vec f = pot.one_sided_force(p.x, p.xi, +1);
    const double fn = std::max(norm(f), 1e-12);
    const double charac = std::max(norm(p.xi), 1e-6) / fn;
    return 1e-3 * charac;
}

}  // namespace

PhasePoint Segment::eval(double t) const {
    const double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
    const double tc = std::clamp(t, lo, hi);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        const double slo = std::min(it->t0, it->t0 + it->h);
        const double shi = std::max(it->t0, it->t0 + it->h);
        if (tc >= slo - 1e-12 && tc <= shi + 1e-12) return unpack(it->eval(tc), dim);
    }
    return unpack(steps.back().eval(tc), dim);
}

PhasePoint BrokenTrajectory::eval(double t) const {
    for (const auto& s : segments)
        if (s.contains(t)) return s.eval(t);
    if (segments.empty()) throw NumericalError("empty trajectory");
    const bool fwd = segments.front().t_begin <= segments.back().t_end;
    if ((fwd && t < segments.front().t_begin) || (!fwd && t > segments.front().t_begin))
        return segments.front().eval(segments.front().t_begin);
    return segments.back().eval(segments.back().t_end);
}

std::pair<Vec, Vec> hamiltonian_rhs(const ConicalPotential& pot, const PhasePoint& p) {
    Vec f = pot.grad_V(p.x);
    for (auto& c : f) c = -c;
    return {p.xi, f};
}

double energy(const ConicalPotential& pot, const PhasePoint& p) {
    return 0.5 * dot(p.xi, p.xi) + pot.V(p.x);
}

namespace {

Rhs smooth_rhs(const ConicalPotential& pot) {
    const std::size_t d = pot.dim();
    return [&pot, d](double, const Vec& y, Vec& dy) {
        dy.resize(2 * d);
        Vec x(y.begin(), y.begin() + d);
        const Vec f = pot.grad_V_raw(x);
        for (std::size_t i = 0; i < d; ++i) {
            dy[i] = y[d + i];
            dy[d + i] = -f[i];
        }
    };
}

// Sharpens a dense-output event candidate by short re-integrations from the
// last accepted state; immune to interpolation error on steps that straddled
// the kink.
double refine_event_time(const ConicalPotential& pot, const DenseStep& ds, double t_guess) {
    const std::size_t d = ds.c1.size() / 2;
    const Rhs rhs = smooth_rhs(pot);
    const Vec y0(ds.c1.begin(), ds.c1.begin() + 2 * d);

    Rk45Options ro;
    ro.rel_tol = 1e-12;
    ro.abs_tol = 1e-14;

    auto state_at = [&](double t) {
        if (std::abs(t - ds.t0) < 1e-300) return y0;
        return integrate_rk45(rhs, ds.t0, y0, t, ro).y_end;
    };
    auto g_at = [&](double t) {
        const Vec y = state_at(t);
        return pot.g(Vec(y.begin(), y.begin() + d));
    };

    double t = t_guess;
    if (pot.codim() == 1) {
        // Newton on g1(x(t)); the slope is dg xi.
        for (int it = 0; it < 6; ++it) {
            const Vec y = state_at(t);
            const Vec x(y.begin(), y.begin() + d);
            const Vec xi(y.begin() + d, y.end());
            const double val = pot.g(x)[0];
            const double slope = pot.dg(x).apply(xi)[0];
            if (std::abs(slope) < 1e-300) break;
            const double dt = val / slope;
            t -= dt;
            if (std::abs(dt) < 1e-16 * std::max(1.0, std::abs(t))) break;
        }
        return t;
    }
    // p >= 2: minimize |g|^2 by golden section around the candidate.
    const double delta = std::abs(ds.h) / double(kEventScanSamples - 1);
    auto m_at = [&](double s) {
        const Vec gv = g_at(s);
        return dot(gv, gv);
    };
    return golden_min(m_at, t - delta, t + delta, 60);
}

}  // namespace

SmoothResult integrate_smooth(const ConicalPotential& pot, const PhasePoint& p0,
                              double t0, double t1, const FlowOptions& opt) {
    const std::size_t d = pot.dim();
    if (pot.on_singular_set(p0.x))
        throw OnSingularSet("integrate_smooth started on S; use launch_from_singularity");

    const Rhs rhs = smooth_rhs(pot);

    SmoothResult res;
    res.segment.t_begin = t0;
    res.segment.dim = d;
    res.min_g_norm = pot.g_norm(p0.x);

    std::optional<double> t_hit;
    DenseStep hit_step;

    Rk45Options ro;
    ro.rel_tol = opt.rel_tol;
    ro.abs_tol = opt.abs_tol;
    ro.max_step = opt.max_step;
    ro.on_step = [&](const DenseStep& ds) {
        const Vec y_end = ds.eval(ds.t0 + ds.h);
        if (!pot.inside_box(Vec(y_end.begin(), y_end.begin() + d), 1e-9 * pot.box_diameter())) {
            std::ostringstream os;
            os << "trajectory left the working box near t = " << ds.t0 + ds.h;
            throw OutOfBox(os.str());
        }
        if (!pot.has_singularity()) {
            if (opt.record_dense)
                res.segment.steps.push_back(ds);
            else if (res.segment.steps.empty())
                res.segment.steps.push_back(ds);
            else
                res.segment.steps.back() = ds;
            return true;
        }
        const EventScan scan = scan_step(pot, ds, d);
        res.min_g_norm = std::min(res.min_g_norm, scan.min_g);
        if (opt.record_dense || scan.t_hit || res.segment.steps.empty())
            res.segment.steps.push_back(ds);
        else
            res.segment.steps.back() = ds;
        if (scan.t_hit) {
            t_hit = scan.t_hit;
            hit_step = ds;
            return false;
        }
        return true;
    };

    const Rk45Result rr = integrate_rk45(rhs, t0, pack(p0), t1, ro);

    if (t_hit) {
        const double tc = refine_event_time(pot, hit_step, *t_hit);
        // Recompute the state at tc by re-integration from the step anchor.
        Rk45Options tight;
        tight.rel_tol = 1e-12;
        tight.abs_tol = 1e-14;
        Vec anchor(hit_step.c1.begin(), hit_step.c1.begin() + 2 * d);
        Vec yc = (std::abs(tc - hit_step.t0) < 1e-300)
                     ? anchor
                     : integrate_rk45(rhs, hit_step.t0, anchor, tc, tight).y_end;
        PhasePoint at = unpack(yc, d);

        // Incoming sign convention: (dg xi) . g < 0 just before the hit.
        const double back = std::max(1e-6 * std::abs(hit_step.h), 1e-12);
        const PhasePoint before = unpack(
            integrate_rk45(rhs, hit_step.t0, anchor, tc - std::copysign(back, hit_step.h), tight)
                .y_end,
            d);
        const double s_in = dot(pot.dg(before.x).apply(before.xi), pot.g(before.x));

        snap_to_s(pot, at.x);
        CrossingEvent ev = classify_crossing(pot, tc, at);
        if (ev.generic && !(s_in < 0.0)) {
            std::ostringstream os;
            os << "crossing at t = " << tc << " violates the incoming sign convention";
            throw NonGenericCrossing(os.str());
        }
        res.event = ev;
        res.end = at;
        res.segment.t_end = tc;
    } else {
        res.end = unpack(rr.y_end, d);
        res.segment.t_end = rr.t_end;
    }
    return res;
}

CrossingEvent classify_crossing(const ConicalPotential& pot, double t_cross,
                                const PhasePoint& on_s) {
    if (pot.g_norm(on_s.x) > pot.tols().hit_tol)
        throw NumericalError("classify_crossing: point is not on S");
    CrossingEvent ev;
    ev.t_cross = t_cross;
    ev.point = on_s;
    const double margin = pot.dg_xi_norm(on_s.x, on_s.xi);
    // Branch switching is only defined under the w > 0 sign convention; an
    // attractive-side hit keeps no unique continuation.
    ev.generic = margin > pot.tols().sstar_tol && pot.w(on_s.x) > 0.0;
    if (ev.generic) ev.omega0 = pot.omega0(on_s.x, on_s.xi);
    return ev;
}

LaunchResult launch_from_singularity(const ConicalPotential& pot, const PhasePoint& p0,
                                     int side, double tau_launch, double t0,
                                     const FlowOptions& opt) {
    const std::size_t d = pot.dim();
    const std::size_t p = pot.codim();
    if (!pot.on_singular_set(p0.x))
        throw NumericalError("launch_from_singularity: point is not on S");

    const PhasePoint start = (side >= 0) ? p0 : reversed(p0);
    const Vec dgxi0 = pot.dg(start.x).apply(start.xi);
    const double dgxi0_norm = norm(dgxi0);
    if (dgxi0_norm <= pot.tols().sstar_tol)
        throw NonGenericPoint("launch requires a point of S*");
    Vec om0 = dgxi0;
    for (auto& c : om0) c /= dgxi0_norm;

    // State (x, xi, z) with z(s) = g(x_s) - s dg(x0)xi0, so q = s dg(x0)xi0 + z
    // equals g along the solution and q/|q| extends smoothly to omega0 at s = 0.
    Rhs rhs = [&, d, p](double s, const Vec& y, Vec& dy) {
        dy.resize(2 * d + p);
        Vec x(y.begin(), y.begin() + d);
        Vec xi(y.begin() + d, y.begin() + 2 * d);
        Vec q(p);
        for (std::size_t i = 0; i < p; ++i) q[i] = s * dgxi0[i] + y[2 * d + i];
        const double qn = norm(q);
        Vec dir = om0;
        if (qn > 0.0) {
            dir = q;
            for (auto& c : dir) c /= qn;
        }
        const Mat jac = pot.dg(x);
        // -grad V0 - |q| grad w - w tdg dir
        Vec fr = pot.grad_V0(x);
        axpy(qn, pot.grad_w(x), fr);
        axpy(pot.w(x), jac.apply_transposed(dir), fr);
        for (auto& c : fr) c = -c;
        const Vec dgxi = jac.apply(xi);
        for (std::size_t i = 0; i < d; ++i) {
            dy[i] = xi[i];
            dy[d + i] = fr[i];
        }
        for (std::size_t i = 0; i < p; ++i) dy[2 * d + i] = dgxi[i] - dgxi0[i];
    };

    double tau = tau_launch;
    for (int attempt = 0; attempt <= kMaxLaunchRetries; ++attempt) {
        bool ball_violated = false;
        Segment seg;
        seg.dim = d;
        seg.t_begin = 0.0;

        Rk45Options ro;
        ro.rel_tol = opt.rel_tol;
        ro.abs_tol = opt.abs_tol;
        ro.on_step = [&](const DenseStep& ds) {
            const double s_end = ds.t0 + ds.h;
            if (s_end > 0.0) {
                double zn = 0.0;
                const Vec y = ds.eval(s_end);
                for (std::size_t i = 0; i < p; ++i) zn += y[2 * d + i] * y[2 * d + i];
                zn = std::sqrt(zn) / s_end;
                if (zn > 0.5 * dgxi0_norm) {
                    ball_violated = true;
                    return false;
                }
            }
            seg.steps.push_back(ds);
            return true;
        };

        Vec y0 = pack(start);
        y0.resize(2 * d + p, 0.0);
        const Rk45Result rr = integrate_rk45(rhs, 0.0, y0, tau, ro);

        if (ball_violated) {
            tau *= 0.5;
            continue;
        }

        seg.t_end = rr.t_end;
        LaunchResult out;
        out.tau_used = rr.t_end;
        PhasePoint end = unpack(rr.y_end, d);

        if (side >= 0) {
            for (auto& st : seg.steps) st.t0 += t0;
            seg.t_begin = t0;
            seg.t_end = t0 + rr.t_end;
            out.segment = std::move(seg);
            out.end = end;
        } else {
            Segment rev = reverse_segment(seg);
            for (auto& st : rev.steps) st.t0 += t0;
            rev.t_begin += t0;
            rev.t_end += t0;
            out.segment = std::move(rev);
            out.end = reversed(end);
        }
        return out;
    }
    throw LaunchWindowTooLarge("launch window kept leaving the contraction ball after 8 halvings");
}

namespace {

FlowResult flow_forward(const ConicalPotential& pot, const PhasePoint& p0, double T,
                        const FlowOptions& opt) {
    FlowResult out;
    BrokenTrajectory& traj = out.trajectory;
    traj.min_g_norm = pot.g_norm(p0.x);

    PhasePoint p = p0;
    double t = 0.0;

    auto do_launch = [&](const CrossingEvent& ev) {
        double tau = std::min(launch_window(pot, ev.point), std::max(T - t, 0.0));
        if (tau <= 0.0) tau = std::min(launch_window(pot, ev.point), 1e-6);
        LaunchResult lr = launch_from_singularity(pot, ev.point, +1, tau, t, opt);
        if (pot.on_singular_set(lr.end.x))
            throw NonGenericCrossing("degenerate launch window: trajectory failed to leave S");
        traj.segments.push_back(std::move(lr.segment));
        p = lr.end;
        t += lr.tau_used;
    };

    if (pot.on_singular_set(p.x)) {
        CrossingEvent ev = classify_crossing(pot, 0.0, p);
        if (!ev.generic)
            throw NonGenericCrossing("start point lies on S \\ S*; no unique branch exists");
        traj.crossings.push_back(ev);
        traj.tau = 0.0;
        if (T == 0.0) {
            out.end = p;
            return out;
        }
        do_launch(ev);
    }

    while (T - t > 1e-14 * std::max(1.0, T)) {
        SmoothResult sr = integrate_smooth(pot, p, t, T, opt);
        traj.min_g_norm = std::min(traj.min_g_norm, sr.min_g_norm);
        if (!sr.segment.steps.empty()) traj.segments.push_back(sr.segment);
        if (!sr.event) {
            p = sr.end;
            t = sr.segment.t_end;
            break;
        }
        const CrossingEvent& ev = *sr.event;
        if (!ev.generic) {
            std::ostringstream os;
            os << "non-generic crossing at t = " << ev.t_cross
               << " (|dg xi| below tolerance); aborting, uniqueness may fail";
            throw NonGenericCrossing(os.str());
        }
        traj.crossings.push_back(ev);
        if (!traj.tau) traj.tau = ev.t_cross;
        if (traj.crossings.size() > kMaxCrossings)
            throw NumericalError("crossing count exceeded sanity bound");
        t = ev.t_cross;
        p = ev.point;
        if (T - t <= 1e-14 * std::max(1.0, T)) break;
        do_launch(ev);
    }

    traj.near_singular = traj.min_g_norm >= pot.tols().hit_tol &&
                         traj.min_g_norm <= 100.0 * pot.tols().hit_tol;
    out.end = p;
    return out;
}

}  // namespace

FlowResult flow_map(const ConicalPotential& pot, const PhasePoint& p0, double t,
                    const FlowOptions& opt) {
    if (t >= 0.0) return flow_forward(pot, p0, t, opt);

    FlowResult fwd = flow_forward(pot, reversed(p0), -t, opt);
    FlowResult out;
    out.end = reversed(fwd.end);
    BrokenTrajectory& traj = out.trajectory;
    traj.min_g_norm = fwd.trajectory.min_g_norm;
    traj.near_singular = fwd.trajectory.near_singular;
    for (auto& s : fwd.trajectory.segments) traj.segments.push_back(reverse_segment(std::move(s)));
    for (auto& ev : fwd.trajectory.crossings) {
        CrossingEvent r = ev;
        r.t_cross = -ev.t_cross;
        r.point = reversed(ev.point);
        for (auto& c : r.omega0) c = -c;
        traj.crossings.push_back(std::move(r));
    }
    if (fwd.trajectory.tau) traj.tau = -*fwd.trajectory.tau;
    return out;
}

PhasePoint flow_endpoint(const ConicalPotential& pot, const PhasePoint& p0, double t,
                         const FlowOptions& opt) {
    FlowOptions o = opt;
    o.record_dense = false;
    return flow_map(pot, p0, t, o).end;
}

Mat variational_jacobian(const ConicalPotential& pot, const PhasePoint& p0, double t,
                         double h, const FlowOptions& opt) {
    const std::size_t d = pot.dim();
    Mat jac(2 * d, 2 * d);
    for (std::size_t j = 0; j < 2 * d; ++j) {
        PhasePoint plus = p0, minus = p0;
        auto& cp = (j < d) ? plus.x[j] : plus.xi[j - d];
        auto& cm = (j < d) ? minus.x[j] : minus.xi[j - d];
        cp += h;
        cm -= h;
        const PhasePoint fp = flow_endpoint(pot, plus, t, opt);
        const PhasePoint fm = flow_endpoint(pot, minus, t, opt);
        for (std::size_t i = 0; i < d; ++i) {
            jac(i, j) = (fp.x[i] - fm.x[i]) / (2.0 * h);
            jac(d + i, j) = (fp.xi[i] - fm.xi[i]) / (2.0 * h);
        }
    }
    return jac;
}

}  // namespace conical
