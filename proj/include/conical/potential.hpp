#ifndef CONICAL_POTENTIAL_HPP
#define CONICAL_POTENTIAL_HPP

#include <utility>
#include <vector>

#include "conical/errors.hpp"
#include "conical/fields.hpp"
#include "conical/linalg.hpp"

namespace conical {

using Box = std::vector<std::pair<double, double>>;

struct PotentialTolerances {
    double g_zero_tol = 0.0;   // |g| below this counts as "on S"; set from box diameter
    double sstar_tol = 0.0;    // |dg xi| below this counts as S \ S*
    double rank_tol = 1e-6;    // smallest singular value of dg on the lattice
    double hit_tol = 1e-7;     // crossing trigger for the |g|^2 monitor
};

// V(x) = w(x) |g(x)| + V0(x) on a declared working box, with exact
// derivative oracles from the polynomial catalog.
class ConicalPotential {
  public:
    ConicalPotential(std::size_t dim, Poly w, Poly v0, VectorField g, Box box,
                     bool expects_crossings = true, double xi_typical = 1.0);

    std::size_t dim() const { return dim_; }
    std::size_t codim() const { return g_.codim(); }
    const Box& box() const { return box_; }
    const VectorField& g_field() const { return g_; }
    const PotentialTolerances& tols() const { return tols_; }
    double box_diameter() const { return box_diam_; }

    bool inside_box(const Vec& x, double slack = 0.0) const;
    void require_inside(const Vec& x) const;

    // True unless w vanishes identically, in which case V = V0 is smooth and
    // S plays no role in the dynamics.
    bool has_singularity() const { return !w_zero_; }

    Vec g(const Vec& x) const { return g_.value(x); }
    double g_norm(const Vec& x) const { return norm(g_.value(x)); }
    Mat dg(const Vec& x) const { return g_.jacobian(x); }

    bool on_singular_set(const Vec& x) const {
        return has_singularity() && g_norm(x) <= tols_.g_zero_tol;
    }

    // |dg(x) xi|, the genericity margin.
    double dg_xi_norm(const Vec& x, const Vec& xi) const;

    // Unit vector omega0 = dg(x) xi / |dg(x) xi|. Throws NonGenericPoint on S \ S*.
    Vec omega0(const Vec& x, const Vec& xi) const;

    double w(const Vec& x) const { return w_(x); }
    double V0(const Vec& x) const { return v0_(x); }
    Vec grad_w(const Vec& x) const { return w_.gradient(x); }
    Vec grad_V0(const Vec& x) const { return v0_.gradient(x); }

    // w(x)|g(x)| + V0(x); continuous everywhere including S.
    double V(const Vec& x) const;

    // grad V0 + |g| grad w + w tdg (g/|g|). Throws OnSingularSet near S.
    Vec grad_V(const Vec& x) const;

    // Same formula with the direction regularized at |g| <= g_zero_tol and no
    // box check; used by integrators whose trial stages may probe anywhere.
    Vec grad_V_raw(const Vec& x) const;

    // One-sided force limit at a point of S*:
    //   -grad V0(x) - side * w(x) tdg(x) omega0,  side=+1 outgoing, -1 incoming.
    Vec one_sided_force(const Vec& x, const Vec& xi, int side) const;

    // Full second derivative off S (symmetric).
    Mat hessian_V(const Vec& x) const;

    // B1(x,xi) = (w/|dg xi|) tdg (I - omega0 omega0^t) dg, the coefficient of
    // 1/t in d^2V along the outgoing trajectory from (x, xi) in S*.
    Mat singular_hessian_B1(const Vec& x, const Vec& xi) const;

  private:
    std::size_t dim_;
    Poly w_, v0_;
    VectorField g_;
    Box box_;
    double box_diam_;
    bool w_zero_ = false;
    PotentialTolerances tols_;

    void validate(bool expects_crossings) const;
};

// Convenience builders used throughout the tests.
ConicalPotential make_abs_x_1d();                       // V = |x| on [-3, 3]
ConicalPotential make_abs_x1_2d();                      // V = |x1| in d = 2
ConicalPotential make_cone_2d();                        // V = |x|, g = (x1, x2)
ConicalPotential make_harmonic_1d();                    // V = x^2/2 (w = 0)
ConicalPotential make_free_1d();                        // V = 0
ConicalPotential make_neg_abs_x_1d();                   // V = -|x| (non-generic at 0)

}  // namespace conical

#endif
