#include "conical/potential.hpp"

#include <cmath>
#include <sstream>

namespace conical {

namespace {

// Corners-plus-midpoints lattice; 5 points per axis is plenty for the
// polynomial degrees we admit.
constexpr std::size_t kLatticePointsPerAxis = 5;

}  // namespace

ConicalPotential::ConicalPotential(std::size_t dim, Poly w, Poly v0, VectorField g, Box box,
                                   bool expects_crossings, double xi_typical)
    : dim_(dim), w_(std::move(w)), v0_(std::move(v0)), g_(std::move(g)), box_(std::move(box)) {
    if (box_.size() != dim_) throw ConfigError("potential box must have one [lo,hi] per axis");
    double d2 = 0.0;
    for (const auto& [lo, hi] : box_) d2 += (hi - lo) * (hi - lo);
    box_diam_ = std::sqrt(d2);
    w_zero_ = w_.is_zero();
    tols_.g_zero_tol = 1e-12 * box_diam_;
    tols_.sstar_tol = 1e-8 * xi_typical;
    validate(expects_crossings && !w_zero_);
}

void ConicalPotential::validate(bool expects_crossings) const {
    if (g_.codim() < 1 || g_.codim() > dim_)
        throw ConfigError("codim p must satisfy 1 <= p <= d");

    // Sample the lattice: dg full rank everywhere, w > 0 if crossings occur.
    std::vector<std::size_t> idx(dim_, 0);
    Vec x(dim_);
    while (true) {
        for (std::size_t i = 0; i < dim_; ++i) {
            const auto [lo, hi] = box_[i];
            x[i] = lo + (hi - lo) * double(idx[i]) / double(kLatticePointsPerAxis - 1);
        }
        if (smallest_singular_value(g_.jacobian(x)) <= tols_.rank_tol) {
            std::ostringstream os;
            os << "dg(x) loses rank on the working box (lattice point";
            for (double xi : x) os << ' ' << xi;
            os << ")";
            throw ConfigError(os.str());
        }
        if (expects_crossings && !(w_(x) > 0.0)) {
            // Sign convention: runs that cross S must have w > 0 on the box.
            std::ostringstream os;
            os << "w(x) <= 0 on the working box but crossings are expected (lattice point";
            for (double xi : x) os << ' ' << xi;
            os << ")";
            throw ConfigError(os.str());
        }
        std::size_t ax = 0;
        while (ax < dim_ && ++idx[ax] == kLatticePointsPerAxis) idx[ax++] = 0;
        if (ax == dim_) break;
    }
}

bool ConicalPotential::inside_box(const Vec& x, double slack) const {
    for (std::size_t i = 0; i < dim_; ++i)
        if (x[i] < box_[i].first - slack || x[i] > box_[i].second + slack) return false;
    return true;
}

void ConicalPotential::require_inside(const Vec& x) const {
    if (!inside_box(x, 1e-9 * box_diam_)) {
        std::ostringstream os;
        os << "point left the working box:";
        for (double xi : x) os << ' ' << xi;
        throw OutOfBox(os.str());
    }
}

double ConicalPotential::dg_xi_norm(const Vec& x, const Vec& xi) const {
    return norm(g_.jacobian(x).apply(xi));
}

Vec ConicalPotential::omega0(const Vec& x, const Vec& xi) const {
    Vec v = g_.jacobian(x).apply(xi);
    const double n = norm(v);
    if (n <= tols_.sstar_tol)
        throw NonGenericPoint("dg(x) xi vanishes: point of S \\ S*, omega0 undefined");
    for (auto& c : v) c /= n;
    return v;
}

double ConicalPotential::V(const Vec& x) const {
    require_inside(x);
    return w_(x) * g_norm(x) + v0_(x);
}

Vec ConicalPotential::grad_V(const Vec& x) const {
    require_inside(x);
    if (w_zero_) return v0_.gradient(x);
    const Vec gv = g_.value(x);
    const double gn = norm(gv);
    if (gn <= tols_.g_zero_tol)
        throw OnSingularSet("grad V undefined on S; use one_sided_force");
    Vec grad = v0_.gradient(x);
    axpy(gn, w_.gradient(x), grad);
    Vec n = gv;
    for (auto& c : n) c /= gn;
    axpy(w_(x), g_.jacobian(x).apply_transposed(n), grad);
    return grad;
}

Vec ConicalPotential::grad_V_raw(const Vec& x) const {
    if (w_zero_) return v0_.gradient(x);
    const Vec gv = g_.value(x);
    const double gn = norm(gv);
    Vec grad = v0_.gradient(x);
    axpy(gn, w_.gradient(x), grad);
    Vec n = gv;
    // Regularized direction: within g_zero_tol of S the force magnitude fades
    // instead of blowing up; trial stages of the integrator may land there.
    const double div = std::max(gn, tols_.g_zero_tol);
    for (auto& c : n) c /= div;
    axpy(w_(x), g_.jacobian(x).apply_transposed(n), grad);
    return grad;
}

Vec ConicalPotential::one_sided_force(const Vec& x, const Vec& xi, int side) const {
    require_inside(x);
    if (g_norm(x) > tols_.g_zero_tol)
        throw OnSingularSet("one_sided_force is only defined on S");
    const Vec om = omega0(x, xi);  // throws NonGenericPoint off S*
    Vec f = v0_.gradient(x);
    axpy(double(side) * w_(x), g_.jacobian(x).apply_transposed(om), f);
    for (auto& c : f) c = -c;
    return f;
}

Mat ConicalPotential::hessian_V(const Vec& x) const {
    require_inside(x);
    if (w_zero_) return v0_.hessian(x);
    const Vec gv = g_.value(x);
    const double gn = norm(gv);
    if (gn <= tols_.g_zero_tol) throw OnSingularSet("hessian undefined on S");
    Vec n = gv;
    for (auto& c : n) c /= gn;

    const Mat jac = g_.jacobian(x);
    const Vec tdg_n = jac.apply_transposed(n);
    const Vec gw = w_.gradient(x);
    const double wx = w_(x);

    Mat h = v0_.hessian(x);
    Mat hw = w_.hessian(x);
    hw *= gn;
    h += hw;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            h(i, j) += gw[i] * tdg_n[j] + tdg_n[i] * gw[j];
    for (std::size_t c = 0; c < g_.codim(); ++c) {
        Mat hg = g_.component_hessian(c, x);
        hg *= wx * n[c];
        h += hg;
    }
    // (w/|g|) (tdg dg - (tdg n)(tdg n)^t)
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) {
            double jj = 0.0;
            for (std::size_t c = 0; c < g_.codim(); ++c) jj += jac(c, i) * jac(c, j);
            h(i, j) += (wx / gn) * (jj - tdg_n[i] * tdg_n[j]);
        }
    return h;
}

Mat ConicalPotential::singular_hessian_B1(const Vec& x, const Vec& xi) const {
    require_inside(x);
    if (g_norm(x) > tols_.g_zero_tol)
        throw OnSingularSet("B1 is defined at points of S*");
    const Mat jac = g_.jacobian(x);
    Vec dgxi = jac.apply(xi);
    const double dn = norm(dgxi);
    if (dn <= tols_.sstar_tol) throw NonGenericPoint("B1 undefined on S \\ S*");
    for (auto& c : dgxi) c /= dn;  // omega0
    const Vec tdg_om = jac.apply_transposed(dgxi);
    const double wx = w_(x);

    Mat b1(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) {
            double jj = 0.0;
            for (std::size_t c = 0; c < g_.codim(); ++c) jj += jac(c, i) * jac(c, j);
            b1(i, j) = (wx / dn) * (jj - tdg_om[i] * tdg_om[j]);
        }
    return b1;
}

ConicalPotential make_abs_x_1d() {
    return ConicalPotential(1, Poly::constant(1, 1.0), Poly::constant(1, 0.0),
                            VectorField::canonical(1, 1), {{-3.0, 3.0}});
}

ConicalPotential make_abs_x1_2d() {
    return ConicalPotential(2, Poly::constant(2, 1.0), Poly::constant(2, 0.0),
                            VectorField::canonical(2, 1), {{-3.0, 3.0}, {-3.0, 3.0}});
}

ConicalPotential make_cone_2d() {
    return ConicalPotential(2, Poly::constant(2, 1.0), Poly::constant(2, 0.0),
                            VectorField::canonical(2, 2), {{-3.0, 3.0}, {-3.0, 3.0}});
}

ConicalPotential make_harmonic_1d() {
    return ConicalPotential(1, Poly::constant(1, 0.0),
                            Poly(1, {Poly::Term{0.5, {2}}}),
                            VectorField::canonical(1, 1), {{-6.0, 6.0}},
                            /*expects_crossings=*/false);
}

ConicalPotential make_free_1d() {
    return ConicalPotential(1, Poly::constant(1, 0.0), Poly::constant(1, 0.0),
                            VectorField::canonical(1, 1), {{-20.0, 20.0}},
                            /*expects_crossings=*/false);
}

ConicalPotential make_neg_abs_x_1d() {
    return ConicalPotential(1, Poly::constant(1, -1.0), Poly::constant(1, 0.0),
                            VectorField::canonical(1, 1), {{-3.0, 3.0}},
                            /*expects_crossings=*/false);
}

}  // namespace conical
