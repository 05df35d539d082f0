#ifndef CONICAL_FIELDS_HPP
#define CONICAL_FIELDS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "conical/linalg.hpp"

namespace conical {

// Multivariate polynomial with explicit coefficients. Constants and linear
// forms are represented as degenerate polynomials, so every catalog field
// has exact derivatives of all orders.
class Poly {
  public:
    struct Term {
        double coeff;
        std::vector<int> powers;  // one exponent per axis
    };

    Poly() = default;
    Poly(std::size_t dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {}

    static Poly constant(std::size_t dim, double c) {
        return Poly(dim, {Term{c, std::vector<int>(dim, 0)}});
    }

    // a . x + b
    static Poly linear(const Vec& a, double b) {
        std::vector<Term> t;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0.0) continue;
            std::vector<int> pw(a.size(), 0);
            pw[i] = 1;
            t.push_back({a[i], std::move(pw)});
        }
        t.push_back({b, std::vector<int>(a.size(), 0)});
        return Poly(a.size(), std::move(t));
    }

    // x_i as a polynomial (used for the canonical coordinate family).
    static Poly coordinate(std::size_t dim, std::size_t i) {
        std::vector<int> pw(dim, 0);
        pw[i] = 1;
        return Poly(dim, {Term{1.0, std::move(pw)}});
    }

    std::size_t dim() const { return dim_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    bool is_zero() const {
        for (const auto& t : terms_)
            if (t.coeff != 0.0) return false;
        return true;
    }

    double operator()(const Vec& x) const {
        double s = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (std::size_t i = 0; i < dim_; ++i)
                for (int k = 0; k < t.powers[i]; ++k) m *= x[i];
            s += m;
        }
        return s;
    }

    Poly partial(std::size_t axis) const {
        std::vector<Term> out;
        for (const auto& t : terms_) {
            if (t.powers[axis] == 0) continue;
            Term d = t;
            d.coeff *= t.powers[axis];
            d.powers[axis] -= 1;
            out.push_back(std::move(d));
        }
        return Poly(dim_, std::move(out));
    }

    Vec gradient(const Vec& x) const {
        Vec g(dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) g[i] = partial(i)(x);
        return g;
    }

    Mat hessian(const Vec& x) const {
        Mat h(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            const Poly di = partial(i);
            for (std::size_t j = i; j < dim_; ++j) {
                h(i, j) = di.partial(j)(x);
                h(j, i) = h(i, j);
            }
        }
        return h;
    }

    // Bound used for cheap sanity checks; exact on box corners for
    // multilinear terms, conservative otherwise.
    double max_abs_on_lattice(const std::vector<std::pair<double, double>>& box,
                              std::size_t points_per_axis) const;

  private:
    std::size_t dim_ = 0;
    std::vector<Term> terms_;
};

// p-vector field g. Either the canonical coordinate family
// g(x) = (x_1, ..., x_p) or a list of explicit polynomials.
class VectorField {
  public:
    VectorField() = default;

    static VectorField canonical(std::size_t dim, std::size_t codim) {
        VectorField f;
        f.dim_ = dim;
        f.codim_ = codim;
        f.canonical_ = true;
        return f;
    }

    static VectorField polynomial(std::size_t dim, std::vector<Poly> comps) {
        VectorField f;
        f.dim_ = dim;
        f.codim_ = comps.size();
        f.comps_ = std::move(comps);
        return f;
    }

    std::size_t dim() const { return dim_; }
    std::size_t codim() const { return codim_; }
    bool is_canonical() const { return canonical_; }

    Vec value(const Vec& x) const {
        Vec g(codim_);
        if (canonical_) {
            for (std::size_t i = 0; i < codim_; ++i) g[i] = x[i];
        } else {
            for (std::size_t i = 0; i < codim_; ++i) g[i] = comps_[i](x);
        }
        return g;
    }

    // p x d Jacobian (dg)_{ij} = d_j g_i.
    Mat jacobian(const Vec& x) const {
        Mat j(codim_, dim_);
        if (canonical_) {
            for (std::size_t i = 0; i < codim_; ++i) j(i, i) = 1.0;
        } else {
            for (std::size_t i = 0; i < codim_; ++i)
                for (std::size_t k = 0; k < dim_; ++k) j(i, k) = comps_[i].partial(k)(x);
        }
        return j;
    }

    Mat component_hessian(std::size_t i, const Vec& x) const {
        if (canonical_) return Mat(dim_, dim_);
        return comps_[i].hessian(x);
    }

  private:
    std::size_t dim_ = 0, codim_ = 0;
    bool canonical_ = false;
    std::vector<Poly> comps_;
};

}  // namespace conical

#endif
