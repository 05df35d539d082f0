#ifndef CONICAL_LINALG_HPP
#define CONICAL_LINALG_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace conical {

using Vec = std::vector<double>;

// Dense row-major matrix, sized for the small systems in this code
// (d <= a few, variational blocks 2d x 2d).
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vec apply(const Vec& x) const {
        assert(x.size() == cols_);
        Vec y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    Vec apply_transposed(const Vec& x) const {
        assert(x.size() == rows_);
        Vec y(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
        return y;
    }

    Mat operator*(const Mat& b) const {
        assert(cols_ == b.rows_);
        Mat c(rows_, b.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    Mat& operator+=(const Mat& b) {
        assert(rows_ == b.rows_ && cols_ == b.cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
        return *this;
    }

    Mat& operator*=(double s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    // LU with partial pivoting; fine for the tiny matrices used here.
    double determinant() const {
        assert(rows_ == cols_);
        const std::size_t n = rows_;
        Mat lu = *this;
        double det = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
            if (lu(piv, k) == 0.0) return 0.0;
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
                det = -det;
            }
            det *= lu(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = lu(i, k) / lu(k, k);
                for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
            }
        }
        return det;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec operator*(double s, Vec a) {
    for (auto& v : a) v *= s;
    return a;
}

inline void axpy(double s, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// Smallest singular value of a p x d matrix, via the symmetric
// eigenproblem of J J^T (p <= d in this code). Jacobi sweeps.
double smallest_singular_value(const Mat& j);

}  // namespace conical

#endif
