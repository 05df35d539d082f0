#include "conical/linalg.hpp"

#include <algorithm>

namespace conical {

double smallest_singular_value(const Mat& j) {
    const std::size_t p = j.rows();
    // Gram matrix J J^T, p x p symmetric PSD.
    Mat g(p, p);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < j.cols(); ++k) s += j(a, k) * j(b, k);
            g(a, b) = s;
        }
    // Cyclic Jacobi; converges fast for these tiny matrices.
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a + 1; b < p; ++b) off += g(a, b) * g(a, b);
        if (off < 1e-30) break;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a + 1; b < p; ++b) {
                if (g(a, b) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * g(a, b), g(a, a) - g(b, b));
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < p; ++k) {
                    const double gak = g(a, k), gbk = g(b, k);
                    g(a, k) = c * gak + s * gbk;
                    g(b, k) = -s * gak + c * gbk;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double gka = g(k, a), gkb = g(k, b);
                    g(k, a) = c * gka + s * gkb;
                    g(k, b) = -s * gka + c * gkb;
                }
            }
    }
    double lam_min = g(0, 0);
    for (std::size_t a = 1; a < p; ++a) lam_min = std::min(lam_min, g(a, a));
    return std::sqrt(std::max(0.0, lam_min));
}

}  // namespace conical
