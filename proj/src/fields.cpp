#include "conical/fields.hpp"

#include <cmath>

namespace conical {

double Poly::max_abs_on_lattice(const std::vector<std::pair<double, double>>& box,
                                std::size_t points_per_axis) const {
    std::vector<std::size_t> idx(dim_, 0);
    Vec x(dim_);
    double best = 0.0;
    const std::size_t m = points_per_axis < 2 ? 2 : points_per_axis;
    while (true) {
        for (std::size_t i = 0; i < dim_; ++i) {
            const auto [lo, hi] = box[i];
            x[i] = lo + (hi - lo) * double(idx[i]) / double(m - 1);
        }
        best = std::max(best, std::abs((*this)(x)));
        std::size_t ax = 0;
        while (ax < dim_ && ++idx[ax] == m) idx[ax++] = 0;
        if (ax == dim_) break;
    }
    return best;
}

}  // namespace conical
