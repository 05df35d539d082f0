#ifndef CONICAL_TRANSPORT_TYPES_HPP
#define CONICAL_TRANSPORT_TYPES_HPP

#include <vector>

#include "conical/flow.hpp"

namespace conical {

// Weighted phase-space point cloud representing a Wigner measure.
struct ParticleMeasure {
    std::vector<PhasePoint> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    double total_mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

}  // namespace conical

#endif
