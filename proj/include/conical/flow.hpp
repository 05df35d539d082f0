#ifndef CONICAL_FLOW_HPP
#define CONICAL_FLOW_HPP

#include <optional>
#include <utility>
#include <vector>

#include "conical/potential.hpp"
#include "conical/rk45.hpp"

namespace conical {

struct PhasePoint {
    Vec x;
    Vec xi;
};

struct CrossingEvent {
    double t_cross = 0.0;
    PhasePoint point;     // on S (snapped to |g| <= g_zero_tol)
    Vec omega0;           // dg(x) xi / |dg(x) xi| when generic
    bool generic = false;
};

// One smooth piece of a broken trajectory. Dense steps may carry auxiliary
// state (the launch variable z); the phase point is always the leading 2d
// components.
struct Segment {
    double t_begin = 0.0;
    double t_end = 0.0;
    std::size_t dim = 0;
    std::vector<DenseStep> steps;

    PhasePoint eval(double t) const;
    bool contains(double t) const {
        const double lo = std::min(t_begin, t_end), hi = std::max(t_begin, t_end);
        return t >= lo - 1e-12 && t <= hi + 1e-12;
    }
};

struct BrokenTrajectory {
    std::vector<Segment> segments;
    std::vector<CrossingEvent> crossings;
    std::optional<double> tau;  // first crossing time
    double min_g_norm = 0.0;    // over the whole run
    bool near_singular = false; // min |g| fell in [hit_tol, 100 hit_tol] without a hit

    PhasePoint eval(double t) const;
};

// (xi, -grad V). Throws OnSingularSet on S.
std::pair<Vec, Vec> hamiltonian_rhs(const ConicalPotential& pot, const PhasePoint& p);

double energy(const ConicalPotential& pot, const PhasePoint& p);

struct FlowOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;
    bool record_dense = true;
};

// Smooth integration until t_span end or until the trajectory hits S.
// On a hit, the returned event is localized on the dense output and the
// segment ends at the event time.
struct SmoothResult {
    Segment segment;
    std::optional<CrossingEvent> event;
    PhasePoint end;
    double min_g_norm = 0.0;
};
SmoothResult integrate_smooth(const ConicalPotential& pot, const PhasePoint& p0,
                              double t0, double t1, const FlowOptions& opt = {});

// Genericity classification at a point of S; asserts the incoming sign
// convention when a pre-crossing state is supplied.
CrossingEvent classify_crossing(const ConicalPotential& pot, double t_cross,
                                const PhasePoint& on_s);

// Desingularized launch from p0 in S*. side=+1 integrates the outgoing
// branch over [0, tau_launch], side=-1 the incoming branch over
// [-tau_launch, 0]. Returns the segment in absolute time (offset t0) and the
// window actually used after contraction-ball halving (at most 8 retries).
struct LaunchResult {
    Segment segment;
    PhasePoint end;
    double tau_used = 0.0;
};
LaunchResult launch_from_singularity(const ConicalPotential& pot, const PhasePoint& p0,
                                     int side, double tau_launch, double t0 = 0.0,
                                     const FlowOptions& opt = {});

// The generalized flow Phi^t: smooth pieces glued through generic crossings.
struct FlowResult {
    PhasePoint end;
    BrokenTrajectory trajectory;
};
FlowResult flow_map(const ConicalPotential& pot, const PhasePoint& p0, double t,
                    const FlowOptions& opt = {});

// Endpoint only, no dense recording.
PhasePoint flow_endpoint(const ConicalPotential& pot, const PhasePoint& p0, double t,
                         const FlowOptions& opt = {});

// Central finite differences of flow_map in all 2d initial directions.
Mat variational_jacobian(const ConicalPotential& pot, const PhasePoint& p0, double t,
                         double h, const FlowOptions& opt = {});

}  // namespace conical

#endif
