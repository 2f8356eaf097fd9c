#ifndef EPKIT_TRAJECTORY_HPP
#define EPKIT_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "epkit/cpoly.hpp"

namespace epkit {

enum class TimeAxis { Real, Imaginary, Ray };

/// Sampled complex-time trajectory of z'' = -V'(z).  The time parameter is
/// real; the physical time direction is e^{i phi} with phi = 0 (Real),
/// pi/2 (Imaginary) or ray_angle (Ray).  zdot is the physical dz/dt.
struct Trajectory {
    struct Sample {
        double t;
        cplx z;
        cplx zdot;
        double energy_residual;  // relative to max(1, |E|, |V|, |zdot|^2/2)
    };
    std::vector<Sample> samples;
    TimeAxis axis = TimeAxis::Real;
    double ray_angle = 0.0;
    cplx E = 0.0;
    double max_energy_drift = 0.0;
    bool closed = false;
    double closure_gap = 0.0;   // terminal gap for stems / closed orbits
    bool escaped = false;
    double escape_time = 0.0;   // Richardson-extrapolated blow-up time
    double escape_uncertainty = 0.0;

    double duration() const {
        return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
    }
};

struct IntegrateOptions {
    double escape_radius = 1e6;
    int min_samples = 512;     // caps h at t_max / min_samples
    double rtol = 1e-10;
};

/// Complex trajectory from consistent initial data (zdot^2/2 + V(z0) = E).
Trajectory integrate(const ProblemSpec& spec, cplx z0, cplx zdot0, double t_max,
                     TimeAxis axis, double ray_angle = 0.0,
                     const IntegrateOptions& opt = {});

/// Ordered pair of turning-point indices; to_infinity marks escape stems.
struct StemDescriptor {
    int from = 0;
    int to = 1;
    bool to_infinity = false;
};

/// The distinguished trajectory launched from rest at one turning point and
/// integrated to closest approach of the other, endpoint refined.
Trajectory stem_trajectory(const ProblemSpec& spec, const StemDescriptor& stem);

/// Launches from the turning point and integrates through blow-up, with the
/// escape time extrapolated over the radius ladder {1e4, 1e5, 1e6}.
Trajectory escape_orbit(const ProblemSpec& spec, int tp_index);

/// Imaginary-time shift of a stem by a, then one full real period.
Trajectory family_member(const ProblemSpec& spec, const Trajectory& stem, double a);

/// Transversal self-crossings of the sampled polyline, refined locally.
std::vector<cplx> self_intersections(const Trajectory& traj);

/// Winding number of a closed trajectory around a point off the curve.
int winding_number(const Trajectory& traj, cplx point);

/// Winding of the loop a stem arc forms at its narrowest self-approach
/// (closed across the neck); 0 when the arc has no loop-like structure.
/// This is the operational detector for the appendix carried by low stems.
int appendix_winding(const Trajectory& stem, cplx point);

/// Discrete topology signature of the stem-trajectory pattern.
struct TopologyLabel {
    int axis_tp_count = 0;
    int mirror_pair_count = 0;
    bool low_stem_found = false;
    int low_self_crossings = 0;
    std::vector<int> low_windings;  // around imaginary-axis turning points, by Im
    bool upper_stem_found = false;

    std::string canonical() const;
    bool operator==(const TopologyLabel& o) const { return canonical() == o.canonical(); }
};

TopologyLabel classify_topology(const ProblemSpec& spec);

struct TransitionBracket {
    double g = 0.0;
    double width = 0.0;
};

/// Bisection on the topology label between g_lo and g_hi (labels must differ).
TransitionBracket topology_transition_g(double E, double g_lo, double g_hi,
                                        double tol = 1e-4);

}  // namespace epkit

#endif
