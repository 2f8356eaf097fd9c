#ifndef EPKIT_PERIODS_HPP
#define EPKIT_PERIODS_HPP

#include <string>
#include <utility>
#include <vector>

#include "epkit/cpoly.hpp"

namespace epkit {

/// A homology cycle on the Riemann surface of sqrt(2(E - V)): either a loop
/// around two branch points (indices into the sorted TurningPointSet) or the
/// degenerate cycle joining a branch point to infinity.
struct Cycle {
    int a = 0;
    int b = 1;
    int orientation = +1;
    bool to_infinity = false;
};

struct QuadratureResult {
    cplx value;
    double rel_err = 0.0;
};

struct PeriodData {
    double T1 = 0.0, T2 = 0.0, T3 = 0.0;     // real periods
    double Ti1 = 0.0, Ti2 = 0.0, Ti3 = 0.0;  // imaginary periods
    cplx E = 0.0;
    double g = 0.0;
};

/// T1 = 5 sqrt(pi/6) Gamma(4/3)/Gamma(11/6) E^{-1/6} for the omega=0, g=1
/// cubic at E > 0.
double closed_form_cubic_T1(double E);

/// Closed-form periods of the pure quintic V = -i z^5 at E > 0:
///   T1,2 = (7/5) sqrt(2 pi) cos(pi/10 | 3pi/10) Gamma(6/5)/Gamma(17/10) E^{-3/10},
///   T3 = T1 - T2, and the three imaginary periods with the matching
///   (1 + 2 sin 3pi/10 + sin pi/10), (1 + sin 3pi/10), (sin 3pi/10 + sin pi/10)
///   prefactors.
PeriodData closed_form_quintic(double E);

/// T(cycle) = 2 * integral of dz / sqrt(2(E - V)) between the cycle's branch
/// points, square-root branch tracked by continuity along the contour.
/// The returned sign is canonical: Re > 0, or Im > 0 when purely imaginary.
QuadratureResult cycle_integral(const ProblemSpec& spec, const Cycle& cycle);

/// Analytic continuation of cycle_integral along E(theta) = E e^{i theta},
/// theta from 0 to -2 pi * turns, with branch-point labels tracked through
/// the rotation.
cplx monodromy_continue(const ProblemSpec& spec, const Cycle& cycle, int turns);

/// Continuation out to -2 pi * turns and back again; a robustness diagnostic
/// that must reproduce the starting period.
cplx monodromy_roundtrip(const ProblemSpec& spec, const Cycle& cycle, int turns);

/// Named cycles for reporting: the low and upper mirror turning-point pairs
/// and the escape cycle from the top imaginary-axis point when present.
std::vector<std::pair<std::string, Cycle>> canonical_cycles(const ProblemSpec& spec);

}  // namespace epkit

#endif
