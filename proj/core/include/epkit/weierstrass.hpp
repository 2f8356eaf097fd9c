#ifndef EPKIT_WEIERSTRASS_HPP
#define EPKIT_WEIERSTRASS_HPP

#include "epkit/cpoly.hpp"

namespace epkit {

struct Invariants {
    cplx g2 = 0.0, g3 = 0.0;
    cplx discriminant() const { return g2 * g2 * g2 - 27.0 * g3 * g3; }
    bool degenerate() const;
};

/// Period lattice with full-period generators (w1 real for the cubic family;
/// w2 = w1 e^{i pi/3} in the equianharmonic case).
struct Lattice {
    cplx w1, w2;

    double min_norm() const;
    /// Nearest lattice translate removed: t - m w1 - n w2.
    cplx reduce(cplx t, long& m, long& n) const;
};

/// Invariants of the canonical form for the omega=0, g=1 cubic: (0, E/2).
Invariants invariants_from_cubic(cplx E);

/// Generators computed from period integrals of the canonical curve
/// w'^2 = 4w^3 - g2 w - g3.
Lattice lattice_from_invariants(const Invariants& inv);

struct WpValue {
    cplx p, dp;
};

/// Weierstrass P and P' by Laurent series inside the safe radius plus
/// group-law doublings, after reduction to the fundamental cell.
WpValue wp(cplx t, const Invariants& inv, const Lattice& lat);

/// Cached evaluator for the exact cubic solution z(t) = 2i P(t + i a; 0, E/2).
class CubicFlow {
public:
    explicit CubicFlow(double E);
    cplx z(double t, double a) const;
    WpValue wp_at(cplx arg) const;
    const Lattice& lattice() const { return lat_; }
    const Invariants& invariants() const { return inv_; }
    double T1() const;        // real period
    double Ttilde() const;    // imaginary period magnitude: i Ttilde = 2 w2 - w1

private:
    Invariants inv_;
    Lattice lat_;
};

/// One-shot convenience wrapper around CubicFlow.
cplx cubic_trajectory(double t, double a, double E);

}  // namespace epkit

#endif
