#ifndef EPKIT_SPECTRUM_HPP
#define EPKIT_SPECTRUM_HPP

#include <array>
#include <string>
#include <vector>

#include "epkit/cpoly.hpp"

namespace epkit {

/// Integration ray angles for the two spectral problems of
/// H = (p^2 + z^2)/2 - i g z^5: the midpoints of the Stokes wedges
///   One: (-pi/14, 3pi/14) and (11pi/14, 15pi/14)  -> pi/14, 13pi/14
///   Two: (-5pi/14, -pi/14) and (15pi/14, 19pi/14) -> -3pi/14, 17pi/14
struct WedgeRays {
    double right;  // ray in the wedge meeting arg z near 0 / below the axis
    double left;
};
WedgeRays rays_for(WedgeProblem problem);

struct ShootOptions {
    double R_outer = 0.0;       // 0: choose from the WKB e-fold target
    double efold_target = 38.0;
    double E_ref = 0.0;         // reference energy for the e-fold count
    double rtol = 1e-11;
    double angle_shift = 0.0;   // ray-angle perturbation (robustness checks)
};

/// Wronskian mismatch of the two inward WKB-normalized ray solutions at
/// z = 0, scaled to O(1); zero exactly at eigenvalues.  Analytic in E for
/// fixed options.
cplx shoot(double g, cplx E, WedgeProblem problem, const ShootOptions& opt = {});

struct EigenRecord {
    cplx E;
    double g = 0.0;
    WedgeProblem problem = WedgeProblem::One;
    double residual = 0.0;  // |mismatch| at convergence over the scan scale
    int index = 0;
    bool converged = true;
};

/// Lowest `count` eigenvalues (complex pairs included), sorted by real part.
/// Problem Two refuses g below 1e-3 where the wedge problem degenerates.
std::vector<EigenRecord> eigenvalues(double g, WedgeProblem problem, int count,
                                     const ShootOptions& opt = {});

/// Same search but seeded from a previous nearby solution (continuation).
std::vector<EigenRecord> eigenvalues_seeded(double g, WedgeProblem problem,
                                            const std::vector<cplx>& seeds,
                                            const ShootOptions& opt = {});

struct TrackResult {
    std::vector<double> g_grid;               // possibly refined
    std::vector<std::vector<cplx>> levels;    // levels[i][k]: level k at g_grid[i]
    std::vector<std::string> notes;
};

/// Continuation of the lowest `count` levels along an ascending g grid.
TrackResult track(const std::vector<double>& g_grid, WedgeProblem problem, int count);

enum class EpKind { Classical, Quantum, MatrixDemo };

struct ExceptionalPoint {
    EpKind kind = EpKind::Quantum;
    double parameter = 0.0;    // g (quantum), or alpha (matrix demo)
    double uncertainty = 0.0;  // final bracket width
    int pair_index = 0;        // 1 = first pair to coalesce, 2 = second, ...
    std::array<cplx, 2> pair_values{};  // the pair on the complex side
};

/// Bisection on the pair character (Im E != 0 at tolerance 1e-8) of the
/// `pair_index`-th conjugate pair between g_lo and g_hi.
ExceptionalPoint find_quantum_ep(WedgeProblem problem, int pair_index, double g_lo,
                                 double g_hi);

/// Eigenvalues 1 +- sqrt(alpha) of [[1,1],[alpha,1]].
std::pair<cplx, cplx> matrix_ep_demo(double alpha);

/// The same character bisection run on the 2x2 closed-form model; the
/// exceptional point sits at alpha = 0.
ExceptionalPoint find_matrix_ep(double alpha_lo, double alpha_hi);

}  // namespace epkit

#endif
