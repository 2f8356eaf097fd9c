#ifndef EPKIT_CPOLY_HPP
#define EPKIT_CPOLY_HPP

#include <complex>
#include <vector>

namespace epkit {

using cplx = std::complex<double>;

/// Complex-coefficient polynomial, coefficients stored ascending in degree.
/// The degree is the index of the last coefficient whose magnitude exceeds
/// the relative drop tolerance; exact zero coefficients never count.
class PolynomialC {
public:
    PolynomialC() = default;
    explicit PolynomialC(std::vector<cplx> coeffs);

    int degree() const { return degree_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    cplx coeff(int k) const;

    cplx operator()(cplx z) const;          // Horner evaluation
    /// sum_k |a_k| |z|^k, the natural magnitude scale of p near z.
    double eval_scale(cplx z) const;
    double coeff_scale() const { return coeff_scale_; }

    PolynomialC derivative() const;
    PolynomialC operator-() const;
    PolynomialC plus_constant(cplx c) const;

    static constexpr double kDropTol = 1e-14;  // relative coefficient drop

private:
    std::vector<cplx> coeffs_;
    int degree_ = -1;           // -1: zero polynomial
    double coeff_scale_ = 0.0;
};

struct RootM {
    cplx z;
    int multiplicity = 1;
};

/// All roots of p with multiplicity, found by Aberth-Ehrlich simultaneous
/// iteration to relative residual 1e-12; clusters closer than 1e-8 are
/// merged with summed multiplicity.
std::vector<RootM> roots(const PolynomialC& p);

/// Resultant of p and q via the Sylvester matrix (LU determinant).
cplx resultant(const PolynomialC& p, const PolynomialC& q);
/// disc(p) = (-1)^{n(n-1)/2} Res(p, p') / lc(p).
cplx discriminant(const PolynomialC& p);

// ---------------------------------------------------------------------------

enum class Family { Cubic, Quintic, General };
enum class WedgeProblem { One, Two };

/// One instance of the Hamiltonian family H = p^2/2 + V(z).
///   Cubic:   V(z) = omega2 z^2/2 + i g z^3
///   Quintic: V(z) = z^2/2 - i g z^5
///   General: explicit polynomial potential
struct ProblemSpec {
    Family family = Family::Quintic;
    double omega2 = 0.0;
    double g = 0.0;
    cplx E = 0.0;
    WedgeProblem wedge = WedgeProblem::One;
    PolynomialC custom;     // used by Family::General only

    static ProblemSpec cubic(double omega2, double g, cplx E);
    static ProblemSpec quintic(double g, cplx E,
                               WedgeProblem wedge = WedgeProblem::One);
    /// E>0 normalization with V(z) = -i z^5 and no quadratic term.
    static ProblemSpec pure_quintic(cplx E);
    static ProblemSpec general(PolynomialC potential, cplx E);

    PolynomialC potential() const;
    PolynomialC e_minus_v() const;       // E - V(z)
    cplx V(cplx z) const;
    cplx dV(cplx z) const;
};

struct TurningPointSet {
    std::vector<cplx> points;            // sorted by argument, then modulus
    std::vector<int> multiplicity;
    bool mirror_symmetric = false;       // invariant under z -> -conj(z)

    int count_with_multiplicity() const;
    /// Indices of points lying on the imaginary axis (|Re| <= tol * scale).
    std::vector<int> imaginary_axis_indices(double tol = 1e-8) const;
};

/// Roots of V(z) = E, deterministic ordering.
TurningPointSet turning_points(const ProblemSpec& spec);

/// g* = (1/5) (-3/(10E))^{3/2} for the quintic family at E < 0, validated
/// against the discriminant zero of E - V(z) as a function of g.
double classical_exceptional_point(double E);

/// The double turning point z = i sqrt(-10E/3) at g = g*(E).
cplx coalesced_turning_point(double E);

/// Number of purely imaginary turning points of the quintic family, counted
/// as real roots of g y^5 - y^2/2 - E (z = i y reduction).
int imaginary_axis_turning_count(double E, double g);

// ---------------------------------------------------------------------------

/// Parameters of the 6-th order vacuum equation m u^4 (1 - lambda^2 u/m^2)^2
/// = Lambda^9.
struct G2Params {
    double m = 1.0;
    double lambda = 0.1;
    double Lambda = 1.0;
};

PolynomialC g2_vacuum_polynomial(const G2Params& p);
std::vector<cplx> g2_vacua(const G2Params& p);

struct G2CoalescenceScan {
    double lambda2 = 0.0;        // coupling squared at vacuum coalescence
    double uncertainty = 0.0;    // final bracket width of the bisection
    cplx merged_vacuum;          // the coalescing root pair location
};

/// Scan lambda^2 for the point where two vacua coalesce (discriminant sign
/// change), for fixed m and Lambda.
G2CoalescenceScan g2_coalescence_scan(double m, double Lambda);

}  // namespace epkit

#endif
