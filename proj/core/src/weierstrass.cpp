#include "epkit/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "epkit/periods.hpp"

namespace epkit {

namespace {

constexpr int kSeriesOrder = 16;    // Laurent coefficients c_2 .. c_K
constexpr double kSeriesRadius = 0.4;  // fraction of the lattice minimum norm
constexpr double kPoleTol = 1e-8;

double inv_scale(const Invariants& inv) {
    return std::max({1.0, std::abs(inv.g2), std::abs(inv.g3)});
}

}  // namespace

bool Invariants::degenerate() const {
    return std::abs(discriminant()) <= 1e-12 * std::pow(inv_scale(*this), 3);
}

double Lattice::min_norm() const {
    return std::min({std::abs(w1), std::abs(w2), std::abs(w1 - w2), std::abs(w1 + w2)});
}

cplx Lattice::reduce(cplx t, long& m, long& n) const {
    const double det = w1.real() * w2.imag() - w1.imag() * w2.real();
    const double mr = (t.real() * w2.imag() - t.imag() * w2.real()) / det;
    const double nr = (w1.real() * t.imag() - w1.imag() * t.real()) / det;
    m = std::lround(mr);
    n = std::lround(nr);
    cplx best = t - double(m) * w1 - double(n) * w2;
    // rounding is not exact nearest-point on a skew lattice: scan neighbours
    for (long dm = -1; dm <= 1; ++dm)
        for (long dn = -1; dn <= 1; ++dn) {
            cplx cand = t - double(m + dm) * w1 - double(n + dn) * w2;
            if (std::abs(cand) < std::abs(best)) {
                best = cand;
                m += dm;
                n += dn;
                dm = dn = 2;  // restart not needed; local scan is enough
            }
        }
    return best;
}

Invariants invariants_from_cubic(cplx E) { return {0.0, 0.5 * E}; }

Lattice lattice_from_invariants(const Invariants& inv) {
    if (inv.degenerate()) throw std::domain_error("degenerate invariants");

    // synthetic spec with 2(E - V) = 4w^3 - g2 w - g3
    PolynomialC V({0.5 * inv.g3, 0.5 * inv.g2, 0.0, -2.0});
    ProblemSpec s = ProblemSpec::general(V, 0.0);

    QuadratureResult p01 = cycle_integral(s, Cycle{0, 1});
    QuadratureResult p02 = cycle_integral(s, Cycle{0, 2});
    QuadratureResult p12 = cycle_integral(s, Cycle{1, 2});

    std::vector<cplx> cands = {p01.value, p02.value, p12.value};
    std::sort(cands.begin(), cands.end(), [](cplx a, cplx b) {
        double ia = std::abs(a.imag()) / std::max(1e-300, std::abs(a));
        double ib = std::abs(b.imag()) / std::max(1e-300, std::abs(b));
        if (std::abs(ia - ib) > 1e-9) return ia < ib;  // prefer the real one
        return std::abs(a) < std::abs(b);
    });

    Lattice lat;
    lat.w1 = cands[0];
    // second generator: most independent of w1
    double best = -1.0;
    for (std::size_t i = 1; i < cands.size(); ++i) {
        double indep = std::abs((cands[i] / lat.w1).imag());
        if (indep > best) {
            best = indep;
            lat.w2 = cands[i];
        }
    }
    if ((lat.w2 / lat.w1).imag() < 0.0) lat.w2 = -lat.w2;
    // Lagrange reduction of the basis
    for (int it = 0; it < 16; ++it) {
        bool changed = false;
        if (std::abs(lat.w2 - lat.w1) < std::abs(lat.w2)) { lat.w2 -= lat.w1; changed = true; }
        if (std::abs(lat.w2 + lat.w1) < std::abs(lat.w2)) { lat.w2 += lat.w1; changed = true; }
        if (!changed) break;
    }
    if ((lat.w2 / lat.w1).imag() < 0.0) lat.w2 = -lat.w2;
    // tie-break on the hexagonal boundary: prefer Re(w2/w1) >= 0, so the
    // equianharmonic ratio lands on e^{i pi/3}
    if ((lat.w2 / lat.w1).real() < -1e-12 &&
        std::abs(std::abs(lat.w2 + lat.w1) - std::abs(lat.w2)) < 1e-9 * std::abs(lat.w2))
        lat.w2 += lat.w1;
    return lat;
}

WpValue wp(cplx t, const Invariants& inv, const Lattice& lat) {
    long m, n;
    cplx tr = lat.reduce(t, m, n);
    const double mn = lat.min_norm();
    if (std::abs(tr) <= std::max(kPoleTol, 1e-13 * mn))
        throw std::domain_error("pole");

    const double radius = kSeriesRadius * mn;
    int halvings = 0;
    cplx s = tr;
    while (std::abs(s) > radius && halvings < 40) {
        s *= 0.5;
        ++halvings;
    }

    // Laurent coefficients: c2 = g2/20, c3 = g3/28,
    // c_k = 3/((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}
    cplx c[kSeriesOrder + 1] = {};
    c[2] = inv.g2 / 20.0;
    c[3] = inv.g3 / 28.0;
    for (int k = 4; k <= kSeriesOrder; ++k) {
        cplx acc = 0.0;
        for (int j = 2; j <= k - 2; ++j) acc += c[j] * c[k - j];
        c[k] = 3.0 / ((2.0 * k + 1.0) * (k - 3.0)) * acc;
    }

    const cplx s2 = s * s;
    cplx p = 1.0 / s2;
    cplx dp = -2.0 / (s2 * s);
    cplx spow = s2;  // s^{2k-2} for k = 2
    for (int k = 2; k <= kSeriesOrder; ++k) {
        p += c[k] * spow;
        dp += double(2 * k - 2) * c[k] * spow / s;
        spow *= s2;
    }

    // doublings by the curve group law
    for (int i = 0; i < halvings; ++i) {
        cplx slope = (6.0 * p * p - 0.5 * inv.g2) / dp;
        cplx p2 = 0.25 * slope * slope - 2.0 * p;
        cplx dp2 = -(dp + slope * (p2 - p));
        p = p2;
        dp = dp2;
    }

    // curve residual guard
    double scale = std::max({1.0, std::abs(dp) * std::abs(dp), 4.0 * std::abs(p * p * p),
                             std::abs(inv.g2 * p), std::abs(inv.g3)});
    cplx res = dp * dp - (4.0 * p * p * p - inv.g2 * p - inv.g3);
    if (std::abs(res) > 1e-9 * scale)
        throw std::runtime_error("Weierstrass evaluation lost accuracy");
    return {p, dp};
}

CubicFlow::CubicFlow(double E) : inv_(invariants_from_cubic(E)) {
    lat_ = lattice_from_invariants(inv_);
}

WpValue CubicFlow::wp_at(cplx arg) const { return wp(arg, inv_, lat_); }

cplx CubicFlow::z(double t, double a) const {
    return cplx(0.0, 2.0) * wp(cplx(t, a), inv_, lat_).p;
}

double CubicFlow::T1() const { return lat_.w1.real(); }

double CubicFlow::Ttilde() const { return (2.0 * lat_.w2 - lat_.w1).imag(); }

cplx cubic_trajectory(double t, double a, double E) {
    CubicFlow flow(E);
    return flow.z(t, a);
}

}  // namespace epkit
