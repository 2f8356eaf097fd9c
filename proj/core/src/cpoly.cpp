#include "epkit/cpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace epkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRootResidualTol = 1e-12;   // relative to eval_scale
constexpr double kClusterTol = 1e-8;
constexpr int kMaxAberthIter = 400;

}  // namespace

PolynomialC::PolynomialC(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    for (const cplx& c : coeffs_) coeff_scale_ = std::max(coeff_scale_, std::abs(c));
    degree_ = -1;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k) {
        if (std::abs(coeffs_[k]) > kDropTol * coeff_scale_ && std::abs(coeffs_[k]) > 0.0) {
            degree_ = k;
            break;
        }
    }
}

cplx PolynomialC::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[k];
}

cplx PolynomialC::operator()(cplx z) const {
    cplx acc = 0.0;
    for (int k = degree_; k >= 0; --k) acc = acc * z + coeffs_[k];
    return acc;
}

double PolynomialC::eval_scale(cplx z) const {
    double r = std::abs(z), acc = 0.0, zp = 1.0;
    for (int k = 0; k <= degree_; ++k) {
        acc += std::abs(coeffs_[k]) * zp;
        zp *= r;
    }
    return acc;
}

PolynomialC PolynomialC::derivative() const {
    if (degree_ < 1) return PolynomialC(std::vector<cplx>{});
    std::vector<cplx> d(degree_);
    for (int k = 1; k <= degree_; ++k) d[k - 1] = coeffs_[k] * double(k);
    return PolynomialC(std::move(d));
}

PolynomialC PolynomialC::operator-() const {
    std::vector<cplx> c(coeffs_);
    for (cplx& x : c) x = -x;
    return PolynomialC(std::move(c));
}

PolynomialC PolynomialC::plus_constant(cplx c) const {
    std::vector<cplx> cs(coeffs_);
    if (cs.empty()) cs.push_back(0.0);
    cs[0] += c;
    return PolynomialC(std::move(cs));
}

// --------------------------------------------------------------------------
// Aberth-Ehrlich simultaneous root iteration.

std::vector<RootM> roots(const PolynomialC& p) {
    const int n = p.degree();
    if (n < 0) throw std::domain_error("degenerate polynomial");
    if (n == 0) throw std::domain_error("degenerate polynomial");

    // Strip exact/negligible low-order coefficients: roots at the origin.
    int n_zero = 0;
    while (n_zero < n && std::abs(p.coeff(n_zero)) <= PolynomialC::kDropTol * p.coeff_scale())
        ++n_zero;

    std::vector<cplx> work(p.coeffs().begin() + n_zero, p.coeffs().begin() + n + 1);
    PolynomialC q(std::move(work));
    PolynomialC dq = q.derivative();
    const int m = q.degree();

    std::vector<cplx> zs;
    if (m > 0) {
        // Initial ring: geometric-mean radius clamped by the Cauchy bound,
        // with a fixed angular offset that breaks coefficient symmetry.
        const cplx an = q.coeff(m);
        double cauchy = 0.0;
        for (int k = 0; k < m; ++k) cauchy = std::max(cauchy, std::abs(q.coeff(k) / an));
        cauchy += 1.0;
        double r0 = std::abs(q.coeff(0)) > 0.0
                        ? std::pow(std::abs(q.coeff(0) / an), 1.0 / m)
                        : 0.5 * cauchy;
        r0 = std::clamp(r0, 1e-6 * cauchy, cauchy);

        zs.resize(m);
        for (int i = 0; i < m; ++i) {
            double th = 2.0 * kPi * i / m + 0.376;
            zs[i] = r0 * cplx(std::cos(th), std::sin(th));
        }

        bool converged = false;
        for (int iter = 0; iter < kMaxAberthIter && !converged; ++iter) {
            converged = true;
            for (int i = 0; i < m; ++i) {
                cplx pz = q(zs[i]);
                if (std::abs(pz) <= kRootResidualTol * q.eval_scale(zs[i])) continue;
                converged = false;
                cplx dpz = dq(zs[i]);
                cplx w = (std::abs(dpz) > 0.0) ? pz / dpz : cplx(0.0);
                cplx s = 0.0;
                for (int j = 0; j < m; ++j) {
                    if (j == i) continue;
                    cplx d = zs[i] - zs[j];
                    if (std::abs(d) < 1e-300) d = cplx(1e-300, 0.0);
                    s += 1.0 / d;
                }
                cplx denom = 1.0 - w * s;
                cplx step = (std::abs(denom) > 1e-300) ? w / denom : w;
                if (std::abs(dpz) == 0.0) {
                    // stationary start: nudge off the critical point
                    step = cplx(1e-3 * (1.0 + std::abs(zs[i])), 1e-3);
                }
                zs[i] -= step;
            }
        }
        if (!converged) {
            // Accept iterates that individually satisfy the residual test;
            // otherwise carry the best iterate in the error message.
            for (int i = 0; i < m; ++i) {
                if (std::abs(q(zs[i])) > 1e-6 * q.eval_scale(zs[i]))
                    throw std::runtime_error(
                        "root iteration did not converge; best iterate (" +
                        std::to_string(zs[i].real()) + "," + std::to_string(zs[i].imag()) + ")");
            }
        }
    }
    for (int i = 0; i < n_zero; ++i) zs.push_back(0.0);

    // Cluster merge: greedy union of points within the cluster tolerance.
    std::vector<RootM> out;
    std::vector<bool> used(zs.size(), false);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (used[i]) continue;
        cplx c = zs[i];
        int mult = 1;
        used[i] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t j = 0; j < zs.size(); ++j) {
                if (used[j]) continue;
                double scale = std::max({1.0, std::abs(c), std::abs(zs[j])});
                if (std::abs(zs[j] - c) <= kClusterTol * scale) {
                    c = (c * double(mult) + zs[j]) / double(mult + 1);
                    ++mult;
                    used[j] = true;
                    grew = true;
                }
            }
        }
        out.push_back({c, mult});
    }

    // A genuine multiple root leaves the iterates split by ~sqrt(eps) even
    // though the true roots coincide.  Polish suspicious pairs onto the
    // nearby critical point of p; merge only when the residual there is at
    // rounding level, which keeps close simple roots apart.
    const PolynomialC dp = p.derivative();
    const PolynomialC ddp = dp.derivative();
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < out.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < out.size() && !merged; ++j) {
                double scale = std::max({1.0, std::abs(out[i].z), std::abs(out[j].z)});
                double sep = std::abs(out[i].z - out[j].z);
                if (sep > 1e-4 * scale) continue;
                cplx zc = 0.5 * (out[i].z + out[j].z);
                for (int it = 0; it < 30; ++it) {
                    cplx d1 = dp(zc), d2 = ddp(zc);
                    if (std::abs(d2) == 0.0) break;
                    cplx step = d1 / d2;
                    zc -= step;
                    if (std::abs(step) < 1e-16 * scale) break;
                }
                if (std::abs(zc - 0.5 * (out[i].z + out[j].z)) > 2.0 * sep + kClusterTol * scale)
                    continue;  // critical point wandered away: not this pair
                if (std::abs(p(zc)) <= 100.0 * std::numeric_limits<double>::epsilon() *
                                           std::max(1e-300, p.eval_scale(zc))) {
                    int m2 = out[i].multiplicity + out[j].multiplicity;
                    out[i] = {zc, m2};
                    out.erase(out.begin() + j);
                    merged = true;
                }
            }
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Resultant via Sylvester matrix determinant (partial-pivot LU).

cplx resultant(const PolynomialC& p, const PolynomialC& q) {
    const int n = p.degree(), m = q.degree();
    if (n < 0 || m < 0) throw std::domain_error("degenerate polynomial");
    if (n == 0 && m == 0) return 1.0;
    if (n == 0) return std::pow(p.coeff(0), m);
    if (m == 0) return std::pow(q.coeff(0), n);

    const int dim = n + m;
    std::vector<cplx> a(static_cast<std::size_t>(dim) * dim, 0.0);
    auto at = [&](int r, int c) -> cplx& { return a[static_cast<std::size_t>(r) * dim + c]; };
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) at(r, r + k) = p.coeff(n - k);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) at(m + r, r + k) = q.coeff(m - k);

    cplx det = 1.0;
    for (int col = 0; col < dim; ++col) {
        int piv = col;
        double best = std::abs(at(col, col));
        for (int r = col + 1; r < dim; ++r) {
            double v = std::abs(at(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int c = col; c < dim; ++c) std::swap(at(piv, c), at(col, c));
            det = -det;
        }
        det *= at(col, col);
        for (int r = col + 1; r < dim; ++r) {
            cplx f = at(r, col) / at(col, col);
            if (f == cplx(0.0)) continue;
            for (int c = col; c < dim; ++c) at(r, c) -= f * at(col, c);
        }
    }
    return det;
}

cplx discriminant(const PolynomialC& p) {
    const int n = p.degree();
    if (n < 1) throw std::domain_error("degenerate polynomial");
    cplx res = resultant(p, p.derivative());
    double sign = (static_cast<long>(n) * (n - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * res / p.coeff(n);
}

// --------------------------------------------------------------------------
// ProblemSpec

ProblemSpec ProblemSpec::cubic(double omega2, double g, cplx E) {
    ProblemSpec s;
    s.family = Family::Cubic;
    s.omega2 = omega2;
    s.g = g;
    s.E = E;
    return s;
}

ProblemSpec ProblemSpec::quintic(double g, cplx E, WedgeProblem wedge) {
    ProblemSpec s;
    s.family = Family::Quintic;
    s.g = g;
    s.E = E;
    s.wedge = wedge;
    return s;
}

ProblemSpec ProblemSpec::pure_quintic(cplx E) {
    ProblemSpec s;
    s.family = Family::General;
    s.custom = PolynomialC({0.0, 0.0, 0.0, 0.0, 0.0, cplx(0.0, -1.0)});
    s.E = E;
    return s;
}

ProblemSpec ProblemSpec::general(PolynomialC potential, cplx E) {
    ProblemSpec s;
    s.family = Family::General;
    s.custom = std::move(potential);
    s.E = E;
    return s;
}

PolynomialC ProblemSpec::potential() const {
    switch (family) {
        case Family::Cubic:
            return PolynomialC({0.0, 0.0, 0.5 * omega2, cplx(0.0, g)});
        case Family::Quintic:
            return PolynomialC({0.0, 0.0, 0.5, 0.0, 0.0, cplx(0.0, -g)});
        case Family::General:
            return custom;
    }
    return custom;
}

PolynomialC ProblemSpec::e_minus_v() const {
    return (-potential()).plus_constant(E);
}

cplx ProblemSpec::V(cplx z) const { return potential()(z); }
cplx ProblemSpec::dV(cplx z) const { return potential().derivative()(z); }

// --------------------------------------------------------------------------

int TurningPointSet::count_with_multiplicity() const {
    int c = 0;
    for (int m : multiplicity) c += m;
    return c;
}

std::vector<int> TurningPointSet::imaginary_axis_indices(double tol) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double scale = std::max(1.0, std::abs(points[i]));
        if (std::abs(points[i].real()) <= tol * scale) idx.push_back(static_cast<int>(i));
    }
    return idx;
}

TurningPointSet turning_points(const ProblemSpec& spec) {
    PolynomialC p = spec.e_minus_v();
    if (p.degree() < 1) throw std::domain_error("constant potential has no turning points");
    std::vector<RootM> rs = roots(p);
    std::sort(rs.begin(), rs.end(), [](const RootM& a, const RootM& b) {
        double aa = std::arg(a.z), ab = std::arg(b.z);
        if (std::abs(aa - ab) > 1e-12) return aa < ab;
        return std::abs(a.z) < std::abs(b.z);
    });

    TurningPointSet out;
    for (const RootM& r : rs) {
        out.points.push_back(r.z);
        out.multiplicity.push_back(r.multiplicity);
    }

    // symmetry under z -> -conj(z) (reflection about the imaginary axis)
    out.mirror_symmetric = true;
    for (const RootM& r : rs) {
        cplx img = -std::conj(r.z);
        double best = std::numeric_limits<double>::infinity();
        for (const RootM& s : rs) best = std::min(best, std::abs(s.z - img));
        if (best > 1e-8 * std::max(1.0, std::abs(r.z))) {
            out.mirror_symmetric = false;
            break;
        }
    }
    return out;
}

// --------------------------------------------------------------------------

double classical_exceptional_point(double E) {
    if (E >= 0.0) throw std::domain_error("no classical exceptional point");
    const double g_formula = 0.2 * std::pow(-3.0 / (10.0 * E), 1.5);

    // Cross-check: the discriminant of E - V(z) as a function of g changes
    // sign at g*.  With z = i y the polynomial has real coefficients, so the
    // discriminant is real up to rounding.
    auto disc_at = [&](double g) {
        ProblemSpec s = ProblemSpec::quintic(g, E);
        return discriminant(s.e_minus_v()).real();
    };
    double lo = 0.5 * g_formula, hi = 1.5 * g_formula;
    double flo = disc_at(lo), fhi = disc_at(hi);
    if (flo * fhi >= 0.0)
        throw std::runtime_error("discriminant cross-check failed to bracket g*");
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = disc_at(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (flo * fm < 0.0) { hi = mid; fhi = fm; }
        else { lo = mid; flo = fm; }
        if (hi - lo <= 1e-14 * g_formula) break;
    }
    double g_disc = 0.5 * (lo + hi);
    if (std::abs(g_disc - g_formula) > 1e-10 * g_formula)
        throw std::runtime_error("discriminant zero disagrees with closed form for g*");
    return g_formula;
}

cplx coalesced_turning_point(double E) {
    if (E >= 0.0) throw std::domain_error("no classical exceptional point");
    const double y = std::sqrt(-10.0 * E / 3.0);
    const cplx z(0.0, y);
    ProblemSpec s = ProblemSpec::quintic(classical_exceptional_point(E), E);
    const double scale = std::max(1.0, std::abs(E));
    if (std::abs(s.V(z) - cplx(E)) > 1e-10 * scale || std::abs(s.dV(z)) > 1e-10 * scale)
        throw std::runtime_error("tangency verification failed at coalesced turning point");
    return z;
}

int imaginary_axis_turning_count(double E, double g) {
    // real roots of f(y) = g y^5 - y^2/2 - E, counted by sign changes on a
    // bracketing grid plus bisection refinement of each bracket
    auto f = [&](double y) { return g * std::pow(y, 5) - 0.5 * y * y - E; };
    const double ybound = 2.0 + std::pow((std::abs(E) + 1.0) / std::max(g, 1e-12), 0.2) +
                          std::sqrt(2.0 * std::abs(E) + 1.0);
    const int N = 20000;
    int count = 0;
    double prev = f(-ybound);
    for (int i = 1; i <= N; ++i) {
        double y = -ybound + 2.0 * ybound * i / N;
        double cur = f(y);
        if (prev == 0.0) ++count;
        else if (prev * cur < 0.0) ++count;
        prev = cur;
    }
    return count;
}

// --------------------------------------------------------------------------

PolynomialC g2_vacuum_polynomial(const G2Params& p) {
    if (!(p.m > 0.0) || !(p.Lambda > 0.0) || p.lambda < 0.0)
        throw std::domain_error("G2 parameters must be positive");
    const double c = p.lambda * p.lambda / (p.m * p.m);
    const double L9 = std::pow(p.Lambda, 9);
    // m u^4 (1 - c u)^2 - Lambda^9
    return PolynomialC({-L9, 0.0, 0.0, 0.0, p.m, -2.0 * p.m * c, p.m * c * c});
}

std::vector<cplx> g2_vacua(const G2Params& p) {
    std::vector<RootM> rs = roots(g2_vacuum_polynomial(p));
    std::vector<cplx> out;
    for (const RootM& r : rs)
        for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.z);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (std::abs(std::abs(a) - std::abs(b)) > 1e-12) return std::abs(a) < std::abs(b);
        return std::arg(a) < std::arg(b);
    });
    return out;
}

G2CoalescenceScan g2_coalescence_scan(double m, double Lambda) {
    auto disc_at = [&](double lambda2) {
        G2Params p{m, std::sqrt(lambda2), Lambda};
        return discriminant(g2_vacuum_polynomial(p)).real();
    };
    // Coarse scan for a sign change, then bisection.
    const double lo0 = 0.02, hi0 = 2.0;
    const int N = 200;
    double lo = lo0, hi = hi0, flo = disc_at(lo0);
    bool bracketed = false;
    for (int i = 1; i <= N; ++i) {
        double x = lo0 + (hi0 - lo0) * i / N;
        double fx = disc_at(x);
        if (flo * fx < 0.0) {
            hi = x;
            lo = lo0 + (hi0 - lo0) * (i - 1) / N;
            bracketed = true;
            break;
        }
        flo = fx;
    }
    if (!bracketed) throw std::runtime_error("no vacuum coalescence found in scan range");
    flo = disc_at(lo);
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        double fm = disc_at(mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (flo * fm < 0.0) hi = mid;
        else { lo = mid; flo = fm; }
    }

    G2CoalescenceScan out;
    out.lambda2 = 0.5 * (lo + hi);
    out.uncertainty = hi - lo;
    // locate the merged pair at the critical coupling
    G2Params pc{m, std::sqrt(out.lambda2), Lambda};
    std::vector<cplx> us = g2_vacua(pc);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = i + 1; j < us.size(); ++j)
            if (std::abs(us[i] - us[j]) < best) {
                best = std::abs(us[i] - us[j]);
                out.merged_vacuum = 0.5 * (us[i] + us[j]);
            }
    return out;
}

}  // namespace epkit
