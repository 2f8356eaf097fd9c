#include "epkit/periods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace epkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirrored).
constexpr int kGauss = 16;
constexpr double kGx[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGw[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

struct GaussNode {
    double x, w;
};

void fill_nodes(GaussNode* nodes) {
    for (int i = 0; i < 8; ++i) {
        nodes[2 * i] = {-kGx[7 - i], kGw[7 - i]};
        nodes[2 * i + 1] = {kGx[7 - i], kGw[7 - i]};
    }
    std::sort(nodes, nodes + kGauss, [](GaussNode a, GaussNode b) { return a.x < b.x; });
}

/// Horner deflation: q with p(z) = (z - r) q(z) + p(r).
PolynomialC deflate(const PolynomialC& p, cplx r) {
    const int n = p.degree();
    std::vector<cplx> q(n);
    cplx carry = p.coeff(n);
    for (int k = n - 1; k >= 1; --k) {
        q[k] = carry;
        carry = p.coeff(k) + r * carry;
    }
    q[0] = carry;
    return PolynomialC(std::move(q));
}

/// One parametrized piece of an integration contour, u in [0, 1].  Sqrt
/// legs carry the polynomial deflated by their singular endpoint so the
/// u^2 substitution cancels the branch-point factor exactly; this keeps
/// the quadrature insensitive to the finite precision of the root.
struct Leg {
    enum Kind { SqrtStart, SqrtEnd, Line, Tail } kind;
    cplx z0, z1;   // endpoints (SqrtStart: z0 singular; SqrtEnd: z1 singular)
    int tail_deg = 0;
    PolynomialC Q;  // deflated polynomial (Sqrt legs) or full P (Line/Tail)
    cplx sq_d;      // principal sqrt(z1-z0) resp. sqrt(z0-z1)

    /// Evaluates position, derivative, and the unsigned sqrt(P) base.
    void node(double u, cplx& z, cplx& dz, cplx& base) const {
        switch (kind) {
            case SqrtStart: {
                cplx d = z1 - z0;
                z = z0 + d * (u * u);
                dz = d * (2.0 * u);
                base = u * sq_d * std::sqrt(Q(z));
                return;
            }
            case SqrtEnd: {
                double v = 1.0 - u;
                cplx d = z1 - z0;
                z = z1 - d * (v * v);
                dz = d * (2.0 * v);
                base = v * sq_d * std::sqrt(Q(z));  // sq_d = sqrt(z0 - z1)
                return;
            }
            case Line: {
                z = z0 + (z1 - z0) * u;
                dz = z1 - z0;
                base = std::sqrt(Q(z));
                return;
            }
            case Tail: {
                double sigma = 1.0 - u;
                double q = 2.0 / (tail_deg - 2);
                z = z0 * std::pow(sigma, -q);
                dz = z0 * q * std::pow(sigma, -q - 1.0);
                base = std::sqrt(Q(z));
                return;
            }
        }
    }
};

struct BranchWalkResult {
    cplx integral;
    bool ok = true;
    std::string diag;
};

/// Composite Gauss-Legendre walk over the legs, square-root branch tracked
/// by continuity node to node.  Sign convention: positive base at the very
/// first node.
BranchWalkResult walk(const std::vector<Leg>& legs, int panels_per_leg) {
    GaussNode nodes[kGauss];
    fill_nodes(nodes);

    BranchWalkResult out;
    cplx acc = 0.0;
    cplx w_prev = 0.0;
    bool first = true;
    for (const Leg& leg : legs) {
        for (int p = 0; p < panels_per_leg; ++p) {
            double ua = double(p) / panels_per_leg;
            double ub = double(p + 1) / panels_per_leg;
            double half = 0.5 * (ub - ua), midu = 0.5 * (ua + ub);
            for (int k = 0; k < kGauss; ++k) {
                double u = midu + half * nodes[k].x;
                cplx z, dz, w;
                leg.node(u, z, dz, w);
                if (first) {
                    first = false;
                } else if (std::abs(w + w_prev) < std::abs(w - w_prev)) {
                    w = -w;
                }
                if (!(std::abs(w) > 0.0)) {
                    out.ok = false;
                    std::ostringstream os;
                    os << "integrand singular on contour near z = (" << z.real() << ","
                       << z.imag() << ")";
                    out.diag = os.str();
                    return out;
                }
                w_prev = w;
                acc += nodes[k].w * half * dz / w;
            }
        }
    }
    out.integral = acc;
    return out;
}

Leg make_sqrt_start(const PolynomialC& P, cplx za, cplx to) {
    Leg l{Leg::SqrtStart, za, to, 0, deflate(P, za), std::sqrt(to - za)};
    return l;
}

Leg make_sqrt_end(const PolynomialC& P, cplx from, cplx zb) {
    Leg l{Leg::SqrtEnd, from, zb, 0, deflate(P, zb), std::sqrt(from - zb)};
    return l;
}

/// Newton polish of a simple root; keeps the deflation remainder at
/// rounding level.
cplx polish_root(const PolynomialC& P, cplx r) {
    PolynomialC dP = P.derivative();
    for (int i = 0; i < 4; ++i) {
        cplx d = dP(r);
        if (!(std::abs(d) > 0.0)) break;
        cplx step = P(r) / d;
        r -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(r))) break;
    }
    return r;
}

/// Chord contour between branch points za -> zb, with a perpendicular
/// midpoint offset when another branch point sits inside a tube around the
/// chord.  The offset fraction is fixed; the rule keeps contours away from
/// foreign square-root branch points.
std::vector<Leg> pair_contour(const PolynomialC& P, cplx za, cplx zb,
                              const std::vector<cplx>& others) {
    const cplx chord = zb - za;
    const double len = std::abs(chord);
    const cplx mid = 0.5 * (za + zb);
    const cplx unit = chord / len;
    const cplx normal(-unit.imag(), unit.real());

    bool deform = false;
    cplx offender;
    double best = std::numeric_limits<double>::infinity();
    for (cplx w : others) {
        // distance from w to the segment [za, zb]
        cplx rel = (w - za) / chord;
        double t = std::clamp(rel.real(), 0.0, 1.0);
        double d = std::abs(w - (za + t * chord));
        if (d < 0.1 * len && d < best) {
            best = d;
            offender = w;
            deform = true;
        }
    }
    cplx via = mid;
    if (deform) {
        double side = ((offender - mid) / normal).real() >= 0.0 ? -1.0 : 1.0;
        via = mid + side * 0.35 * len * normal;
    }
    return {make_sqrt_start(P, za, via), make_sqrt_end(P, via, zb)};
}

/// Contour from a branch point za out to infinity along direction dir.
std::vector<Leg> escape_contour(const PolynomialC& P, cplx za, cplx dir) {
    const int n = P.degree();
    const cplx lead = P.coeff(n);
    double L = std::max(10.0, 4.0 * std::abs(za));
    for (int k = 0; k < n; ++k) {
        double ak = std::abs(P.coeff(k));
        if (ak > 0.0)
            L = std::max(L, std::pow(200.0 * ak / std::abs(lead), 1.0 / (n - k)));
    }
    cplx zfar = za + dir / std::abs(dir) * L;
    Leg tail{Leg::Tail, zfar, 0.0, n, P, 0.0};
    return {make_sqrt_start(P, za, zfar), tail};
}

QuadratureResult integrate_legs(const std::vector<Leg>& legs) {
    cplx prev = 0.0;
    double rel = std::numeric_limits<double>::infinity();
    std::string diag;
    for (int panels = 8; panels <= 4096; panels *= 2) {
        BranchWalkResult r = walk(legs, panels);
        if (!r.ok) { diag = r.diag; continue; }
        if (panels > 8) {
            rel = std::abs(r.integral - prev) / std::max(1e-300, std::abs(r.integral));
            if (rel <= 1e-10) return {r.integral, rel};
        }
        prev = r.integral;
    }
    if (rel <= 1e-8) return {prev, rel};
    std::ostringstream os;
    os << "branch tracking failed to converge (rel err " << rel << ")";
    if (!diag.empty()) os << "; " << diag;
    os << "; contour:";
    for (const Leg& l : legs)
        os << " [" << l.z0.real() << "," << l.z0.imag() << " -> " << l.z1.real() << ","
           << l.z1.imag() << "]";
    throw std::runtime_error(os.str());
}

cplx canonical_sign(cplx v) {
    double m = std::abs(v);
    if (m == 0.0) return v;
    if (v.real() < -1e-12 * m) return -v;
    if (std::abs(v.real()) <= 1e-12 * m && v.imag() < 0.0) return -v;
    return v;
}

/// Raw (non-canonical) period between two explicit branch points of P.
QuadratureResult raw_pair_period(const PolynomialC& P, cplx za, cplx zb,
                                 const std::vector<cplx>& others) {
    za = polish_root(P, za);
    zb = polish_root(P, zb);
    QuadratureResult q = integrate_legs(pair_contour(P, za, zb, others));
    q.value *= 2.0;
    return q;
}

}  // namespace

double closed_form_cubic_T1(double E) {
    if (!(E > 0.0)) throw std::domain_error("cubic closed form requires E > 0");
    return 5.0 * std::sqrt(kPi / 6.0) * std::tgamma(4.0 / 3.0) / std::tgamma(11.0 / 6.0) *
           std::pow(E, -1.0 / 6.0);
}

PeriodData closed_form_quintic(double E) {
    if (!(E > 0.0)) throw std::domain_error("quintic closed form requires E > 0");
    const double K = 1.4 * std::sqrt(2.0 * kPi) * std::tgamma(1.2) / std::tgamma(1.7) *
                     std::pow(E, -0.3);
    const double s1 = std::sin(kPi / 10.0), s3 = std::sin(3.0 * kPi / 10.0);
    PeriodData d;
    d.T1 = K * std::cos(kPi / 10.0);
    d.T2 = K * std::cos(3.0 * kPi / 10.0);
    d.T3 = d.T1 - d.T2;
    d.Ti1 = K * (1.0 + 2.0 * s3 + s1);
    d.Ti2 = K * (1.0 + s3);
    d.Ti3 = K * (s3 + s1);
    d.E = E;
    d.g = 1.0;
    return d;
}

QuadratureResult cycle_integral(const ProblemSpec& spec, const Cycle& cycle) {
    const PolynomialC P = [&] {
        PolynomialC emv = spec.e_minus_v();
        std::vector<cplx> c(emv.coeffs());
        for (cplx& x : c) x *= 2.0;
        return PolynomialC(std::move(c));
    }();
    TurningPointSet tps = turning_points(spec);
    const int ntp = static_cast<int>(tps.points.size());
    if (cycle.a < 0 || cycle.a >= ntp) throw std::invalid_argument("cycle index out of range");
    const cplx za = tps.points[cycle.a];

    QuadratureResult q;
    if (cycle.to_infinity) {
        if (tps.multiplicity[cycle.a] > 1)
            throw std::domain_error("cycle pinched at exceptional point");
        cplx dir = -spec.dV(za);
        cplx zap = polish_root(P, za);
        q = integrate_legs(escape_contour(P, zap, dir));
        q.value *= 2.0;
    } else {
        if (cycle.b < 0 || cycle.b >= ntp || cycle.b == cycle.a)
            throw std::invalid_argument("cycle index out of range");
        const cplx zb = tps.points[cycle.b];
        double scale = std::max({1.0, std::abs(za), std::abs(zb)});
        if (std::abs(za - zb) <= 1e-8 * scale ||
            tps.multiplicity[cycle.a] > 1 || tps.multiplicity[cycle.b] > 1)
            throw std::domain_error("cycle pinched at exceptional point");
        std::vector<cplx> others;
        for (int i = 0; i < ntp; ++i)
            if (i != cycle.a && i != cycle.b) others.push_back(tps.points[i]);
        q = raw_pair_period(P, za, zb, others);
    }
    q.value = canonical_sign(q.value) * double(cycle.orientation);
    return q;
}

namespace {

/// Continue the raw pair period from theta0 to theta1 along E e^{i theta},
/// tracking branch-point labels and the overall sign by continuity.
cplx continue_along(const ProblemSpec& spec, cplx& pa, cplx& pb, cplx I0,
                    double theta0, double theta1) {
    cplx I_prev = I0;
    const double span = theta1 - theta0;
    const int base_steps = std::max(96, int(96 * std::abs(span) / (2.0 * kPi)));
    double theta = theta0;
    double dtheta = span / base_steps;
    int guard = 0;

    while (std::abs(theta - theta1) > 1e-15 * std::max(1.0, std::abs(span))) {
        if (++guard > 200000) throw std::runtime_error("monodromy continuation stalled");
        double theta_next = theta + dtheta;
        if ((dtheta > 0.0 && theta_next > theta1) || (dtheta < 0.0 && theta_next < theta1))
            theta_next = theta1;

        ProblemSpec s = spec;
        s.E = spec.E * std::polar(1.0, theta_next);
        PolynomialC emv = s.e_minus_v();
        std::vector<RootM> rs = roots(emv);

        auto nearest = [&](cplx ref) {
            cplx best = rs[0].z;
            double bd = std::abs(rs[0].z - ref);
            for (const RootM& r : rs) {
                double d = std::abs(r.z - ref);
                if (d < bd) { bd = d; best = r.z; }
            }
            return std::pair<cplx, double>(best, bd);
        };
        auto [na, da] = nearest(pa);
        auto [nb, db] = nearest(pb);

        double min_other = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rs.size(); ++i)
            for (std::size_t j = i + 1; j < rs.size(); ++j)
                min_other = std::min(min_other, std::abs(rs[i].z - rs[j].z));
        double scale = std::max({1.0, std::abs(na), std::abs(nb)});
        if (min_other < 1e-6 * scale) throw std::domain_error("pinch during continuation");
        bool too_fast = da > 0.35 * min_other || db > 0.35 * min_other ||
                        std::abs(na - nb) < 1e-6 * scale;
        if (too_fast) {
            dtheta *= 0.5;
            if (std::abs(dtheta) < std::abs(span) / (base_steps * 4096.0))
                throw std::domain_error("pinch during continuation");
            continue;
        }

        std::vector<cplx> others;
        for (const RootM& r : rs)
            if (std::abs(r.z - na) > 1e-12 && std::abs(r.z - nb) > 1e-12)
                others.push_back(r.z);
        PolynomialC P = [&] {
            std::vector<cplx> c(emv.coeffs());
            for (cplx& x : c) x *= 2.0;
            return PolynomialC(std::move(c));
        }();
        QuadratureResult q = raw_pair_period(P, na, nb, others);
        cplx I = q.value;
        if (std::abs(-I - I_prev) < std::abs(I - I_prev)) I = -I;
        if (std::abs(I - I_prev) > 0.25 * std::abs(I_prev)) {
            dtheta *= 0.5;
            if (std::abs(dtheta) < std::abs(span) / (base_steps * 4096.0))
                throw std::runtime_error("monodromy step control collapsed");
            continue;
        }

        pa = na;
        pb = nb;
        I_prev = I;
        theta = theta_next;
        if (std::abs(dtheta) < std::abs(span) / base_steps) dtheta *= 2.0;
    }
    return I_prev;
}

}  // namespace

cplx monodromy_continue(const ProblemSpec& spec, const Cycle& cycle, int turns) {
    QuadratureResult start = cycle_integral(spec, cycle);
    if (turns == 0) return start.value;
    if (cycle.to_infinity)
        throw std::invalid_argument("monodromy continuation needs a two-point cycle");
    TurningPointSet tps0 = turning_points(spec);
    cplx pa = tps0.points[cycle.a], pb = tps0.points[cycle.b];
    return continue_along(spec, pa, pb, start.value, 0.0, -2.0 * kPi * turns);
}

cplx monodromy_roundtrip(const ProblemSpec& spec, const Cycle& cycle, int turns) {
    QuadratureResult start = cycle_integral(spec, cycle);
    if (turns == 0) return start.value;
    if (cycle.to_infinity)
        throw std::invalid_argument("monodromy continuation needs a two-point cycle");
    TurningPointSet tps0 = turning_points(spec);
    cplx pa = tps0.points[cycle.a], pb = tps0.points[cycle.b];
    cplx there = continue_along(spec, pa, pb, start.value, 0.0, -2.0 * kPi * turns);
    return continue_along(spec, pa, pb, there, -2.0 * kPi * turns, 0.0);
}

std::vector<std::pair<std::string, Cycle>> canonical_cycles(const ProblemSpec& spec) {
    TurningPointSet tps = turning_points(spec);
    const int n = static_cast<int>(tps.points.size());

    std::vector<std::pair<int, int>> mirror_pairs;
    std::vector<bool> taken(n, false);
    for (int i = 0; i < n; ++i) {
        if (taken[i]) continue;
        cplx img = -std::conj(tps.points[i]);
        if (std::abs(tps.points[i] - img) < 1e-8 * std::max(1.0, std::abs(img))) continue;
        for (int j = i + 1; j < n; ++j) {
            if (taken[j]) continue;
            if (std::abs(tps.points[j] - img) < 1e-6 * std::max(1.0, std::abs(img))) {
                mirror_pairs.emplace_back(i, j);
                taken[i] = taken[j] = true;
                break;
            }
        }
    }
    std::sort(mirror_pairs.begin(), mirror_pairs.end(), [&](auto a, auto b) {
        return tps.points[a.first].imag() < tps.points[b.first].imag();
    });

    std::vector<std::pair<std::string, Cycle>> out;
    const char* names[] = {"low-pair", "upper-pair"};
    for (std::size_t k = 0; k < mirror_pairs.size() && k < 2; ++k)
        out.emplace_back(names[k], Cycle{mirror_pairs[k].first, mirror_pairs[k].second});

    // escape cycle from the highest imaginary-axis point, if one sits above
    // the real axis
    int top = -1;
    for (int i : tps.imaginary_axis_indices())
        if (tps.points[i].imag() > 0.0 && (top < 0 || tps.points[i].imag() > tps.points[top].imag()))
            top = i;
    if (top >= 0) out.emplace_back("escape", Cycle{top, -1, +1, true});
    return out;
}

}  // namespace epkit
