#include "epkit/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "epkit/ode.hpp"
#include "epkit/periods.hpp"

namespace epkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLaunchDelta = 1e-4;
constexpr double kStemGapTol = 1e-5;

double axis_phi(TimeAxis axis, double ray_angle) {
    switch (axis) {
        case TimeAxis::Real: return 0.0;
        case TimeAxis::Imaginary: return 0.5 * kPi;
        case TimeAxis::Ray: return ray_angle;
    }
    return 0.0;
}

struct Flow {
    PolynomialC dV;
    cplx phase2;  // e^{2 i phi}: z'' in the s parameter picks up this factor
    void operator()(double, const CVec<2>& y, CVec<2>& dy) const {
        dy[0] = y[1];
        dy[1] = -phase2 * dV(y[0]);
    }
};

double energy_residual_rel(const ProblemSpec& spec, const PolynomialC& V, cplx z,
                           cplx zdot) {
    cplx res = 0.5 * zdot * zdot + V(z) - spec.E;
    double scale = std::max({1.0, std::abs(spec.E), std::abs(V(z)),
                             0.5 * std::abs(zdot) * std::abs(zdot)});
    return std::abs(res) / scale;
}

/// Rough orbital-period scale used as a search horizon.
double period_scale(const ProblemSpec& spec) {
    const double aE = std::max(std::abs(spec.E), 0.05);
    double t = 0.0;
    switch (spec.family) {
        case Family::Cubic:
            if (spec.omega2 > 0.0) t = std::max(t, 2.0 * kPi / std::sqrt(spec.omega2));
            if (spec.g > 0.0)
                t = std::max(t, 3.44 * std::pow(aE, -1.0 / 6.0) * std::pow(spec.g, -1.0 / 3.0));
            break;
        case Family::Quintic:
            t = std::max(2.0 * kPi, 3.38 * std::pow(aE, -0.3) *
                                        std::pow(std::max(spec.g, 1e-12), -0.2));
            break;
        case Family::General: {
            PolynomialC V = spec.potential();
            int n = V.degree();
            double an = std::abs(V.coeff(n));
            t = 2.0 * kPi + 4.0 * std::pow(aE, (2.0 - n) / (2.0 * n)) * std::pow(an, -1.0 / n);
            break;
        }
    }
    return std::max(t, 1.0);
}

/// Launch state a small time delta away from rest at a turning point:
/// z = z_tp - V' d^2/2 + V' V'' d^4/24, with the velocity re-projected onto
/// the energy shell.
void launch_from_turning_point(const ProblemSpec& spec, cplx ztp, double delta, cplx& z,
                               cplx& zdot) {
    const PolynomialC V = spec.potential();
    const PolynomialC dV = V.derivative();
    const PolynomialC ddV = dV.derivative();
    const cplx vp = dV(ztp), vpp = ddV(ztp);
    const double d2 = delta * delta;
    z = ztp - 0.5 * vp * d2 + vp * vpp * d2 * d2 / 24.0;
    cplx series_v = -vp * delta + vp * vpp * d2 * delta / 6.0;
    cplx shell = std::sqrt(2.0 * (spec.E - V(z)));
    zdot = (std::abs(shell - series_v) <= std::abs(-shell - series_v)) ? shell : -shell;
}

/// Integrates away from rest at a turning point and returns the trajectory
/// anchored at the turning point itself: sample 0 is (t=0, z_tp, 0), the
/// series-launched state sits at t = delta.
Trajectory run_from_turning_point(const ProblemSpec& spec, cplx ztp, double t_max,
                                  const IntegrateOptions& io) {
    cplx z0, v0;
    launch_from_turning_point(spec, ztp, kLaunchDelta, z0, v0);
    Trajectory run = integrate(spec, z0, v0, t_max, TimeAxis::Real, 0.0, io);

    Trajectory out = run;
    out.samples.clear();
    const PolynomialC V = spec.potential();
    out.samples.push_back({0.0, ztp, 0.0, energy_residual_rel(spec, V, ztp, 0.0)});
    for (const auto& smp : run.samples)
        out.samples.push_back({smp.t + kLaunchDelta, smp.z, smp.zdot, smp.energy_residual});
    if (out.escaped) out.escape_time += kLaunchDelta;
    return out;
}

/// Re-evaluates (z, zdot) at an arbitrary time by re-integrating from the
/// nearest recorded sample.
struct LocalEval {
    const Trajectory* traj;
    Flow flow;
    double phi;

    void at(double t, cplx& z, cplx& zdot) const {
        const auto& ss = traj->samples;
        std::size_t k = 0;
        {
            std::size_t lo = 0, hi = ss.size() - 1;
            while (lo + 1 < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (ss[mid].t <= t) lo = mid;
                else hi = mid;
            }
            k = lo;
        }
        const cplx phase = std::polar(1.0, phi);
        CVec<2> y = {ss[k].z, phase * ss[k].zdot};
        if (t > ss[k].t + 1e-15 * std::max(1.0, std::abs(t))) {
            OdeOptions opt;
            opt.rtol = 1e-12;
            opt.atol = 1e-14;
            integrate_ode<2>(flow, ss[k].t, t, y, opt,
                             [&](double, const CVec<2>& yy, const CVec<2>&) {
                                 y = yy;
                                 return true;
                             });
        }
        z = y[0];
        zdot = y[1] / phase;
    }
};

LocalEval make_eval(const ProblemSpec& spec, const Trajectory& traj) {
    double phi = axis_phi(traj.axis, traj.ray_angle);
    Flow flow{spec.potential().derivative(), std::polar(1.0, 2.0 * phi)};
    return LocalEval{&traj, flow, phi};
}

double cross2(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Filtered orientation sign; 0 when the determinant is below rounding noise.
int orient(cplx p, cplx q, cplx r) {
    cplx u = q - p, v = r - p;
    double det = cross2(u, v);
    double mag = std::abs(u) * std::abs(v);
    if (std::abs(det) <= 1e-13 * mag) return 0;
    return det > 0.0 ? 1 : -1;
}

double point_segment_dist(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) / d).real(), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

/// Cubic Hermite value and derivative between two samples.
void hermite(const Trajectory::Sample& s0, const Trajectory::Sample& s1, double t, cplx& z,
             cplx& zdot) {
    double h = s1.t - s0.t;
    double u = (t - s0.t) / h;
    double u2 = u * u, u3 = u2 * u;
    cplx m0 = s0.zdot * h, m1 = s1.zdot * h;
    z = (2 * u3 - 3 * u2 + 1) * s0.z + (u3 - 2 * u2 + u) * m0 +
        (-2 * u3 + 3 * u2) * s1.z + (u3 - u2) * m1;
    cplx dz = (6 * u2 - 6 * u) * s0.z + (3 * u2 - 4 * u + 1) * m0 +
              (-6 * u2 + 6 * u) * s1.z + (3 * u2 - 2 * u) * m1;
    zdot = dz / h;
}

}  // namespace

Trajectory integrate(const ProblemSpec& spec, cplx z0, cplx zdot0, double t_max,
                     TimeAxis axis, double ray_angle, const IntegrateOptions& opt) {
    const PolynomialC V = spec.potential();
    if (energy_residual_rel(spec, V, z0, zdot0) > 1e-10)
        throw std::invalid_argument("initial data inconsistent with the problem energy");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

    const double phi = axis_phi(axis, ray_angle);
    const cplx phase = std::polar(1.0, phi);
    Flow flow{V.derivative(), std::polar(1.0, 2.0 * phi)};

    Trajectory traj;
    traj.axis = axis;
    traj.ray_angle = ray_angle;
    traj.E = spec.E;

    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.h_max = t_max / std::max(1, opt.min_samples);

    CVec<2> y0 = {z0, phase * zdot0};
    integrate_ode<2>(flow, 0.0, t_max, y0, oo,
                     [&](double t, const CVec<2>& y, const CVec<2>&) {
                         cplx z = y[0];
                         cplx zd = y[1] / phase;
                         double er = energy_residual_rel(spec, V, z, zd);
                         traj.samples.push_back({t, z, zd, er});
                         traj.max_energy_drift = std::max(traj.max_energy_drift, er);
                         if (std::abs(z) >= opt.escape_radius) {
                             traj.escaped = true;
                             traj.escape_time = t;
                             return false;
                         }
                         return true;
                     });
    return traj;
}

Trajectory stem_trajectory(const ProblemSpec& spec, const StemDescriptor& stem) {
    if (stem.to_infinity) return escape_orbit(spec, stem.from);

    TurningPointSet tps = turning_points(spec);
    const int n = static_cast<int>(tps.points.size());
    if (stem.from < 0 || stem.from >= n || stem.to < 0 || stem.to >= n ||
        stem.from == stem.to)
        throw std::invalid_argument("stem indices out of range");
    const cplx za = tps.points[stem.from], zb = tps.points[stem.to];
    const double sep = std::abs(za - zb);
    if (sep <= 1e-8 * std::max({1.0, std::abs(za), std::abs(zb)}))
        throw std::domain_error("stem endpoints coincide");

    const double horizon = 3.0 * period_scale(spec);
    IntegrateOptions io;
    io.min_samples = 2048;
    Trajectory run = run_from_turning_point(spec, za, horizon, io);
    if (run.escaped) throw std::domain_error("stem not found");

    LocalEval ev = make_eval(spec, run);
    auto radial = [&](double t) {
        cplx z, zd;
        ev.at(t, z, zd);
        return (std::conj(zd) * (z - zb)).real();
    };

    // first local minimum of |z - zb| close enough to count as an arrival
    const auto& ss = run.samples;
    for (std::size_t k = 1; k + 1 < ss.size(); ++k) {
        double dm = std::abs(ss[k - 1].z - zb), d0 = std::abs(ss[k].z - zb),
               dp = std::abs(ss[k + 1].z - zb);
        if (!(d0 <= dm && d0 <= dp)) continue;
        if (d0 > 0.3 * sep) continue;

        // bisection on the radial velocity (sign change through the turning
        // point) pins the arrival time far better than the flat distance
        double lo = ss[k - 1].t, hi = ss[k + 1].t;
        double flo = radial(lo), fhi = radial(hi);
        if (flo >= 0.0 || fhi <= 0.0) continue;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = radial(mid);
            if (fm < 0.0) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
        }
        double tstar = 0.5 * (lo + hi);
        cplx zst, vst;
        ev.at(tstar, zst, vst);
        double gap = std::abs(zst - zb);
        if (gap > kStemGapTol * std::max(1.0, std::abs(zb))) continue;

        Trajectory out = run;
        out.samples.clear();
        for (const auto& s : ss) {
            if (s.t >= tstar) break;
            out.samples.push_back(s);
        }
        const PolynomialC V = spec.potential();
        out.samples.push_back({tstar, zst, vst, energy_residual_rel(spec, V, zst, vst)});
        out.closure_gap = gap;
        out.closed = false;
        return out;
    }
    throw std::domain_error("stem not found");
}

Trajectory escape_orbit(const ProblemSpec& spec, int tp_index) {
    TurningPointSet tps = turning_points(spec);
    if (tp_index < 0 || tp_index >= static_cast<int>(tps.points.size()))
        throw std::invalid_argument("turning point index out of range");
    const cplx za = tps.points[tp_index];

    IntegrateOptions io;
    io.escape_radius = 1e6;
    io.min_samples = 1024;
    Trajectory run = run_from_turning_point(spec, za, 3.0 * period_scale(spec), io);
    if (!run.escaped) throw std::domain_error("orbit bounded");

    // crossing times of the radius ladder; |z|^{-(n-2)/2} is asymptotically
    // linear in t near blow-up, which makes interpolation sharp
    const int n = spec.potential().degree();
    const double p = 0.5 * n - 1.0;
    auto crossing_time = [&](double R) {
        const auto& ss = run.samples;
        for (std::size_t k = 1; k < ss.size(); ++k) {
            if (std::abs(ss[k].z) >= R) {
                double w0 = std::pow(std::abs(ss[k - 1].z), -p);
                double w1 = std::pow(std::abs(ss[k].z), -p);
                double wr = std::pow(R, -p);
                double f = (w0 - wr) / std::max(1e-300, w0 - w1);
                return ss[k - 1].t + f * (ss[k].t - ss[k - 1].t);
            }
        }
        return run.samples.back().t;
    };
    double t4 = crossing_time(1e4), t5 = crossing_time(1e5), t6 = crossing_time(1e6);
    auto richardson = [&](double R1, double tA, double R2, double tB) {
        double r1 = std::pow(R1, p), r2 = std::pow(R2, p);
        return (r2 * tB - r1 * tA) / (r2 - r1);
    };
    double est_a = richardson(1e4, t4, 1e5, t5);
    double est_b = richardson(1e5, t5, 1e6, t6);
    run.escape_time = est_b;
    run.escape_uncertainty = std::abs(est_b - est_a);
    return run;
}

Trajectory family_member(const ProblemSpec& spec, const Trajectory& stem, double a) {
    if (stem.samples.empty()) throw std::invalid_argument("empty stem trajectory");
    if (a < 0.0) throw std::invalid_argument("imaginary shift must be non-negative");
    if (a == 0.0) return stem;

    const cplx z0 = stem.samples.front().z;
    const cplx v0 = stem.samples.front().zdot;

    Trajectory leg;
    try {
        IntegrateOptions io;
        io.min_samples = 256;
        io.escape_radius = 1e4;
        leg = integrate(spec, z0, v0, a, TimeAxis::Imaginary, 0.0, io);
    } catch (const std::runtime_error&) {
        throw std::domain_error("pole encountered during imaginary-time leg");
    }
    if (leg.escaped) throw std::domain_error("pole encountered during imaginary-time leg");

    cplx z1 = leg.samples.back().z;
    cplx v1 = leg.samples.back().zdot;
    // re-project the velocity onto the energy shell before the real-time leg
    cplx shell = std::sqrt(2.0 * (spec.E - spec.V(z1)));
    v1 = (std::abs(shell - v1) <= std::abs(-shell - v1)) ? shell : -shell;

    double period;
    if (stem.escaped) {
        auto cycles = canonical_cycles(spec);
        if (cycles.empty()) throw std::domain_error("no bounded cycle for the family period");
        period = std::abs(cycle_integral(spec, cycles.front().second).value);
    } else {
        period = 2.0 * stem.duration();
    }

    IntegrateOptions io;
    io.min_samples = 2048;
    Trajectory out = integrate(spec, z1, v1, period, TimeAxis::Real, 0.0, io);
    out.closure_gap = std::abs(out.samples.back().z - out.samples.front().z);
    out.closed = out.closure_gap <= 1e-5 * std::max(1.0, std::abs(z1));
    return out;
}

std::vector<cplx> self_intersections(const Trajectory& traj) {
    const auto& ss = traj.samples;
    if (ss.size() < 4) return {};

    struct Seg {
        cplx a, b;
        std::size_t i;  // sample index of the segment start
    };
    std::vector<Seg> segs;
    for (std::size_t k = 0; k + 1 < ss.size(); ++k)
        if (std::abs(ss[k + 1].z - ss[k].z) > 0.0) segs.push_back({ss[k].z, ss[k + 1].z, k});

    std::vector<cplx> hits;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 2; j < segs.size(); ++j) {
            if (segs[j].i <= segs[i].i + 1) continue;
            int o1 = orient(segs[i].a, segs[i].b, segs[j].a);
            int o2 = orient(segs[i].a, segs[i].b, segs[j].b);
            int o3 = orient(segs[j].a, segs[j].b, segs[i].a);
            int o4 = orient(segs[j].a, segs[j].b, segs[i].b);
            if (o1 * o2 < 0 && o3 * o4 < 0) {
                cplx r = segs[i].b - segs[i].a, sv = segs[j].b - segs[j].a;
                double denom = cross2(r, sv);
                double tpar = cross2(segs[j].a - segs[i].a, sv) / denom;
                double upar = cross2(segs[j].a - segs[i].a, r) / denom;

                // Newton refinement on the Hermite interpolants of both arcs
                double t1 = ss[segs[i].i].t + tpar * (ss[segs[i].i + 1].t - ss[segs[i].i].t);
                double t2 = ss[segs[j].i].t + upar * (ss[segs[j].i + 1].t - ss[segs[j].i].t);
                cplx hit = segs[i].a + tpar * r;
                for (int it = 0; it < 4; ++it) {
                    cplx z1, v1, z2, v2;
                    hermite(ss[segs[i].i], ss[segs[i].i + 1], t1, z1, v1);
                    hermite(ss[segs[j].i], ss[segs[j].i + 1], t2, z2, v2);
                    cplx F = z1 - z2;
                    double det = cross2(v1, -v2);
                    if (std::abs(det) < 1e-14) break;
                    // solve [v1, -v2] (dt1, dt2)^T = -F  (2x2 real system)
                    double dt1 = -cross2(F, -v2) / det;
                    double dt2 = -cross2(v1, F) / det;
                    t1 += dt1;
                    t2 += dt2;
                    hit = 0.5 * (z1 + z2);
                }
                hits.push_back(hit);
            }
        }
    }
    // dedup
    std::vector<cplx> out;
    for (cplx h : hits) {
        bool dup = false;
        for (cplx o : out)
            if (std::abs(h - o) < 1e-7 * std::max(1.0, std::abs(h))) dup = true;
        if (!dup) out.push_back(h);
    }
    return out;
}

int winding_number(const Trajectory& traj, cplx point) {
    const auto& ss = traj.samples;
    if (ss.size() < 3) throw std::invalid_argument("trajectory too short");
    double scale = std::max(1.0, std::abs(point));
    if (std::abs(ss.front().z - ss.back().z) > 1e-5 * scale)
        throw std::domain_error("trajectory is not closed");

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < ss.size(); ++k) {
        if (point_segment_dist(point, ss[k].z, ss[k + 1].z) < 1e-6 * scale)
            throw std::domain_error("point on curve");
        cplx u = ss[k].z - point, v = ss[k + 1].z - point;
        total += std::atan2(cross2(u, v), u.real() * v.real() + u.imag() * v.imag());
    }
    return int(std::lround(total / (2.0 * kPi)));
}

int appendix_winding(const Trajectory& stem, cplx point) {
    const auto& ss = stem.samples;
    if (ss.size() < 8) return 0;
    const double chord = std::abs(ss.front().z - ss.back().z);
    const double tmin_sep = 0.05 * stem.duration();

    // narrowest self-approach of the arc (the neck of a potential loop),
    // found on a coarse subsample and refined at full resolution
    const std::size_t stride = std::max<std::size_t>(1, ss.size() / 1200);
    double neck = std::numeric_limits<double>::infinity();
    std::size_t ni = 0, nj = 0;
    for (std::size_t i = 0; i < ss.size(); i += stride)
        for (std::size_t j = i; j < ss.size(); j += stride) {
            if (ss[j].t - ss[i].t < tmin_sep) continue;
            double d = std::abs(ss[i].z - ss[j].z);
            if (d < neck) { neck = d; ni = i; nj = j; }
        }
    std::size_t lo_i = ni > stride ? ni - stride : 0;
    std::size_t hi_i = std::min(ss.size() - 1, ni + stride);
    std::size_t lo_j = nj > stride ? nj - stride : 0;
    std::size_t hi_j = std::min(ss.size() - 1, nj + stride);
    for (std::size_t i = lo_i; i <= hi_i; ++i)
        for (std::size_t j = lo_j; j <= hi_j; ++j) {
            if (ss[j].t - ss[i].t < tmin_sep) continue;
            double d = std::abs(ss[i].z - ss[j].z);
            if (d < neck) { neck = d; ni = i; nj = j; }
        }

    if (!(neck < 0.25 * chord)) return 0;  // no loop-like structure

    // winding of the loop between the neck samples, closed across the neck
    double total = 0.0;
    double scale = std::max(1.0, std::abs(point));
    for (std::size_t k = ni; k < nj; ++k) {
        if (point_segment_dist(point, ss[k].z, ss[k + 1].z) < 1e-9 * scale) return 0;
        cplx u = ss[k].z - point, v = ss[k + 1].z - point;
        total += std::atan2(cross2(u, v), u.real() * v.real() + u.imag() * v.imag());
    }
    {
        cplx u = ss[nj].z - point, v = ss[ni].z - point;
        total += std::atan2(cross2(u, v), u.real() * v.real() + u.imag() * v.imag());
    }
    return int(std::lround(total / (2.0 * kPi)));
}

std::string TopologyLabel::canonical() const {
    std::ostringstream os;
    os << "ax" << axis_tp_count << "|mp" << mirror_pair_count;
    os << "|low:" << (low_stem_found ? "ok" : "-");
    if (low_stem_found) {
        os << ",x" << low_self_crossings << ",w[";
        for (std::size_t i = 0; i < low_windings.size(); ++i)
            os << (i ? "," : "") << low_windings[i];
        os << "]";
    }
    os << "|up:" << (upper_stem_found ? "ok" : "-");
    return os.str();
}

TopologyLabel classify_topology(const ProblemSpec& spec) {
    if (std::abs(spec.E.imag()) > 1e-12 * std::max(1.0, std::abs(spec.E)))
        throw std::invalid_argument("topology classification requires real E");

    TurningPointSet tps = turning_points(spec);
    TopologyLabel label;
    std::vector<int> axis_idx = tps.imaginary_axis_indices();
    label.axis_tp_count = static_cast<int>(axis_idx.size());

    auto cycles = canonical_cycles(spec);
    int low_a = -1, low_b = -1;
    bool have_upper = false;
    for (const auto& [name, c] : cycles) {
        if (name == "low-pair") { low_a = c.a; low_b = c.b; }
        if (name == "upper-pair") have_upper = true;
    }
    label.mirror_pair_count = (low_a >= 0 ? 1 : 0) + (have_upper ? 1 : 0);

    if (low_a >= 0) {
        try {
            Trajectory stem = stem_trajectory(spec, {low_a, low_b});
            label.low_stem_found = true;
            label.low_self_crossings = static_cast<int>(self_intersections(stem).size());
            std::vector<std::pair<double, int>> by_im;
            for (int i : axis_idx) by_im.emplace_back(tps.points[i].imag(), i);
            std::sort(by_im.begin(), by_im.end());
            for (auto& [im, i] : by_im)
                label.low_windings.push_back(appendix_winding(stem, tps.points[i]));
        } catch (const std::domain_error&) {
            label.low_stem_found = false;
        }
    }
    if (have_upper) {
        int ua = -1, ub = -1;
        for (const auto& [name, c] : cycles)
            if (name == "upper-pair") { ua = c.a; ub = c.b; }
        try {
            stem_trajectory(spec, {ua, ub});
            label.upper_stem_found = true;
        } catch (const std::domain_error&) {
            label.upper_stem_found = false;
        }
    }
    return label;
}

TransitionBracket topology_transition_g(double E, double g_lo, double g_hi, double tol) {
    TopologyLabel lo = classify_topology(ProblemSpec::quintic(g_lo, E));
    TopologyLabel hi = classify_topology(ProblemSpec::quintic(g_hi, E));
    if (lo == hi) throw std::domain_error("labels agree at both bracket ends");
    while (g_hi - g_lo > tol) {
        double mid = 0.5 * (g_lo + g_hi);
        TopologyLabel lm = classify_topology(ProblemSpec::quintic(mid, E));
        if (lm == lo) g_lo = mid;
        else g_hi = mid;
    }
    return {0.5 * (g_lo + g_hi), g_hi - g_lo};
}

}  // namespace epkit
