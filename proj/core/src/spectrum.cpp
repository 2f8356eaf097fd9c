#include "epkit/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "epkit/ode.hpp"

namespace epkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGMinProblemTwo = 1e-3;
constexpr double kImagTol = 1e-8;  // pair-character threshold on Im E

cplx potential_at(double g, cplx z) {
    cplx z2 = z * z;
    return 0.5 * z2 - cplx(0.0, g) * z2 * z2 * z;
}

cplx dpotential_at(double g, cplx z) {
    cplx z2 = z * z;
    return z - cplx(0.0, 5.0 * g) * z2 * z2;
}

/// WKB e-fold count along the ray out to radius R, measured against a real
/// reference energy (the top of the searched window, so the subdominant
/// branch stays protected for every level of interest).
double efolds(double g, double theta, double R, double e_ref) {
    const int N = 400;
    const cplx phase = std::polar(1.0, theta);
    double acc = 0.0;
    double prev = 0.0;
    for (int k = 1; k <= N; ++k) {
        double r = R * k / N;
        cplx q = 2.0 * (potential_at(g, r * phase) - e_ref);
        double cur = std::abs((phase * std::sqrt(q)).real());
        acc += 0.5 * (prev + cur) * (R / N);
        prev = cur;
    }
    return acc;
}

double choose_radius(double g, double theta, double target, double e_ref) {
    double R = 2.0;
    while (efolds(g, theta, R, e_ref) < target && R < 400.0) R *= 1.4142135623730951;
    double lo = R / 1.4142135623730951, hi = R;
    for (int i = 0; i < 24; ++i) {
        double mid = 0.5 * (lo + hi);
        if (efolds(g, theta, mid, e_ref) < target) lo = mid;
        else hi = mid;
    }
    return hi;
}

struct RaySolution {
    cplx psi;         // psi(0), times exp(-log_scale)
    cplx dpsi;        // d psi / dz at 0, same scaling
    double log_scale; // accumulated rescaling exponent
};

/// Integrates -psi''/2 + V psi = E psi inward along z = r e^{i theta} from
/// r = R to 0, starting on the WKB-subdominant branch.  The solution grows
/// by one e-fold per WKB length; fixed-factor rescaling with exact log
/// bookkeeping keeps the state bounded without breaking analyticity in E.
RaySolution integrate_ray(double g, cplx E, double theta, double R, double rtol) {
    const cplx phase = std::polar(1.0, theta);
    const cplx zR = R * phase;

    cplx q = 2.0 * (potential_at(g, zR) - E);
    cplx s = std::sqrt(q);
    if ((phase * s).real() < 0.0) s = -s;  // decaying branch outward
    cplx dq = 2.0 * dpotential_at(g, zR);
    // psi'(z)/psi = -sqrt(q) - q'/(4q)
    cplx logder = -s - dq / (4.0 * q);

    auto rhs = [&](double sp, const CVec<2>& y, CVec<2>& dy) {
        double r = R - sp;
        cplx z = r * phase;
        dy[0] = y[1];
        dy[1] = 2.0 * phase * phase * (potential_at(g, z) - E) * y[0];
    };

    constexpr double kRescaleAt = 1e25;
    constexpr double kRescaleBy = 1e-25;

    CVec<2> y = {cplx(1.0, 0.0), -phase * logder};  // du/ds = -e^{i theta} psi'
    long rescales = 0;
    double s_cur = 0.0;
    // segmented integration: pause at each rescale threshold, scale the
    // state down by a fixed factor, and resume
    while (s_cur < R) {
        double s_stop = s_cur;
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-300;  // pure relative control: many decades of growth
        opt.h_max = R / 256.0;
        integrate_ode<2>(rhs, s_cur, R, y, opt,
                         [&](double sp, const CVec<2>& yy, const CVec<2>&) {
                             y = yy;
                             s_stop = sp;
                             return std::abs(yy[0]) <= kRescaleAt &&
                                    std::abs(yy[1]) <= kRescaleAt;
                         });
        if (s_stop >= R) break;
        s_cur = s_stop;
        if (std::abs(y[0]) > kRescaleAt || std::abs(y[1]) > kRescaleAt) {
            y[0] *= kRescaleBy;
            y[1] *= kRescaleBy;
            if (++rescales > 100) throw std::runtime_error("rescaling ladder exhausted");
        }
    }

    RaySolution out;
    out.psi = y[0];
    out.dpsi = -y[1] / phase;  // psi'(z) = -(du/ds) e^{-i theta}
    out.log_scale = double(rescales) * std::log(kRescaleAt);
    return out;
}

struct ShootContext {
    double g;
    WedgeProblem problem;
    double R_left, R_right;
    double theta_left, theta_right;
    double rtol;
    double log_norm;  // log of the normalization constant

    cplx mismatch(cplx E) const {
        RaySolution L = integrate_ray(g, E, theta_left, R_left, rtol);
        RaySolution R = integrate_ray(g, E, theta_right, R_right, rtol);
        cplx w = L.psi * R.dpsi - R.psi * L.dpsi;
        return w * std::exp(L.log_scale + R.log_scale - log_norm);
    }
};

ShootContext make_context(double g, WedgeProblem problem, const ShootOptions& opt) {
    if (problem == WedgeProblem::Two && g < kGMinProblemTwo)
        throw std::domain_error(
            "wedge problem Two degenerates below g = 1e-3; refusing");
    if (!(g >= 0.0)) throw std::domain_error("coupling must be non-negative");

    WedgeRays rays = rays_for(problem);
    ShootContext ctx;
    ctx.g = g;
    ctx.problem = problem;
    ctx.theta_left = rays.left + opt.angle_shift;
    ctx.theta_right = rays.right - opt.angle_shift;
    ctx.rtol = opt.rtol;
    // the rays must stay strictly inside their Stokes wedges
    const double hw = kPi / 14.0;  // wedge half-width
    if (std::abs(ctx.theta_left - rays.left) >= hw ||
        std::abs(ctx.theta_right - rays.right) >= hw)
        throw std::invalid_argument("ray exits its wedge");
    if (opt.R_outer > 0.0) {
        ctx.R_left = ctx.R_right = opt.R_outer;
    } else {
        ctx.R_left = choose_radius(g, ctx.theta_left, opt.efold_target, opt.E_ref);
        ctx.R_right = choose_radius(g, ctx.theta_right, opt.efold_target, opt.E_ref);
    }
    ctx.log_norm = efolds(g, ctx.theta_left, ctx.R_left, 0.0) +
                   efolds(g, ctx.theta_right, ctx.R_right, 0.0);
    return ctx;
}

/// Complex secant iteration with deflation against already-found roots.
struct RootSearch {
    const ShootContext* ctx;
    std::vector<cplx> found;

    cplx deflated(cplx E) const {
        cplx w = ctx->mismatch(E);
        for (cplx r : found) {
            cplx d = E - r;
            double m = std::abs(d);
            if (m < 1e-14) return 0.0;
            w /= d / std::max(1.0, m);  // unit-magnitude deflation factors
        }
        return w;
    }

    /// Local quadratic model of the deflated mismatch around m: reliable
    /// starting points for a root pair even when it has just gone complex.
    bool pair_hunt(double m, double h, cplx& r1, cplx& r2) const {
        cplx fm = deflated(cplx(m - h, 0.0));
        cplx f0 = deflated(cplx(m, 0.0));
        cplx fp = deflated(cplx(m + h, 0.0));
        cplx a = (fp + fm - 2.0 * f0) / (2.0 * h * h);
        cplx b = (fp - fm) / (2.0 * h);
        if (std::abs(a) < 1e-300) return false;
        cplx disc = std::sqrt(b * b - 4.0 * a * f0);
        r1 = cplx(m, 0.0) + (-b + disc) / (2.0 * a);
        r2 = cplx(m, 0.0) + (-b - disc) / (2.0 * a);
        return std::abs(r1 - cplx(m, 0.0)) < 6.0 * h && std::abs(r2 - cplx(m, 0.0)) < 6.0 * h;
    }

    bool refine(cplx& E, double spread) const {
        cplx e0 = E, e1 = E + cplx(1e-4 * spread, 1e-4 * spread);
        cplx f0 = deflated(e0), f1 = deflated(e1);
        for (int it = 0; it < 80; ++it) {
            cplx denom = f1 - f0;
            if (std::abs(denom) == 0.0) return false;
            cplx e2 = e1 - f1 * (e1 - e0) / denom;
            // keep the step sane
            if (std::abs(e2 - e1) > 2.0 * spread)
                e2 = e1 + 2.0 * spread * (e2 - e1) / std::abs(e2 - e1);
            e0 = e1; f0 = f1;
            e1 = e2; f1 = deflated(e1);
            if (std::abs(e1 - e0) < 1e-11 * std::max(1.0, std::abs(e1))) {
                E = e1;
                return true;
            }
        }
        return false;
    }
};

bool near_any(cplx e, const std::vector<cplx>& set, double tol) {
    for (cplx s : set)
        if (std::abs(e - s) < tol) return true;
    return false;
}

std::vector<EigenRecord> assemble_records(std::vector<cplx> roots, double g,
                                          WedgeProblem problem, const ShootContext& ctx,
                                          int count, double wscale) {
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<EigenRecord> out;
    for (cplx r : roots) {
        if (int(out.size()) >= count) break;
        EigenRecord rec;
        rec.E = r;
        rec.g = g;
        rec.problem = problem;
        rec.residual = std::abs(ctx.mismatch(r)) / std::max(1e-300, wscale);
        rec.index = int(out.size());
        rec.converged = true;
        out.push_back(rec);
    }
    return out;
}

double imag_noise_floor(cplx e) { return 1e-5 * (1.0 + std::abs(e.real())); }

std::vector<cplx> search_levels(const ShootContext& ctx, int count,
                                const std::vector<cplx>& seeds, double& wscale) {
    RootSearch rs{&ctx, {}};

    // fixed probe for the overall scale and the real-axis phase
    cplx probe = ctx.mismatch(cplx(0.2345, 0.0));
    wscale = std::abs(probe);
    const cplx unphase = std::polar(1.0, -std::arg(probe));

    const double merge_tol = 1e-7;
    const double e_hi = 2.0 * count + 6.0;

    auto push_unique = [&](cplx e) {
        if (near_any(e, rs.found, merge_tol)) return false;
        if (e.real() < -0.5 || e.real() > e_hi + 2.0) return false;
        rs.found.push_back(e);
        return true;
    };

    auto try_pair_at = [&](double base, double h) {
        cplx r1, r2;
        if (!rs.pair_hunt(base, h, r1, r2)) return;
        for (cplx cand : {r1, r2}) {
            cplx e = cand;
            if (!rs.refine(e, 2.0 * h)) continue;
            if (std::abs(e - cplx(base, 0.0)) > 8.0 * h) continue;
            push_unique(e);
        }
    };

    // 1) seeded continuation, with walk rejection at the seed spacing scale
    std::vector<std::size_t> lost;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        double spacing = 1.0;
        for (std::size_t j = 0; j < seeds.size(); ++j)
            if (j != k) {
                double d = std::abs(seeds[j] - seeds[k]);
                if (d > 1e-9) spacing = std::min(spacing, d);
            }
        spacing = std::max(spacing, 0.05);
        cplx e = seeds[k];
        double spread = std::min(0.4 * spacing, 0.5);
        if (rs.refine(e, spread) && std::abs(e - seeds[k]) <= 0.8 * spacing + 0.05) {
            push_unique(e);
        } else {
            lost.push_back(k);
        }
    }

    // 2) rescue lost seeds: a merging pair that crossed its exceptional
    //    point needs the local quadratic model, not a real-axis bracket
    for (std::size_t k : lost) {
        if (near_any(seeds[k], rs.found, 0.45)) continue;  // rescued already
        double partner_sep = 1e300;
        for (std::size_t j = 0; j < seeds.size(); ++j)
            if (j != k) partner_sep = std::min(partner_sep, std::abs(seeds[j] - seeds[k]));
        double h = std::clamp(0.6 * partner_sep, 0.05, 0.5);
        try_pair_at(seeds[k].real(), h);
    }

    // 3) real-axis scan for sign changes of the de-phased mismatch
    double prev_e = 0.05;
    double prev_w = (unphase * ctx.mismatch(cplx(prev_e, 0.0))).real();
    const double step = 0.17;
    while (prev_e < e_hi && int(rs.found.size()) < count + 2) {
        double cur_e = prev_e + step;
        double cur_w = (unphase * ctx.mismatch(cplx(cur_e, 0.0))).real();
        if (prev_w * cur_w < 0.0) {
            cplx e(0.5 * (prev_e + cur_e), 0.0);
            if (rs.refine(e, step) &&
                std::abs(e.real() - 0.5 * (prev_e + cur_e)) < 4.0 * step)
                push_unique(e);
        }
        prev_e = cur_e;
        prev_w = cur_w;
    }

    // 4) pair hunts in the gaps when levels are still missing
    if (int(rs.found.size()) < count) {
        std::vector<double> anchors;
        for (cplx f : rs.found) anchors.push_back(f.real());
        std::sort(anchors.begin(), anchors.end());
        std::vector<double> gaps;
        gaps.push_back(0.75);
        for (std::size_t i = 0; i + 1 < anchors.size(); ++i)
            gaps.push_back(0.5 * (anchors[i] + anchors[i + 1]));
        if (!anchors.empty()) gaps.push_back(anchors.back() + 1.0);
        for (double base : gaps) {
            if (int(rs.found.size()) >= count + 2) break;
            for (double h : {0.2, 0.45}) try_pair_at(base, h);
        }
    }

    // 5) conjugate completion: every complex root carries its partner
    for (std::size_t k = 0; k < rs.found.size(); ++k) {
        cplx e = rs.found[k];
        if (std::abs(e.imag()) <= imag_noise_floor(e)) continue;
        if (near_any(std::conj(e), rs.found, 1e-5 * (1.0 + std::abs(e)))) continue;
        cplx ec = std::conj(e);
        if (rs.refine(ec, 0.1) && std::abs(ec - std::conj(e)) < 1e-5 * (1.0 + std::abs(e)))
            push_unique(ec);
    }

    return rs.found;
}

}  // namespace

WedgeRays rays_for(WedgeProblem problem) {
    if (problem == WedgeProblem::One) return {kPi / 14.0, 13.0 * kPi / 14.0};
    return {-3.0 * kPi / 14.0, 17.0 * kPi / 14.0};
}

cplx shoot(double g, cplx E, WedgeProblem problem, const ShootOptions& opt) {
    ShootContext ctx = make_context(g, problem, opt);
    return ctx.mismatch(E);
}

std::vector<EigenRecord> eigenvalues(double g, WedgeProblem problem, int count,
                                     const ShootOptions& opt_in) {
    if (count < 1) throw std::invalid_argument("count must be at least 1");
    ShootOptions opt = opt_in;
    if (opt.E_ref == 0.0) opt.E_ref = 2.0 * count + 6.0;
    make_context(g, problem, opt);  // validates g up front

    // Problem Two grows complex pairs below g* ~ 0.037 that a cold real-axis
    // scan cannot see; those levels are reached by continuation from the
    // clean spectrum at larger g.
    if (problem == WedgeProblem::Two && g < 0.055) {
        double gk = 0.06;
        std::vector<cplx> seeds;
        {
            ShootContext c0 = make_context(gk, problem, opt);
            double ws = 1.0;
            for (cplx r : search_levels(c0, count, {}, ws)) seeds.push_back(r);
        }
        while (gk > g) {
            gk = std::max(g, gk - std::max(0.0005, 0.18 * gk));
            ShootContext ck = make_context(gk, problem, opt);
            double ws = 1.0;
            std::vector<cplx> roots = search_levels(ck, count, seeds, ws);
            if (gk == g)
                return assemble_records(std::move(roots), g, problem, ck, count, ws);
            seeds = std::move(roots);
        }
    }

    ShootContext ctx = make_context(g, problem, opt);
    double wscale = 1.0;
    std::vector<cplx> roots = search_levels(ctx, count, {}, wscale);
    return assemble_records(std::move(roots), g, problem, ctx, count, wscale);
}

std::vector<EigenRecord> eigenvalues_seeded(double g, WedgeProblem problem,
                                            const std::vector<cplx>& seeds,
                                            const ShootOptions& opt_in) {
    ShootOptions opt = opt_in;
    if (opt.E_ref == 0.0) opt.E_ref = 2.0 * double(seeds.size()) + 6.0;
    ShootContext ctx = make_context(g, problem, opt);
    double wscale = 1.0;
    std::vector<cplx> roots = search_levels(ctx, int(seeds.size()), seeds, wscale);
    return assemble_records(std::move(roots), g, problem, ctx, int(seeds.size()), wscale);
}

TrackResult track(const std::vector<double>& g_grid, WedgeProblem problem, int count) {
    if (g_grid.size() < 2) throw std::invalid_argument("grid needs at least two points");
    for (std::size_t i = 1; i < g_grid.size(); ++i)
        if (!(g_grid[i] > g_grid[i - 1]))
            throw std::invalid_argument("grid must ascend");

    TrackResult out;
    // continuation runs from the largest g downward (the spectrum is clean
    // and real there for problem Two), then results are re-ordered ascending
    std::vector<double> desc(g_grid.rbegin(), g_grid.rend());
    std::vector<std::vector<cplx>> levels_desc;

    std::vector<cplx> prev;
    for (std::size_t i = 0; i < desc.size(); ++i) {
        std::vector<EigenRecord> recs =
            prev.empty() ? eigenvalues(desc[i], problem, count)
                         : eigenvalues_seeded(desc[i], problem, prev);
        std::vector<cplx> cur;
        for (const auto& r : recs) cur.push_back(r.E);
        if (int(cur.size()) < count) {
            // refine: insert a midpoint between the previous grid value and
            // this one, reseed, and retry once
            if (i > 0) {
                double mid = 0.5 * (desc[i - 1] + desc[i]);
                std::vector<EigenRecord> mrec = eigenvalues_seeded(mid, problem, prev);
                std::vector<cplx> mseeds;
                for (const auto& r : mrec) mseeds.push_back(r.E);
                recs = eigenvalues_seeded(desc[i], problem, mseeds);
                cur.clear();
                for (const auto& r : recs) cur.push_back(r.E);
            }
            if (int(cur.size()) < count)
                out.notes.push_back("unresolved at EP near g = " + std::to_string(desc[i]));
        }
        levels_desc.push_back(cur);
        prev = cur;
    }

    out.g_grid = g_grid;
    for (auto it = levels_desc.rbegin(); it != levels_desc.rend(); ++it)
        out.levels.push_back(*it);
    return out;
}

namespace {

int complex_pair_count(const std::vector<EigenRecord>& recs) {
    // count each conjugate pair once; a pair must have a genuine conjugate
    // partner so residual-level imaginary noise never counts
    int n = 0;
    for (const auto& r : recs) {
        if (r.E.imag() <= imag_noise_floor(r.E)) continue;
        for (const auto& s : recs)
            if (std::abs(s.E - std::conj(r.E)) < 1e-5 * (1.0 + std::abs(r.E))) {
                ++n;
                break;
            }
    }
    return n;
}

}  // namespace

ExceptionalPoint find_quantum_ep(WedgeProblem problem, int pair_index, double g_lo,
                                 double g_hi) {
    if (pair_index < 1) throw std::invalid_argument("pair index starts at 1");
    if (!(g_lo < g_hi)) throw std::invalid_argument("need g_lo < g_hi");
    const int count = std::max(6, 2 * pair_index + 2);

    std::map<double, std::vector<cplx>> cache;
    auto levels_at = [&](double g) -> const std::vector<cplx>& {
        auto it = cache.find(g);
        if (it != cache.end()) return it->second;
        const std::vector<cplx>* seeds = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [gc, lv] : cache) {
            double d = std::abs(gc - g);
            if (d < best) { best = d; seeds = &lv; }
        }
        std::vector<EigenRecord> recs = seeds ? eigenvalues_seeded(g, problem, *seeds)
                                              : eigenvalues(g, problem, count);
        std::vector<cplx> lv;
        for (const auto& r : recs) lv.push_back(r.E);
        return cache.emplace(g, std::move(lv)).first->second;
    };
    auto pairs_at = [&](double g) {
        std::vector<EigenRecord> recs;
        for (cplx e : levels_at(g)) {
            EigenRecord r;
            r.E = e;
            recs.push_back(r);
        }
        return complex_pair_count(recs);
    };

    // continuation ladder downward; stop at the first interval where the
    // pair count reaches pair_index
    double ga = g_hi, gb = g_hi;
    int prev_pairs = pairs_at(g_hi);
    if (prev_pairs >= pair_index)
        throw std::domain_error("pair already complex at the top of the bracket");
    bool found_flip = false;
    double g = g_hi;
    while (g > g_lo) {
        double gn = std::max(g_lo, g - std::max(0.0008, 0.12 * g));
        int p = pairs_at(gn);
        if (p >= pair_index) {
            ga = gn;
            gb = g;
            found_flip = true;
            break;
        }
        g = gn;
    }
    if (!found_flip)
        throw std::domain_error("pair character does not change across the bracket");

    // bisection inside the detected merge interval
    double lo = ga, hi = gb;
    while (hi - lo > 1e-5) {
        double mid = 0.5 * (lo + hi);
        if (pairs_at(mid) >= pair_index) lo = mid;
        else hi = mid;
    }

    ExceptionalPoint ep;
    ep.kind = EpKind::Quantum;
    ep.parameter = 0.5 * (lo + hi);
    ep.uncertainty = hi - lo;
    ep.pair_index = pair_index;
    // record the freshly coalesced pair just on the complex side
    std::vector<cplx> lv = levels_at(lo);
    std::vector<cplx> complex_side;
    for (cplx e : lv)
        if (e.imag() > imag_noise_floor(e)) complex_side.push_back(e);
    std::sort(complex_side.begin(), complex_side.end(),
              [](cplx a, cplx b) { return a.imag() < b.imag(); });
    if (!complex_side.empty()) {
        cplx e = complex_side.front();
        ep.pair_values = {e, std::conj(e)};
    }
    return ep;
}

std::pair<cplx, cplx> matrix_ep_demo(double alpha) {
    cplx root = std::sqrt(cplx(alpha, 0.0));
    return {1.0 - root, 1.0 + root};
}

ExceptionalPoint find_matrix_ep(double alpha_lo, double alpha_hi) {
    if (!(alpha_lo < alpha_hi)) throw std::invalid_argument("need alpha_lo < alpha_hi");
    auto is_complex = [](double a) {
        auto [e1, e2] = matrix_ep_demo(a);
        return std::abs(e1.imag()) > kImagTol;
    };
    if (is_complex(alpha_hi) || !is_complex(alpha_lo))
        throw std::domain_error("pair character does not change across the bracket");
    double lo = alpha_lo, hi = alpha_hi;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (is_complex(mid)) lo = mid;
        else hi = mid;
    }
    ExceptionalPoint ep;
    ep.kind = EpKind::MatrixDemo;
    ep.parameter = 0.5 * (lo + hi);
    ep.uncertainty = hi - lo;
    ep.pair_index = 1;
    auto [e1, e2] = matrix_ep_demo(lo);
    ep.pair_values = {e1, e2};
    return ep;
}

}  // namespace epkit
