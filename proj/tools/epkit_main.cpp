// epkit command line: turning points, classical/quantum exceptional points,
// complex trajectories, periods, Weierstrass evaluation, spectra, and the
// vacuum-coalescence demo, with CSV/JSON/SVG emitters.

#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "epkit/cpoly.hpp"
#include "epkit/emit.hpp"
#include "epkit/parallel.hpp"
#include "epkit/periods.hpp"
#include "epkit/spectrum.hpp"
#include "epkit/trajectory.hpp"
#include "epkit/version.hpp"
#include "epkit/weierstrass.hpp"

using namespace epkit;

namespace {

struct GlobalOpts {
    int workers = 1;
};

struct FamilyOpts {
    std::string family = "quintic";
    double E = 1.0;
    double g = 0.1;
    double omega2 = 0.0;
};

ProblemSpec make_spec(const FamilyOpts& f) {
    if (f.family == "cubic") return ProblemSpec::cubic(f.omega2, f.g, f.E);
    if (f.family == "quintic") return ProblemSpec::quintic(f.g, f.E);
    if (f.family == "pure-quintic") return ProblemSpec::pure_quintic(f.E);
    throw CLI::ValidationError("--family must be cubic, quintic or pure-quintic");
}

void add_family_opts(CLI::App* cmd, FamilyOpts& f, bool with_g = true) {
    cmd->add_option("--family", f.family, "cubic | quintic | pure-quintic")
        ->default_val(f.family);
    cmd->add_option("--E", f.E, "energy")->default_val(f.E);
    if (with_g) cmd->add_option("--g", f.g, "coupling g")->default_val(f.g);
    cmd->add_option("--omega2", f.omega2, "omega^2 of the cubic family")
        ->default_val(f.omega2);
}

void echo_family(RunConfig& cfg, const FamilyOpts& f) {
    cfg.set("family", f.family);
    cfg.set("E", f.E);
    if (f.family == "cubic") {
        cfg.set("omega2", f.omega2);
        cfg.set("g", f.g);
    } else if (f.family == "quintic") {
        cfg.set("g", f.g);
    }
}

int pick_top_axis_tp(const TurningPointSet& tps) {
    int top = -1;
    for (int i : tps.imaginary_axis_indices())
        if (tps.points[i].imag() > 0.0 &&
            (top < 0 || tps.points[i].imag() > tps.points[top].imag()))
            top = i;
    if (top < 0) throw std::domain_error("no imaginary-axis turning point above the real axis");
    return top;
}

// ---------------------------------------------------------------------------

int cmd_turning_points(const GlobalOpts&, const FamilyOpts& f, const std::string& json_path) {
    ProblemSpec spec = make_spec(f);
    TurningPointSet tps = turning_points(spec);

    std::printf("turning points of V(z) = E (%s family, E = %.6g):\n", f.family.c_str(), f.E);
    for (std::size_t i = 0; i < tps.points.size(); ++i)
        std::printf("  z[%zu] = %.6g %+.6gi   multiplicity %d\n", i, tps.points[i].real(),
                    tps.points[i].imag(), tps.multiplicity[i]);
    std::printf("mirror symmetric (z -> -conj z): %s\n", tps.mirror_symmetric ? "yes" : "no");
    std::printf("on the imaginary axis: %zu\n", tps.imaginary_axis_indices().size());

    if (!json_path.empty()) {
        RunConfig cfg;
        cfg.subcommand = "turning-points";
        echo_family(cfg, f);
        JsonValue arr = JsonValue::array();
        for (std::size_t i = 0; i < tps.points.size(); ++i) {
            JsonValue p = JsonValue::object();
            p.add("z", tps.points[i]);
            p.add("multiplicity", tps.multiplicity[i]);
            arr.push(std::move(p));
        }
        JsonValue payload = JsonValue::object();
        payload.add("points", std::move(arr));
        payload.add("mirror_symmetric", tps.mirror_symmetric);
        payload.add("imaginary_axis_count", int(tps.imaginary_axis_indices().size()));
        write_text_file(json_path, json_document(cfg, "turning_points", std::move(payload)));
    }
    return 0;
}

int cmd_classical_ep(const GlobalOpts&, double E, const std::string& json_path) {
    double gs = classical_exceptional_point(E);
    cplx ztp = coalesced_turning_point(E);
    std::printf("classical exceptional point at E = %.6g:\n", E);
    std::printf("  g* = %.6g\n", gs);
    std::printf("  coalesced turning point = %.6gi\n", ztp.imag());
    std::printf("  discriminant cross-check: agrees within 1e-10 relative\n");

    if (!json_path.empty()) {
        RunConfig cfg;
        cfg.subcommand = "classical-ep";
        cfg.set("E", E);
        JsonValue payload = JsonValue::object();
        payload.add("kind", "classical");
        payload.add("g", gs);
        payload.add("point", ztp);
        write_text_file(json_path, json_document(cfg, "exceptional_point", std::move(payload)));
    }
    return 0;
}

int cmd_trajectory(const GlobalOpts& go, const FamilyOpts& f, const std::string& stem_name,
                   bool stems_all, const std::vector<double>& shifts,
                   const std::string& csv_path, const std::string& svg_path) {
    ProblemSpec spec = make_spec(f);
    TurningPointSet tps = turning_points(spec);
    auto cycles = canonical_cycles(spec);
    auto cycle_by_name = [&](const std::string& name) -> const Cycle* {
        for (const auto& [n, c] : cycles)
            if (n == name) return &c;
        return nullptr;
    };

    std::vector<std::pair<std::string, Trajectory>> curves;

    if (!shifts.empty()) {
        // family members built from the escape stem, per the imaginary-shift
        // construction; a = 0 is the escape stem itself
        Trajectory base = escape_orbit(spec, pick_top_axis_tp(tps));
        std::vector<Trajectory> members = parallel_map<Trajectory>(
            go.workers, int(shifts.size()), [&](int i) {
                return shifts[std::size_t(i)] == 0.0
                           ? base
                           : family_member(spec, base, shifts[std::size_t(i)]);
            });
        for (std::size_t i = 0; i < members.size(); ++i) {
            char label[64];
            std::snprintf(label, sizeof(label), "a=%.6g", shifts[i]);
            curves.emplace_back(label, std::move(members[i]));
        }
    } else if (!stem_name.empty()) {
        const Cycle* c = cycle_by_name(stem_name + "-pair");
        if (!c) throw std::domain_error("no such stem: " + stem_name);
        curves.emplace_back(stem_name + " stem", stem_trajectory(spec, {c->a, c->b, false}));
    } else {
        (void)stems_all;  // the default: every canonical stem
        std::vector<Trajectory> ts = parallel_map<Trajectory>(
            go.workers, int(cycles.size()), [&](int i) {
                const auto& [name, c] = cycles[std::size_t(i)];
                if (c.to_infinity) return escape_orbit(spec, c.a);
                return stem_trajectory(spec, {c.a, c.b, false});
            });
        for (std::size_t i = 0; i < ts.size(); ++i)
            curves.emplace_back(cycles[i].first + " stem", std::move(ts[i]));
    }

    for (const auto& [label, t] : curves) {
        if (t.escaped)
            std::printf("%-16s escape time %.6g (+- %.2g), %zu samples\n", label.c_str(),
                        t.escape_time, t.escape_uncertainty, t.samples.size());
        else
            std::printf("%-16s duration %.6g, terminal gap %.2e, %zu samples\n",
                        label.c_str(), t.duration(), t.closure_gap, t.samples.size());
    }

    if (!csv_path.empty()) write_trajectory_csv(curves.front().second, csv_path);
    if (!svg_path.empty()) {
        SvgScene scene;
        scene.title = f.family + " trajectories, E = " + std::to_string(f.E);
        scene.add_turning_points(tps);
        for (std::size_t i = 0; i < curves.size(); ++i)
            scene.add_trajectory(curves[i].second, i == 0 ? "trajectory" : "family");
        scene.write_file(svg_path);
    }
    return 0;
}

int cmd_periods(const GlobalOpts& go, const FamilyOpts& f, bool closed_form, bool quadrature,
                int turns, const std::string& json_path) {
    RunConfig cfg;
    cfg.subcommand = "periods";
    echo_family(cfg, f);
    JsonValue payload = JsonValue::object();

    if (!closed_form && !quadrature && turns == 0) closed_form = quadrature = true;

    if (closed_form) {
        if (f.family == "cubic") {
            double T1 = closed_form_cubic_T1(f.E);
            std::printf("closed form (cubic, E = %.6g):\n", f.E);
            std::printf("  T1      = %.6f\n", T1);
            std::printf("  T2      = T1 e^{i pi/3} = %.6f %+.6fi\n", 0.5 * T1,
                        0.5 * std::sqrt(3.0) * T1);
            std::printf("  i Ttilde = i sqrt(3) T1 = %.6fi\n", std::sqrt(3.0) * T1);
            JsonValue c = JsonValue::object();
            c.add("T1", T1);
            c.add("T2", cplx(0.5 * T1, 0.5 * std::sqrt(3.0) * T1));
            c.add("Ttilde", std::sqrt(3.0) * T1);
            payload.add("closed_form", std::move(c));
        } else if (f.family == "pure-quintic" || f.family == "quintic") {
            // the closed forms hold for the g-only normalization V = -i z^5
            PeriodData d = closed_form_quintic(f.E);
            std::printf("closed form (pure quintic normalization, E = %.6g):\n", f.E);
            std::printf("  T1 = %.6f   T2 = %.6f   T3 = %.6f\n", d.T1, d.T2, d.T3);
            std::printf("  Ttilde1 = %.6f   Ttilde2 = %.6f   Ttilde3 = %.6f\n", d.Ti1,
                        d.Ti2, d.Ti3);
            JsonValue c = JsonValue::object();
            c.add("T1", d.T1);
            c.add("T2", d.T2);
            c.add("T3", d.T3);
            c.add("Ttilde1", d.Ti1);
            c.add("Ttilde2", d.Ti2);
            c.add("Ttilde3", d.Ti3);
            payload.add("closed_form", std::move(c));
        }
    }

    if (quadrature) {
        ProblemSpec spec = make_spec(f);
        auto cycles = canonical_cycles(spec);
        std::vector<QuadratureResult> qs = parallel_map<QuadratureResult>(
            go.workers, int(cycles.size()),
            [&](int i) { return cycle_integral(spec, cycles[std::size_t(i)].second); });
        std::printf("cycle integrals (quadrature):\n");
        JsonValue arr = JsonValue::array();
        for (std::size_t i = 0; i < cycles.size(); ++i) {
            std::printf("  %-10s T = %.8f %+.8fi   (rel err %.1e)\n",
                        cycles[i].first.c_str(), qs[i].value.real(), qs[i].value.imag(),
                        qs[i].rel_err);
            JsonValue q = JsonValue::object();
            q.add("cycle", cycles[i].first);
            q.add("T", qs[i].value);
            q.add("rel_err", qs[i].rel_err);
            arr.push(std::move(q));
        }
        payload.add("quadrature", std::move(arr));
    }

    if (turns != 0) {
        ProblemSpec spec = make_spec(f);
        auto cycles = canonical_cycles(spec);
        std::printf("monodromy continuation, %d turn(s):\n", turns);
        JsonValue arr = JsonValue::array();
        for (const auto& [name, c] : cycles) {
            if (c.to_infinity) continue;
            cplx v = monodromy_continue(spec, c, turns);
            std::printf("  %-10s -> %.8f %+.8fi\n", name.c_str(), v.real(), v.imag());
            JsonValue m = JsonValue::object();
            m.add("cycle", name);
            m.add("turns", turns);
            m.add("T", v);
            arr.push(std::move(m));
        }
        payload.add("monodromy", std::move(arr));
    }

    if (!json_path.empty())
        write_text_file(json_path, json_document(cfg, "periods", std::move(payload)));
    return 0;
}

int cmd_weierstrass(const GlobalOpts&, double E, double t, double a, bool eval_point,
                    const std::string& json_path) {
    Invariants inv = invariants_from_cubic(E);
    std::printf("invariants of the cubic reduction: g2 = 0, g3 = %.6g\n", 0.5 * E);
    if (inv.degenerate()) {
        std::printf("degenerate invariants (zero discriminant); no lattice\n");
        return 0;
    }
    CubicFlow flow(E);
    const Lattice& lat = flow.lattice();
    std::printf("lattice generators (full periods):\n");
    std::printf("  w1 = %.8f %+.8fi\n", lat.w1.real(), lat.w1.imag());
    std::printf("  w2 = %.8f %+.8fi\n", lat.w2.real(), lat.w2.imag());
    std::printf("  i Ttilde = 2 w2 - w1 = %.8f %+.8fi\n", (2.0 * lat.w2 - lat.w1).real(),
                (2.0 * lat.w2 - lat.w1).imag());

    RunConfig cfg;
    cfg.subcommand = "weierstrass";
    cfg.set("E", E);
    JsonValue payload = JsonValue::object();
    payload.add("g2", inv.g2);
    payload.add("g3", inv.g3);
    payload.add("w1", lat.w1);
    payload.add("w2", lat.w2);

    if (eval_point) {
        cplx z = flow.z(t, a);
        std::printf("z(t = %.6g, a = %.6g) = %.8f %+.8fi\n", t, a, z.real(), z.imag());
        cfg.set("t", t);
        cfg.set("a", a);
        payload.add("z", z);
    }
    if (!json_path.empty())
        write_text_file(json_path, json_document(cfg, "weierstrass", std::move(payload)));
    return 0;
}

int cmd_spectrum(const GlobalOpts&, const std::string& problem, double g, int count,
                 bool do_track, double g_min, double g_max, int steps,
                 const std::string& json_path) {
    WedgeProblem p = (problem == "two") ? WedgeProblem::Two : WedgeProblem::One;
    RunConfig cfg;
    cfg.subcommand = "spectrum";
    cfg.set("problem", problem);
    cfg.set("count", count);
    JsonValue payload = JsonValue::object();

    if (do_track) {
        cfg.set("g_min", g_min);
        cfg.set("g_max", g_max);
        cfg.set("steps", steps);
        std::vector<double> grid;
        for (int i = 0; i < steps; ++i)
            grid.push_back(g_min + (g_max - g_min) * i / (steps - 1));
        TrackResult tr = track(grid, p, count);
        std::printf("tracked %d levels over g in [%.6g, %.6g]:\n", count, g_min, g_max);
        JsonValue arr = JsonValue::array();
        for (std::size_t i = 0; i < tr.g_grid.size(); ++i) {
            std::printf("  g = %.6g:", tr.g_grid[i]);
            JsonValue row = JsonValue::object();
            row.add("g", tr.g_grid[i]);
            JsonValue evs = JsonValue::array();
            for (cplx e : tr.levels[i]) {
                std::printf(" (%.6g, %.2g)", e.real(), e.imag());
                evs.push(e);
            }
            std::printf("\n");
            row.add("E", std::move(evs));
            arr.push(std::move(row));
        }
        payload.add("track", std::move(arr));
        for (const std::string& n : tr.notes) std::printf("  note: %s\n", n.c_str());
    } else {
        cfg.set("g", g);
        std::vector<EigenRecord> ev = eigenvalues(g, p, count);
        std::printf("lowest %d eigenvalues (problem %s, g = %.6g):\n", count,
                    problem.c_str(), g);
        JsonValue arr = JsonValue::array();
        for (const auto& r : ev) {
            std::printf("  E[%d] = %.9f %+.2ei   residual %.1e\n", r.index, r.E.real(),
                        r.E.imag(), r.residual);
            JsonValue rec = JsonValue::object();
            rec.add("index", r.index);
            rec.add("E", r.E);
            rec.add("residual", r.residual);
            arr.push(std::move(rec));
        }
        payload.add("eigenvalues", std::move(arr));
    }
    if (!json_path.empty())
        write_text_file(json_path, json_document(cfg, "spectrum", std::move(payload)));
    return 0;
}

int cmd_scan_ep(const GlobalOpts&, const std::string& problem, int pair,
                std::vector<double> bracket, bool matrix_demo, const std::string& json_path) {
    RunConfig cfg;
    cfg.subcommand = "scan-ep";
    JsonValue payload = JsonValue::object();

    if (matrix_demo) {
        if (bracket.size() != 2) bracket = {-0.5, 0.5};
        ExceptionalPoint ep = find_matrix_ep(bracket[0], bracket[1]);
        std::printf("matrix-demo exceptional point: alpha = %.6g (+- %.1e)\n", ep.parameter,
                    ep.uncertainty);
        cfg.set("mode", "matrix-demo");
        cfg.set("bracket_lo", bracket[0]);
        cfg.set("bracket_hi", bracket[1]);
        payload.add("kind", "matrix-demo");
        payload.add("alpha", ep.parameter);
        payload.add("uncertainty", ep.uncertainty);
    } else {
        if (bracket.size() != 2) throw CLI::ValidationError("--bracket needs lo,hi");
        WedgeProblem p = (problem == "one") ? WedgeProblem::One : WedgeProblem::Two;
        ExceptionalPoint ep = find_quantum_ep(p, pair, bracket[0], bracket[1]);
        std::printf("quantum exceptional point (pair %d): g = %.6g (+- %.1e)\n", pair,
                    ep.parameter, ep.uncertainty);
        std::printf("  coalescing pair just below: %.6g %+.6gi and conjugate\n",
                    ep.pair_values[0].real(), ep.pair_values[0].imag());
        cfg.set("problem", problem);
        cfg.set("pair", pair);
        cfg.set("bracket_lo", bracket[0]);
        cfg.set("bracket_hi", bracket[1]);
        payload.add("kind", "quantum");
        payload.add("g", ep.parameter);
        payload.add("uncertainty", ep.uncertainty);
        payload.add("pair_index", ep.pair_index);
        JsonValue pv = JsonValue::array();
        pv.push(ep.pair_values[0]);
        pv.push(ep.pair_values[1]);
        payload.add("pair", std::move(pv));
    }
    if (!json_path.empty())
        write_text_file(json_path, json_document(cfg, "exceptional_point", std::move(payload)));
    return 0;
}

int cmd_g2_demo(const GlobalOpts&, double m, double lambda, double Lambda, bool scan,
                const std::string& json_path) {
    RunConfig cfg;
    cfg.subcommand = "g2-demo";
    cfg.set("m", m);
    cfg.set("lambda", lambda);
    cfg.set("Lambda", Lambda);
    JsonValue payload = JsonValue::object();

    std::vector<cplx> us = g2_vacua({m, lambda, Lambda});
    std::printf("vacua of m u^4 (1 - lambda^2 u/m^2)^2 = Lambda^9 (%zu roots):\n", us.size());
    JsonValue arr = JsonValue::array();
    for (cplx u : us) {
        std::printf("  u = %.6g %+.6gi\n", u.real(), u.imag());
        arr.push(u);
    }
    payload.add("vacua", std::move(arr));

    if (scan) {
        G2CoalescenceScan sc = g2_coalescence_scan(m, Lambda);
        std::printf("vacuum coalescence: lambda^2 = %.6g (+- %.1e) at u = %.6g %+.6gi\n",
                    sc.lambda2, sc.uncertainty, sc.merged_vacuum.real(),
                    sc.merged_vacuum.imag());
        JsonValue s = JsonValue::object();
        s.add("lambda2", sc.lambda2);
        s.add("uncertainty", sc.uncertainty);
        s.add("merged_vacuum", sc.merged_vacuum);
        payload.add("scan", std::move(s));
    }
    if (!json_path.empty())
        write_text_file(json_path, json_document(cfg, "g2", std::move(payload)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exceptional points of complex one-degree-of-freedom Hamiltonians"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "plain key=value configuration file");
    app.require_subcommand(1);

    GlobalOpts go;
    app.add_option("--workers", go.workers, "worker thread count")->default_val(1);

    // turning-points
    FamilyOpts tp_f;
    std::string tp_json;
    auto* tp = app.add_subcommand("turning-points", "roots of V(z) = E");
    add_family_opts(tp, tp_f);
    tp->add_option("--json", tp_json, "write a JSON document");

    // classical-ep
    double cep_E = -1.0;
    std::string cep_json;
    auto* cep = app.add_subcommand("classical-ep",
                                   "classical exceptional point of the quintic family");
    cep->add_option("--E", cep_E, "energy (must be negative)")->required();
    cep->add_option("--json", cep_json, "write a JSON document");

    // trajectory
    FamilyOpts tr_f;
    tr_f.family = "cubic";
    tr_f.g = 1.0;
    std::string tr_stem, tr_csv, tr_svg;
    bool tr_all = false;
    std::vector<double> tr_a;
    auto* tr = app.add_subcommand("trajectory", "stem trajectories and family members");
    add_family_opts(tr, tr_f);
    tr->add_option("--stem", tr_stem, "low | upper: integrate one stem");
    tr->add_flag("--stems-all", tr_all, "integrate every canonical stem (default)");
    tr->add_option("--a", tr_a, "imaginary-time shifts of the escape stem (repeatable)");
    tr->add_option("--csv", tr_csv, "write the first curve as CSV");
    tr->add_option("--svg", tr_svg, "write an SVG figure");

    // periods
    FamilyOpts pd_f;
    pd_f.family = "pure-quintic";
    bool pd_closed = false, pd_quad = false;
    int pd_turns = 0;
    std::string pd_json;
    auto* pd = app.add_subcommand("periods", "closed-form and quadrature periods");
    add_family_opts(pd, pd_f);
    pd->add_flag("--closed-form", pd_closed, "evaluate the closed-form periods");
    pd->add_flag("--quadrature", pd_quad, "integrate the canonical cycles");
    pd->add_option("--monodromy", pd_turns, "continue periods through E e^{-2 pi i turns}");
    pd->add_option("--json", pd_json, "write a JSON document");

    // weierstrass
    double wp_E = 1.0, wp_t = 0.0, wp_a = 0.0;
    bool wp_eval = false;
    std::string wp_json;
    auto* wp = app.add_subcommand("weierstrass", "lattice and exact cubic trajectories");
    wp->add_option("--E", wp_E, "energy")->default_val(1.0);
    wp->add_option("--t", wp_t, "real time")->each([&](const std::string&) { wp_eval = true; });
    wp->add_option("--a", wp_a, "imaginary shift")->each([&](const std::string&) { wp_eval = true; });
    wp->add_option("--json", wp_json, "write a JSON document");

    // spectrum
    std::string sp_problem = "one", sp_json;
    double sp_g = 0.05, sp_gmin = 0.01, sp_gmax = 0.1;
    int sp_count = 6, sp_steps = 10;
    bool sp_track = false;
    auto* sp = app.add_subcommand("spectrum", "wedge-problem eigenvalues");
    sp->add_option("--problem", sp_problem, "one | two")->default_val("one");
    sp->add_option("--g", sp_g, "coupling")->default_val(0.05);
    sp->add_option("--count", sp_count, "number of levels")->default_val(6);
    sp->add_flag("--track", sp_track, "track levels over a g grid");
    sp->add_option("--g-min", sp_gmin, "grid start")->default_val(0.01);
    sp->add_option("--g-max", sp_gmax, "grid end")->default_val(0.1);
    sp->add_option("--steps", sp_steps, "grid points")->default_val(10);
    sp->add_option("--json", sp_json, "write a JSON document");

    // scan-ep
    std::string se_problem = "two", se_json;
    int se_pair = 1;
    std::vector<double> se_bracket;
    bool se_matrix = false;
    auto* se = app.add_subcommand("scan-ep", "bisect an exceptional point");
    se->add_option("--problem", se_problem, "one | two")->default_val("two");
    se->add_option("--pair", se_pair, "pair index (1 = first to coalesce)")->default_val(1);
    se->add_option("--bracket", se_bracket, "lo,hi coupling bracket")->delimiter(',');
    se->add_flag("--matrix", se_matrix, "run the 2x2 closed-form demo detector");
    se->add_option("--json", se_json, "write a JSON document");

    // g2-demo
    double g2_m = 1.0, g2_l = 0.1, g2_L = 1.0;
    bool g2_scan = false;
    std::string g2_json;
    auto* g2 = app.add_subcommand("g2-demo", "vacuum equation roots and coalescence scan");
    g2->add_option("--m", g2_m, "mass")->default_val(1.0);
    g2->add_option("--lambda", g2_l, "Yukawa coupling")->default_val(0.1);
    g2->add_option("--Lambda", g2_L, "confinement scale")->default_val(1.0);
    g2->add_flag("--scan", g2_scan, "scan lambda^2 for vacuum coalescence");
    g2->add_option("--json", g2_json, "write a JSON document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (const char* env = std::getenv("EPKIT_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) go.workers = w;
    }

    try {
        if (tp->parsed()) return cmd_turning_points(go, tp_f, tp_json);
        if (cep->parsed()) return cmd_classical_ep(go, cep_E, cep_json);
        if (tr->parsed())
            return cmd_trajectory(go, tr_f, tr_stem, tr_all, tr_a, tr_csv, tr_svg);
        if (pd->parsed())
            return cmd_periods(go, pd_f, pd_closed, pd_quad, pd_turns, pd_json);
        if (wp->parsed()) return cmd_weierstrass(go, wp_E, wp_t, wp_a, wp_eval, wp_json);
        if (sp->parsed())
            return cmd_spectrum(go, sp_problem, sp_g, sp_count, sp_track, sp_gmin, sp_gmax,
                                sp_steps, sp_json);
        if (se->parsed())
            return cmd_scan_ep(go, se_problem, se_pair, se_bracket, se_matrix, se_json);
        if (g2->parsed()) return cmd_g2_demo(go, g2_m, g2_l, g2_L, g2_scan, g2_json);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
