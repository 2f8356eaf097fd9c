#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "epkit/spectrum.hpp"
#include "test_util.hpp"

using namespace epkit;
using testutil::close;

namespace {
constexpr double kPi = 3.14159265358979323846;

/// plain secant on the mismatch, used to pin single levels under
/// perturbed solver options
cplx polish_level(double g, WedgeProblem p, cplx seed, const ShootOptions& opt) {
    cplx e0 = seed, e1 = seed + cplx(1e-4, 1e-4);
    cplx f0 = shoot(g, e0, p, opt), f1 = shoot(g, e1, p, opt);
    for (int i = 0; i < 60; ++i) {
        cplx d = f1 - f0;
        if (std::abs(d) == 0.0) break;
        cplx e2 = e1 - f1 * (e1 - e0) / d;
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = shoot(g, e1, p, opt);
        if (std::abs(e1 - e0) < 1e-13 * std::max(1.0, std::abs(e1))) break;
    }
    return e1;
}
}  // namespace

TEST_CASE("wedge rays sit at the sector midpoints") {
    WedgeRays one = rays_for(WedgeProblem::One);
    CHECK(one.right == doctest::Approx(kPi / 14.0).epsilon(1e-15));
    CHECK(one.left == doctest::Approx(13.0 * kPi / 14.0).epsilon(1e-15));
    WedgeRays two = rays_for(WedgeProblem::Two);
    CHECK(two.right == doctest::Approx(-3.0 * kPi / 14.0).epsilon(1e-15));
    CHECK(two.left == doctest::Approx(17.0 * kPi / 14.0).epsilon(1e-15));
}

TEST_CASE("harmonic limit: mismatch vanishes exactly at n + 1/2") {
    for (double E : {0.5, 1.5, 2.5}) {
        double at_level = std::abs(shoot(0.0, E, WedgeProblem::One));
        double off_level = std::abs(shoot(0.0, E + 0.37, WedgeProblem::One));
        CHECK(at_level < 1e-10);
        CHECK(off_level > 1e3 * at_level);
    }
}

TEST_CASE("problem One spectrum at g = 0 is the harmonic ladder") {
    auto ev = eigenvalues(0.0, WedgeProblem::One, 4);
    REQUIRE(ev.size() == 4);
    for (int n = 0; n < 4; ++n) {
        CHECK(std::abs(ev[n].E.real() - (n + 0.5)) < 1e-9);
        CHECK(std::abs(ev[n].E.imag()) < 1e-9);
    }
}

TEST_CASE("problem One stays real across couplings") {
    for (double g : {0.01, 0.05, 0.1, 0.5}) {
        auto ev = eigenvalues(g, WedgeProblem::One, 6);
        REQUIRE(int(ev.size()) == 6);
        for (const auto& r : ev) {
            CHECK(std::abs(r.E.imag()) <= 1e-7);
            CHECK(r.residual <= 1e-9);
            CHECK(r.converged);
        }
        for (std::size_t i = 1; i < ev.size(); ++i)
            CHECK(ev[i].E.real() > ev[i - 1].E.real());
    }
}

TEST_CASE("problem One approaches n + 1/2 as g -> 0") {
    auto ev = eigenvalues(1e-3, WedgeProblem::One, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(std::abs(ev[n].E.real() - (n + 0.5)) < 0.02);
}

TEST_CASE("problem Two: real above g*, one pair below") {
    auto above = eigenvalues(0.05, WedgeProblem::Two, 6);
    for (const auto& r : above) CHECK(std::abs(r.E.imag()) < 1e-5);

    auto below = eigenvalues(0.02, WedgeProblem::Two, 6);
    int complex_members = 0;
    for (const auto& r : below)
        if (std::abs(r.E.imag()) > 1e-4) ++complex_members;
    CHECK(complex_members == 2);
    // conjugate pairing
    for (const auto& r : below) {
        if (std::abs(r.E.imag()) <= 1e-4) continue;
        bool has_partner = false;
        for (const auto& s : below)
            if (std::abs(s.E - std::conj(r.E)) < 1e-7 * std::max(1.0, std::abs(r.E)))
                has_partner = true;
        CHECK(has_partner);
    }
}

TEST_CASE("problem Two refuses the degenerate small-g regime") {
    CHECK_THROWS_AS(eigenvalues(5e-4, WedgeProblem::Two, 4), std::domain_error);
    CHECK_THROWS_AS(shoot(5e-4, 0.5, WedgeProblem::Two), std::domain_error);
}

TEST_CASE("mismatch is analytic in E") {
    ShootOptions opt;
    const double h = 1e-4;
    for (cplx E : {cplx(0.8, 0.0), cplx(1.7, 0.3)}) {
        cplx wxp = shoot(0.05, E + h, WedgeProblem::One, opt);
        cplx wxm = shoot(0.05, E - h, WedgeProblem::One, opt);
        cplx wyp = shoot(0.05, E + cplx(0.0, h), WedgeProblem::One, opt);
        cplx wym = shoot(0.05, E - cplx(0.0, h), WedgeProblem::One, opt);
        cplx dx = (wxp - wxm) / (2.0 * h);
        cplx dy = (wyp - wym) / (2.0 * h);
        // Cauchy-Riemann: d/dy = i d/dx
        CHECK(std::abs(dy - cplx(0.0, 1.0) * dx) <= 1e-6 * std::max(1.0, std::abs(dx)));
    }
}

TEST_CASE("eigenvalues are insensitive to the ray radius and angle") {
    ShootOptions base;
    base.R_outer = 6.0;
    cplx e_base = polish_level(0.05, WedgeProblem::One, 0.5, base);

    ShootOptions doubled = base;
    doubled.R_outer = 12.0;
    cplx e_doubled = polish_level(0.05, WedgeProblem::One, 0.5, doubled);
    CHECK(std::abs(e_doubled - e_base) <= 1e-8);

    ShootOptions tilted = base;
    tilted.angle_shift = kPi / 28.0;
    cplx e_tilted = polish_level(0.05, WedgeProblem::One, 0.5, tilted);
    CHECK(std::abs(e_tilted - e_base) <= 1e-7);

    // problem Two ground level under the same perturbations
    ShootOptions base2;
    base2.R_outer = 6.5;
    cplx t_base = polish_level(0.05, WedgeProblem::Two, 0.24, base2);
    ShootOptions tilted2 = base2;
    tilted2.angle_shift = -kPi / 28.0;
    cplx t_tilt = polish_level(0.05, WedgeProblem::Two, 0.24, tilted2);
    CHECK(std::abs(t_tilt - t_base) <= 1e-7);
}

TEST_CASE("rays leaving their wedge are rejected") {
    ShootOptions bad;
    bad.angle_shift = kPi / 7.0;  // the full wedge width
    CHECK_THROWS_AS(shoot(0.05, 0.5, WedgeProblem::One, bad), std::invalid_argument);
}

TEST_CASE("tracking problem One in g is smooth") {
    std::vector<double> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(0.01 + 0.01 * i);
    TrackResult tr = track(grid, WedgeProblem::One, 4);
    REQUIRE(tr.levels.size() == grid.size());
    for (std::size_t i = 0; i < tr.levels.size(); ++i) {
        REQUIRE(int(tr.levels[i].size()) == 4);
        for (cplx e : tr.levels[i]) CHECK(std::abs(e.imag()) < 1e-7);
    }
    for (std::size_t i = 1; i < tr.levels.size(); ++i)
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(tr.levels[i][k] - tr.levels[i - 1][k]) < 0.5);
}

TEST_CASE("tracking problem Two across the first transition") {
    std::vector<double> grid = {0.02, 0.03, 0.04, 0.05, 0.06};
    TrackResult tr = track(grid, WedgeProblem::Two, 4);
    REQUIRE(tr.levels.size() == grid.size());
    int complex_low = 0;
    for (cplx e : tr.levels.front())
        if (std::abs(e.imag()) > 1e-4) ++complex_low;
    CHECK(complex_low == 2);
    for (cplx e : tr.levels.back()) CHECK(std::abs(e.imag()) < 1e-5);
}

TEST_CASE("quantum exceptional points sit at the published couplings") {
    ExceptionalPoint ep1 = find_quantum_ep(WedgeProblem::Two, 1, 0.02, 0.06);
    CHECK(std::abs(ep1.parameter - 0.037) <= 0.003);
    CHECK(ep1.uncertainty > 0.0);
    CHECK(ep1.uncertainty <= 1e-4);
    CHECK(ep1.pair_values[0].imag() != 0.0);

    ExceptionalPoint ep2 = find_quantum_ep(WedgeProblem::Two, 2, 0.004, 0.02);
    CHECK(std::abs(ep2.parameter - 0.007) <= 0.003);
    CHECK(ep2.uncertainty <= 1e-4);
}

TEST_CASE("matrix exceptional-point demo") {
    auto [a1, a2] = matrix_ep_demo(0.04);
    CHECK(close(a1, 0.8, 1e-14));
    CHECK(close(a2, 1.2, 1e-14));

    auto [b1, b2] = matrix_ep_demo(-0.04);
    CHECK(close(b1, cplx(1.0, -0.2), 1e-14));
    CHECK(close(b2, cplx(1.0, 0.2), 1e-14));

    auto [c1, c2] = matrix_ep_demo(0.0);
    CHECK(close(c1, 1.0, 0.0));
    CHECK(close(c2, 1.0, 0.0));

    ExceptionalPoint ep = find_matrix_ep(-0.5, 0.5);
    CHECK(std::abs(ep.parameter) < 1e-10);
    CHECK(ep.kind == EpKind::MatrixDemo);
}
