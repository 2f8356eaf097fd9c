#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "epkit/weierstrass.hpp"
#include "test_util.hpp"

using namespace epkit;
using testutil::close;
namespace ref = testutil::ref;

namespace {
constexpr double kPi = 3.14159265358979323846;

double curve_residual(const WpValue& v, const Invariants& inv) {
    cplx res = v.dp * v.dp - (4.0 * v.p * v.p * v.p - inv.g2 * v.p - inv.g3);
    double scale = std::max({1.0, std::abs(v.dp * v.dp), 4.0 * std::abs(v.p * v.p * v.p)});
    return std::abs(res) / scale;
}
}  // namespace

TEST_CASE("invariants from the cubic reduction") {
    Invariants a = invariants_from_cubic(1.0);
    CHECK(close(a.g2, 0.0, 1e-15));
    CHECK(close(a.g3, 0.5, 1e-15));
    CHECK(!a.degenerate());

    Invariants b = invariants_from_cubic(-1.0);
    CHECK(close(b.g3, -0.5, 1e-15));

    CHECK(invariants_from_cubic(0.0).degenerate());
    CHECK_THROWS_AS(lattice_from_invariants(invariants_from_cubic(0.0)), std::domain_error);
}

TEST_CASE("equianharmonic lattice generators") {
    Lattice lat = lattice_from_invariants({0.0, 0.5});
    CHECK(std::abs(lat.w1.imag()) < 1e-9);
    CHECK(std::abs(lat.w1.real() - ref::cubic_T1_E1) < 1e-8);
    // hexagonal: w2 = w1 e^{i pi/3}
    cplx ratio = lat.w2 / lat.w1;
    CHECK(std::abs(ratio - std::polar(1.0, kPi / 3.0)) < 1e-8);
    // purely imaginary combination 2 w2 - w1 = i sqrt(3) w1
    cplx it = 2.0 * lat.w2 - lat.w1;
    CHECK(std::abs(it.real()) < 1e-8);
    CHECK(std::abs(it.imag() - ref::cubic_Ttilde_E1) < 1e-7);
}

TEST_CASE("lattice scales as g3^{-1/6}") {
    Lattice a = lattice_from_invariants({0.0, 0.5});
    Lattice b = lattice_from_invariants({0.0, 32.0});  // g3 scaled by 64 = 2^6
    CHECK(std::abs(b.w1 - a.w1 / 2.0) < 1e-8);
    CHECK(std::abs(std::abs(b.w2) - std::abs(a.w2) / 2.0) < 1e-8);
}

TEST_CASE("wp near the origin follows the Laurent leading term") {
    Invariants inv{0.0, 0.5};
    Lattice lat = lattice_from_invariants(inv);
    for (double t : {1e-3, 5e-3, 2e-2}) {
        WpValue v = wp(cplx(t, 0.0), inv, lat);
        CHECK(std::abs(v.p - 1.0 / (t * t)) < 1e-4 / (t * t) + 1.0);
        CHECK(curve_residual(v, inv) <= 1e-9);
    }
}

TEST_CASE("wp parity and double periodicity") {
    Invariants inv{0.0, 0.5};
    Lattice lat = lattice_from_invariants(inv);
    testutil::Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        cplx t = cplx(rng.uniform(0.05, 1.5), rng.uniform(-0.7, 0.7));
        WpValue v = wp(t, inv, lat);
        WpValue vneg = wp(-t, inv, lat);
        CHECK(std::abs(vneg.p - v.p) <= 1e-9 * std::max(1.0, std::abs(v.p)));
        CHECK(std::abs(vneg.dp + v.dp) <= 1e-9 * std::max(1.0, std::abs(v.dp)));

        WpValue v1 = wp(t + lat.w1, inv, lat);
        WpValue v2 = wp(t + lat.w2, inv, lat);
        CHECK(std::abs(v1.p - v.p) <= 1e-9 * std::max(1.0, std::abs(v.p)));
        CHECK(std::abs(v2.p - v.p) <= 1e-9 * std::max(1.0, std::abs(v.p)));

        CHECK(curve_residual(v, inv) <= 1e-9);
    }
}

TEST_CASE("wp pole rejection") {
    Invariants inv{0.0, 0.5};
    Lattice lat = lattice_from_invariants(inv);
    CHECK_THROWS_AS(wp(cplx(0.0, 0.0), inv, lat), std::domain_error);
    CHECK_THROWS_AS(wp(lat.w1, inv, lat), std::domain_error);
    CHECK_THROWS_AS(wp(2.0 * lat.w2 + cplx(1e-9, 0.0), inv, lat), std::domain_error);
}

TEST_CASE("cubic trajectory: vertical stem and the smile") {
    CubicFlow flow(1.0);
    const double T1 = flow.T1();
    const double Tt = flow.Ttilde();
    CHECK(std::abs(T1 - ref::cubic_T1_E1) < 1e-8);
    CHECK(std::abs(Tt - ref::cubic_Ttilde_E1) < 1e-7);

    // a = 0: purely imaginary z, reaching the turning point z = i at t = T1/2
    for (double t : {0.3, 0.8, 1.4}) {
        cplx z = flow.z(t, 0.0);
        CHECK(std::abs(z.real()) < 1e-9 * std::max(1.0, std::abs(z)));
        CHECK(z.imag() > 1.0 - 1e-9);
    }
    CHECK(close(flow.z(0.5 * T1, 0.0), cplx(0.0, 1.0), 1e-9));

    // a = Ttilde/4: the smile connecting the two lower turning points
    cplx left = flow.z(0.25 * T1, 0.25 * Tt);
    cplx right = flow.z(0.75 * T1, 0.25 * Tt);
    cplx tp1 = std::polar(1.0, -5.0 * kPi / 6.0);
    cplx tp2 = std::polar(1.0, -kPi / 6.0);
    CHECK((close(left, tp1, 1e-8) || close(left, tp2, 1e-8)));
    CHECK((close(right, tp1, 1e-8) || close(right, tp2, 1e-8)));
    CHECK(std::abs(left - right) > 1.0);
}

TEST_CASE("half imaginary-period shift reverses time") {
    CubicFlow flow(1.0);
    const double Tt = flow.Ttilde();
    for (double t : {0.17, 0.6, 1.21}) {
        // member at a + Ttilde/2 retraces the member at Ttilde/2 - a
        cplx lhs = flow.z(t, 0.25 * Tt + 0.5 * Tt);
        cplx rhs = flow.z(-t, 0.25 * Tt);
        CHECK(close(lhs, rhs, 1e-9));

        cplx lhs2 = flow.z(t, Tt / 16.0 + 0.5 * Tt);
        cplx rhs2 = flow.z(-t, 0.5 * Tt - Tt / 16.0);
        CHECK(close(lhs2, rhs2, 1e-9));
    }
}

TEST_CASE("imaginary-time trajectories match real-time ones at -E up to sign") {
    // P(a + i ttilde; 0, E/2) = -P(ttilde - i a; 0, -E/2)
    Invariants plus = invariants_from_cubic(1.0);
    Invariants minus = invariants_from_cubic(-1.0);
    Lattice lp = lattice_from_invariants(plus);
    Lattice lm = lattice_from_invariants(minus);
    const double a = 0.35;
    for (double tt : {0.2, 0.7, 1.3}) {
        cplx zi = cplx(0.0, 2.0) * wp(cplx(a, tt), plus, lp).p;
        cplx zr = cplx(0.0, 2.0) * wp(cplx(tt, -a), minus, lm).p;
        CHECK(std::abs(zi + zr) <= 1e-6 * std::max(1.0, std::abs(zr)));
    }
}

TEST_CASE("cubic trajectory conserves energy under finite differences") {
    CubicFlow flow(1.0);
    const double h = 1e-5;
    for (double a : {0.0, 0.4, 1.2}) {
        for (double t : {0.35, 0.9, 2.1}) {
            cplx z = flow.z(t, a);
            cplx zdot = (flow.z(t + h, a) - flow.z(t - h, a)) / (2.0 * h);
            cplx res = 0.5 * zdot * zdot + cplx(0.0, 1.0) * z * z * z - 1.0;
            CHECK(std::abs(res) <= 1e-8 * std::max(1.0, std::abs(z * z * z)));
        }
    }
}

TEST_CASE("one-shot cubic_trajectory wrapper agrees with CubicFlow") {
    CubicFlow flow(1.0);
    CHECK(close(cubic_trajectory(0.9, 0.3, 1.0), flow.z(0.9, 0.3), 1e-12));
}
