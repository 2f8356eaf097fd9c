#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "epkit/cpoly.hpp"
#include "epkit/periods.hpp"
#include "test_util.hpp"

using namespace epkit;
using testutil::close;
using testutil::close_rel;
namespace ref = testutil::ref;

namespace {
Cycle find_named(const ProblemSpec& s, const std::string& name) {
    for (const auto& [n, c] : canonical_cycles(s))
        if (n == name) return c;
    FAIL("cycle not found: " << name);
    return {};
}
}  // namespace

TEST_CASE("cubic closed form") {
    CHECK(std::abs(closed_form_cubic_T1(1.0) - ref::cubic_T1_E1) < 1e-12);
    CHECK(std::abs(closed_form_cubic_T1(64.0) - 0.5 * ref::cubic_T1_E1) < 1e-12);
    CHECK_THROWS_AS(closed_form_cubic_T1(-1.0), std::domain_error);
    CHECK_THROWS_AS(closed_form_cubic_T1(0.0), std::domain_error);
}

TEST_CASE("quintic closed form at E = 1") {
    PeriodData d = closed_form_quintic(1.0);
    CHECK(std::abs(d.T1 - ref::quintic_T1_E1) < 1e-12);
    CHECK(std::abs(d.T2 - ref::quintic_T2_E1) < 1e-12);
    CHECK(std::abs(d.T3 - ref::quintic_T3_E1) < 1e-12);
    CHECK(std::abs(d.Ti1 - ref::quintic_Ti1_E1) < 1e-12);
    CHECK(std::abs(d.Ti2 - ref::quintic_Ti2_E1) < 1e-12);
    CHECK(std::abs(d.Ti3 - ref::quintic_Ti3_E1) < 1e-12);
    CHECK(std::abs(d.T3 - (d.T1 - d.T2)) < 1e-15);
    CHECK_THROWS_AS(closed_form_quintic(-2.0), std::domain_error);
}

TEST_CASE("quintic closed form scales as E^{-3/10}") {
    PeriodData a = closed_form_quintic(1.0);
    PeriodData b = closed_form_quintic(1024.0);
    double f = std::pow(1024.0, -0.3);
    CHECK(std::abs(b.T1 - a.T1 * f) < 1e-12);
    CHECK(std::abs(b.Ti2 - a.Ti2 * f) < 1e-12);
}

TEST_CASE("cubic cycle integral reproduces the closed form") {
    ProblemSpec s = ProblemSpec::cubic(0.0, 1.0, 1.0);
    Cycle smile = find_named(s, "low-pair");
    QuadratureResult q = cycle_integral(s, smile);
    CHECK(q.rel_err <= 1e-8);
    CHECK(std::abs(q.value.imag()) < 1e-8);
    CHECK(std::abs(q.value.real() - ref::cubic_T1_E1) < 1e-6 * ref::cubic_T1_E1);
}

// Measured cycle <-> period assignment for the pure quintic pentagon (the
// correspondence is fixed here numerically, against the closed forms): the
// long stem joining the upper mirror pair carries T1, the short stem joining
// the low adjacent pair carries T2, and the escape cycle from z = i E^{1/5}
// carries T3 = T1 - T2.
TEST_CASE("pure quintic cycle integrals match the closed forms") {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    QuadratureResult low = cycle_integral(s, find_named(s, "low-pair"));
    QuadratureResult up = cycle_integral(s, find_named(s, "upper-pair"));
    QuadratureResult esc = cycle_integral(s, find_named(s, "escape"));

    CHECK(std::abs(up.value.imag()) < 1e-7);
    CHECK(std::abs(up.value.real() - ref::quintic_T1_E1) < 1e-6 * ref::quintic_T1_E1);
    CHECK(std::abs(low.value.imag()) < 1e-7);
    CHECK(std::abs(low.value.real() - ref::quintic_T2_E1) < 1e-6 * ref::quintic_T2_E1);
    CHECK(std::abs(esc.value.imag()) < 1e-7);
    CHECK(std::abs(esc.value.real() - ref::quintic_T3_E1) < 1e-6 * ref::quintic_T3_E1);

    // T3 = T1 - T2 between independent quadratures
    CHECK(std::abs(esc.value.real() - (up.value.real() - low.value.real())) <
          1e-6 * ref::quintic_T3_E1);
}

TEST_CASE("quadrature follows closed forms across E") {
    for (double E : {0.5, 1.0, 2.0}) {
        ProblemSpec cub = ProblemSpec::cubic(0.0, 1.0, E);
        QuadratureResult qc = cycle_integral(cub, find_named(cub, "low-pair"));
        CHECK(std::abs(qc.value.real() - closed_form_cubic_T1(E)) <
              1e-6 * closed_form_cubic_T1(E));

        ProblemSpec qui = ProblemSpec::pure_quintic(E);
        PeriodData d = closed_form_quintic(E);
        QuadratureResult q1 = cycle_integral(qui, find_named(qui, "upper-pair"));
        CHECK(std::abs(q1.value.real() - d.T1) < 1e-6 * d.T1);
        QuadratureResult q2 = cycle_integral(qui, find_named(qui, "low-pair"));
        CHECK(std::abs(q2.value.real() - d.T2) < 1e-6 * d.T2);
    }
}

TEST_CASE("periods obey the power-law scaling over two decades") {
    // quadrature values against exact E^{-1/6} (cubic) / E^{-3/10} (quintic)
    ProblemSpec cub1 = ProblemSpec::cubic(0.0, 1.0, 0.2);
    double base_c = cycle_integral(cub1, find_named(cub1, "low-pair")).value.real();
    ProblemSpec qui1 = ProblemSpec::pure_quintic(0.2);
    double base_q = cycle_integral(qui1, find_named(qui1, "low-pair")).value.real();
    for (double E : {0.7, 2.0, 20.0}) {
        ProblemSpec c = ProblemSpec::cubic(0.0, 1.0, E);
        double Tc = cycle_integral(c, find_named(c, "low-pair")).value.real();
        CHECK(std::abs(Tc / (base_c * std::pow(E / 0.2, -1.0 / 6.0)) - 1.0) < 1e-8);

        ProblemSpec q = ProblemSpec::pure_quintic(E);
        double Tq = cycle_integral(q, find_named(q, "low-pair")).value.real();
        CHECK(std::abs(Tq / (base_q * std::pow(E / 0.2, -0.3)) - 1.0) < 1e-8);
    }
}

TEST_CASE("full quintic periods stay finite and continuous in g") {
    ProblemSpec a = ProblemSpec::quintic(0.1, 1.0);
    ProblemSpec b = ProblemSpec::quintic(0.1001, 1.0);
    QuadratureResult qa = cycle_integral(a, find_named(a, "low-pair"));
    QuadratureResult qb = cycle_integral(b, find_named(b, "low-pair"));
    CHECK(std::isfinite(qa.value.real()));
    CHECK(std::isfinite(qa.value.imag()));
    CHECK(std::abs(qa.value - qb.value) < 5e-3 * std::abs(qa.value));
    CHECK(qa.rel_err <= 1e-8);
}

TEST_CASE("pinched cycle is rejected at the classical exceptional point") {
    double gs = classical_exceptional_point(-1.0);
    ProblemSpec s = ProblemSpec::quintic(gs, -1.0);
    TurningPointSet tp = turning_points(s);
    int dbl = -1;
    for (std::size_t i = 0; i < tp.points.size(); ++i)
        if (tp.multiplicity[i] > 1) dbl = int(i);
    REQUIRE(dbl >= 0);
    int other = dbl == 0 ? 1 : 0;
    CHECK_THROWS_AS(cycle_integral(s, Cycle{dbl, other}), std::domain_error);
}

TEST_CASE("monodromy: one negative turn maps T1 and T2 per the lattice") {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    PeriodData d = closed_form_quintic(1.0);

    cplx t1c = monodromy_continue(s, find_named(s, "upper-pair"), 1);
    cplx expect1(-0.5 * d.T2, 0.5 * d.Ti2);  // (i Ti2 - T2)/2
    CHECK(std::abs(t1c - expect1) < 1e-6 * std::abs(expect1));

    cplx t2c = monodromy_continue(s, find_named(s, "low-pair"), 1);
    cplx expect2(-0.5 * d.T3, 0.5 * d.Ti3);  // (i Ti3 - T3)/2
    CHECK(std::abs(t2c - expect2) < 1e-6 * std::abs(expect2));
}

TEST_CASE("monodromy: zero turns is the identity") {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    Cycle c = find_named(s, "low-pair");
    cplx v = monodromy_continue(s, c, 0);
    CHECK(close_rel(v, cycle_integral(s, c).value, 1e-14));
}

TEST_CASE("monodromy composes as a rotation per turn") {
    // each negative turn in E multiplies the continued period by e^{3 i pi/5}
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    Cycle up = find_named(s, "upper-pair");
    PeriodData d = closed_form_quintic(1.0);
    cplx rot = std::polar(1.0, 3.0 * 3.14159265358979323846 / 5.0);
    for (int turns : {-1, 2}) {
        cplx got = monodromy_continue(s, up, turns);
        cplx want = d.T1 * std::pow(rot, turns);
        CHECK(std::abs(got - want) <= 1e-6 * std::abs(want));
    }
}

TEST_CASE("monodromy roundtrip returns the original period") {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    Cycle c = find_named(s, "low-pair");
    cplx orig = cycle_integral(s, c).value;
    cplx back = monodromy_roundtrip(s, c, 1);
    CHECK(std::abs(back - orig) < 1e-8 * std::abs(orig));
}

TEST_CASE("canonical cycles for the cubic") {
    ProblemSpec s = ProblemSpec::cubic(0.0, 1.0, 1.0);
    auto cs = canonical_cycles(s);
    bool has_low = false, has_escape = false;
    for (const auto& [n, c] : cs) {
        if (n == "low-pair") has_low = true;
        if (n == "escape") has_escape = true;
    }
    CHECK(has_low);
    CHECK(has_escape);
}
