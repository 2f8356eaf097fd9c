#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "epkit/cpoly.hpp"
#include "test_util.hpp"

using namespace epkit;
using testutil::close;
using testutil::close_rel;
using testutil::dist_to_set;
namespace ref = testutil::ref;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<cplx> flatten(const std::vector<RootM>& rs) {
    std::vector<cplx> out;
    for (const RootM& r : rs)
        for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.z);
    return out;
}
}  // namespace

TEST_CASE("roots of simple quadratics") {
    auto rs = roots(PolynomialC({-1.0, 0.0, 1.0}));  // z^2 - 1
    REQUIRE(rs.size() == 2);
    CHECK(dist_to_set(1.0, flatten(rs)) < 1e-10);
    CHECK(dist_to_set(-1.0, flatten(rs)) < 1e-10);

    auto dbl = roots(PolynomialC({1.0, -2.0, 1.0}));  // (z-1)^2
    REQUIRE(dbl.size() == 1);
    CHECK(dbl[0].multiplicity == 2);
    CHECK(close(dbl[0].z, 1.0, 1e-7));
}

TEST_CASE("quintic spec at g = 0 reduces to the quadratic") {
    ProblemSpec s = ProblemSpec::quintic(0.0, 1.0);
    PolynomialC p = s.e_minus_v();
    CHECK(p.degree() == 2);
    auto rs = roots(p);
    REQUIRE(rs.size() == 2);
    CHECK(dist_to_set(std::sqrt(2.0), flatten(rs)) < 1e-10);
    CHECK(dist_to_set(-std::sqrt(2.0), flatten(rs)) < 1e-10);
}

TEST_CASE("zero polynomial is rejected") {
    CHECK_THROWS_AS(roots(PolynomialC(std::vector<cplx>{})), std::domain_error);
    CHECK_THROWS_AS(roots(PolynomialC({cplx(2.0)})), std::domain_error);
}

TEST_CASE("Vieta relations hold for random polynomials") {
    testutil::Rng rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + int(rng.next() % 9);
        std::vector<cplx> coeffs(n + 1);
        for (cplx& c : coeffs) c = 3.0 * rng.unit_disc();
        if (std::abs(coeffs[n]) < 0.1) coeffs[n] += 1.0;
        PolynomialC p(coeffs);
        auto rs = flatten(roots(p));
        REQUIRE(int(rs.size()) == p.degree());

        cplx sum = 0.0, prod = 1.0;
        for (cplx z : rs) { sum += z; prod *= z; }
        cplx vieta_sum = -p.coeff(n - 1) / p.coeff(n);
        cplx vieta_prod = p.coeff(0) / p.coeff(n);
        if (n % 2) vieta_prod = -vieta_prod;
        CHECK(close_rel(sum, vieta_sum, 1e-10));
        CHECK(close_rel(prod, vieta_prod, 1e-10));
    }
}

TEST_CASE("residuals at returned roots are small") {
    testutil::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + int(rng.next() % 7);
        std::vector<cplx> coeffs(n + 1);
        for (cplx& c : coeffs) c = 2.0 * rng.unit_disc();
        if (std::abs(coeffs[n]) < 0.1) coeffs[n] += 1.0;
        PolynomialC p(coeffs);
        for (const RootM& r : roots(p))
            CHECK(std::abs(p(r.z)) <= 1e-10 * std::max(1e-30, p.eval_scale(r.z)));
    }
}

TEST_CASE("turning points of the pure quintic at E = 1") {
    ProblemSpec s = ProblemSpec::pure_quintic(1.0);
    TurningPointSet tp = turning_points(s);
    REQUIRE(tp.points.size() == 5);
    CHECK(tp.count_with_multiplicity() == 5);
    for (int k = 0; k < 5; ++k) {
        cplx expect = std::polar(1.0, kPi / 10.0 + 2.0 * kPi * k / 5.0);
        CHECK(dist_to_set(expect, tp.points) < 1e-10);
    }
    CHECK(dist_to_set(cplx(0.0, 1.0), tp.points) < 1e-10);
    CHECK(tp.mirror_symmetric);
}

TEST_CASE("imaginary-axis turning point counts at E = -1") {
    CHECK(imaginary_axis_turning_count(-1.0, 0.03) == 3);
    CHECK(imaginary_axis_turning_count(-1.0, 0.06) == 1);

    ProblemSpec lo = ProblemSpec::quintic(0.03, -1.0);
    ProblemSpec hi = ProblemSpec::quintic(0.06, -1.0);
    CHECK(turning_points(lo).imaginary_axis_indices().size() == 3);
    CHECK(turning_points(hi).imaginary_axis_indices().size() == 1);
}

TEST_CASE("imaginary-axis count flips exactly across g*") {
    for (double E : {-0.5, -1.0, -2.0}) {
        double gs = classical_exceptional_point(E);
        CHECK(imaginary_axis_turning_count(E, 0.9 * gs) == 3);
        CHECK(imaginary_axis_turning_count(E, 1.1 * gs) == 1);
    }
}

TEST_CASE("quintic turning points are mirror symmetric for real E") {
    testutil::Rng rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        double E = rng.uniform(-2.0, 2.0);
        double g = rng.uniform(0.01, 0.5);
        if (std::abs(E) < 0.05) E = 0.5;
        TurningPointSet tp = turning_points(ProblemSpec::quintic(g, E));
        CHECK(tp.mirror_symmetric);
        for (cplx z : tp.points)
            CHECK(dist_to_set(-std::conj(z), tp.points) < 1e-10 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("classical exceptional point values") {
    CHECK(std::abs(classical_exceptional_point(-1.0) - ref::g_star_Em1) <
          1e-10 * ref::g_star_Em1);
    CHECK(std::abs(classical_exceptional_point(-2.0) - ref::g_star_Em2) <
          1e-10 * ref::g_star_Em2);
    CHECK_THROWS_AS(classical_exceptional_point(1.0), std::domain_error);
    CHECK_THROWS_AS(classical_exceptional_point(0.0), std::domain_error);
}

TEST_CASE("coalesced turning point location and tangency") {
    cplx z1 = coalesced_turning_point(-1.0);
    CHECK(close(z1, cplx(0.0, ref::tp_coalesced_Em1), 1e-10));
    cplx z03 = coalesced_turning_point(-0.3);
    CHECK(close(z03, cplx(0.0, 1.0), 1e-10));

    // tangency identity: g* 5 y^3 = 1
    double y = ref::tp_coalesced_Em1;
    CHECK(std::abs(ref::g_star_Em1 * 5.0 * y * y * y - 1.0) < 1e-9);
}

TEST_CASE("double turning point is recognized at g = g*") {
    double gs = classical_exceptional_point(-1.0);
    TurningPointSet tp = turning_points(ProblemSpec::quintic(gs, -1.0));
    CHECK(tp.count_with_multiplicity() == 5);
    bool has_double = false;
    for (std::size_t i = 0; i < tp.points.size(); ++i)
        if (tp.multiplicity[i] >= 2 &&
            close(tp.points[i], cplx(0.0, ref::tp_coalesced_Em1), 1e-3))
            has_double = true;
    CHECK(has_double);
}

TEST_CASE("discriminant of E - V changes sign across g*") {
    for (double E : {-0.5, -1.0, -2.0}) {
        double gs = classical_exceptional_point(E);
        auto disc = [&](double g) {
            return discriminant(ProblemSpec::quintic(g, E).e_minus_v()).real();
        };
        CHECK(disc(0.9 * gs) * disc(1.1 * gs) < 0.0);
        // near-zero at g* relative to the neighboring magnitudes
        double scale = std::max(std::abs(disc(0.9 * gs)), std::abs(disc(1.1 * gs)));
        CHECK(std::abs(disc(gs)) < 1e-8 * scale);
    }
}

TEST_CASE("resultant basics") {
    // Res(z^2-1, z-1) = 0 (shared root), Res(z^2-1, z-2) = 3
    PolynomialC p({-1.0, 0.0, 1.0});
    CHECK(std::abs(resultant(p, PolynomialC({-1.0, 1.0}))) < 1e-12);
    CHECK(close(resultant(p, PolynomialC({-2.0, 1.0})), 3.0, 1e-12));
    // disc(z^2 + bz + c) = b^2 - 4c
    PolynomialC q({cplx(2.0, 1.0), cplx(-3.0, 0.5), 1.0});
    cplx b = q.coeff(1), c = q.coeff(0);
    CHECK(close_rel(discriminant(q), b * b - 4.0 * c, 1e-12));
}

TEST_CASE("G2 vacua: quartic reduction at lambda = 0") {
    std::vector<cplx> us = g2_vacua({1.0, 0.0, 1.0});
    REQUIRE(us.size() == 4);
    for (int k = 0; k < 4; ++k) {
        cplx expect = std::polar(1.0, kPi * k / 2.0);
        CHECK(dist_to_set(expect, us) < 1e-10);
    }
}

TEST_CASE("G2 vacua: small lambda splits 4 near unit circle + 2 large") {
    std::vector<cplx> us = g2_vacua({1.0, 0.2, 1.0});
    REQUIRE(us.size() == 6);
    int small = 0, large = 0;
    for (cplx u : us) {
        if (std::abs(std::abs(u) - 1.0) < 0.2) ++small;
        if (std::abs(u) > 5.0) ++large;
    }
    CHECK(small == 4);
    CHECK(large == 2);
    // the two large roots sit near u = m^2/lambda^2 = 25
    int near_25 = 0;
    for (cplx u : us)
        if (std::abs(u - cplx(25.0)) < 8.0) ++near_25;
    CHECK(near_25 == 2);
}

TEST_CASE("G2 vacuum coalescence scan") {
    G2CoalescenceScan scan = g2_coalescence_scan(1.0, 1.0);
    CHECK(std::abs(scan.lambda2 - 0.385) <= 0.004);
    CHECK(std::abs(scan.lambda2 - ref::g2_lambda2_star) <= 1e-6);
    CHECK(scan.uncertainty > 0.0);
    CHECK(scan.uncertainty < 1e-6);

    // independent oracle: at the critical coupling the polynomial has a
    // near-double root; off the critical coupling it does not
    auto min_gap = [](double lambda2) {
        std::vector<cplx> us = g2_vacua({1.0, std::sqrt(lambda2), 1.0});
        double best = 1e300;
        for (std::size_t i = 0; i < us.size(); ++i)
            for (std::size_t j = i + 1; j < us.size(); ++j)
                best = std::min(best, std::abs(us[i] - us[j]));
        return best;
    };
    CHECK(min_gap(scan.lambda2) < 5e-3);
    CHECK(min_gap(scan.lambda2 - 0.05) > 0.1);
    CHECK(min_gap(scan.lambda2 + 0.05) > 0.1);
}

TEST_CASE("G2 parameter validation") {
    CHECK_THROWS_AS(g2_vacua({-1.0, 0.1, 1.0}), std::domain_error);
    CHECK_THROWS_AS(g2_vacua({1.0, 0.1, -1.0}), std::domain_error);
}
