#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lamebands/lamebands.hpp"
#include "oracles.hpp"

using namespace lamebands;
using Catch::Approx;

TEST_CASE("Ince coefficients", "[ince]") {
    SECTION("m -> 0 degenerates to constant coefficients") {
        const double E = 3.2;
        const auto c = ince_coefficients(2.0, 1.0, Modulus(1e-13), E);
        CHECK(c.A == Approx(0.0).margin(1e-13));
        CHECK(c.B == Approx(0.0).margin(1e-13));
        CHECK(c.D == Approx(0.0).margin(1e-12));
        CHECK(c.lambda == Approx(E).margin(1e-12));
        CHECK(c.C == Approx(E / 2.0).margin(1e-12));
    }

    SECTION("direct substitution at a = 2, b = 1, m = 1/2") {
        // Independent re-derivation: lambda = E - m b^2, A = m/(2-m),
        // B = (2b-1)m/(2-m), D = (a+b)(a+1-b)m/(2-m) = 3*2*0.5/1.5 = 2,
        // C = (lambda - (a+b)(a+1-b)m)/(2-m) = (lambda - 3)/1.5.
        const double E = 4.7;
        const auto c = ince_coefficients(2.0, 1.0, Modulus(0.5), E);
        CHECK(c.lambda == Approx(E - 0.5).epsilon(1e-15));
        CHECK(c.A == Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(c.B == Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(c.D == Approx(2.0).epsilon(1e-15));
        CHECK(c.C == Approx((c.lambda - 3.0) / 1.5).epsilon(1e-14));
    }

    SECTION("gap-bound polynomials follow the defining combination") {
        const auto c = ince_coefficients(2.5, 0.5, Modulus(0.4), 1.3);
        const auto g = gap_bound_polynomials(c);
        for (double mu : {-1.0, 0.0, 0.7, 2.0}) {
            const double q = 2.0 * c.A * mu * mu - c.B * mu - 0.5 * c.D;
            const double qs = 2.0 * c.A * (mu - 0.5) * (mu - 0.5) - c.B * (mu - 0.5) - 0.5 * c.D;
            CHECK(g.q[2] * mu * mu + g.q[1] * mu + g.q[0] == Approx(q).margin(1e-13));
            CHECK(g.q_star[2] * mu * mu + g.q_star[1] * mu + g.q_star[0] == Approx(qs).margin(1e-13));
        }
    }
}

TEST_CASE("gap bounds", "[ince]") {
    SECTION("integer Lame: exactly a finite gaps") {
        for (int a : {1, 2, 3, 4}) {
            const auto g = gap_bound(spec::lame(double(a), 0.5));
            REQUIRE(g.max_gaps_period_l);
            REQUIRE(g.max_gaps_period_2l);
            // Period-L count includes the interval below the ground edge.
            CHECK(*g.max_gaps_period_l - 1 + *g.max_gaps_period_2l == a);
            CHECK(*g.max_gaps_period_2l == (a + 1) / 2);
        }
    }

    SECTION("(6,2): two antiperiodic gaps, none periodic") {
        const auto g = gap_bound(spec::assoc_lame(2.0, 1.0, 0.5));
        REQUIRE(g.max_gaps_period_l);
        REQUIRE(g.max_gaps_period_2l);
        CHECK(*g.max_gaps_period_l == 1);   // only the below-ground interval
        CHECK(*g.max_gaps_period_2l == 2);
    }

    SECTION("half-integral pair: only the normal-region class is bounded") {
        const auto g = gap_bound(spec::assoc_lame(2.5, 0.5, 0.5));
        CHECK_FALSE(g.max_gaps_period_l);  // a - b even: the 2K class stays infinite
        REQUIRE(g.max_gaps_period_2l);
        CHECK(*g.max_gaps_period_2l == 1);
    }

    SECTION("a+b odd integral, neither integral nor half-integral") {
        const auto g = gap_bound(spec::assoc_lame(1.8, 1.2, 0.5));
        CHECK_FALSE(g.max_gaps_period_l);
        REQUIRE(g.max_gaps_period_2l);
        CHECK(*g.max_gaps_period_2l == 1);
    }

    SECTION("a+b even integral") {
        const auto g = gap_bound(spec::assoc_lame(2.3, 1.7, 0.5));  // a+b = 4 = 2N
        REQUIRE(g.max_gaps_period_l);
        CHECK(*g.max_gaps_period_l == 3);  // N+1
        CHECK_FALSE(g.max_gaps_period_2l);
    }

    SECTION("generic irrational pair has no bound") {
        const auto g = gap_bound(spec::assoc_lame(1.77, 0.31, 0.5));
        CHECK_FALSE(g.max_gaps_period_l);
        CHECK_FALSE(g.max_gaps_period_2l);
    }

    SECTION("double sine-Gordon") {
        const auto g1 = gap_bound(spec::dsg(1.0, 1.0));
        REQUIRE(g1.max_gaps_period_l);
        CHECK(*g1.max_gaps_period_l == 1);  // (a+1)/2
        CHECK_FALSE(g1.max_gaps_period_2l);

        const auto g2 = gap_bound(spec::dsg(2.0, 1.0));
        CHECK_FALSE(g2.max_gaps_period_l);
        REQUIRE(g2.max_gaps_period_2l);
        CHECK(*g2.max_gaps_period_2l == 2);  // (a+2)/2

        const auto g3 = gap_bound(spec::dsg(3.0, 1.0));
        REQUIRE(g3.max_gaps_period_l);
        CHECK(*g3.max_gaps_period_l == 2);  // (a+1)/2

        const auto g_noninteger = gap_bound(spec::dsg(1.3, 1.0));
        CHECK_FALSE(g_noninteger.max_gaps_period_l);
        CHECK_FALSE(g_noninteger.max_gaps_period_2l);
    }

    CHECK_THROWS_AS(gap_bound(spec::superposed_lame(1.0, 2, 0.5)), std::invalid_argument);
}

TEST_CASE("critical extrema range", "[ince]") {
    SECTION("q = 2, m = 0.5: the range is [1, 4]") {
        const Modulus mod(0.5);
        CHECK(critical_extrema_range(2.0, 2.0, mod));
        CHECK(critical_extrema_range(1.0, 2.0, mod));
        CHECK(critical_extrema_range(4.0, 2.0, mod));
        CHECK_FALSE(critical_extrema_range(6.0, 2.0, mod));
        CHECK_FALSE(critical_extrema_range(0.5, 2.0, mod));
    }

    SECTION("q = 0 collapses to p = 0") {
        CHECK(critical_extrema_range(0.0, 0.0, Modulus(0.5)));
        CHECK_FALSE(critical_extrema_range(1.0, 0.0, Modulus(0.5)));
    }

    SECTION("agrees with a numerical dV/dx root scan") {
        const double m = 0.5, q = 2.0;
        const double b = spec::a_from_strength(q);
        for (double p : {0.4, 1.5, 2.0, 3.7, 5.0, 8.0}) {
            const double a = spec::a_from_strength(p);
            const auto V = make_evaluator(spec::assoc_lame(std::max(a, b), std::min(a, b), m));
            const double K = Modulus(m).K();
            // Count interior stationary points on (0, K): one iff p is
            // strictly inside the critical range.
            int crossings = 0;
            double prev = oracles::diff([&](double t) { return V(t).real(); }, 0.02);
            for (int i = 1; i <= 400; ++i) {
                const double x = 0.02 + (K - 0.04) * i / 400.0;
                const double d = oracles::diff([&](double t) { return V(t).real(); }, x);
                if (prev * d < 0.0) ++crossings;
                prev = d;
            }
            const bool strict_inside = q * (1.0 - m) < p && p < q / (1.0 - m);
            CHECK(crossings == (strict_inside ? 1 : 0));
        }
    }
}

TEST_CASE("parabolas of solvability", "[ince]") {
    using Hits = std::vector<std::pair<int, int>>;
    CHECK(parabola_map(2.0, 0.0) == Hits{{1, 1}, {2, 2}});
    CHECK(parabola_map(6.0, 2.0) == Hits{{1, 1}, {4, 4}});
    CHECK(parabola_map(0.0, 0.0) == Hits{{1, 1}});
    CHECK(parabola_map(6.0, 0.0) == Hits{{2, 2}, {3, 3}});
    CHECK(parabola_map(2.0, 2.0) == Hits{{3, 3}});
    CHECK(parabola_map(6.0, 6.0) == Hits{{5, 5}});
    CHECK(parabola_map(3.3, 1.1).empty());

    // Parametric identity: P2 is (p - q)^2 = 8(p + q) - 12.
    for (double a : {1.0, 2.4, 3.1}) {
        const double p = a * (a + 1.0), q = (a - 1.0) * (a - 2.0);
        CHECK((p - q) * (p - q) == Approx(8.0 * (p + q) - 12.0).margin(1e-10));
        CHECK(!parabola_map(p, q).empty());
    }
}
