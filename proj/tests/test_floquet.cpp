#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "lamebands/lamebands.hpp"
#include "oracles.hpp"

using namespace lamebands;
using Catch::Approx;

namespace {

std::vector<double> regular_energies(const std::vector<NumericBandEdge>& edges) {
    std::vector<double> out;
    for (const auto& e : edges)
        if (!e.degenerate) out.push_back(e.energy);
    return out;
}

}  // namespace

TEST_CASE("monodromy of the free particle", "[floquet]") {
    const auto s = spec::lame(0.0, 0.5);  // V = 0 over period 2K
    const double L = period(s);
    for (double E : {0.3, 1.0, 4.7}) {
        const auto mr = monodromy(s, E, 1e-11);
        CHECK(mr.discriminant.real() == Approx(2.0 * std::cos(std::sqrt(E) * L)).margin(1e-9));
        CHECK(std::abs(mr.det - 1.0) < 1e-10);
    }
}

TEST_CASE("monodromy hits the shifted Lame band edges", "[floquet]") {
    const double m = 0.8;
    const double delta = std::sqrt(1.0 - m + m * m);
    const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
    CHECK(monodromy(s, 0.0).discriminant.real() == Approx(2.0).margin(1e-7));
    CHECK(monodromy(s, 2.0 * delta - 1.0 - m).discriminant.real() == Approx(-2.0).margin(1e-7));

    // Wronskian conservation across a sweep.
    for (double E : {-0.4, 0.7, 2.3, 5.1})
        CHECK(std::abs(monodromy(s, E).det - 1.0) < 1e-9);
}

TEST_CASE("band edges of the a = 2 Lame potential", "[floquet]") {
    const double m = 0.5;
    const double delta = std::sqrt(1.0 - m + m * m);
    const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
    EdgeSearchOptions opt;
    opt.with_nodes = true;
    const auto edges = find_band_edges(s, -0.3, 4.4, opt);
    const auto regular = regular_energies(edges);
    REQUIRE(regular.size() == 5);

    const std::vector<double> expect = {0.0, 2.0 * delta - 1.0 - m, 2.0 * delta - 1.0 + 2.0 * m,
                                        2.0 * delta + 2.0 - m, 4.0 * delta};
    const std::vector<EdgeType> types = {EdgeType::periodic, EdgeType::antiperiodic,
                                         EdgeType::antiperiodic, EdgeType::periodic,
                                         EdgeType::periodic};
    const std::vector<int> nodes = {0, 1, 1, 2, 2};
    int k = 0;
    for (const auto& e : edges) {
        if (e.degenerate) continue;
        CHECK(e.energy == Approx(expect[k]).margin(1e-7));
        CHECK(e.edge_type == types[k]);
        CHECK(e.nodes == nodes[k]);
        ++k;
    }
}

TEST_CASE("band edges of the (6,2) potential including its closed gap", "[floquet]") {
    const double m = 0.5;
    const auto s = spec::assoc_lame(2.0, 1.0, m, -4.0 * m);
    EdgeSearchOptions opt;
    opt.with_nodes = true;
    const auto edges = find_band_edges(s, -0.5, 10.0, opt);
    const auto regular = regular_energies(edges);
    REQUIRE(regular.size() == 5);

    const double r1 = std::sqrt(4.0 - 3.0 * m), r2 = std::sqrt(4.0 - 5.0 * m + m * m);
    const std::vector<double> expect = {0.0, 5.0 - 3.0 * m - 2.0 * r1, 5.0 - 2.0 * m - 2.0 * r2,
                                        5.0 - 2.0 * m + 2.0 * r2, 5.0 - 3.0 * m + 2.0 * r1};
    for (int j = 0; j < 5; ++j) CHECK(regular[j] == Approx(expect[j]).margin(1e-7));

    // Top band: both edges antiperiodic.
    std::vector<EdgeType> types;
    std::vector<int> node_counts;
    for (const auto& e : edges)
        if (!e.degenerate) {
            types.push_back(e.edge_type);
            if (e.nodes) node_counts.push_back(*e.nodes);
        }
    CHECK(types[3] == EdgeType::antiperiodic);
    CHECK(types[4] == EdgeType::antiperiodic);
    CHECK(node_counts == std::vector<int>{0, 1, 1, 3, 3});

    // The two missing period-2K states are degenerate: one zero-width gap
    // flagged inside the second band.
    int degenerate_count = 0;
    for (const auto& e : edges)
        if (e.degenerate && !e.warning) {
            ++degenerate_count;
            CHECK(e.edge_type == EdgeType::periodic);
            CHECK(e.energy > expect[2]);
            CHECK(e.energy < expect[3]);
        }
    CHECK(degenerate_count == 1);
}

TEST_CASE("free particle scan yields only zero-width touchings", "[floquet]") {
    const auto s = spec::lame(0.0, 0.5);
    const auto edges = find_band_edges(s, 0.05, 4.0, {});
    for (const auto& e : edges) CHECK(e.degenerate);
}

TEST_CASE("integer Lame potentials show exactly a gaps", "[floquet]") {
    for (int a : {1, 2, 3}) {
        const auto s = spec::lame(double(a), 0.5);
        const auto edges = find_band_edges(s, -0.2, double(a * (a + 1)) + 6.0, {});
        const auto regular = regular_energies(edges);
        CHECK(regular.size() == std::size_t(2 * a + 1));

        // Verify against the gap-bound analyzer: edge types alternate as
        // P, A, A, P, P, ... and the per-class counts match the bounds.
        const auto g = gap_bound(s);
        std::vector<EdgeType> types;
        for (const auto& e : edges)
            if (!e.degenerate) types.push_back(e.edge_type);
        int gaps_l = 1, gaps_2l = 0;  // count the below-ground interval as periodic
        for (std::size_t i = 1; i + 1 < types.size(); i += 2) {
            REQUIRE(types[i] == types[i + 1]);
            (types[i] == EdgeType::periodic ? gaps_l : gaps_2l) += 1;
        }
        CHECK(gaps_l == *g.max_gaps_period_l);
        CHECK(gaps_2l == *g.max_gaps_period_2l);
    }
}

TEST_CASE("oscillation structure of numeric edges", "[floquet]") {
    const double m = 0.5;
    const double delta = std::sqrt(1.0 - m + m * m);
    const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
    const auto edges = find_band_edges(s, -0.3, 4.4, {});
    std::vector<EdgeType> types;
    for (const auto& e : edges)
        if (!e.degenerate) types.push_back(e.edge_type);
    // (+, -, -, +, +) alternation per the oscillation theorem.
    const std::vector<EdgeType> expect = {EdgeType::periodic, EdgeType::antiperiodic,
                                          EdgeType::antiperiodic, EdgeType::periodic,
                                          EdgeType::periodic};
    CHECK(types == expect);
}

TEST_CASE("node counting contract", "[floquet]") {
    const double m = 0.5;
    const double delta = std::sqrt(1.0 - m + m * m);
    const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
    CHECK(count_nodes(s, 0.0, EdgeType::periodic) == 0);
    CHECK(count_nodes(s, 4.0 * delta, EdgeType::periodic) == 2);
    CHECK_THROWS_AS(count_nodes(s, 0.5, EdgeType::periodic), std::invalid_argument);

    const auto s62 = spec::assoc_lame(2.0, 1.0, m, -4.0 * m);
    const double top = 5.0 - 3.0 * m + 2.0 * std::sqrt(4.0 - 3.0 * m);
    CHECK(count_nodes(s62, top, EdgeType::antiperiodic) == 3);
}

TEST_CASE("convergence under tolerance tightening", "[floquet]") {
    // The adaptive embedded pair delivers a band-edge error that scales
    // essentially linearly with ode_tol, so one decade of tightening must
    // buy well over a factor of four.
    const double m = 0.5;
    const double delta = std::sqrt(1.0 - m + m * m);
    const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
    const std::vector<double> exact = {0.0, 2.0 * delta - 1.0 - m, 2.0 * delta - 1.0 + 2.0 * m,
                                       2.0 * delta + 2.0 - m, 4.0 * delta};
    auto worst_error = [&](double tol) {
        EdgeSearchOptions opt;
        opt.ode_tol = tol;
        opt.edge_tol = 1e-13;
        const auto regular = regular_energies(find_band_edges(s, -0.3, 4.4, opt));
        REQUIRE(regular.size() == 5);
        double worst = 0.0;
        for (int j = 0; j < 5; ++j) worst = std::max(worst, std::abs(regular[j] - exact[j]));
        return worst;
    };
    const double e4 = worst_error(1e-4);
    const double e5 = worst_error(1e-5);
    const double e6 = worst_error(1e-6);
    CHECK(e5 < e4 / 4.0);
    CHECK(e6 < e5 / 4.0);
}

TEST_CASE("PT monodromy stays real on the real energy axis", "[floquet]") {
    const double m = 0.8, beta = 0.4;
    const auto s = spec::pt(spec::lame(2.0, m), beta);
    for (double E : {-4.0, -2.0, 0.5}) {
        const auto mr = monodromy(s, E, 1e-10);
        CHECK(std::abs(mr.discriminant.imag()) < 1e-8);
        CHECK(std::abs(mr.det - 1.0) < 1e-9);
    }
}

TEST_CASE("complex double sine-Gordon level structure", "[floquet]") {
    // PT invariance keeps the discriminant real on the real energy axis even
    // where level pairs are complex; the breaking is visible as dips of the
    // discriminant that approach -2 and recede without touching.
    for (double a : {2.0, 3.0}) {
        const auto s = spec::pt(spec::dsg(a, 1.0), 0.4);
        double max_im = 0.0;
        for (const auto& [e, d] : discriminant_scan(s, -6.0, 12.0, 120, 1e-11))
            max_im = std::max(max_im, std::abs(d.imag()));
        CHECK(max_im < 1e-8);
    }

    // a = 3: the lowest quasi-exact periodic level is real (measured at
    // E = 4 exactly), while the antiperiodic dip near E = 8 misses -2 by
    // about 0.018: that level pair has left the real axis.
    const auto s3 = spec::pt(spec::dsg(3.0, 1.0), 0.4);
    const auto edges3 = find_band_edges(s3, -6.0, 6.0, {});
    bool qes_found = false;
    for (const auto& e : edges3)
        if (!e.degenerate && e.edge_type == EdgeType::periodic && std::abs(e.energy - 4.0) < 1e-6)
            qes_found = true;
    CHECK(qes_found);
    const double dip3 = monodromy(s3, 7.9865, 1e-11).discriminant.real() + 2.0;
    CHECK(dip3 > 0.01);
    CHECK(dip3 < 0.03);

    // a = 2: the first antiperiodic contact touches -2 (a real degenerate
    // pair), but the low antiperiodic band expected near the bottom of the
    // spectrum is gone from the real axis entirely.
    const auto s2 = spec::pt(spec::dsg(2.0, 1.0), 0.4);
    const double touch2 = monodromy(s2, 8.24768059, 1e-11).discriminant.real() + 2.0;
    CHECK(std::abs(touch2) < 1e-5);
    int antiperiodic_low = 0;
    for (const auto& e : find_band_edges(s2, -6.0, 7.0, {}))
        if (e.edge_type == EdgeType::antiperiodic) ++antiperiodic_low;
    CHECK(antiperiodic_low == 0);
}

TEST_CASE("a complex discriminant declines classification", "[floquet]") {
    // Only a non-PT-symmetric complex potential produces Im Delta != 0 on
    // the real axis; every returned entry must then carry a warning.
    const PotentialFn v = [](double x) { return Complex(std::cos(x), std::cos(x) + std::sin(x)); };
    const auto edges = find_band_edges(v, 2.0 * kPi, 0.1, 4.0, {});
    REQUIRE(!edges.empty());
    for (const auto& e : edges) {
        REQUIRE(e.warning);
        CHECK(e.warning->find("spontaneously broken") != std::string::npos);
    }
}

TEST_CASE("dispersion", "[floquet]") {
    SECTION("free particle: k = sqrt(E) modulo folding") {
        const auto s = spec::lame(0.0, 0.5);
        const double L = period(s);
        for (double E : {0.2, 0.9}) {
            const auto d = dispersion(s, E);
            CHECK_FALSE(d.in_gap);
            CHECK(std::cos(d.k.real() * L) == Approx(std::cos(std::sqrt(E) * L)).margin(1e-8));
        }
    }

    SECTION("band edges sit at kL in {0, pi}; gap energies acquire Im k") {
        const double m = 0.5;
        const double delta = std::sqrt(1.0 - m + m * m);
        const auto s = spec::lame(2.0, m, -2.0 - 2.0 * m + 2.0 * delta);
        const double L = period(s);

        const auto d0 = dispersion(s, 0.0);
        CHECK(std::abs(d0.k * L) < 2e-3);  // kL = 0 up to the sqrt of the edge tolerance
        const auto d1 = dispersion(s, 2.0 * delta - 1.0 - m);
        CHECK(std::abs(d1.k.real() * L - kPi) < 2e-3);

        const double gap_energy = 0.5 * (2.0 * delta - 1.0 - m) + 0.5 * (2.0 * delta - 1.0 + 2.0 * m);
        const auto dg = dispersion(s, gap_energy);
        CHECK(dg.in_gap);
        CHECK(std::abs(dg.k.imag()) > 1e-3);

        const double band_energy = 0.5 * (2.0 * delta - 1.0 + 2.0 * m) + 0.5 * (2.0 * delta + 2.0 - m);
        const auto db = dispersion(s, band_energy);
        CHECK_FALSE(db.in_gap);
        CHECK(std::abs(db.k.imag()) < 1e-9);
    }
}

TEST_CASE("scan is deterministic under threading", "[floquet]") {
    const auto s = spec::lame(1.0, 0.4);
    const auto one = [&] {
        setenv("LAME_BANDS_THREADS", "1", 1);
        auto r = discriminant_scan(s, 0.0, 3.0, 41);
        unsetenv("LAME_BANDS_THREADS");
        return r;
    }();
    const auto many = discriminant_scan(s, 0.0, 3.0, 41);
    REQUIRE(one.size() == many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].first == many[i].first);
        CHECK(one[i].second == many[i].second);
    }
}

TEST_CASE("scan argument validation", "[floquet]") {
    const auto s = spec::lame(1.0, 0.4);
    CHECK_THROWS_AS(discriminant_scan(s, 0.0, 3.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(discriminant_scan(s, 3.0, 0.0, 10), std::invalid_argument);
    const auto two_points = discriminant_scan(s, 0.0, 3.0, 2);
    REQUIRE(two_points.size() == 2);
    CHECK(two_points[0].first == 0.0);
    CHECK(two_points[1].first == 3.0);
}
