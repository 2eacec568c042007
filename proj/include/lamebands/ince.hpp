#ifndef LAMEBANDS_INCE_HPP
#define LAMEBANDS_INCE_HPP

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lamebands/catalog.hpp"
#include "lamebands/potential.hpp"

namespace lamebands {

/// Coefficients of the Ince equation
///   (1 + A cos 2t) z'' + B sin 2t z' + (C + D cos 2t) z = 0
/// obtained from the associated Lame equation.
struct InceCoefficients {
    double A, B, C, D;
    double lambda;
};

inline InceCoefficients ince_coefficients(double a, double b, Modulus mod, double E) {
    const double m = mod.m();
    if (!(m > 0.0 && m < 1.0))
        throw std::domain_error("ince_coefficients: the reduction needs 0 < m < 1");
    const double lambda = E - m * b * b;
    const double s = (a + b) * (a + 1.0 - b) * m;
    return {m / (2.0 - m), (2.0 * b - 1.0) * m / (2.0 - m), (lambda - s) / (2.0 - m),
            s / (2.0 - m), lambda};
}

/// Gap-bound polynomials Q(mu) = 2A mu^2 - B mu - D/2 and
/// Q*(mu) = 2A (mu - 1/2)^2 - B (mu - 1/2) - D/2, stored as
/// {c0, c1, c2} with Q = c2 mu^2 + c1 mu + c0.
struct GapBoundPolynomials {
    std::array<double, 3> q;
    std::array<double, 3> q_star;
};

inline GapBoundPolynomials gap_bound_polynomials(const InceCoefficients& c) {
    GapBoundPolynomials g;
    g.q = {-0.5 * c.D, -c.B, 2.0 * c.A};
    g.q_star = {0.5 * c.A + 0.5 * c.B - 0.5 * c.D, -(2.0 * c.A + c.B), 2.0 * c.A};
    return g;
}

namespace detail {

inline std::vector<double> real_roots(const std::array<double, 3>& poly) {
    const double c0 = poly[0], c1 = poly[1], c2 = poly[2];
    if (c2 == 0.0) {
        if (c1 == 0.0) return {};
        return {-c0 / c1};
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return {};
    const double r = std::sqrt(disc);
    return {(-c1 - r) / (2.0 * c2), (-c1 + r) / (2.0 * c2)};
}

/// Bound from the coexistence theorem: a nonnegative integral root j gives at
/// most j+1 instability intervals of the corresponding period; a negative
/// integral root -j-1 likewise. Non-real and non-integral roots give no
/// bound; when several roots qualify the sharpest bound wins.
inline std::optional<int> bound_from_roots(const std::vector<double>& roots) {
    std::optional<int> best;
    for (double r : roots) {
        const double nearest = std::round(r);
        if (std::abs(r - nearest) > 1e-9) continue;
        const int n = static_cast<int>(nearest);
        const int cand = (n >= 0) ? n + 1 : -n;
        if (!best || cand < *best) best = cand;
    }
    return best;
}

}  // namespace detail

/// Upper bounds on the number of instability intervals (gaps) per periodicity
/// class. The period-L count includes the semi-infinite interval below the
/// ground edge, following the usual counting for Hill's equation; the
/// period-2L count covers finite antiperiodic gaps.
struct GapBound {
    std::optional<int> max_gaps_period_l;
    std::optional<int> max_gaps_period_2l;
};

namespace detail {

/// Exact per-class gap counts for integer 0 <= b <= a: the lowest a-b bands
/// are normal, the top b bands have both edges of period 2K (4K) for a-b
/// even (odd).
inline GapBound integer_al_gap_count(int a, int b) {
    int count_l = 0, count_2l = 0;
    auto edge_class = [&](int j) {
        if (j <= 2 * (a - b) - 1)
            return ((j + 1) / 2) % 2 == 0 ? Periodicity::same_as_l : Periodicity::doubled_2l;
        return (a - b) % 2 == 0 ? Periodicity::same_as_l : Periodicity::doubled_2l;
    };
    for (int k = 1; k <= a; ++k) {
        const auto cls = edge_class(2 * k - 1);
        (cls == Periodicity::same_as_l ? count_l : count_2l) += 1;
    }
    return {count_l + 1, count_2l};
}

}  // namespace detail

/// Gap-count bounds for associated Lame (including plain Lame) and double
/// sine-Gordon specs.
inline GapBound gap_bound(const PotentialSpec& s) {
    if (const auto* f = std::get_if<DoubleSineGordon>(&s.family)) {
        // Ince form of the double sine-Gordon equation: A = 0, B = 2b,
        // C = E, D = -2b(a-1); Q has the single root (a-1)/2 and Q* the
        // single root a/2.
        GapBound g;
        if (f->b_strength != 0.0) {
            g.max_gaps_period_l = detail::bound_from_roots({0.5 * (f->a - 1.0)});
            g.max_gaps_period_2l = detail::bound_from_roots({0.5 * f->a});
        }
        return g;
    }

    double a, b;
    if (const auto* f = std::get_if<Lame>(&s.family)) {
        a = f->a;
        b = 0.0;
    } else if (const auto* f = std::get_if<AssocLame>(&s.family)) {
        a = f->a;
        b = f->b;
    } else {
        throw std::invalid_argument(
            "gap_bound: defined for Lame, associated Lame and double sine-Gordon specs");
    }

    const double ra = std::round(a), rb = std::round(b);
    if (std::abs(a - ra) < 1e-9 && std::abs(b - rb) < 1e-9 && ra >= 0 && rb >= 0)
        return detail::integer_al_gap_count(static_cast<int>(ra), static_cast<int>(rb));

    // Q roots (a+b)/2 and -(a-b+1)/2; Q* roots (a+b+1)/2 and -(a-b)/2.
    GapBound g;
    g.max_gaps_period_l = detail::bound_from_roots({0.5 * (a + b), -0.5 * (a - b + 1.0)});
    g.max_gaps_period_2l = detail::bound_from_roots({0.5 * (a + b + 1.0), -0.5 * (a - b)});

    // Sharper antiperiodic bound for a+b = 2N+1: at most N such gaps, with
    // 2N edges analytically known. The raw nonnegative-root bound N+2 is
    // loose here (confirmed by scans: the higher antiperiodic gaps close).
    const double apb = a + b;
    if (std::abs(apb - std::round(apb)) < 1e-9 && std::lround(apb) % 2 == 1) {
        const int n = (static_cast<int>(std::lround(apb)) - 1) / 2;
        if (!g.max_gaps_period_2l || n < *g.max_gaps_period_2l) g.max_gaps_period_2l = n;
    }
    return g;
}

/// True when (p, q) admits extrema beyond sn = 0 and cn = 0: the stationarity
/// condition dn^4 = q(1-m)/p is solvable exactly on q(1-m) <= p <= q/(1-m).
inline bool critical_extrema_range(double p_strength, double q_strength, Modulus mod) {
    if (q_strength < 0.0)
        throw std::invalid_argument("critical_extrema_range: q must be nonnegative");
    const double m = mod.m();
    return q_strength * (1.0 - m) <= p_strength && p_strength * (1.0 - m) <= q_strength;
}

/// All parabolas of solvability through the strength point (p, q): the n >= 1
/// with q = (a-n+1)(a-n) for the a >= 0 solving p = a(a+1). Each parabola
/// contributes n known eigenstates.
inline std::vector<std::pair<int, int>> parabola_map(double p_strength, double q_strength) {
    if (p_strength < 0.0 || q_strength < 0.0)
        throw std::invalid_argument("parabola_map: strengths must be nonnegative");
    const double a = spec::a_from_strength(p_strength);
    std::vector<std::pair<int, int>> hits;
    for (int n = 1;; ++n) {
        const double qn = (a - n + 1.0) * (a - n);
        if (std::abs(qn - q_strength) < 1e-9) hits.emplace_back(n, n);
        if (n >= a + 1.0 && qn > q_strength + 1.0) break;
        if (n > 1000) break;
    }
    return hits;
}

}  // namespace lamebands

#endif
