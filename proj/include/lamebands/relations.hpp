#ifndef LAMEBANDS_RELATIONS_HPP
#define LAMEBANDS_RELATIONS_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lamebands/elliptic.hpp"
#include "lamebands/floquet.hpp"
#include "lamebands/potential.hpp"

namespace lamebands {

enum class RelationId {
    duality_3_4,
    sumrule_3_5,
    superposed_5_9,
    al_duality_5_12b,
    superposed_al_5_16,
    pt_6_2,
    pt_6_8,
    discriminant_6_9,
    al_pt_6_20,
    discriminant_6_21,
};

inline const char* relation_name(RelationId id) {
    switch (id) {
        case RelationId::duality_3_4: return "duality_3_4";
        case RelationId::sumrule_3_5: return "sumrule_3_5";
        case RelationId::superposed_5_9: return "superposed_5_9";
        case RelationId::al_duality_5_12b: return "al_duality_5_12b";
        case RelationId::superposed_al_5_16: return "superposed_al_5_16";
        case RelationId::pt_6_2: return "pt_6_2";
        case RelationId::pt_6_8: return "pt_6_8";
        case RelationId::discriminant_6_9: return "discriminant_6_9";
        case RelationId::al_pt_6_20: return "al_pt_6_20";
        case RelationId::discriminant_6_21: return "discriminant_6_21";
    }
    return "unknown";
}

inline constexpr double kDefaultRelationTol = 1e-6;

/// Machine-checked spectral identity: lhs and rhs vectors, their worst
/// absolute disagreement, and the pass verdict at the given tolerance.
struct RelationReport {
    RelationId id;
    std::map<std::string, double> inputs;
    std::vector<double> lhs;
    std::vector<double> rhs;
    double max_abs_error = 0.0;
    bool passed = false;
    double tol = kDefaultRelationTol;
};

namespace detail {

inline RelationReport finish_report(RelationReport r) {
    r.max_abs_error = 0.0;
    for (std::size_t i = 0; i < r.lhs.size(); ++i)
        r.max_abs_error = std::max(r.max_abs_error, std::abs(r.lhs[i] - r.rhs[i]));
    r.passed = r.max_abs_error < r.tol;
    return r;
}

inline void require_edge_count(const std::vector<double>& edges, int a, const char* who) {
    if (static_cast<int>(edges.size()) != 2 * a + 1)
        throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(2 * a + 1) +
                                    " band edges, got " + std::to_string(edges.size()));
}

}  // namespace detail

/// E_j(m) + E_(2a-j)(1-m) = a(a+1) for the raw Lame edges; at m = 1/2 the
/// middle edge additionally satisfies E_a = a(a+1)/2.
inline RelationReport check_duality(int a, Modulus mod, const std::vector<double>& edges_m,
                                    const std::vector<double>& edges_1m,
                                    double tol = kDefaultRelationTol) {
    detail::require_edge_count(edges_m, a, "check_duality");
    detail::require_edge_count(edges_1m, a, "check_duality");
    RelationReport r;
    r.id = RelationId::duality_3_4;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", mod.m()}};
    const double s = a * (a + 1.0);
    for (int j = 0; j <= 2 * a; ++j) {
        r.lhs.push_back(edges_m[j] + edges_1m[2 * a - j]);
        r.rhs.push_back(s);
    }
    if (std::abs(mod.m() - 0.5) < 1e-12) {
        r.id = RelationId::duality_3_4;  // middle-edge sum rule rides along
        r.lhs.push_back(edges_m[a]);
        r.rhs.push_back(0.5 * s);
    }
    return detail::finish_report(r);
}

/// Image of the inner Lame spectrum at the descended modulus under the
/// superposition map E = E_inner/alpha^2 + a(a+1)(p + 2 A_d - 1/alpha^2).
inline std::vector<double> map_superposed_spectrum(double a, int p, Modulus mod,
                                                   const std::vector<double>& lame_edges_at_m_tilde) {
    const auto ld = landen_descent(mod, p);
    const double gain = 1.0 / (ld.alpha * ld.alpha);
    const double offset = a * (a + 1.0) * (p + 2.0 * ld.a_d - gain);
    std::vector<double> out;
    out.reserve(lame_edges_at_m_tilde.size());
    for (double e : lame_edges_at_m_tilde) out.push_back(e * gain + offset);
    return out;
}

/// Superposed associated Lame spectrum: same map with the combined strength
/// a(a+1) + b(b+1); the inner spectrum to map is the associated Lame one for
/// odd p and the combined-strength single-sn^2 one for even p.
inline std::vector<double> map_superposed_al_spectrum(double a, double b, int p, Modulus mod,
                                                      const std::vector<double>& inner_edges_at_m_tilde) {
    const auto ld = landen_descent(mod, p);
    const double gain = 1.0 / (ld.alpha * ld.alpha);
    const double strengths = a * (a + 1.0) + b * (b + 1.0);
    const double offset = strengths * (p + 2.0 * ld.a_d - gain);
    std::vector<double> out;
    out.reserve(inner_edges_at_m_tilde.size());
    for (double e : inner_edges_at_m_tilde) out.push_back(e * gain + offset);
    return out;
}

/// Moduli paired by the a = b associated Lame duality.
struct AlDualityModuli {
    double m1;
    double m2;
};

inline AlDualityModuli al_duality_moduli(double m) {
    const double sm = std::sqrt(m), sc = std::sqrt(1.0 - m);
    return {4.0 * sm / ((1.0 + sm) * (1.0 + sm)), 4.0 * sc / ((1.0 + sc) * (1.0 + sc))};
}

/// (1+sqrt m)^2/4 E_j(m1) + (1+sqrt(1-m))^2/4 E_(2a-j)(m2)
///   = a(a+1)(1 + sqrt m + sqrt(1-m))
/// for the raw a = b associated Lame edges at the paired moduli.
inline RelationReport check_al_duality(int a, Modulus mod, const std::vector<double>& edges_m1,
                                       const std::vector<double>& edges_m2,
                                       double tol = kDefaultRelationTol) {
    detail::require_edge_count(edges_m1, a, "check_al_duality");
    detail::require_edge_count(edges_m2, a, "check_al_duality");
    const double m = mod.m();
    const double sm = std::sqrt(m), sc = std::sqrt(1.0 - m);
    RelationReport r;
    r.id = RelationId::al_duality_5_12b;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", m}};
    const double ca = 0.25 * (1.0 + sm) * (1.0 + sm);
    const double cb = 0.25 * (1.0 + sc) * (1.0 + sc);
    const double rhs = a * (a + 1.0) * (1.0 + sm + sc);
    for (int j = 0; j <= 2 * a; ++j) {
        r.lhs.push_back(ca * edges_m1[j] + cb * edges_m2[2 * a - j]);
        r.rhs.push_back(rhs);
    }
    return detail::finish_report(r);
}

/// PT reflection E_j^PT = -E_(2a-j) and the composed modulus relation
/// E_j^PT(m) = E_j(1-m) - a(a+1), on raw unshifted edges. Also verifies the
/// band/gap exchange: the PT band intervals coincide with the reflected Lame
/// gap intervals.
inline RelationReport check_pt_relations(int a, Modulus mod, const std::vector<double>& lame_edges,
                                         const std::vector<double>& pt_edges,
                                         const std::vector<double>* lame_edges_1m = nullptr,
                                         double tol = kDefaultRelationTol) {
    detail::require_edge_count(lame_edges, a, "check_pt_relations");
    detail::require_edge_count(pt_edges, a, "check_pt_relations");
    RelationReport r;
    r.id = RelationId::pt_6_2;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", mod.m()}};
    const double s = a * (a + 1.0);
    for (int j = 0; j <= 2 * a; ++j) {
        r.lhs.push_back(pt_edges[j]);
        r.rhs.push_back(-lame_edges[2 * a - j]);
    }
    // Modulus form: uses supplied 1-m edges when given, otherwise they are
    // reconstructed through the m <-> 1-m duality, making this the composed
    // consistency statement.
    for (int j = 0; j <= 2 * a; ++j) {
        const double e1m = lame_edges_1m ? (*lame_edges_1m)[j] : s - lame_edges[2 * a - j];
        r.lhs.push_back(pt_edges[j]);
        r.rhs.push_back(e1m - s);
    }
    // Band/gap exchange: PT bands [f0,f1], [f2,f3], ... against reflected
    // Lame gaps (e_(2a-2i-1), e_(2a-2i)).
    for (int i = 0; i < a; ++i) {
        r.lhs.push_back(pt_edges[2 * i]);
        r.rhs.push_back(-lame_edges[2 * a - 2 * i]);
        r.lhs.push_back(pt_edges[2 * i + 1]);
        r.rhs.push_back(-lame_edges[2 * a - 2 * i - 1]);
    }
    return detail::finish_report(r);
}

/// Discriminant reflection Delta^PT(E, m) = Delta(E + a(a+1), 1-m), sampled
/// at energies away from band edges; both sides are independent Floquet
/// computations (complex over 2K'(m), real over 2K(1-m)).
inline RelationReport check_discriminant_relation(int a, Modulus mod,
                                                  const std::vector<double>& e_samples,
                                                  double beta = 0.4, double ode_tol = 1e-10,
                                                  double tol = kDefaultRelationTol) {
    RelationReport r;
    r.id = RelationId::discriminant_6_9;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", mod.m()}, {"beta", beta}};
    const PotentialSpec pt = spec::pt(spec::lame(double(a), mod.m()), beta);
    const PotentialSpec lam = spec::lame(double(a), 1.0 - mod.m());
    const auto vp = make_evaluator(pt);
    const auto vl = make_evaluator(lam);
    const double lp = period(pt), ll = period(lam);
    const double s = a * (a + 1.0);
    for (double e : e_samples) {
        r.lhs.push_back(monodromy(vp, lp, e, ode_tol).discriminant.real());
        r.rhs.push_back(monodromy(vl, ll, e + s, ode_tol).discriminant.real());
    }
    return detail::finish_report(r);
}

/// a = b associated Lame against its PT transform:
/// E_j^PT(m1) = ((1+sqrt(1-m))/(1+sqrt m))^2 E_j(m2)
///              - 4 a(a+1)(1+sqrt m+sqrt(1-m))/(1+sqrt m)^2.
inline RelationReport check_al_pt_relation(int a, Modulus mod, const std::vector<double>& pt_edges_m1,
                                           const std::vector<double>& al_edges_m2,
                                           double tol = kDefaultRelationTol) {
    detail::require_edge_count(pt_edges_m1, a, "check_al_pt_relation");
    detail::require_edge_count(al_edges_m2, a, "check_al_pt_relation");
    const double m = mod.m();
    const double sm = std::sqrt(m), sc = std::sqrt(1.0 - m);
    const double scale = (1.0 + sc) * (1.0 + sc) / ((1.0 + sm) * (1.0 + sm));
    const double offset = 4.0 * a * (a + 1.0) * (1.0 + sm + sc) / ((1.0 + sm) * (1.0 + sm));
    RelationReport r;
    r.id = RelationId::al_pt_6_20;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", m}};
    for (int j = 0; j <= 2 * a; ++j) {
        r.lhs.push_back(pt_edges_m1[j]);
        r.rhs.push_back(scale * al_edges_m2[j] - offset);
    }
    return detail::finish_report(r);
}

/// Discriminant form of the a = b associated Lame PT relation:
/// Delta^PT(E, m1) = Delta(scale (E + offset), m2) with the same constants
/// as check_al_pt_relation; both sides are independent Floquet computations.
inline RelationReport check_al_discriminant_relation(int a, Modulus mod,
                                                     const std::vector<double>& e_samples,
                                                     double beta = 0.4, double ode_tol = 1e-10,
                                                     double tol = kDefaultRelationTol) {
    const double m = mod.m();
    const auto [m1, m2] = al_duality_moduli(m);
    const double sm = std::sqrt(m), sc = std::sqrt(1.0 - m);
    const double scale = (1.0 + sm) * (1.0 + sm) / ((1.0 + sc) * (1.0 + sc));
    const double offset = 4.0 * a * (a + 1.0) * (1.0 + sm + sc) / ((1.0 + sm) * (1.0 + sm));
    RelationReport r;
    r.id = RelationId::discriminant_6_21;
    r.tol = tol;
    r.inputs = {{"a", double(a)}, {"m", m}, {"m1", m1}, {"m2", m2}, {"beta", beta}};
    const PotentialSpec pt = spec::pt(spec::assoc_lame(double(a), double(a), m1), beta);
    const PotentialSpec al = spec::assoc_lame(double(a), double(a), m2);
    const auto vp = make_evaluator(pt);
    const auto va = make_evaluator(al);
    const double lp = period(pt), la = period(al);
    for (double e : e_samples) {
        r.lhs.push_back(monodromy(vp, lp, e, ode_tol).discriminant.real());
        r.rhs.push_back(monodromy(va, la, scale * (e + offset), ode_tol).discriminant.real());
    }
    return detail::finish_report(r);
}

/// Analytic Bloch momentum of the PT-transformed a = 1 Lame potential,
/// ground-shifted so its bands are [0, m] and [1, inf). The eta/theta/zeta
/// closed-form solutions give the Floquet multiplier exp(-ikL) with
/// kL = pi alpha1 / K + 2 K' Z(alpha1) and E = m sn^2(alpha1, m).
inline Complex pt_lame1_analytic_k(Modulus mod, double E) {
    const double m = mod.m();
    const double K = mod.K(), Kp = mod.Kprime();
    const ThetaEngine th(mod);
    Complex alpha1;
    if (E <= m) {
        alpha1 = detail::inverse_sn(std::sqrt(std::max(E, 0.0) / m), mod);
    } else if (E >= 1.0) {
        alpha1 = Complex(detail::inverse_sn(1.0 / std::sqrt(E), mod), Kp);
    } else {
        // Inside the gap: alpha1 = K + iv with dn(v, 1-m) = sqrt(m/E).
        const double w = std::sqrt(m / E);
        const double v = detail::inverse_sn(std::sqrt((1.0 - w * w) / (1.0 - m)), mod.complement());
        alpha1 = Complex(K, v);
    }
    const Complex kl = kPi * alpha1 / K + 2.0 * Kp * th.zeta(alpha1);
    return kl / (2.0 * Kp);
}

}  // namespace lamebands

#endif
