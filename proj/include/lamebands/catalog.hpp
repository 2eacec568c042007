#ifndef LAMEBANDS_CATALOG_HPP
#define LAMEBANDS_CATALOG_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lamebands/elliptic.hpp"
#include "lamebands/jet.hpp"
#include "lamebands/potential.hpp"

namespace lamebands {

enum class Periodicity { same_as_l, doubled_2l };
enum class Provenance { analytic, numeric };

/// Band-edge wavefunction handle: value and first three derivatives with
/// respect to its own (possibly complex) argument.
using WaveFn = std::function<CJet(Complex)>;

/// One band edge: energy (with the spec's shift applied), raw catalog energy,
/// periodicity class relative to the potential period L, node count in one
/// period where known, and an optional wavefunction handle.
struct BandEdge {
    double energy = 0.0;
    double raw_energy = 0.0;
    Periodicity periodicity = Periodicity::same_as_l;
    std::optional<int> nodes;
    Provenance provenance = Provenance::analytic;
    bool unusual = false;  // member of a band whose two edges share a period class
    std::optional<WaveFn> wavefunction;
};

/// Requested spec has no closed-form catalog; callers fall back to the
/// numeric Floquet solver.
class CatalogMissError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Defined in susy.hpp; analytic_band_edges dispatches SUSY partners there.
std::vector<BandEdge> susy_partner_edges(const PotentialSpec& s);

using TripleFn = std::function<CJet(const CJet&, const CJet&, const CJet&)>;

/// Wavefunction as an algebraic expression in the (sn, cn, dn) jets.
inline WaveFn make_wavefn(std::shared_ptr<const ComplexJacobiEngine> eng, TripleFn f) {
    return [eng, f = std::move(f)](Complex z) {
        const auto t = eng->jet(z);
        return f(t[0], t[1], t[2]);
    };
}

inline WaveFn translate_wavefn(WaveFn f, double t) {
    if (t == 0.0) return f;
    return [f = std::move(f), t](Complex z) { return f(z - t); };
}

/// Rescale the argument: g(z) = f(z / alpha).
inline WaveFn rescale_wavefn(WaveFn f, double alpha) {
    const Complex s(1.0 / alpha, 0.0);
    return [f = std::move(f), s](Complex z) { return along_direction(f(z * s), s); };
}

/// PT image: g(x) = f(ix + beta).
inline WaveFn pt_wavefn(WaveFn f, double beta) {
    const Complex i(0.0, 1.0);
    return [f = std::move(f), i, beta](Complex z) { return along_direction(f(i * z + beta), i); };
}

struct CatalogRow {
    double raw_energy;
    TripleFn psi;
    Periodicity periodicity;
    std::optional<int> nodes;
    bool unusual = false;
};

inline std::vector<BandEdge> rows_to_edges(std::vector<CatalogRow> rows,
                                           std::shared_ptr<const ComplexJacobiEngine> eng,
                                           double shift, double translation) {
    std::sort(rows.begin(), rows.end(),
              [](const CatalogRow& a, const CatalogRow& b) { return a.raw_energy < b.raw_energy; });
    std::vector<BandEdge> edges;
    edges.reserve(rows.size());
    for (auto& r : rows) {
        BandEdge e;
        e.raw_energy = r.raw_energy;
        e.energy = r.raw_energy + shift;
        e.periodicity = r.periodicity;
        e.nodes = r.nodes;
        e.unusual = r.unusual;
        e.provenance = Provenance::analytic;
        e.wavefunction = translate_wavefn(make_wavefn(eng, std::move(r.psi)), translation);
        edges.push_back(std::move(e));
    }
    return edges;
}

/// Lame potential rows for integer a in {1, 2}, raw energies.
inline std::vector<CatalogRow> lame_rows(int a, double m) {
    using P = Periodicity;
    if (a == 1) {
        return {{m, [](const CJet&, const CJet&, const CJet& dn) { return dn; }, P::same_as_l, 0},
                {1.0, [](const CJet&, const CJet& cn, const CJet&) { return cn; }, P::doubled_2l, 1},
                {1.0 + m, [](const CJet& sn, const CJet&, const CJet&) { return sn; }, P::doubled_2l, 1}};
    }
    if (a == 2) {
        const double delta = std::sqrt(1.0 - m + m * m);
        const double bp = 1.0 + m + delta;
        const double bm = 1.0 + m - delta;
        return {{2.0 + 2.0 * m - 2.0 * delta,
                 [bp, m](const CJet& sn, const CJet&, const CJet&) { return bp - 3.0 * m * sn * sn; },
                 P::same_as_l, 0},
                {1.0 + m, [](const CJet&, const CJet& cn, const CJet& dn) { return cn * dn; },
                 P::doubled_2l, 1},
                {1.0 + 4.0 * m, [](const CJet& sn, const CJet&, const CJet& dn) { return sn * dn; },
                 P::doubled_2l, 1},
                {4.0 + m, [](const CJet& sn, const CJet& cn, const CJet&) { return sn * cn; },
                 P::same_as_l, 2},
                {2.0 + 2.0 * m + 2.0 * delta,
                 [bm, m](const CJet& sn, const CJet&, const CJet&) { return bm - 3.0 * m * sn * sn; },
                 P::same_as_l, 2}};
    }
    throw CatalogMissError("lame catalog covers integer a in {1, 2}; got a = " + std::to_string(a));
}

/// The (6, 2) associated Lame potential: all five edges, raw energies (add
/// the conventional -4m shift to reproduce the published table).
inline std::vector<CatalogRow> assoc_lame_62_rows(double m) {
    using P = Periodicity;
    const double r1 = std::sqrt(4.0 - 3.0 * m);
    const double r2 = std::sqrt(4.0 - 5.0 * m + m * m);
    auto cn_row = [m](double sign, double r) {
        return [m, sign, r](const CJet& sn, const CJet& cn, const CJet& dn) {
            return (cn / dn) * (3.0 * m * sn * sn - 2.0 + sign * r);
        };
    };
    auto sn_row = [m](double sign, double r) {
        return [m, sign, r](const CJet& sn, const CJet&, const CJet& dn) {
            return (sn / dn) * (3.0 * m * sn * sn - 2.0 - m + sign * r);
        };
    };
    return {{4.0 * m, [](const CJet&, const CJet&, const CJet& dn) { return dn * dn; }, P::same_as_l, 0},
            {5.0 + m - 2.0 * r1, cn_row(-1.0, r1), P::doubled_2l, 1},
            {5.0 + 2.0 * m - 2.0 * r2, sn_row(-1.0, r2), P::doubled_2l, 1},
            {5.0 + 2.0 * m + 2.0 * r2, sn_row(+1.0, r2), P::doubled_2l, 3, true},
            {5.0 + m + 2.0 * r1, cn_row(+1.0, r1), P::doubled_2l, 3, true}};
}

}  // namespace detail

/// One quasi-exactly-solvable eigenstate of an associated Lame potential.
struct Table2State {
    double raw_energy;
    WaveFn psi;
    Periodicity periodicity;
    int nodes;
};

/// The n known eigenstates of the associated Lame potential with strengths
/// p = a(a+1), q = (a-n+1)(a-n), for the tabulated rows n = 1..5 (the n = 5
/// family has two tabulated states). Energies are raw; wavefunctions are
/// dn^a times a polynomial in sn, cn, dn.
inline std::vector<Table2State> table2_states(double a, int n, Modulus mod) {
    if (n < 1 || n > 5)
        throw CatalogMissError("table2_states: tabulated rows cover n in 1..5, got n = " + std::to_string(n));
    if (a * (a + 1.0) < (a - n + 1.0) * (a - n) - 1e-12)
        throw std::invalid_argument("table2_states: requires a(a+1) >= (a-n+1)(a-n)");
    const double m = mod.m();
    auto eng = std::make_shared<const ComplexJacobiEngine>(mod);
    using P = Periodicity;

    std::vector<detail::CatalogRow> rows;
    switch (n) {
        case 1:
            rows.push_back({m * a * a,
                            [a](const CJet&, const CJet&, const CJet& dn) { return pow(dn, a); },
                            P::same_as_l, 0});
            break;
        case 2:
            rows.push_back({1.0 + m * (a - 1.0) * (a - 1.0),
                            [a](const CJet&, const CJet& cn, const CJet& dn) { return cn * pow(dn, a - 1.0); },
                            P::doubled_2l, 1});
            rows.push_back({1.0 + m * a * a,
                            [a](const CJet& sn, const CJet&, const CJet& dn) { return sn * pow(dn, a - 1.0); },
                            P::doubled_2l, 1});
            break;
        case 3: {
            const double d4 = std::sqrt(1.0 - m + m * m * (a - 1.0) * (a - 1.0));
            for (double sign : {-1.0, +1.0}) {
                rows.push_back({2.0 + m * (a * a - 2.0 * a + 2.0) + 2.0 * sign * d4,
                                [a, m, sign, d4](const CJet& sn, const CJet&, const CJet& dn) {
                                    return (m * (2.0 * a - 1.0) * sn * sn - 1.0 + m - m * a + sign * d4) *
                                           pow(dn, a - 2.0);
                                },
                                P::same_as_l, sign < 0 ? 0 : 2});
            }
            rows.push_back({4.0 + m * (a - 1.0) * (a - 1.0),
                            [a](const CJet& sn, const CJet& cn, const CJet& dn) {
                                return sn * cn * pow(dn, a - 2.0);
                            },
                            P::same_as_l, 2});
            break;
        }
        case 4: {
            const double d5 = std::sqrt(4.0 - 7.0 * m + 2.0 * m * a + m * m * (a - 2.0) * (a - 2.0));
            const double d6 = std::sqrt(4.0 - m - 2.0 * m * a + m * m * (a - 1.0) * (a - 1.0));
            for (double sign : {-1.0, +1.0}) {
                rows.push_back({5.0 + m * (a * a - 4.0 * a + 5.0) + 2.0 * sign * d5,
                                [a, m, sign, d5](const CJet& sn, const CJet& cn, const CJet& dn) {
                                    return cn *
                                           (m * (2.0 * a - 1.0) * sn * sn - 2.0 + 2.0 * m - m * a + sign * d5) *
                                           pow(dn, a - 3.0);
                                },
                                P::doubled_2l, sign < 0 ? 1 : 3});
                rows.push_back({5.0 + m * (a * a - 2.0 * a + 2.0) + 2.0 * sign * d6,
                                [a, m, sign, d6](const CJet& sn, const CJet&, const CJet& dn) {
                                    return sn *
                                           (m * (2.0 * a - 1.0) * sn * sn - 2.0 + m - m * a + sign * d6) *
                                           pow(dn, a - 3.0);
                                },
                                P::doubled_2l, sign < 0 ? 1 : 3});
            }
            break;
        }
        case 5: {
            const double d7 = std::sqrt(9.0 - 9.0 * m + m * m * (a - 2.0) * (a - 2.0));
            for (double sign : {-1.0, +1.0}) {
                rows.push_back({10.0 + m * (a * a - 4.0 * a + 5.0) + 2.0 * sign * d7,
                                [a, m, sign, d7](const CJet& sn, const CJet& cn, const CJet& dn) {
                                    return sn * cn *
                                           (m * (2.0 * a - 1.0) * sn * sn - 3.0 + 2.0 * m - m * a + sign * d7) *
                                           pow(dn, a - 4.0);
                                },
                                P::same_as_l, sign < 0 ? 2 : 4});
            }
            break;
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& x, const auto& y) { return x.raw_energy < y.raw_energy; });
    std::vector<Table2State> states;
    states.reserve(rows.size());
    for (auto& r : rows)
        states.push_back({r.raw_energy, detail::make_wavefn(eng, std::move(r.psi)), r.periodicity,
                          r.nodes.value()});
    return states;
}

namespace detail {

inline bool near_int(double x, int n) { return std::abs(x - n) < 1e-9; }

/// Landen image of an inner catalog: energies through the spectral map
/// E = E_inner(m_tilde)/alpha^2 + strength_sum (p + 2 A_d - 1/alpha^2),
/// wavefunctions through psi(x) = psi_inner(x/alpha).
inline std::vector<BandEdge> landen_mapped_edges(const std::vector<BandEdge>& inner,
                                                 const LandenDescent& ld, double strength_sum,
                                                 double shift, double translation) {
    const double gain = 1.0 / (ld.alpha * ld.alpha);
    const double offset = strength_sum * (ld.p + 2.0 * ld.a_d - gain);
    std::vector<BandEdge> out;
    out.reserve(inner.size());
    for (const auto& e : inner) {
        BandEdge b = e;
        b.raw_energy = e.raw_energy * gain + offset;
        b.energy = b.raw_energy + shift;
        if (e.wavefunction)
            b.wavefunction = translate_wavefn(rescale_wavefn(*e.wavefunction, ld.alpha), translation);
        out.push_back(std::move(b));
    }
    return out;
}

/// PT reflection of an inner catalog: E_j -> -E_(2a-j), psi -> psi(ix+beta).
/// The periodicity class over the PT period 2K' follows the parity of the
/// inner wavefunction under a 2iK' translation.
inline std::vector<BandEdge> pt_reflected_edges(const std::vector<BandEdge>& inner, double beta,
                                                double kp_inner, double shift, double translation) {
    std::vector<BandEdge> out;
    const std::size_t n = inner.size();
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const BandEdge& src = inner[n - 1 - j];
        BandEdge b;
        b.raw_energy = -src.energy;
        b.energy = b.raw_energy + shift;
        b.provenance = Provenance::analytic;
        b.unusual = src.unusual;
        b.nodes = std::nullopt;
        if (!src.wavefunction)
            throw CatalogMissError("pt catalog requires inner wavefunction handles");
        const WaveFn& psi = *src.wavefunction;
        bool classified = false;
        for (double x0 : {0.37, 0.61, 0.93}) {  // skip accidental zeros of psi
            const Complex z0(beta, x0);
            const Complex base = psi(z0).f;
            if (std::abs(base) < 1e-8) continue;
            const Complex ratio = psi(z0 + Complex(0.0, 2.0 * kp_inner)).f / base;
            if (std::abs(ratio - 1.0) < 1e-6) {
                b.periodicity = Periodicity::same_as_l;
                classified = true;
            } else if (std::abs(ratio + 1.0) < 1e-6) {
                b.periodicity = Periodicity::doubled_2l;
                classified = true;
            }
            if (classified) break;
        }
        if (!classified)
            throw std::logic_error("pt catalog: inner wavefunction is not (anti)periodic under 2iK'");
        b.wavefunction = translate_wavefn(pt_wavefn(psi, beta), translation);
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace detail

/// Closed-form band-edge catalog for the spec, or CatalogMissError when the
/// family has no full analytic edge set.
inline std::vector<BandEdge> analytic_band_edges(const PotentialSpec& s) {
    const double m = s.m.m();

    if (const auto* f = std::get_if<Lame>(&s.family)) {
        for (int a : {1, 2})
            if (detail::near_int(f->a, a)) {
                auto eng = std::make_shared<const ComplexJacobiEngine>(s.m);
                return detail::rows_to_edges(detail::lame_rows(a, m), eng, s.energy_shift, s.translation);
            }
        throw CatalogMissError("analytic_band_edges: Lame catalog covers integer a in {1, 2}");
    }

    if (const auto* f = std::get_if<AssocLame>(&s.family)) {
        if (detail::near_int(f->a, 2) && detail::near_int(f->b, 1)) {
            auto eng = std::make_shared<const ComplexJacobiEngine>(s.m);
            return detail::rows_to_edges(detail::assoc_lame_62_rows(m), eng, s.energy_shift, s.translation);
        }
        if (f->a == f->b) {
            // a = b associated Lame is the p = 2 superposition of the Lame
            // potential; its spectrum is the Landen image at the descended
            // modulus.
            PotentialSpec sup = spec::superposed_lame(f->a, 2, m, s.energy_shift, s.translation);
            return analytic_band_edges(sup);
        }
        throw CatalogMissError(
            "analytic_band_edges: associated Lame catalog covers (a, b) = (2, 1) and a = b with "
            "integer a in {1, 2}");
    }

    if (const auto* f = std::get_if<SuperposedLame>(&s.family)) {
        const auto ld = landen_descent(s.m, f->p);
        PotentialSpec inner = spec::lame(f->a, ld.m_tilde);
        const auto inner_edges = analytic_band_edges(inner);
        return detail::landen_mapped_edges(inner_edges, ld, f->a * (f->a + 1.0), s.energy_shift,
                                           s.translation);
    }

    if (const auto* f = std::get_if<SuperposedAssocLame>(&s.family)) {
        const auto ld = landen_descent(s.m, f->p);
        const double strengths = f->a * (f->a + 1.0) + f->b * (f->b + 1.0);
        if (f->p % 2 == 1) {
            // Odd p: the K-translated sum lands on the half-period of the
            // descended lattice, so the inner problem is the associated Lame
            // potential with the same strengths at m-tilde.
            PotentialSpec inner = spec::assoc_lame(f->a, f->b, ld.m_tilde);
            return detail::landen_mapped_edges(analytic_band_edges(inner), ld, strengths,
                                               s.energy_shift, s.translation);
        }
        // Even p: the K-translated sum is a full-period translate, so both
        // sums collapse onto a single sn^2 of combined strength.
        const double a_eff = spec::a_from_strength(strengths);
        PotentialSpec inner = spec::lame(a_eff, ld.m_tilde);
        return detail::landen_mapped_edges(analytic_band_edges(inner), ld, strengths, s.energy_shift,
                                           s.translation);
    }

    if (const auto* f = std::get_if<PtTransform>(&s.family)) {
        if (std::holds_alternative<DoubleSineGordon>(f->inner->family))
            throw CatalogMissError(
                "analytic_band_edges: the PT double sine-Gordon family is quasi-exactly solvable "
                "only; use the numeric solver");
        const auto inner_edges = analytic_band_edges(*f->inner);
        const double kp = complete_k(1.0 - f->inner->m.m());
        return detail::pt_reflected_edges(inner_edges, f->beta, kp, s.energy_shift, s.translation);
    }

    if (std::holds_alternative<SusyPartner>(s.family)) return detail::susy_partner_edges(s);

    throw CatalogMissError(
        "analytic_band_edges: the double sine-Gordon family is quasi-exactly solvable only; use "
        "the numeric solver");
}

/// Nodeless ground state of the spec's potential at its raw catalog energy.
struct GroundState {
    double raw_energy;
    WaveFn psi;
};

inline GroundState ground_state(const PotentialSpec& s) {
    if (const auto* f = std::get_if<AssocLame>(&s.family)) {
        // Partial catalogs: one known state on the q = a(a-1) parabola, the
        // nodeless member of the q = (a-2)(a-3) triple.
        const double m = s.m.m();
        if (detail::near_int(f->b - (f->a - 1.0), 0) && f->a >= 1.0 && f->a != f->b) {
            auto states = table2_states(f->a, 1, s.m);
            return {states[0].raw_energy, detail::translate_wavefn(std::move(states[0].psi), s.translation)};
        }
        if (detail::near_int(f->b - (f->a - 3.0), 0) && f->a >= 3.0) {
            auto states = table2_states(f->a, 3, s.m);
            for (auto& st : states)
                if (st.nodes == 0)
                    return {st.raw_energy, detail::translate_wavefn(std::move(st.psi), s.translation)};
        }
        (void)m;
    }
    auto edges = analytic_band_edges(s);
    if (edges.empty()) throw CatalogMissError("ground_state: empty catalog");
    if (edges.front().nodes && *edges.front().nodes != 0)
        throw std::logic_error("ground_state: catalog ground state is not nodeless");
    if (!edges.front().wavefunction)
        throw CatalogMissError("ground_state: catalog has no wavefunction handle");
    return {edges.front().raw_energy, *edges.front().wavefunction};
}

/// Verify the oscillation-theorem structure of a sorted edge list: periods
/// L, 2L, 2L, L, L, ... and node counts 0, 1, 1, 2, 2, ... with deviations
/// permitted only at edges flagged unusual.
struct OscillationReport {
    bool ok = true;
    std::string message;
};

inline OscillationReport check_oscillation(const std::vector<BandEdge>& edges) {
    OscillationReport rep;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        if (j > 0 && edges[j].energy < edges[j - 1].energy - 1e-12) {
            rep.ok = false;
            rep.message = "edges not sorted by energy at index " + std::to_string(j);
            return rep;
        }
        const Periodicity expect =
            ((j + 1) / 2) % 2 == 0 ? Periodicity::same_as_l : Periodicity::doubled_2l;
        if (edges[j].periodicity != expect && !edges[j].unusual) {
            rep.ok = false;
            rep.message = "periodicity breaks the oscillation pattern at index " + std::to_string(j);
            return rep;
        }
        if (edges[j].nodes && *edges[j].nodes != int((j + 1) / 2) && !edges[j].unusual) {
            rep.ok = false;
            rep.message = "node count breaks the oscillation pattern at index " + std::to_string(j);
            return rep;
        }
    }
    return rep;
}

}  // namespace lamebands

#endif
