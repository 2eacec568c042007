#ifndef LAMEBANDS_SUSY_HPP
#define LAMEBANDS_SUSY_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lamebands/catalog.hpp"
#include "lamebands/potential.hpp"

namespace lamebands {

/// Superpotential W = -psi0'/psi0 built from the cataloged nodeless ground
/// state of a ground-shifted spec. The returned jets carry W, W' and W''
/// (the third derivative slot is not populated).
inline WaveFn superpotential(const PotentialSpec& s) {
    GroundState gs = ground_state(s);
    if (std::abs(gs.raw_energy + s.energy_shift) > 1e-9 * std::max(1.0, std::abs(gs.raw_energy)))
        throw std::invalid_argument(
            "superpotential: spec must be shifted so the ground band edge sits at zero energy "
            "(expected shift " +
            std::to_string(-gs.raw_energy) + ", got " + std::to_string(s.energy_shift) + ")");
    return [psi = std::move(gs.psi)](Complex z) {
        const CJet p = psi(z);
        const Complex f2 = p.f * p.f;
        CJet w;
        w.f = -p.d1 / p.f;
        w.d1 = -(p.d2 * p.f - p.d1 * p.d1) / f2;
        w.d2 = -(p.d3 * f2 - 3.0 * p.f * p.d1 * p.d2 + 2.0 * p.d1 * p.d1 * p.d1) / (f2 * p.f);
        w.d3 = 0.0;
        return w;
    };
}

/// Partner potential V+ = W^2 + W'.
inline std::function<Complex(Complex)> partner_potential(const WaveFn& w) {
    return [w](Complex z) {
        const CJet wj = w(z);
        return wj.f * wj.f + wj.d1;
    };
}

/// Partner band-edge wavefunction: 1/psi0 for the ground state, otherwise
/// (d/dx + W) psi_n. Jets carry two derivatives, enough for residual checks.
inline WaveFn partner_wavefunction(int n, const WaveFn& psi_n, const WaveFn& w) {
    if (n == 0) {
        return [psi_n](Complex z) {
            const CJet p = psi_n(z);
            if (std::abs(p.f) < 1e-12)
                throw std::domain_error(
                    "partner_wavefunction: division guard hit; inner ground state vanishes");
            return reciprocal(p);
        };
    }
    return [psi_n, w](Complex z) {
        const CJet p = psi_n(z);
        const CJet wj = w(z);
        CJet out;
        out.f = p.d1 + wj.f * p.f;
        out.d1 = p.d2 + wj.d1 * p.f + wj.f * p.d1;
        out.d2 = p.d3 + wj.d2 * p.f + 2.0 * wj.d1 * p.d1 + wj.f * p.d2;
        out.d3 = 0.0;
        return out;
    };
}

/// A ground-shifted potential, its superpotential and its partner.
struct SusyPair {
    PotentialSpec v_minus;
    WaveFn w;
    std::function<Complex(Complex)> v_plus;
    double period_length;
};

inline SusyPair build_susy_pair(const PotentialSpec& s) {
    WaveFn w = superpotential(s);
    auto vp = partner_potential(w);
    return {s, std::move(w), std::move(vp), period(s)};
}

/// Outcome of the self-isospectrality search over translations and the
/// reflection branch.
struct SelfIsospectralResult {
    bool is_self_isospectral = false;
    double best_shift = 0.0;
    bool reflected = false;
    double max_deviation = 0.0;
};

/// Minimize sup_x |V+(x) - V-(sigma x - s)| over shifts s in [0, L) and
/// sigma = +-1; self-isospectral when the minimum is below 1e-8.
inline SelfIsospectralResult self_isospectral_test(const std::function<Complex(Complex)>& v_minus,
                                                   const std::function<Complex(Complex)>& v_plus,
                                                   double period_length,
                                                   double threshold = 1e-8) {
    constexpr int kShiftGrid = 256;
    constexpr int kSampleGrid = 128;

    std::vector<Complex> vp(kSampleGrid);
    std::vector<double> xs(kSampleGrid);
    for (int i = 0; i < kSampleGrid; ++i) {
        xs[i] = period_length * (i + 0.31) / kSampleGrid;
        vp[i] = v_plus(Complex(xs[i], 0.0));
    }

    auto deviation = [&](double s, double sigma) {
        double worst = 0.0;
        for (int i = 0; i < kSampleGrid; ++i)
            worst = std::max(worst, std::abs(vp[i] - v_minus(Complex(sigma * xs[i] - s, 0.0))));
        return worst;
    };

    SelfIsospectralResult best;
    best.max_deviation = std::numeric_limits<double>::infinity();
    for (double sigma : {1.0, -1.0}) {
        for (int i = 0; i < kShiftGrid; ++i) {
            const double s = period_length * i / kShiftGrid;
            const double d = deviation(s, sigma);
            if (d < best.max_deviation) {
                best.max_deviation = d;
                best.best_shift = s;
                best.reflected = sigma < 0.0;
            }
        }
    }

    // Golden-section refinement of the shift around the winning grid point.
    const double sigma = best.reflected ? -1.0 : 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best.best_shift - period_length / kShiftGrid;
    double hi = best.best_shift + period_length / kShiftGrid;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = deviation(x1, sigma), f2 = deviation(x2, sigma);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = deviation(x1, sigma);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = deviation(x2, sigma);
        }
    }
    const double s_best = 0.5 * (lo + hi);
    const double d_best = deviation(s_best, sigma);
    if (d_best < best.max_deviation) {
        best.max_deviation = d_best;
        best.best_shift = std::remainder(s_best, period_length);
        if (best.best_shift < 0.0) best.best_shift += period_length;
    }
    best.is_self_isospectral = best.max_deviation < threshold;
    return best;
}

namespace detail {

inline int count_sign_changes(const WaveFn& psi, double length, int grid = 4096) {
    std::vector<double> v(grid);
    double amax = 0.0;
    for (int i = 0; i < grid; ++i) {
        v[i] = psi(Complex(length * i / grid, 0.0)).f.real();
        amax = std::max(amax, std::abs(v[i]));
    }
    const double zt = 1e-9 * amax;
    int count = 0, last = 0;
    bool leading_zero = std::abs(v[0]) <= zt;
    for (int i = 0; i < grid; ++i) {
        const int sgn = (v[i] > zt) ? 1 : (v[i] < -zt ? -1 : 0);
        if (sgn == 0) continue;
        if (last != 0 && sgn != last) ++count;
        last = sgn;
    }
    return count + (leading_zero ? 1 : 0);
}

/// Band edges of a SUSY partner: energies copied from the inner catalog
/// (isospectrality), wavefunctions mapped through the supersymmetry
/// transformations, node counts recounted on a grid.
inline std::vector<BandEdge> susy_partner_edges(const PotentialSpec& s) {
    const auto& fam = std::get<SusyPartner>(s.family);
    const PotentialSpec& inner = *fam.inner;
    auto inner_edges = analytic_band_edges(inner);
    const WaveFn w = superpotential(inner);
    const double length = period(inner);
    const bool complex_line = std::holds_alternative<PtTransform>(inner.family);

    std::vector<BandEdge> out;
    out.reserve(inner_edges.size());
    for (std::size_t n = 0; n < inner_edges.size(); ++n) {
        const BandEdge& src = inner_edges[n];
        BandEdge e;
        e.raw_energy = src.energy;
        e.energy = src.energy + s.energy_shift;
        e.periodicity = src.periodicity;  // (d/dx + W) with W of period L preserves the class
        e.unusual = src.unusual;
        e.provenance = Provenance::analytic;
        if (!src.wavefunction)
            throw CatalogMissError("susy partner catalog requires inner wavefunction handles");
        WaveFn psi = partner_wavefunction(static_cast<int>(n), *src.wavefunction, w);
        psi = translate_wavefn(std::move(psi), s.translation);
        if (!complex_line) e.nodes = count_sign_changes(psi, length);
        e.wavefunction = std::move(psi);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace detail

}  // namespace lamebands

#endif
