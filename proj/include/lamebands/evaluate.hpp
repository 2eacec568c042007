#ifndef LAMEBANDS_EVALUATE_HPP
#define LAMEBANDS_EVALUATE_HPP

#include <functional>
#include <memory>

#include "lamebands/potential.hpp"
#include "lamebands/susy.hpp"

namespace lamebands {

using PotentialFn = std::function<Complex(double)>;
using ComplexPotentialFn = std::function<Complex(Complex)>;

/// Analytic continuation of the potential to complex argument, all families.
inline ComplexPotentialFn make_complex_evaluator(const PotentialSpec& s) {
    spec::validate(s);
    if (const auto* f = std::get_if<SusyPartner>(&s.family)) {
        auto w = superpotential(*f->inner);
        return [w = std::move(w), shift = s.energy_shift, t = s.translation](Complex z) {
            const CJet wj = w(z - t);
            return wj.f * wj.f + wj.d1 + shift;
        };
    }
    if (const auto* f = std::get_if<PtTransform>(&s.family)) {
        if (std::holds_alternative<SusyPartner>(f->inner->family)) {
            auto inner = make_complex_evaluator(*f->inner);
            return [inner = std::move(inner), beta = f->beta, shift = s.energy_shift,
                    t = s.translation](Complex z) {
                return -inner(Complex(0.0, 1.0) * (z - t) + beta) + shift;
            };
        }
    }
    auto base = std::make_shared<detail::BaseComplexEvaluator>(s);
    return [base](Complex z) { return (*base)(z); };
}

/// Potential evaluator along the real axis. Real families return values with
/// exactly zero imaginary part.
inline PotentialFn make_evaluator(const PotentialSpec& s) {
    auto f = make_complex_evaluator(s);
    return [f = std::move(f)](double x) { return f(Complex(x, 0.0)); };
}

/// Point evaluation of the potential described by `s`.
inline Complex evaluate(const PotentialSpec& s, double x) { return make_evaluator(s)(x); }

}  // namespace lamebands

#endif
