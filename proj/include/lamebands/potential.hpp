#ifndef LAMEBANDS_POTENTIAL_HPP
#define LAMEBANDS_POTENTIAL_HPP

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lamebands/elliptic.hpp"

namespace lamebands {

struct PotentialSpec;

/// V = a(a+1) m sn^2(x, m)
struct Lame {
    double a;
};

/// V = a(a+1) m sn^2 + b(b+1) m cn^2/dn^2, with a >= b.
struct AssocLame {
    double a;
    double b;
};

/// p translated copies of the Lame potential, spaced by 2K/p.
struct SuperposedLame {
    double a;
    int p;
};

/// p translated copies of the associated Lame potential, spaced by 2K/p.
struct SuperposedAssocLame {
    double a;
    double b;
    int p;
};

/// Supersymmetric partner W^2 + W' of a ground-shifted inner potential.
struct SusyPartner {
    std::shared_ptr<const PotentialSpec> inner;
};

/// Complex potential obtained from the inner one by x -> ix + beta (for the
/// double sine-Gordon family, the PT-invariant form -b^2 sin^2 2x + 2iab cos 2x).
struct PtTransform {
    std::shared_ptr<const PotentialSpec> inner;
    double beta;
};

/// V = b^2 sin^2 2x + 2 a b cos 2x, period pi. The modulus is unused.
struct DoubleSineGordon {
    double a;
    double b_strength;
};

using PotentialFamily = std::variant<Lame, AssocLame, SuperposedLame, SuperposedAssocLame,
                                     SusyPartner, PtTransform, DoubleSineGordon>;

/// Algebraic description of one potential-family instance. `energy_shift` is
/// added to the family potential (the catalogs record both raw and shifted
/// energies); the potential is evaluated at x - translation.
struct PotentialSpec {
    PotentialFamily family;
    Modulus m{0.5};
    double energy_shift = 0.0;
    double translation = 0.0;
};

namespace spec {

inline void validate(const PotentialSpec& s);

inline PotentialSpec lame(double a, double m, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{Lame{a}, Modulus(m), shift, translate};
    validate(s);
    return s;
}

inline PotentialSpec assoc_lame(double a, double b, double m, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{AssocLame{a, b}, Modulus(m), shift, translate};
    validate(s);
    return s;
}

inline PotentialSpec superposed_lame(double a, int p, double m, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{SuperposedLame{a, p}, Modulus(m), shift, translate};
    validate(s);
    return s;
}

inline PotentialSpec superposed_assoc_lame(double a, double b, int p, double m, double shift = 0.0,
                                           double translate = 0.0) {
    PotentialSpec s{SuperposedAssocLame{a, b, p}, Modulus(m), shift, translate};
    validate(s);
    return s;
}

inline PotentialSpec dsg(double a, double b_strength, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{DoubleSineGordon{a, b_strength}, Modulus(0.5), shift, translate};
    validate(s);
    return s;
}

inline PotentialSpec pt(PotentialSpec inner, double beta, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{PtTransform{std::make_shared<PotentialSpec>(std::move(inner)), beta},
                    Modulus(0.5), shift, translate};
    s.m = std::get<PtTransform>(s.family).inner->m;
    validate(s);
    return s;
}

inline PotentialSpec susy_partner(PotentialSpec inner, double shift = 0.0, double translate = 0.0) {
    PotentialSpec s{SusyPartner{std::make_shared<PotentialSpec>(std::move(inner))}, Modulus(0.5),
                    shift, translate};
    s.m = std::get<SusyPartner>(s.family).inner->m;
    validate(s);
    return s;
}

/// Strength parametrization p = a(a+1): principal root a >= -1/2.
inline double a_from_strength(double p) {
    if (p < 0.0) throw std::domain_error("a_from_strength: strength must be >= 0");
    return 0.5 * (std::sqrt(1.0 + 4.0 * p) - 1.0);
}

inline void validate(const PotentialSpec& s) {
    std::visit(
        [&](const auto& fam) {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, AssocLame>) {
                if (fam.a < fam.b)
                    throw std::invalid_argument("AssocLame: convention requires a >= b");
            } else if constexpr (std::is_same_v<F, SuperposedLame>) {
                if (fam.p < 2) throw std::invalid_argument("SuperposedLame: p >= 2 required");
            } else if constexpr (std::is_same_v<F, SuperposedAssocLame>) {
                if (fam.p < 2) throw std::invalid_argument("SuperposedAssocLame: p >= 2 required");
                if (fam.a < fam.b)
                    throw std::invalid_argument("SuperposedAssocLame: convention requires a >= b");
            } else if constexpr (std::is_same_v<F, PtTransform>) {
                if (fam.beta == 0.0)
                    throw std::invalid_argument("PtTransform: beta must be a nonzero real number");
                if (!fam.inner) throw std::invalid_argument("PtTransform: missing inner spec");
                if (std::holds_alternative<PtTransform>(fam.inner->family))
                    throw std::invalid_argument("PtTransform: nested PT transforms are not defined");
                if (std::holds_alternative<DoubleSineGordon>(fam.inner->family) &&
                    (fam.inner->energy_shift != 0.0 || fam.inner->translation != 0.0))
                    throw std::invalid_argument(
                        "PtTransform: the PT-invariant double sine-Gordon form takes shift and "
                        "translation on the outer spec only");
            } else if constexpr (std::is_same_v<F, SusyPartner>) {
                if (!fam.inner) throw std::invalid_argument("SusyPartner: missing inner spec");
            } else if constexpr (std::is_same_v<F, DoubleSineGordon>) {
                if (fam.a < 0.0)
                    throw std::invalid_argument("DoubleSineGordon: a is taken nonnegative");
            }
        },
        s.family);
}

}  // namespace spec

/// Fundamental period of the potential described by `s`.
inline double period(const PotentialSpec& s) {
    const double m = s.m.m();
    return std::visit(
        [&](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Lame>) {
                return 2.0 * complete_k(m);
            } else if constexpr (std::is_same_v<F, AssocLame>) {
                return (fam.a == fam.b) ? complete_k(m) : 2.0 * complete_k(m);
            } else if constexpr (std::is_same_v<F, SuperposedLame>) {
                return 2.0 * complete_k(m) / fam.p;
            } else if constexpr (std::is_same_v<F, SuperposedAssocLame>) {
                // For a = b the two translated sums interleave: the K-shifted
                // copies fill in the odd multiples of K/p when p is odd.
                if (fam.a == fam.b && fam.p % 2 == 1) return complete_k(m) / fam.p;
                if (fam.a == fam.b) return 2.0 * complete_k(m) / fam.p;
                return 2.0 * complete_k(m) / fam.p;
            } else if constexpr (std::is_same_v<F, SusyPartner>) {
                return period(*fam.inner);
            } else if constexpr (std::is_same_v<F, PtTransform>) {
                if (std::holds_alternative<DoubleSineGordon>(fam.inner->family)) return kPi;
                return 2.0 * complete_k(1.0 - fam.inner->m.m());
            } else {  // DoubleSineGordon
                return kPi;
            }
        },
        s.family);
}

namespace detail {

/// Complex-argument evaluator for the non-SUSY families: the analytic
/// continuation of the family potential, inner shift and translation applied.
/// SUSY partners need the catalog machinery and are dispatched in
/// evaluate.hpp.
class BaseComplexEvaluator {
public:
    explicit BaseComplexEvaluator(const PotentialSpec& s) : spec_(s), eng_(s.m) {
        if (const auto* f = std::get_if<PtTransform>(&s.family)) {
            if (!std::holds_alternative<DoubleSineGordon>(f->inner->family))
                inner_ = std::make_unique<BaseComplexEvaluator>(*f->inner);
        }
        if (std::holds_alternative<SuperposedLame>(s.family) ||
            std::holds_alternative<SuperposedAssocLame>(s.family))
            k_ = complete_k(s.m.m());
    }

    BaseComplexEvaluator(const BaseComplexEvaluator& other) : BaseComplexEvaluator(other.spec_) {}

    Complex operator()(Complex z) const { return family_value(z - spec_.translation) + spec_.energy_shift; }

private:
    Complex family_value(Complex z) const {
        const double m = spec_.m.m();
        if (const auto* f = std::get_if<Lame>(&spec_.family)) {
            const Complex sn = eng_.eval(z).sn;
            return f->a * (f->a + 1.0) * m * sn * sn;
        }
        if (const auto* f = std::get_if<AssocLame>(&spec_.family)) {
            const auto t = eng_.eval(z);
            return f->a * (f->a + 1.0) * m * t.sn * t.sn +
                   f->b * (f->b + 1.0) * m * (t.cn / t.dn) * (t.cn / t.dn);
        }
        if (const auto* f = std::get_if<SuperposedLame>(&spec_.family)) {
            Complex sum{};
            for (int j = 0; j < f->p; ++j) {
                const Complex sn = eng_.eval(z + 2.0 * j * k_ / f->p).sn;
                sum += sn * sn;
            }
            return f->a * (f->a + 1.0) * m * sum;
        }
        if (const auto* f = std::get_if<SuperposedAssocLame>(&spec_.family)) {
            Complex sum_a{}, sum_b{};
            for (int j = 0; j < f->p; ++j) {
                const Complex xj = z + 2.0 * j * k_ / f->p;
                const Complex sa = eng_.eval(xj).sn;
                const Complex sb = eng_.eval(xj + k_).sn;
                sum_a += sa * sa;
                sum_b += sb * sb;
            }
            return f->a * (f->a + 1.0) * m * sum_a + f->b * (f->b + 1.0) * m * sum_b;
        }
        if (const auto* f = std::get_if<DoubleSineGordon>(&spec_.family)) {
            const Complex s2 = std::sin(2.0 * z);
            return f->b_strength * f->b_strength * s2 * s2 +
                   2.0 * f->a * f->b_strength * std::cos(2.0 * z);
        }
        if (const auto* f = std::get_if<PtTransform>(&spec_.family)) {
            if (const auto* dsg = std::get_if<DoubleSineGordon>(&f->inner->family)) {
                const Complex s2 = std::sin(2.0 * z);
                return -dsg->b_strength * dsg->b_strength * s2 * s2 +
                       Complex(0.0, 2.0) * dsg->a * dsg->b_strength * std::cos(2.0 * z);
            }
            return -(*inner_)(Complex(0.0, 1.0) * z + f->beta);
        }
        throw std::logic_error("BaseComplexEvaluator: SUSY partners are handled in evaluate.hpp");
    }

    PotentialSpec spec_;
    ComplexJacobiEngine eng_;
    std::unique_ptr<BaseComplexEvaluator> inner_;
    double k_ = 0.0;
};

}  // namespace detail

}  // namespace lamebands

#endif
