#ifndef LAMEBANDS_ELLIPTIC_HPP
#define LAMEBANDS_ELLIPTIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include "lamebands/jet.hpp"

namespace lamebands {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Evaluation requested too close to a pole of the elliptic lattice.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, Complex nearest_pole)
        : std::runtime_error(what), nearest_pole_(nearest_pole) {}
    Complex nearest_pole() const { return nearest_pole_; }

private:
    Complex nearest_pole_;
};

/// A series or iteration failed to converge within its hard cap.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Complete elliptic integral of the first kind, by arithmetic-geometric mean.
inline double complete_k(double m) {
    if (!(m >= 0.0)) throw std::domain_error("complete_k: modulus parameter m must be >= 0");
    if (m >= 1.0) throw std::domain_error("complete_k: modulus parameter m must be < 1");
    double a = 1.0;
    double b = std::sqrt(1.0 - m);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (a + b);
}

/// Elliptic modulus parameter m.
///
/// m must lie in [0, 1]; the interior is required by all solver paths, the
/// endpoints are served by trigonometric / hyperbolic limit branches of the
/// Jacobi functions. K'(m) is always computed as K(1-m) directly, never via
/// a reflection identity.
class Modulus {
public:
    explicit Modulus(double m) : m_(m) {
        if (!(m >= 0.0 && m <= 1.0))
            throw std::domain_error("Modulus: m must lie in [0, 1], got " + std::to_string(m));
    }

    double m() const { return m_; }
    double K() const { return complete_k(m_); }
    double Kprime() const { return complete_k(1.0 - m_); }
    double nome() const { return std::exp(-kPi * Kprime() / K()); }
    Modulus complement() const { return Modulus(1.0 - m_); }

private:
    double m_;
};

/// Values of sn, cn, dn at one (possibly complex) argument.
struct EllipticTriple {
    Complex sn;
    Complex cn;
    Complex dn;
    Complex u;
    double m;
};

namespace detail {

struct RealTriple {
    double sn, cn, dn;
};

/// Threshold below which (above 1-threshold) the trig (hyperbolic) series
/// branch replaces the Landen ladder.
inline constexpr double kLimitBranch = 1e-10;

}  // namespace detail

/// Jacobi sn, cn, dn at fixed modulus.
///
/// The descending-Landen ladder depends only on m, so it is built once and
/// reused for every argument; this is what the potential evaluators hold in
/// their inner loops. Exact branches handle u = 0, u = +-K and the m -> 0,
/// m -> 1 limits.
class JacobiEngine {
public:
    explicit JacobiEngine(Modulus mod) : m_(mod.m()) {
        if (m_ < detail::kLimitBranch) {
            branch_ = Branch::trig;
        } else if (m_ == 1.0) {
            branch_ = Branch::hyper;  // exact hyperbolic limit; no real period
        } else {
            branch_ = Branch::ladder;
            double emc = 1.0 - m_;
            double a = 1.0;
            levels_ = 0;
            double c = 0.0;
            for (int i = 0; i < kMaxLevels; ++i) {
                levels_ = i;
                em_[i] = a;
                emc = std::sqrt(emc);
                en_[i] = emc;
                c = 0.5 * (a + emc);
                if (std::abs(a - emc) <= 1e-8 * a) break;
                emc *= a;
                a = c;
            }
            agm_ = c;
        }
        if (m_ < 1.0) k_ = complete_k(m_);
    }

    double m() const { return m_; }

    /// Quarter period K(m); infinite (throws) at m = 1.
    double K() const {
        if (m_ >= 1.0) throw std::domain_error("JacobiEngine::K: K(1) is infinite");
        return k_;
    }

    detail::RealTriple eval(double u) const {
        if (u == 0.0) return {0.0, 1.0, 1.0};
        switch (branch_) {
            case Branch::trig: {
                // First-order expansion in m about the circular limit.
                const double ur = std::remainder(u, 4.0 * k_);
                const double s = std::sin(ur), c = std::cos(ur);
                const double w = 0.25 * m_ * (ur - s * c);
                return {s - w * c, c + w * s, 1.0 - 0.5 * m_ * s * s};
            }
            case Branch::hyper:
                return {std::tanh(u), 1.0 / std::cosh(u), 1.0 / std::cosh(u)};
            case Branch::ladder:
            default:
                return ladder_eval(u);
        }
    }

    /// sn, cn, dn together with their first three u-derivatives.
    std::array<RJet, 3> jet(double u) const {
        const auto t = eval(u);
        return triple_jets<double>(t.sn, t.cn, t.dn, m_);
    }

    /// Taylor recurrence for the derivative jets of (sn, cn, dn); works over
    /// the reals and the complexes alike.
    template <typename T>
    static std::array<Jet<T>, 3> triple_jets(T s0, T c0, T d0, double m) {
        const T s1 = c0 * d0;
        const T c1 = -s0 * d0;
        const T d1 = -m * s0 * c0;
        const T s2 = (c0 * d1 + c1 * d0) / 2.0;
        const T c2 = -(s0 * d1 + s1 * d0) / 2.0;
        const T d2 = -m * (s0 * c1 + s1 * c0) / 2.0;
        const T s3 = (c0 * d2 + c1 * d1 + c2 * d0) / 3.0;
        const T c3 = -(s0 * d2 + s1 * d1 + s2 * d0) / 3.0;
        const T d3 = -m * (s0 * c2 + s1 * c1 + s2 * c0) / 3.0;
        return {Jet<T>{s0, s1, 2.0 * s2, 6.0 * s3},
                Jet<T>{c0, c1, 2.0 * c2, 6.0 * c3},
                Jet<T>{d0, d1, 2.0 * d2, 6.0 * d3}};
    }

private:
    enum class Branch { ladder, trig, hyper };
    static constexpr int kMaxLevels = 16;

    detail::RealTriple ladder_eval(double u) const {
        // Reduce modulo the real period 4K to keep sin/cos well conditioned.
        double ur = std::remainder(u, 4.0 * k_);
        if (ur == k_) return {1.0, 0.0, std::sqrt(1.0 - m_)};
        if (ur == -k_) return {-1.0, 0.0, std::sqrt(1.0 - m_)};
        const double v = ur * agm_;
        double sn = std::sin(v), cn = std::cos(v), dn = 1.0;
        if (sn != 0.0) {
            double a = cn / sn;
            double c = agm_ * a;
            for (int i = levels_; i >= 0; --i) {
                const double b = em_[i];
                a *= c;
                c *= dn;
                dn = (en_[i] + a) / (b + a);
                a = c / b;
            }
            const double s = 1.0 / std::sqrt(c * c + 1.0);
            sn = (sn >= 0.0) ? s : -s;
            cn = c * sn;
        }
        return {sn, cn, dn};
    }

    double m_;
    double k_ = 0.0;
    Branch branch_;
    int levels_ = 0;
    double agm_ = 0.0;
    std::array<double, kMaxLevels> em_{};
    std::array<double, kMaxLevels> en_{};
};

/// Jacobi elliptic functions of real argument.
inline EllipticTriple jacobi(double u, Modulus mod) {
    const auto t = JacobiEngine(mod).eval(u);
    return {Complex(t.sn, 0.0), Complex(t.cn, 0.0), Complex(t.dn, 0.0), Complex(u, 0.0), mod.m()};
}

/// Jacobi elliptic functions of complex argument, by the imaginary-argument
/// transformation combined with the real addition theorem. Holds the two
/// real-axis engines (moduli m and 1-m) so evaluation along a line is cheap.
class ComplexJacobiEngine {
public:
    explicit ComplexJacobiEngine(Modulus mod, double pole_guard = 1e-6)
        : m_(mod.m()), re_(mod), im_(mod.complement()), pole_guard_(pole_guard) {
        if (m_ > 0.0 && m_ < 1.0) {
            two_k_ = 2.0 * re_.K();
            two_kp_ = 2.0 * im_.K();
        }
    }

    double m() const { return m_; }

    EllipticTriple eval(Complex z) const {
        const double x = z.real(), y = z.imag();
        if (y == 0.0) {
            const auto t = re_.eval(x);
            return {Complex(t.sn, 0.0), Complex(t.cn, 0.0), Complex(t.dn, 0.0), z, m_};
        }
        check_pole(z);
        const auto a = re_.eval(x);
        const auto b = im_.eval(y);
        const double den = b.cn * b.cn + m_ * a.sn * a.sn * b.sn * b.sn;
        const Complex sn(a.sn * b.dn / den, a.cn * a.dn * b.sn * b.cn / den);
        const Complex cn(a.cn * b.cn / den, -a.sn * a.dn * b.sn * b.dn / den);
        const Complex dn(a.dn * b.cn * b.dn / den, -m_ * a.sn * a.cn * b.sn / den);
        return {sn, cn, dn, z, m_};
    }

    std::array<CJet, 3> jet(Complex z) const {
        const auto t = eval(z);
        return JacobiEngine::triple_jets<Complex>(t.sn, t.cn, t.dn, m_);
    }

private:
    void check_pole(Complex z) const {
        // Poles of the Jacobi lattice sit at iK' modulo (2K, 2iK'); the guard
        // distance is measured in lattice-normalized units.
        if (m_ <= 0.0) return;  // sin/cos have no poles
        double dx, dy;
        if (m_ >= 1.0) {
            // Periods degenerate; only the imaginary spacing pi remains.
            dx = 0.0;
            dy = std::remainder(z.imag() - kPi / 2.0, kPi) / kPi;
        } else {
            dx = std::remainder(z.real(), two_k_) / two_k_;
            dy = std::remainder(z.imag() - 0.5 * two_kp_, two_kp_) / two_kp_;
        }
        const double dist = std::hypot(dx, dy);
        if (dist < pole_guard_) {
            const Complex pole(z.real() - dx * two_k_, z.imag() - dy * two_kp_);
            throw SingularityError("jacobi_complex: argument within pole guard of the elliptic lattice", pole);
        }
    }

    double m_;
    JacobiEngine re_, im_;
    double pole_guard_;
    double two_k_ = 0.0, two_kp_ = 0.0;
};

inline EllipticTriple jacobi_complex(Complex z, Modulus mod, double pole_guard = 1e-6) {
    return ComplexJacobiEngine(mod, pole_guard).eval(z);
}

/// Jacobi theta and eta functions as truncated nome series, plus the zeta
/// function as the logarithmic derivative of theta.
///
/// Arguments follow the classical convention H(u) = theta1(pi u / 2K),
/// Theta(u) = theta4(pi u / 2K) with nome q = exp(-pi K'/K). Series are cut
/// when the term envelope drops below 1e-16, with a hard cap of 64 terms.
class ThetaEngine {
public:
    explicit ThetaEngine(Modulus mod) : m_(mod.m()) {
        if (m_ >= 1.0)
            throw ConvergenceError("ThetaEngine: nome q -> 1 as m -> 1; series cannot converge");
        k_ = mod.K();
        kp_ = mod.Kprime();
        log_q_ = -kPi * kp_ / k_;
        q_ = std::exp(log_q_);
    }

    double K() const { return k_; }
    double Kprime() const { return kp_; }
    double nome() const { return q_; }

    /// theta1 of the scaled argument v, complex capable.
    Complex theta1(Complex v) const { return sum1(v, false); }
    Complex theta1_deriv(Complex v) const { return sum1(v, true); }
    Complex theta4(Complex v) const { return sum4(v, false); }
    Complex theta4_deriv(Complex v) const { return sum4(v, true); }

    /// Jacobi eta function H(u).
    Complex eta(Complex u) const { return theta1(kPi * u / (2.0 * k_)); }
    /// Jacobi theta function Theta(u).
    Complex theta(Complex u) const { return theta4(kPi * u / (2.0 * k_)); }

    /// Jacobi zeta Z(u) = Theta'(u)/Theta(u).
    Complex zeta(Complex u) const {
        const Complex v = kPi * u / (2.0 * k_);
        return kPi / (2.0 * k_) * theta4_deriv(v) / theta4(v);
    }

    double zeta(double u) const {
        const Complex z = zeta(Complex(u, 0.0));
        return z.real();
    }

private:
    static constexpr int kMaxTerms = 64;
    static constexpr double kCut = 1e-16;

    Complex sum1(Complex v, bool deriv) const {
        const double t = std::abs(v.imag());
        Complex acc{};
        double sign = 1.0;
        for (int n = 0; n < kMaxTerms; ++n, sign = -sign) {
            const double h = n + 0.5;
            const double qp = std::exp(log_q_ * h * h);
            const double k = 2.0 * n + 1.0;
            acc += 2.0 * sign * qp * (deriv ? k * std::cos(k * v) : std::sin(k * v));
            if (2.0 * qp * std::exp(k * t) * (deriv ? k : 1.0) < kCut) return acc;
        }
        throw ConvergenceError("ThetaEngine: eta series did not converge in 64 terms");
    }

    Complex sum4(Complex v, bool deriv) const {
        const double t = std::abs(v.imag());
        Complex acc = deriv ? Complex{} : Complex{1.0, 0.0};
        double sign = -1.0;
        for (int n = 1; n < kMaxTerms; ++n, sign = -sign) {
            const double qp = std::exp(log_q_ * double(n) * double(n));
            const double k = 2.0 * n;
            acc += 2.0 * sign * qp * (deriv ? -k * std::sin(k * v) : std::cos(k * v));
            if (2.0 * qp * std::exp(k * t) * (deriv ? k : 1.0) < kCut) return acc;
        }
        throw ConvergenceError("ThetaEngine: theta series did not converge in 64 terms");
    }

    double m_, k_, kp_, log_q_, q_;
};

/// Jacobi zeta function of real argument.
inline double jacobi_zeta(double u, Modulus mod) { return ThetaEngine(mod).zeta(u); }

/// Jacobi zeta function of complex argument.
inline Complex jacobi_zeta(Complex u, Modulus mod) { return ThetaEngine(mod).zeta(u); }

/// Jacobi eta and theta functions (H, Theta) at a possibly complex argument.
inline std::pair<Complex, Complex> theta_eta(Complex z, Modulus mod) {
    ThetaEngine eng(mod);
    return {eng.eta(z), eng.theta(z)};
}

/// Parameters (alpha, m-tilde, A_d) that collapse a p-fold sum of translated
/// dn functions into a single dn at rescaled argument and descended modulus.
struct LandenDescent {
    double alpha;
    double m_tilde;
    double a_d;
    int p;
};

/// Landen-descent parameters for superposition order p >= 2.
inline LandenDescent landen_descent(Modulus mod, int p) {
    if (p < 2) throw std::invalid_argument("landen_descent: superposition order p must be >= 2");
    const double m = mod.m();
    const JacobiEngine eng(mod);
    const double K = eng.K();

    double inv_alpha = 0.0;
    double dn3 = 0.0;
    for (int j = 0; j < p; ++j) {
        const double d = eng.eval(2.0 * j * K / p).dn;
        inv_alpha += d;
        dn3 += d * d * d;
    }
    const double alpha = 1.0 / inv_alpha;
    const double m_tilde = (m - 2.0) * alpha * alpha + 2.0 * alpha * alpha * alpha * dn3;

    // Cyclic sum A_d = sum_{j<k} dn(x_j) dn(x_k), a constant by the cyclic
    // identities; evaluated through its closed form.
    double a_d = (p % 2 == 0) ? 0.5 * p * std::sqrt(1.0 - m) : 0.0;
    if (m > 0.0) {
        const ThetaEngine th(mod);
        const int jmax = (p % 2 == 0) ? (p - 2) / 2 : (p - 1) / 2;
        for (int j = 1; j <= jmax; ++j) {
            const double xj = 2.0 * j * K / p;
            const auto t = eng.eval(xj);
            a_d += p * (t.dn - (t.cn / t.sn) * th.zeta(xj));
        }
    } else {
        const int jmax = (p % 2 == 0) ? (p - 2) / 2 : (p - 1) / 2;
        a_d += p * jmax;  // dn = 1, Z = 0 in the circular limit
    }
    return {alpha, m_tilde, a_d, p};
}

namespace detail {

/// Carlson symmetric integral R_F by duplication; used for the inverse of sn.
inline double carlson_rf(double x, double y, double z) {
    double dx, dy, dz;
    double mu;
    for (int i = 0; i < 128; ++i) {
        mu = (x + y + z) / 3.0;
        dx = 1.0 - x / mu;
        dy = 1.0 - y / mu;
        dz = 1.0 - z / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < 1e-12) break;
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
}

/// Inverse of sn on [0, 1]: the u with sn(u, m) = s, u in [0, K].
inline double inverse_sn(double s, Modulus mod) {
    if (s < 0.0 || s > 1.0) throw std::domain_error("inverse_sn: s must lie in [0, 1]");
    if (s == 0.0) return 0.0;
    return s * carlson_rf(1.0 - s * s, 1.0 - mod.m() * s * s, 1.0);
}

}  // namespace detail

}  // namespace lamebands

#endif
