#ifndef LAMEBANDS_JET_HPP
#define LAMEBANDS_JET_HPP

#include <cmath>
#include <complex>

namespace lamebands {

/// A function value together with its first three derivatives at a point.
///
/// Products, quotients and powers of jets propagate derivatives through the
/// Leibniz rule, so any algebraic composition of elliptic-function jets
/// carries exact derivatives. Nothing in the library differentiates
/// numerically on a production path.
template <typename T>
struct Jet {
    T f{};
    T d1{};
    T d2{};
    T d3{};

    static Jet constant(const T& c) { return Jet{c, T{}, T{}, T{}}; }
    static Jet variable(const T& x) { return Jet{x, T{1}, T{}, T{}}; }

    Jet operator-() const { return Jet{-f, -d1, -d2, -d3}; }
};

using RJet = Jet<double>;
using CJet = Jet<std::complex<double>>;

template <typename T>
inline Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
    return Jet<T>{a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}

template <typename T>
inline Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
    return Jet<T>{a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}

template <typename T>
inline Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    return Jet<T>{a.f * b.f,
                  a.d1 * b.f + a.f * b.d1,
                  a.d2 * b.f + T{2} * a.d1 * b.d1 + a.f * b.d2,
                  a.d3 * b.f + T{3} * a.d2 * b.d1 + T{3} * a.d1 * b.d2 + a.f * b.d3};
}

/// Reciprocal from the derivatives of b*y = 1.
template <typename T>
inline Jet<T> reciprocal(const Jet<T>& b) {
    const T y0 = T{1} / b.f;
    const T y1 = -b.d1 * y0 * y0;
    const T y2 = -(b.d2 * y0 + T{2} * b.d1 * y1) * y0;
    const T y3 = -(b.d3 * y0 + T{3} * b.d2 * y1 + T{3} * b.d1 * y2) * y0;
    return Jet<T>{y0, y1, y2, y3};
}

template <typename T>
inline Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
    return a * reciprocal(b);
}

template <typename T, typename S>
inline Jet<T> operator*(const Jet<T>& a, const S& s) {
    return Jet<T>{a.f * T(s), a.d1 * T(s), a.d2 * T(s), a.d3 * T(s)};
}

template <typename T, typename S>
inline Jet<T> operator*(const S& s, const Jet<T>& a) {
    return a * s;
}

template <typename T, typename S>
inline Jet<T> operator+(const Jet<T>& a, const S& s) {
    return Jet<T>{a.f + T(s), a.d1, a.d2, a.d3};
}

template <typename T, typename S>
inline Jet<T> operator+(const S& s, const Jet<T>& a) {
    return a + s;
}

template <typename T, typename S>
inline Jet<T> operator-(const Jet<T>& a, const S& s) {
    return Jet<T>{a.f - T(s), a.d1, a.d2, a.d3};
}

template <typename T, typename S>
inline Jet<T> operator-(const S& s, const Jet<T>& a) {
    return Jet<T>{T(s) - a.f, -a.d1, -a.d2, -a.d3};
}

/// g^e for real exponent e; the base must stay away from branch cuts,
/// which holds for the dn-power wavefunctions this library builds (dn > 0
/// on the real axis).
template <typename T>
inline Jet<T> pow(const Jet<T>& g, double e) {
    using std::pow;
    const T p0 = pow(g.f, e);
    const T r = p0 / g.f;  // g^(e-1)
    const T p1 = e * r * g.d1;
    const T p2 = e * (e - 1.0) * r / g.f * g.d1 * g.d1 + e * r * g.d2;
    const T p3 = e * (e - 1.0) * (e - 2.0) * r / (g.f * g.f) * g.d1 * g.d1 * g.d1 +
                 T{3} * e * (e - 1.0) * r / g.f * g.d1 * g.d2 + e * r * g.d3;
    return Jet<T>{p0, p1, p2, p3};
}

/// Reinterpret a jet taken along a direction `s` in the complex plane as a
/// jet in the new variable: if g(t) = f(z0 + s t) then g^(k) = s^k f^(k).
inline CJet along_direction(const CJet& j, std::complex<double> s) {
    return CJet{j.f, s * j.d1, s * s * j.d2, s * s * s * j.d3};
}

/// Promote a real jet to a complex one.
inline CJet to_complex(const RJet& j) {
    return CJet{j.f, j.d1, j.d2, j.d3};
}

}  // namespace lamebands

#endif
