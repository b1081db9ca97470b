#ifndef DIRAC_CX_HPP
#define DIRAC_CX_HPP

#include <cmath>
#include <complex>

#include "dirac/dd.hpp"

namespace dirac {

/// Minimal complex number over a generic real scalar (double or DD).
/// std::complex is not specified for user-defined value types, so the
/// generic integration code uses this instead.
template <class R>
struct Cx {
    R re{};
    R im{};

    Cx() = default;
    Cx(R r) : re(std::move(r)) {} // NOLINT: implicit by design
    Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}
};

template <class R> Cx<R> operator+(const Cx<R>& a, const Cx<R>& b) { return {a.re + b.re, a.im + b.im}; }
template <class R> Cx<R> operator-(const Cx<R>& a, const Cx<R>& b) { return {a.re - b.re, a.im - b.im}; }
template <class R> Cx<R> operator-(const Cx<R>& a) { return {-a.re, -a.im}; }

template <class R>
Cx<R> operator*(const Cx<R>& a, const Cx<R>& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class R> Cx<R> operator*(const R& s, const Cx<R>& a) { return {s * a.re, s * a.im}; }
template <class R> Cx<R> operator*(const Cx<R>& a, const R& s) { return {a.re * s, a.im * s}; }

template <class R>
Cx<R> operator/(const Cx<R>& a, const Cx<R>& b) {
    const R n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

template <class R> Cx<R>& operator+=(Cx<R>& a, const Cx<R>& b) { a = a + b; return a; }
template <class R> Cx<R>& operator-=(Cx<R>& a, const Cx<R>& b) { a = a - b; return a; }
template <class R> Cx<R>& operator*=(Cx<R>& a, const Cx<R>& b) { a = a * b; return a; }

template <class R> Cx<R> conj(const Cx<R>& a) { return {a.re, -a.im}; }

/// Cheap magnitude proxy in plain double, for step control and convergence
/// decisions (never for the propagated values themselves).
inline double mag(const Cx<double>& a) { return std::abs(a.re) + std::abs(a.im); }
inline double mag(const Cx<DD>& a) { return std::abs(a.re.hi) + std::abs(a.im.hi); }

inline std::complex<double> to_std(const Cx<double>& a) { return {a.re, a.im}; }
inline std::complex<double> to_std(const Cx<DD>& a) { return {a.re.hi, a.im.hi}; }

/// Scalar adapters for the precision-generic code paths.
template <class R>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static double from_double(double v) { return v; }
    static double pi() { return 3.14159265358979323846264338327950288; }
    static void sin_cos(double x, double& s, double& c) { s = std::sin(x); c = std::cos(x); }
    /// Below this, tightening tolerances buys nothing.
    static constexpr double tol_floor = 1e-14;
    static constexpr int taylor_order = 24;
};

template <>
struct ScalarTraits<DD> {
    static DD from_double(double v) { return DD(v); }
    static DD pi() { return dd_const::pi; }
    static void sin_cos(const DD& x, DD& s, DD& c) { sincos(x, s, c); }
    static constexpr double tol_floor = 1e-28;
    static constexpr int taylor_order = 44;
};

template <class R>
Cx<R> cx_from_std(const std::complex<double>& z) {
    return {ScalarTraits<R>::from_double(z.real()), ScalarTraits<R>::from_double(z.imag())};
}

} // namespace dirac

#endif
