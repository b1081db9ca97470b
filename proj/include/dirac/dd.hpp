#ifndef DIRAC_DD_HPP
#define DIRAC_DD_HPP

#include <cmath>
#include <cstdlib>

namespace dirac {

/// Double-double scalar: an unevaluated sum hi + lo of two doubles with
/// |lo| <= ulp(hi)/2, giving roughly 31 significant decimal digits. Used on
/// the evaluation paths where the characteristic determinant cancels far
/// below the size of its constituent products, which plain double cannot
/// resolve. Fixed width, not arbitrary precision.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    DD() = default;
    DD(double h) : hi(h) {} // NOLINT: implicit by design
    DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi; }
};

namespace dd_detail {

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DD operator+(const DD& a, const DD& b) {
    using namespace dd_detail;
    DD s = two_sum(a.hi, b.hi);
    DD t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
    using namespace dd_detail;
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    double q3 = r.hi / b.hi;
    DD q = dd_detail::quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, const DD& b) { a = a + b; return a; }
inline DD& operator-=(DD& a, const DD& b) { a = a - b; return a; }
inline DD& operator*=(DD& a, const DD& b) { a = a * b; return a; }
inline DD& operator/=(DD& a, const DD& b) { a = a / b; return a; }

inline bool operator==(const DD& a, const DD& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(const DD& a, const DD& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DD& a, const DD& b) { return b < a; }
inline bool operator<=(const DD& a, const DD& b) { return !(b < a); }
inline bool operator>=(const DD& a, const DD& b) { return !(a < b); }

inline DD abs(const DD& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline DD sqrt(const DD& a) {
    if (a.hi == 0.0 && a.lo == 0.0) return {};
    // one Karp-Markstein correction on the double estimate
    double x = 1.0 / std::sqrt(a.hi);
    double ax = a.hi * x;
    DD axdd(ax);
    DD err = a - axdd * axdd;
    return axdd + DD(err.hi * (x * 0.5));
}

namespace dd_const {
inline const DD pi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline const DD half_pi{1.570796326794896558e+00, 6.123233995736766036e-17};
} // namespace dd_const

namespace dd_detail {

/// sin/cos on |t| <= pi/4 by Taylor series, terms taken until below 1e-35.
inline void sincos_taylor(const DD& t, DD& s, DD& c) {
    const DD t2 = t * t;
    DD term = t;
    DD sum = t;
    for (int n = 3; n < 40; n += 2) {
        term = term * t2 / DD(static_cast<double>(n * (n - 1)));
        term = -term;
        sum += term;
        if (std::abs(term.hi) < 1e-35 * (std::abs(sum.hi) + 1e-300)) break;
    }
    s = sum;

    term = DD(1.0);
    sum = DD(1.0);
    for (int n = 2; n < 40; n += 2) {
        term = term * t2 / DD(static_cast<double>(n * (n - 1)));
        term = -term;
        sum += term;
        if (std::abs(term.hi) < 1e-35 * (std::abs(sum.hi) + 1e-300)) break;
    }
    c = sum;
}

} // namespace dd_detail

/// Simultaneous sin and cos with range reduction modulo pi/2. Adequate for
/// the modest arguments this library meets (|x| up to a few hundred).
inline void sincos(const DD& x, DD& s, DD& c) {
    const double q = std::round(x.hi / dd_const::half_pi.hi);
    const DD t = x - dd_const::half_pi * DD(q);
    DD st, ct;
    dd_detail::sincos_taylor(t, st, ct);
    const long qi = static_cast<long>(q);
    switch (((qi % 4) + 4) % 4) {
        case 0: s = st;  c = ct;  break;
        case 1: s = ct;  c = -st; break;
        case 2: s = -st; c = -ct; break;
        default: s = -ct; c = st; break;
    }
}

inline DD sin(const DD& x) { DD s, c; sincos(x, s, c); return s; }
inline DD cos(const DD& x) { DD s, c; sincos(x, s, c); return c; }

inline double to_double(const DD& a) { return a.hi; }
inline double to_double(double a) { return a; }

} // namespace dirac

#endif
