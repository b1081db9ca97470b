#ifndef DIRAC_POTENTIAL_HPP
#define DIRAC_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "dirac/cx.hpp"
#include "dirac/errors.hpp"
#include "dirac/quadrature.hpp"

namespace dirac {

inline constexpr double kPi = std::numbers::pi;

struct TrigFactor {
    enum class Kind { Cos, Sin };
    Kind kind = Kind::Cos;
    int k = 0;
};

/// One additive term of a potential entry: on the coverage interval
/// [lo, hi) the term contributes poly(xi) * trig(k*xi), elsewhere 0, where
/// xi = x for a plain term and xi = pi - x for a reflected one. Reflection
/// is applied lazily at evaluation time so that it is exact in whatever
/// precision the evaluation runs in; expanding poly(pi - x) into
/// coefficients would bake the rounding of pi into the data. An interval
/// ending at pi is closed on the right.
struct Term {
    double lo = 0.0;
    double hi = kPi;
    std::vector<std::complex<double>> poly; ///< ascending coefficients in xi
    std::optional<TrigFactor> trig;
    bool reflected = false;

    bool covers(double x) const {
        if (x < lo) return false;
        if (x < hi) return true;
        return x == hi && hi == kPi;
    }
};

/// Finite description of the potential entries p, q on [0, pi] as sums of
/// piecewise polynomial-times-trigonometric terms.
struct PotentialSpec {
    std::vector<Term> p_terms;
    std::vector<Term> q_terms;

    static PotentialSpec zero() { return {}; }

    /// p(x) = cos x, q(x) = sin x; midpoint-symmetric by the angle identities.
    static PotentialSpec cos_sin() {
        PotentialSpec v;
        v.p_terms.push_back({0.0, kPi, {1.0}, TrigFactor{TrigFactor::Kind::Cos, 1}, false});
        v.q_terms.push_back({0.0, kPi, {1.0}, TrigFactor{TrigFactor::Kind::Sin, 1}, false});
        return v;
    }
};

namespace detail {

/// The interval [0, pi] is stored with the double rounding of pi as its
/// right endpoint. Trigonometric factors are evaluated as trig(k*sigma*x)
/// with sigma = pi/double(pi), which is exactly 1 in double arithmetic and
/// differs from 1 by ~4e-17 in extended precision. This makes cos/sin terms
/// exactly symmetric about the midpoint of the interval as stored, which the
/// reduction identities rely on; at double accuracy the scaling is invisible.
template <class R>
R trig_chart() {
    using ST = ScalarTraits<R>;
    return ST::pi() / ST::from_double(kPi);
}

/// Right endpoint of the interval as stored (exact in every precision).
template <class R>
R interval_end() {
    return ScalarTraits<R>::from_double(kPi);
}

/// Term value without the coverage test: evaluates the piece's smooth
/// formula even at (or just beyond) its boundary. Integration over a
/// segment uses this with the active set frozen by the segment interior.
template <class R>
Cx<R> term_value_unchecked(const Term& t, double x) {
    using ST = ScalarTraits<R>;
    R xi = ST::from_double(x);
    if (t.reflected) xi = interval_end<R>() - xi;
    Cx<R> val{ST::from_double(1.0)};
    if (!t.poly.empty()) {
        Cx<R> acc = cx_from_std<R>(t.poly.back());
        for (std::size_t i = t.poly.size() - 1; i-- > 0;)
            acc = acc * Cx<R>{xi} + cx_from_std<R>(t.poly[i]);
        val = acc;
    }
    if (t.trig) {
        R s, c;
        ST::sin_cos(ST::from_double(static_cast<double>(t.trig->k)) * trig_chart<R>() * xi, s, c);
        val = val * Cx<R>{t.trig->kind == TrigFactor::Kind::Cos ? c : s};
    }
    return val;
}

template <class R>
Cx<R> term_value(const Term& t, double x) {
    if (!t.covers(x)) return {};
    return term_value_unchecked<R>(t, x);
}

template <class R>
Cx<R> eval_sum(const std::vector<Term>& terms, double x) {
    Cx<R> acc{};
    for (const auto& t : terms) acc += term_value<R>(t, x);
    return acc;
}

/// Sum of the terms covering `cover_x`, each evaluated (unchecked) at x.
template <class R>
Cx<R> eval_sum_frozen(const std::vector<Term>& terms, double cover_x, double x) {
    Cx<R> acc{};
    for (const auto& t : terms)
        if (t.covers(cover_x)) acc += term_value_unchecked<R>(t, x);
    return acc;
}

/// Taylor coefficients (length n+1) of the term's value about x0, in the
/// local variable t with x = x0 + t. The expansion point is taken in the
/// working precision: integration positions are tracked there, and a
/// double-rounded center would reintroduce step-composition gaps of order
/// eps that growing solutions amplify. Assumes the whole expansion
/// neighborhood stays inside the coverage interval; the integrator
/// guarantees that by splitting at breakpoints.
template <class R>
void term_series(const Term& term, const R& x0, int n, std::vector<Cx<R>>& out) {
    using ST = ScalarTraits<R>;
    const std::size_t len = static_cast<std::size_t>(n) + 1;

    // polynomial part rebased to xi0 (in xi = x or pi - x coordinates)
    R xi0 = x0;
    if (term.reflected) xi0 = interval_end<R>() - xi0;

    std::vector<Cx<R>> poly_series(len, Cx<R>{});
    if (term.poly.empty()) {
        poly_series[0] = Cx<R>{ST::from_double(1.0)};
    } else {
        // repeated synthetic division: b_j = sum_k C(k,j) a_k xi0^(k-j)
        std::vector<Cx<R>> work(term.poly.size());
        for (std::size_t i = 0; i < work.size(); ++i) work[i] = cx_from_std<R>(term.poly[i]);
        const std::size_t deg = work.size() - 1;
        for (std::size_t j = 0; j <= deg && j < len; ++j) {
            for (std::size_t i = deg; i-- > j;) work[i] += Cx<R>{xi0} * work[i + 1];
            poly_series[j] = work[j];
        }
    }

    std::vector<Cx<R>> series;
    if (term.trig && term.trig->k != 0) {
        const R kr = ST::from_double(static_cast<double>(term.trig->k)) * trig_chart<R>();
        R s0, c0;
        ST::sin_cos(kr * xi0, s0, c0);
        // d^n/dxi^n cos(k xi) cycles through (c,-s,-c,s); sin through (s,c,-s,-c)
        std::vector<R> trig_series(len);
        R kpow = ST::from_double(1.0);
        R fact = ST::from_double(1.0);
        for (std::size_t m = 0; m < len; ++m) {
            if (m > 0) {
                kpow = kpow * kr;
                fact = fact * ST::from_double(static_cast<double>(m));
            }
            const R base = [&]() -> R {
                const bool is_cos = term.trig->kind == TrigFactor::Kind::Cos;
                switch (m % 4) {
                    case 0: return is_cos ? c0 : s0;
                    case 1: return is_cos ? -s0 : c0;
                    case 2: return is_cos ? -c0 : -s0;
                    default: return is_cos ? s0 : -c0;
                }
            }();
            trig_series[m] = kpow / fact * base;
        }
        series.assign(len, Cx<R>{});
        for (std::size_t i = 0; i < len; ++i)
            for (std::size_t j = 0; i + j < len; ++j)
                series[i + j] += poly_series[i] * Cx<R>{trig_series[j]};
    } else if (term.trig && term.trig->k == 0 && term.trig->kind == TrigFactor::Kind::Sin) {
        series.assign(len, Cx<R>{}); // sin(0x) == 0
    } else {
        series = std::move(poly_series);
    }

    // xi = xi0 - t for a reflected term: alternate signs
    if (term.reflected)
        for (std::size_t m = 1; m < len; m += 2) series[m] = -series[m];

    for (std::size_t m = 0; m < len; ++m) out[m] += series[m];
}

/// Series about x0 of the sum of the terms covering `cover_x`. The two
/// points differ when an integration step starts exactly on a breakpoint:
/// coverage is then decided by the segment interior.
template <class R>
void sum_series(const std::vector<Term>& terms, const R& x0, double cover_x, int n,
                std::vector<Cx<R>>& out) {
    out.assign(static_cast<std::size_t>(n) + 1, Cx<R>{});
    for (const auto& t : terms)
        if (t.covers(cover_x)) term_series<R>(t, x0, n, out);
}

} // namespace detail

/// Point evaluation of (p, q). Interior piece boundaries follow the
/// half-open convention: the piece starting at x wins.
inline std::pair<std::complex<double>, std::complex<double>> evaluate(const PotentialSpec& v,
                                                                      double x) {
    if (!(x >= 0.0 && x <= kPi)) throw OutOfDomain("potential evaluated outside [0, pi]");
    return {to_std(detail::eval_sum<double>(v.p_terms, x)),
            to_std(detail::eval_sum<double>(v.q_terms, x))};
}

/// Interior breakpoints of the piecewise structure, sorted and deduplicated.
inline std::vector<double> breakpoints(const PotentialSpec& v) {
    std::vector<double> b;
    auto collect = [&](const std::vector<Term>& terms) {
        for (const auto& t : terms) {
            if (t.lo > 0.0 && t.lo < kPi) b.push_back(t.lo);
            if (t.hi > 0.0 && t.hi < kPi) b.push_back(t.hi);
        }
    };
    collect(v.p_terms);
    collect(v.q_terms);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(),
                        [](double a, double c) { return std::abs(a - c) < 1e-14; }),
            b.end());
    return b;
}

struct SymmetryReport {
    double defect_p = 0.0; ///< L1 norm of x -> p(pi-x) + p(x)
    double defect_q = 0.0; ///< L1 norm of x -> q(pi-x) - q(x)
    bool satisfied = false;
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// Measures the L1 defects of the midpoint symmetry p(pi-x) = -p(x),
/// q(pi-x) = q(x) by composite Gauss-Legendre quadrature with n_quad nodes
/// per subinterval between breakpoints (their reflections included).
inline SymmetryReport symmetry_report(const PotentialSpec& v, int n_quad = 64) {
    if (n_quad < 16) throw Error("symmetry_report requires n_quad >= 16");
    std::vector<double> cuts{0.0, kPi};
    for (double b : breakpoints(v)) {
        cuts.push_back(b);
        cuts.push_back(kPi - b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double c) { return std::abs(a - c) < 1e-14; }),
               cuts.end());

    const auto [nodes, weights] = gauss_legendre(n_quad);
    SymmetryReport rep;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int j = 0; j < n_quad; ++j) {
            const double x = mid + half * nodes[static_cast<std::size_t>(j)];
            const double w = half * weights[static_cast<std::size_t>(j)];
            const auto [px, qx] = evaluate(v, x);
            const auto [pr, qr] = evaluate(v, kPi - x);
            rep.defect_p += w * std::abs(pr + px);
            rep.defect_q += w * std::abs(qr - qx);
        }
    }
    rep.satisfied = std::max(rep.defect_p, rep.defect_q) <= kSymmetryTolerance;
    return rep;
}

namespace detail {

inline Term scaled(const Term& t, double factor) {
    Term r = t;
    if (r.poly.empty()) r.poly = {std::complex<double>(1.0)};
    for (auto& c : r.poly) c *= factor;
    return r;
}

inline Term reflected_term(const Term& t) {
    Term r = t;
    r.reflected = !t.reflected;
    r.lo = kPi - t.hi;
    r.hi = kPi - t.lo;
    if (std::abs(r.lo) < 1e-15) r.lo = 0.0;
    if (std::abs(r.hi - kPi) < 1e-15) r.hi = kPi;
    return r;
}

} // namespace detail

/// Projection onto the midpoint-symmetric class:
/// p'(x) = (p(x) - p(pi-x))/2, q'(x) = (q(x) + q(pi-x))/2, realized on the
/// term representation itself, so the output satisfies the symmetry to the
/// accuracy of whatever arithmetic later evaluates it.
inline PotentialSpec symmetrize(const PotentialSpec& v) {
    PotentialSpec r;
    for (const auto& t : v.p_terms) {
        r.p_terms.push_back(detail::scaled(t, 0.5));
        r.p_terms.push_back(detail::scaled(detail::reflected_term(t), -0.5));
    }
    for (const auto& t : v.q_terms) {
        r.q_terms.push_back(detail::scaled(t, 0.5));
        r.q_terms.push_back(detail::scaled(detail::reflected_term(t), 0.5));
    }
    return r;
}

} // namespace dirac

#endif
