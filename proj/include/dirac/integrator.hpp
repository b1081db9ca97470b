#ifndef DIRAC_INTEGRATOR_HPP
#define DIRAC_INTEGRATOR_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "dirac/cx.hpp"
#include "dirac/errors.hpp"
#include "dirac/potential.hpp"

namespace dirac {

/// Tolerances and method selection for the fundamental-matrix propagation.
struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = kPi / 4;
    double wronskian_tol = 1e-10;
    enum class Method { RK45, Taylor } method = Method::RK45;
};

/// Value of the 2x2 fundamental solution matrix E(at, lambda), equal to the
/// identity at the anchor point. Its determinant is identically 1; the
/// measured defect is a correctness signal for the propagation.
struct FundamentalMatrix {
    std::array<std::complex<double>, 4> entries{}; // e11, e12, e21, e22
    double anchor = 0.0;
    double at = 0.0;
    std::complex<double> lambda;

    std::complex<double> e(int i, int j) const {
        return entries[static_cast<std::size_t>((i - 1) * 2 + (j - 1))];
    }
    std::complex<double> det() const { return e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1); }
    double wronskian_defect() const { return std::abs(det() - 1.0); }
};

namespace detail {

template <class R>
struct Mat2 {
    Cx<R> e11, e12, e21, e22;

    static Mat2 identity() {
        using ST = ScalarTraits<R>;
        return {Cx<R>{ST::from_double(1.0)}, Cx<R>{}, Cx<R>{}, Cx<R>{ST::from_double(1.0)}};
    }
    Cx<R> det() const { return e11 * e22 - e12 * e21; }
};

template <class R>
Mat2<R> operator*(const Mat2<R>& a, const Mat2<R>& b) {
    return {a.e11 * b.e11 + a.e12 * b.e21, a.e11 * b.e12 + a.e12 * b.e22,
            a.e21 * b.e11 + a.e22 * b.e21, a.e21 * b.e12 + a.e22 * b.e22};
}

template <class R>
Mat2<R> operator+(const Mat2<R>& a, const Mat2<R>& b) {
    return {a.e11 + b.e11, a.e12 + b.e12, a.e21 + b.e21, a.e22 + b.e22};
}

template <class R>
Mat2<R> scaled(const Mat2<R>& a, const R& s) {
    return {a.e11 * Cx<R>{s}, a.e12 * Cx<R>{s}, a.e21 * Cx<R>{s}, a.e22 * Cx<R>{s}};
}

/// B^{-1} M for B = [[0,1],[-1,0]]: maps [[r1],[r2]] to [[-r2],[r1]].
template <class R>
Mat2<R> b_inverse_times(const Mat2<R>& m) {
    return {-m.e21, -m.e22, m.e11, m.e12};
}

template <class R>
double matmag(const Mat2<R>& m) {
    return std::max(std::max(mag(m.e11), mag(m.e12)), std::max(mag(m.e21), mag(m.e22)));
}

inline std::complex<double> to_std_det(const Mat2<double>& m) { return to_std(m.det()); }
inline std::complex<double> to_std_det(const Mat2<DD>& m) { return to_std(m.det()); }

/// Coefficient matrix of the first-order system y' = M(x) y obtained from
/// B y' + V y = lambda y:  M = [[q, -(lambda+p)], [lambda-p, -q]].
template <class R>
Mat2<R> coefficient_matrix(const Cx<R>& p, const Cx<R>& q, const Cx<R>& lambda) {
    return {q, -(lambda + p), lambda - p, -q};
}

// ---------------------------------------------------------------------------
// Taylor propagation: the coefficients are piecewise analytic (polynomial
// times trigonometric), so the solution series about any interior point is
// cheap to generate via the convolution recurrence
//   (n+1) Y_{n+1} = sum_j M_j Y_{n-j},   (n+1) W_{n+1} = sum_j M_j W_{n-j} + B^{-1} Y_n.
// The step size is chosen after the series is built, from the magnitude of
// its trailing coefficients, so no step is ever rejected.
// ---------------------------------------------------------------------------

template <class R>
void taylor_segment(const PotentialSpec& v, const Cx<R>& lambda, double x0, double x1,
                    Mat2<R>& y, Mat2<R>* w, const IntegratorConfig& cfg) {
    using ST = ScalarTraits<R>;
    const int order = ST::taylor_order;
    const std::size_t len = static_cast<std::size_t>(order) + 1;
    const double cover = 0.5 * (x0 + x1);
    const double dir = x1 >= x0 ? 1.0 : -1.0;

    std::vector<Cx<R>> pser, qser;
    std::vector<Mat2<R>> mser(len), yser(len), wser(len);

    // Position and remaining distance live in the working precision. With
    // double-rounded positions every step boundary would shift the
    // coefficient argument by O(eps), which the growing solution amplifies
    // to ~1e-15 relative error per side, swamping the compensated path.
    R x = ST::from_double(x0);
    R rem = ST::from_double(x1) - x;
    int steps = 0;
    for (;;) {
        if (++steps > 20000) throw ToleranceNotMet("taylor step budget exhausted");
        sum_series<R>(v.p_terms, x, cover, order, pser);
        sum_series<R>(v.q_terms, x, cover, order, qser);
        for (std::size_t n = 0; n < len; ++n) {
            mser[n] = Mat2<R>{qser[n], -pser[n], -pser[n], -qser[n]};
            if (n == 0) {
                mser[0].e12 = mser[0].e12 - lambda;
                mser[0].e21 = mser[0].e21 + lambda;
            }
        }

        yser[0] = y;
        if (w != nullptr) wser[0] = *w;
        for (std::size_t n = 0; n + 1 < len; ++n) {
            // reciprocal taken in working precision: a double 1/(n+1) would
            // cap the whole series at double accuracy
            const R inv = ST::from_double(1.0) / ST::from_double(static_cast<double>(n + 1));
            Mat2<R> acc{};
            for (std::size_t j = 0; j <= n; ++j) acc = acc + mser[j] * yser[n - j];
            yser[n + 1] = scaled(acc, inv);
            if (w != nullptr) {
                Mat2<R> accw = b_inverse_times(yser[n]);
                for (std::size_t j = 0; j <= n; ++j) accw = accw + mser[j] * wser[n - j];
                wser[n + 1] = scaled(accw, inv);
            }
        }

        const double rem_d = to_double(rem);
        const double scale = std::max(matmag(y), w != nullptr ? matmag(*w) : 0.0);
        double tol = cfg.abs_tol + cfg.rel_tol * scale;
        tol = std::max(tol, ST::tol_floor * (scale + 1.0));

        double h = std::min(std::abs(rem_d), cfg.max_step);
        for (std::size_t m = len - 2; m < len; ++m) {
            double a = std::max(matmag(yser[m]), w != nullptr ? matmag(wser[m]) : 0.0);
            if (a > 0.0)
                h = std::min(h, 0.8 * std::pow(tol / a, 1.0 / static_cast<double>(m)));
        }
        if (h < 1e-9) throw ToleranceNotMet("taylor step size collapsed");

        const bool last = h >= std::abs(rem_d) * (1.0 - 1e-14);
        const R t = last ? rem : ST::from_double(dir * h);
        Mat2<R> ynew = yser[len - 1];
        for (std::size_t m = len - 1; m-- > 0;) ynew = scaled(ynew, t) + yser[m];
        y = ynew;
        if (w != nullptr) {
            Mat2<R> wnew = wser[len - 1];
            for (std::size_t m = len - 1; m-- > 0;) wnew = scaled(wnew, t) + wser[m];
            *w = wnew;
        }
        if (last) break;
        x = x + t;
        rem = rem - t;
    }
}

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 5(4) pair, double precision only.
// ---------------------------------------------------------------------------

struct Rk45State {
    std::array<Cx<double>, 8> v{}; // Y entries, then W entries (if used)
};

inline void rk45_segment(const PotentialSpec& pot, const Cx<double>& lambda, double x0, double x1,
                         Mat2<double>& y, Mat2<double>* w, const IntegratorConfig& cfg) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    const double cover = 0.5 * (x0 + x1);
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    const std::size_t n = w != nullptr ? 8 : 4;

    auto pack = [&](Rk45State& s) {
        s.v[0] = y.e11; s.v[1] = y.e12; s.v[2] = y.e21; s.v[3] = y.e22;
        if (w != nullptr) { s.v[4] = w->e11; s.v[5] = w->e12; s.v[6] = w->e21; s.v[7] = w->e22; }
    };
    auto unpack = [&](const Rk45State& s) {
        y = {s.v[0], s.v[1], s.v[2], s.v[3]};
        if (w != nullptr) *w = {s.v[4], s.v[5], s.v[6], s.v[7]};
    };

    auto rhs = [&](double x, const Rk45State& s, Rk45State& out) {
        const Cx<double> p = eval_sum_frozen<double>(pot.p_terms, cover, x);
        const Cx<double> q = eval_sum_frozen<double>(pot.q_terms, cover, x);
        const Mat2<double> m = coefficient_matrix(p, q, lambda);
        const Mat2<double> ym{s.v[0], s.v[1], s.v[2], s.v[3]};
        const Mat2<double> dy = m * ym;
        out.v[0] = dy.e11; out.v[1] = dy.e12; out.v[2] = dy.e21; out.v[3] = dy.e22;
        if (w != nullptr) {
            const Mat2<double> wm{s.v[4], s.v[5], s.v[6], s.v[7]};
            const Mat2<double> dw = m * wm + b_inverse_times(ym);
            out.v[4] = dw.e11; out.v[5] = dw.e12; out.v[6] = dw.e21; out.v[7] = dw.e22;
        }
    };

    Rk45State s;
    pack(s);
    double x = x0;
    double h = std::min(cfg.max_step, std::abs(x1 - x0));
    int steps = 0;
    while (x != x1) {
        if (++steps > 2000000) throw ToleranceNotMet("rk45 step budget exhausted");
        h = std::min(h, std::abs(x1 - x));
        const double hs = dir * h;

        Rk45State k1, k2, k3, k4, k5, k6, k7, tmp;
        rhs(x, s, k1);
        auto stage = [&](double c, std::initializer_list<std::pair<double, const Rk45State*>> ks) {
            for (std::size_t i = 0; i < n; ++i) {
                Cx<double> acc{};
                for (const auto& [coef, k] : ks) acc += Cx<double>{coef} * k->v[i];
                tmp.v[i] = s.v[i] + Cx<double>{hs} * acc;
            }
            return x + c * hs;
        };
        rhs(stage(c2, {{a21, &k1}}), tmp, k2);
        rhs(stage(c3, {{a31, &k1}, {a32, &k2}}), tmp, k3);
        rhs(stage(c4, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), tmp, k4);
        rhs(stage(c5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), tmp, k5);
        rhs(stage(1.0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), tmp, k6);
        // 5th order solution (also the 7th stage position)
        Rk45State ynew;
        for (std::size_t i = 0; i < n; ++i)
            ynew.v[i] = s.v[i] + Cx<double>{hs} * (Cx<double>{b1} * k1.v[i] + Cx<double>{b3} * k3.v[i] +
                                                   Cx<double>{b4} * k4.v[i] + Cx<double>{b5} * k5.v[i] +
                                                   Cx<double>{b6} * k6.v[i]);
        rhs(x + hs, ynew, k7);

        double errnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Cx<double> err = Cx<double>{hs} * (Cx<double>{e1} * k1.v[i] + Cx<double>{e3} * k3.v[i] +
                                                     Cx<double>{e4} * k4.v[i] + Cx<double>{e5} * k5.v[i] +
                                                     Cx<double>{e6} * k6.v[i] + Cx<double>{e7} * k7.v[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(mag(s.v[i]), mag(ynew.v[i]));
            errnorm = std::max(errnorm, mag(err) / sc);
        }

        if (errnorm <= 1.0) {
            x = (h >= std::abs(x1 - x) * (1.0 - 1e-14)) ? x1 : x + hs;
            s = ynew;
        }
        const double factor = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (h < 1e-12) throw ToleranceNotMet("rk45 step size collapsed");
    }
    unpack(s);
}

/// Propagates Y (and optionally W = dY/dlambda) from `from` to `to`,
/// splitting at every interior breakpoint of the potential.
template <class R>
void propagate(const PotentialSpec& v, const Cx<R>& lambda, double from, double to, Mat2<R>& y,
               Mat2<R>* w, const IntegratorConfig& cfg) {
    if (from == to) return;
    std::vector<double> cuts;
    for (double b : breakpoints(v))
        if ((b > std::min(from, to)) && (b < std::max(from, to))) cuts.push_back(b);
    if (to < from) std::reverse(cuts.begin(), cuts.end());
    cuts.push_back(to);

    double x = from;
    for (double next : cuts) {
        if constexpr (std::is_same_v<R, double>) {
            if (cfg.method == IntegratorConfig::Method::RK45)
                rk45_segment(v, lambda, x, next, y, w, cfg);
            else
                taylor_segment(v, lambda, x, next, y, w, cfg);
        } else {
            taylor_segment(v, lambda, x, next, y, w, cfg);
        }
        x = next;
    }
}

template <class R>
struct EndpointData {
    Mat2<R> y0, ypi;  // E(0), E(pi)
    Mat2<R> w0, wpi;  // dE/dlambda at 0 and pi
};

/// Two-sided propagation from the anchor with the variational system,
/// yielding both endpoint matrices and their lambda-derivatives.
template <class R>
EndpointData<R> endpoints_with_derivative(const PotentialSpec& v, const Cx<R>& lambda,
                                          const IntegratorConfig& cfg, double anchor) {
    EndpointData<R> data;
    Mat2<R> y = Mat2<R>::identity(), w{};
    propagate(v, lambda, anchor, 0.0, y, &w, cfg);
    data.y0 = y;
    data.w0 = w;
    y = Mat2<R>::identity();
    w = Mat2<R>{};
    propagate(v, lambda, anchor, kPi, y, &w, cfg);
    data.ypi = y;
    data.wpi = w;
    return data;
}

template <class R>
void check_wronskian(const Mat2<R>& y, const IntegratorConfig& cfg) {
    const std::complex<double> d = to_std(y.det());
    if (std::abs(d - 1.0) > cfg.wronskian_tol)
        throw ToleranceNotMet("Wronskian defect " + std::to_string(std::abs(d - 1.0)) +
                              " exceeds tolerance");
}

/// Tolerances for the compensated-arithmetic path; always Taylor there.
inline IntegratorConfig dd_config(const IntegratorConfig& cfg) {
    IntegratorConfig c = cfg;
    c.rel_tol = 1e-26;
    c.abs_tol = 1e-26;
    c.method = IntegratorConfig::Method::Taylor;
    return c;
}

} // namespace detail

/// E(at, lambda) with E(anchor, lambda) = I. The integration lands exactly
/// on every piece breakpoint of the potential; backward runs integrate in
/// decreasing x rather than inverting matrices.
inline FundamentalMatrix fundamental_matrix(const PotentialSpec& v, std::complex<double> lambda,
                                            double anchor, double at,
                                            const IntegratorConfig& cfg = {}) {
    if (!(anchor >= 0.0 && anchor <= kPi)) throw OutOfDomain("anchor outside [0, pi]");
    if (!(at >= 0.0 && at <= kPi)) throw OutOfDomain("evaluation point outside [0, pi]");
    detail::Mat2<double> y = detail::Mat2<double>::identity();
    detail::propagate<double>(v, cx_from_std<double>(lambda), anchor, at, y, nullptr, cfg);
    detail::check_wronskian(y, cfg);
    FundamentalMatrix f;
    f.entries = {to_std(y.e11), to_std(y.e12), to_std(y.e21), to_std(y.e22)};
    f.anchor = anchor;
    f.at = at;
    f.lambda = lambda;
    return f;
}

/// E(0, lambda) and E(pi, lambda) from two one-sided runs off the anchor.
inline std::pair<FundamentalMatrix, FundamentalMatrix> endpoints(const PotentialSpec& v,
                                                                 std::complex<double> lambda,
                                                                 double anchor,
                                                                 const IntegratorConfig& cfg = {}) {
    return {fundamental_matrix(v, lambda, anchor, 0.0, cfg),
            fundamental_matrix(v, lambda, anchor, kPi, cfg)};
}

/// Entries of the fundamental matrix anchored at 0, evaluated at pi, in the
/// sign convention with top row (c1, -s2) and bottom row (s1, c2).
struct CsEntries {
    std::complex<double> c1, s1, s2, c2;
};

inline CsEntries remark2_entries(const PotentialSpec& v, std::complex<double> lambda,
                                 const IntegratorConfig& cfg = {}) {
    const FundamentalMatrix f = fundamental_matrix(v, lambda, 0.0, kPi, cfg);
    return {f.e(1, 1), f.e(2, 1), -f.e(1, 2), f.e(2, 2)};
}

/// fundamental_matrix carried in compensated double-double arithmetic,
/// rounded to double on return. For verification paths whose tolerances sit
/// near or below the double cancellation floor.
inline FundamentalMatrix fundamental_matrix_dd(const PotentialSpec& v, std::complex<double> lambda,
                                               double anchor, double at,
                                               const IntegratorConfig& cfg = {}) {
    if (!(anchor >= 0.0 && anchor <= kPi)) throw OutOfDomain("anchor outside [0, pi]");
    if (!(at >= 0.0 && at <= kPi)) throw OutOfDomain("evaluation point outside [0, pi]");
    detail::Mat2<DD> y = detail::Mat2<DD>::identity();
    detail::propagate<DD>(v, cx_from_std<DD>(lambda), anchor, at, y, nullptr,
                          detail::dd_config(cfg));
    detail::check_wronskian(y, cfg);
    FundamentalMatrix f;
    f.entries = {to_std(y.e11), to_std(y.e12), to_std(y.e21), to_std(y.e22)};
    f.anchor = anchor;
    f.at = at;
    f.lambda = lambda;
    return f;
}

inline CsEntries remark2_entries_dd(const PotentialSpec& v, std::complex<double> lambda,
                                    const IntegratorConfig& cfg = {}) {
    const FundamentalMatrix f = fundamental_matrix_dd(v, lambda, 0.0, kPi, cfg);
    return {f.e(1, 1), f.e(2, 1), -f.e(1, 2), f.e(2, 2)};
}

} // namespace dirac

#endif
