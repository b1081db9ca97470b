#ifndef DIRAC_DETERMINANT_HPP
#define DIRAC_DETERMINANT_HPP

#include <complex>
#include <utility>

#include "dirac/boundary.hpp"
#include "dirac/integrator.hpp"

namespace dirac {

/// Values of the two boundary forms on one solution column with endpoint
/// values y0 = y(0), ypi = y(pi).
struct BoundaryFormValue {
    Complex U1, U2;
};

inline BoundaryFormValue apply_boundary_forms(const BoundaryMatrix& a,
                                              std::pair<Complex, Complex> y0,
                                              std::pair<Complex, Complex> ypi) {
    BoundaryFormValue v;
    v.U1 = a(1, 1) * y0.first + a(1, 2) * y0.second + a(1, 3) * ypi.first + a(1, 4) * ypi.second;
    v.U2 = a(2, 1) * y0.first + a(2, 2) * y0.second + a(2, 3) * ypi.first + a(2, 4) * ypi.second;
    return v;
}

namespace detail {

template <class R>
struct DeltaValue {
    Cx<R> value;
    Cx<R> derivative; ///< d(delta)/d(lambda)
};

/// Wronskian guard for the determinant assembly. Where the entries have
/// grown to magnitude m, the determinant is a cancellation of products of
/// size m^2 and cannot sit closer to 1 than m^2 times the working epsilon,
/// so the defect is judged relative to that scale.
template <class R>
void check_wronskian_scaled(const Mat2<R>& y, const IntegratorConfig& cfg) {
    const std::complex<double> d = to_std(y.det());
    const double m = matmag(y);
    if (std::abs(d - 1.0) > cfg.wronskian_tol * std::max(1.0, m * m))
        throw ToleranceNotMet("Wronskian defect " + std::to_string(std::abs(d - 1.0)) +
                              " exceeds tolerance");
}

/// Assembles det[U_i(E^k)] and its lambda-derivative from the endpoint
/// matrices of the fundamental system anchored at pi/2.
template <class R>
DeltaValue<R> delta_core(const BoundaryMatrix& a, const PotentialSpec& v, const Cx<R>& lambda,
                         const IntegratorConfig& cfg) {
    const EndpointData<R> ep = endpoints_with_derivative<R>(v, lambda, cfg, kPi / 2);
    check_wronskian_scaled(ep.y0, cfg);
    check_wronskian_scaled(ep.ypi, cfg);

    Cx<R> arow[2][4];
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 4; ++j) arow[i - 1][j - 1] = cx_from_std<R>(a(i, j));

    auto uform = [&](const Mat2<R>& m0, const Mat2<R>& mpi, int i, int k) {
        const Cx<R>& y01 = k == 1 ? m0.e11 : m0.e12;
        const Cx<R>& y02 = k == 1 ? m0.e21 : m0.e22;
        const Cx<R>& yp1 = k == 1 ? mpi.e11 : mpi.e12;
        const Cx<R>& yp2 = k == 1 ? mpi.e21 : mpi.e22;
        return arow[i - 1][0] * y01 + arow[i - 1][1] * y02 + arow[i - 1][2] * yp1 +
               arow[i - 1][3] * yp2;
    };

    const Cx<R> u11 = uform(ep.y0, ep.ypi, 1, 1), u12 = uform(ep.y0, ep.ypi, 1, 2);
    const Cx<R> u21 = uform(ep.y0, ep.ypi, 2, 1), u22 = uform(ep.y0, ep.ypi, 2, 2);
    const Cx<R> d11 = uform(ep.w0, ep.wpi, 1, 1), d12 = uform(ep.w0, ep.wpi, 1, 2);
    const Cx<R> d21 = uform(ep.w0, ep.wpi, 2, 1), d22 = uform(ep.w0, ep.wpi, 2, 2);

    DeltaValue<R> out;
    out.value = u11 * u22 - u12 * u21;
    out.derivative = d11 * u22 + u11 * d22 - d12 * u21 - u12 * d21;
    return out;
}

} // namespace detail

/// Characteristic determinant Delta(lambda) of the boundary-value problem,
/// built on the fundamental system anchored at pi/2 so that values, not just
/// zeros, are reproducible.
inline Complex characteristic_determinant(const BoundaryMatrix& a, const PotentialSpec& v,
                                          Complex lambda, const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    return to_std(detail::delta_core<double>(a, v, cx_from_std<double>(lambda), cfg).value);
}

/// Delta and d(Delta)/d(lambda) together (the derivative comes from the
/// jointly integrated variational system, not finite differences).
inline std::pair<Complex, Complex> characteristic_determinant_with_derivative(
    const BoundaryMatrix& a, const PotentialSpec& v, Complex lambda,
    const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    const auto dv = detail::delta_core<double>(a, v, cx_from_std<double>(lambda), cfg);
    return {to_std(dv.value), to_std(dv.derivative)};
}

/// Same evaluation carried in compensated double-double arithmetic, for the
/// regimes where Delta cancels below what double can resolve (large |Im
/// lambda|, identically-vanishing determinants, multiple-root polishing).
inline std::pair<Complex, Complex> characteristic_determinant_dd(const BoundaryMatrix& a,
                                                                 const PotentialSpec& v,
                                                                 Complex lambda,
                                                                 const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    const auto dv = detail::delta_core<DD>(a, v, cx_from_std<DD>(lambda), detail::dd_config(cfg));
    return {to_std(dv.value), to_std(dv.derivative)};
}

/// Closed form of the zero-potential determinant,
///   Delta0(lambda) = J0 + J1 cos(lambda pi) - J2 sin(lambda pi),
/// derived and exactness-checked by the symbolic engine
/// (derive_unperturbed_form) and cross-checked numerically against
/// characteristic_determinant at V = 0.
inline Complex unperturbed_determinant(const BoundaryMatrix& a, Complex lambda) {
    if (!check_rank(a)) throw RankDeficient();
    const Minors m = minors(a);
    const Complex th = lambda * kPi;
    return m.J0 + m.J1 * std::cos(th) - m.J2 * std::sin(th);
}

} // namespace dirac

#endif
