#ifndef DIRAC_SPECTRUM_HPP
#define DIRAC_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <random>
#include <unordered_map>
#include <vector>

#include "dirac/determinant.hpp"

namespace dirac {

struct LambdaBox {
    double re_lo = -5.0, re_hi = 5.0, im_lo = -5.0, im_hi = 5.0;

    void validate() const {
        if (!(re_lo < re_hi) || !(im_lo < im_hi))
            throw OutOfDomain("lambda box must have re_lo < re_hi and im_lo < im_hi");
    }
    Complex corner_ll() const { return {re_lo, im_lo}; }
    Complex corner_lr() const { return {re_hi, im_lo}; }
    Complex corner_ur() const { return {re_hi, im_hi}; }
    Complex corner_ul() const { return {re_lo, im_hi}; }
    Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
    double diameter() const { return std::hypot(re_hi - re_lo, im_hi - im_lo); }
    LambdaBox dilated(double factor) const {
        const double cr = 0.5 * (re_lo + re_hi), ci = 0.5 * (im_lo + im_hi);
        const double hw = 0.5 * (re_hi - re_lo) * factor, hh = 0.5 * (im_hi - im_lo) * factor;
        return {cr - hw, cr + hw, ci - hh, ci + hh};
    }
};

enum class SpectrumVerdict { FINITE_LIST, EMPTY_IN_BOX, IDENTICALLY_ZERO };

inline const char* to_string(SpectrumVerdict v) {
    switch (v) {
        case SpectrumVerdict::FINITE_LIST: return "FINITE_LIST";
        case SpectrumVerdict::EMPTY_IN_BOX: return "EMPTY_IN_BOX";
        case SpectrumVerdict::IDENTICALLY_ZERO: return "IDENTICALLY_ZERO";
    }
    return "?";
}

struct Eigenvalue {
    Complex lambda;
    int multiplicity = 1;
    double residual = 0.0; ///< |Delta(lambda)| after polishing
    bool newton_converged = true;
};

struct SpectrumReport {
    SpectrumVerdict verdict = SpectrumVerdict::EMPTY_IN_BOX;
    std::vector<Eigenvalue> eigenvalues; ///< sorted by (Re, Im)
    int total_count = 0;
    double delta_scale = 1.0; ///< max |Delta| seen on the outer contour
};

namespace detail {

/// Cached double-precision (Delta, dDelta) evaluations plus direct access
/// to the compensated path. Pure function of lambda, so caching is sound;
/// subdivision re-walks shared box edges constantly.
class DeltaMap {
public:
    DeltaMap(const BoundaryMatrix& a, const PotentialSpec& v, const IntegratorConfig& cfg)
        : a_(a), v_(v), cfg_(cfg) {}

    std::pair<Complex, Complex> at(Complex lambda) {
        Key k;
        const double re = lambda.real(), im = lambda.imag();
        std::memcpy(&k.re_bits, &re, 8);
        std::memcpy(&k.im_bits, &im, 8);
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const auto dv = delta_core<double>(a_, v_, cx_from_std<double>(lambda), cfg_);
        auto value = std::pair{to_std(dv.value), to_std(dv.derivative)};
        cache_.emplace(k, value);
        return value;
    }

    std::pair<Complex, Complex> at_dd(Complex lambda) const {
        const auto dv = delta_core<DD>(a_, v_, cx_from_std<DD>(lambda), dd_config(cfg_));
        return {to_std(dv.value), to_std(dv.derivative)};
    }

private:
    struct Key {
        std::uint64_t re_bits = 0, im_bits = 0;
        bool operator==(const Key& o) const { return re_bits == o.re_bits && im_bits == o.im_bits; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<std::uint64_t>{}(k.re_bits * 0x9e3779b97f4a7c15ull ^ k.im_bits);
        }
    };

    BoundaryMatrix a_;
    PotentialSpec v_;
    IntegratorConfig cfg_;
    std::unordered_map<Key, std::pair<Complex, Complex>, KeyHash> cache_;
};

/// One directed contour edge of the winding integral.
struct EdgeNodes {
    std::vector<Complex> pos;
    std::vector<Complex> delta;
    std::vector<Complex> logderiv; ///< Delta'/Delta
};

/// Adaptive trapezoid of Delta'/Delta along [za, zb]. Refinement doubles
/// the node count until the trapezoid value settles and no adjacent pair of
/// samples jumps phase by more than pi/2 (which would allow the integral to
/// alias a whole winding). Non-convergence is reported as a suspected zero
/// on or near the contour.
inline Complex edge_integral(DeltaMap& map, Complex za, Complex zb, double tau) {
    constexpr int kInitial = 8;     // intervals
    constexpr int kMaxDoublings = 9; // up to 4096 intervals

    EdgeNodes nodes;
    auto sample = [&](Complex z) {
        const auto [d, dp] = map.at(z);
        if (std::abs(d) <= tau)
            throw ZeroOnContour("determinant magnitude below the contour floor");
        nodes.pos.push_back(z);
        nodes.delta.push_back(d);
        nodes.logderiv.push_back(dp / d);
    };

    for (int i = 0; i <= kInitial; ++i)
        sample(za + (zb - za) * (static_cast<double>(i) / kInitial));

    auto trapezoid = [&]() {
        Complex acc = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.pos.size(); ++i)
            acc += 0.5 * (nodes.logderiv[i] + nodes.logderiv[i + 1]) * (nodes.pos[i + 1] - nodes.pos[i]);
        return acc;
    };
    auto max_phase_jump = [&]() {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.delta.size(); ++i)
            m = std::max(m, std::abs(std::arg(nodes.delta[i + 1] / nodes.delta[i])));
        return m;
    };

    Complex prev = trapezoid();
    for (int level = 0; level < kMaxDoublings; ++level) {
        // refine first, then compare across levels; the phase guard must
        // hold on the finer grid before a value is accepted
        EdgeNodes refined;
        const std::size_t n = nodes.pos.size();
        refined.pos.reserve(2 * n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            refined.pos.push_back(nodes.pos[i]);
            refined.delta.push_back(nodes.delta[i]);
            refined.logderiv.push_back(nodes.logderiv[i]);
            const Complex mid = 0.5 * (nodes.pos[i] + nodes.pos[i + 1]);
            const auto [d, dp] = map.at(mid);
            if (std::abs(d) <= tau)
                throw ZeroOnContour("determinant magnitude below the contour floor");
            refined.pos.push_back(mid);
            refined.delta.push_back(d);
            refined.logderiv.push_back(dp / d);
        }
        refined.pos.push_back(nodes.pos.back());
        refined.delta.push_back(nodes.delta.back());
        refined.logderiv.push_back(nodes.logderiv.back());
        nodes = std::move(refined);

        const Complex cur = trapezoid();
        if (max_phase_jump() < kPi / 2 && std::abs(cur - prev) <= 0.05) return cur;
        prev = cur;
    }
    throw ZeroOnContour("contour integral did not converge; zero suspected near the boundary");
}

/// Winding number of Delta around the box, with the residual-gap check.
/// Returns the count and (through `scale_out`) the largest |Delta| sampled.
inline int winding_count(DeltaMap& map, const LambdaBox& box, double* scale_out = nullptr) {
    box.validate();
    // set the contour floor from a coarse pass over the four edges
    double scale = 0.0;
    const std::array<Complex, 4> corners{box.corner_ll(), box.corner_lr(), box.corner_ur(),
                                         box.corner_ul()};
    for (int e = 0; e < 4; ++e) {
        const Complex za = corners[static_cast<std::size_t>(e)];
        const Complex zb = corners[static_cast<std::size_t>((e + 1) % 4)];
        for (int i = 0; i <= 8; ++i) {
            const auto [d, dp] = map.at(za + (zb - za) * (i / 8.0));
            scale = std::max(scale, std::abs(d));
            (void)dp;
        }
    }
    if (scale_out != nullptr) *scale_out = scale;
    const double tau = 1e-12 * scale;

    Complex total = 0.0;
    for (int e = 0; e < 4; ++e)
        total += edge_integral(map, corners[static_cast<std::size_t>(e)],
                               corners[static_cast<std::size_t>((e + 1) % 4)], tau);

    const Complex w = total / Complex(0.0, 2.0 * kPi);
    const double rounded = std::round(w.real());
    if (std::abs(w.real() - rounded) > 0.2 || std::abs(w.imag()) > 0.2)
        throw ZeroOnContour("winding integral residual gap too large");
    if (rounded < -0.5) throw Error("negative winding count; Delta is not analytic?");
    return static_cast<int>(rounded);
}

} // namespace detail

/// Probes Delta at 16 fixed pseudo-random points of [-8,8]^2 in compensated
/// arithmetic. All magnitudes below 1e-10 * max(1, max |a_jk|^2) is treated
/// as an identically vanishing determinant. A sampling heuristic: an entire
/// function of exponential type vanishing at that many spread points is
/// identically zero for every practical purpose, but this is not a proof.
inline bool screen_identically_zero(const BoundaryMatrix& a, const PotentialSpec& v,
                                    const IntegratorConfig& cfg = {}) {
    const double m = a.max_abs_entry();
    const double threshold = 1e-10 * std::max(1.0, m * m);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    detail::DeltaMap map(a, v, cfg);
    for (int i = 0; i < 16; ++i) {
        const Complex lambda(u(rng), u(rng));
        const auto [d, dp] = map.at_dd(lambda);
        (void)dp;
        if (std::abs(d) > threshold) return false;
    }
    return true;
}

/// Number of zeros of Delta (with multiplicity) inside the box, by the
/// argument principle. Pre-screens the identically-zero degeneracy.
inline int count_zeros(const BoundaryMatrix& a, const PotentialSpec& v, const LambdaBox& box,
                       const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    if (screen_identically_zero(a, v, cfg)) throw IdenticallyZero();
    detail::DeltaMap map(a, v, cfg);
    return detail::winding_count(map, box);
}

namespace detail {

struct SubdivisionContext {
    DeltaMap* map;
    double scale = 1.0;
    double cluster_tol = 1e-6;
    std::vector<Eigenvalue>* found;
};

/// Modified Newton from the box center. Steps are capped at a few box
/// diameters and the result must stay inside the box: the winding count
/// proved the zero is in there, and an iterate that leaves (the determinant
/// is near-periodic in Re lambda, so far-away translates attract) would be
/// double-counted by the caller's merge. Returns false on escape so the
/// caller can shrink the box and try again closer to the zero.
inline bool polish_root(const SubdivisionContext& ctx, const LambdaBox& box, int multiplicity,
                        bool force_accept, Eigenvalue& out) {
    const Complex z0 = box.center();
    const double step_cap = 4.0 * box.diameter() + 1e-12;
    out.multiplicity = multiplicity;
    Complex z = z0;
    Complex best_z = z0;
    double best_abs = std::abs(ctx.map->at_dd(z0).first);
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
        const auto [d, dp] = ctx.map->at_dd(z);
        const double ad = std::abs(d);
        if (ad < best_abs) {
            best_abs = ad;
            best_z = z;
        }
        if (ad == 0.0) {
            converged = true;
            break;
        }
        if (std::abs(dp) == 0.0) break;
        Complex step = static_cast<double>(multiplicity) * d / dp;
        if (std::abs(step) > step_cap) step *= step_cap / std::abs(step);
        z -= step;
        if (std::abs(step) <= 1e-13 * (1.0 + std::abs(z))) {
            converged = true;
            break;
        }
    }
    const auto [d_final, dp_final] = ctx.map->at_dd(z);
    (void)dp_final;
    if (std::abs(d_final) <= best_abs) {
        best_abs = std::abs(d_final);
        best_z = z;
    }
    const double pad = 1e-9 * (1.0 + std::abs(best_z));
    const bool inside = best_z.real() >= box.re_lo - pad && best_z.real() <= box.re_hi + pad &&
                        best_z.imag() >= box.im_lo - pad && best_z.imag() <= box.im_hi + pad;
    if (!inside && !force_accept) return false;
    out.lambda = best_z;
    out.residual = best_abs;
    out.newton_converged = converged && best_abs <= 1e-9 * ctx.scale;
    return true;
}

/// Recursive quadrisection. Split lines are jittered away from the exact
/// midline when a zero sits on (or too near) a trial line; the jitter
/// schedule is fixed, so runs are deterministic.
inline void subdivide(const SubdivisionContext& ctx, const LambdaBox& box, int count, int depth) {
    if (count == 0) return;
    if (count == 1 || box.diameter() <= ctx.cluster_tol || depth > 40) {
        const bool force = box.diameter() <= ctx.cluster_tol || depth > 40;
        Eigenvalue ev;
        if (polish_root(ctx, box, count, force, ev)) {
            ctx.found->push_back(ev);
            return;
        }
        // Newton escaped a count-1 box: fall through and quadrisect, so the
        // next attempt starts closer to the zero
    }

    static constexpr std::array<std::pair<double, double>, 6> kSplits{
        {{0.5, 0.5}, {0.537, 0.457}, {0.459, 0.547}, {0.583, 0.411}, {0.417, 0.589}, {0.532, 0.468}}};

    for (const auto& [fx, fy] : kSplits) {
        const double rm = box.re_lo + fx * (box.re_hi - box.re_lo);
        const double im = box.im_lo + fy * (box.im_hi - box.im_lo);
        const std::array<LambdaBox, 4> quads{
            LambdaBox{box.re_lo, rm, box.im_lo, im}, LambdaBox{rm, box.re_hi, box.im_lo, im},
            LambdaBox{box.re_lo, rm, im, box.im_hi}, LambdaBox{rm, box.re_hi, im, box.im_hi}};
        std::array<int, 4> counts{};
        bool ok = true;
        int sum = 0;
        try {
            for (std::size_t q = 0; q < 4; ++q) {
                counts[q] = winding_count(*ctx.map, quads[q]);
                sum += counts[q];
            }
        } catch (const ZeroOnContour&) {
            ok = false;
        }
        if (ok && sum == count) {
            for (std::size_t q = 0; q < 4; ++q)
                subdivide(ctx, quads[q], counts[q], depth + 1);
            return;
        }
    }
    throw ZeroOnContour("could not separate zeros by subdivision");
}

} // namespace detail

/// Locates the eigenvalues in the box: argument-principle count, recursive
/// quadrisection until each sub-box isolates one zero (or a cluster at the
/// resolution floor, reported with its winding multiplicity), then modified
/// Newton with the analytic derivative, in compensated arithmetic.
inline SpectrumReport find_eigenvalues(const BoundaryMatrix& a, const PotentialSpec& v,
                                       const LambdaBox& box, const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    box.validate();
    SpectrumReport report;
    if (screen_identically_zero(a, v, cfg)) {
        report.verdict = SpectrumVerdict::IDENTICALLY_ZERO;
        return report;
    }

    detail::DeltaMap map(a, v, cfg);
    double scale = 1.0;
    const int total = detail::winding_count(map, box, &scale);
    report.delta_scale = std::max(scale, 1e-300);
    if (total == 0) {
        report.verdict = SpectrumVerdict::EMPTY_IN_BOX;
        return report;
    }

    std::vector<Eigenvalue> found;
    detail::SubdivisionContext ctx{&map, report.delta_scale, 1e-6, &found};
    detail::subdivide(ctx, box, total, 0);

    // merge duplicates (a zero split across touching sub-boxes)
    std::sort(found.begin(), found.end(), [](const Eigenvalue& l, const Eigenvalue& r) {
        if (l.lambda.real() != r.lambda.real()) return l.lambda.real() < r.lambda.real();
        return l.lambda.imag() < r.lambda.imag();
    });
    for (const auto& ev : found) {
        if (!report.eigenvalues.empty()) {
            Eigenvalue& last = report.eigenvalues.back();
            if (std::abs(last.lambda - ev.lambda) <= 1e-8 * (1.0 + std::abs(ev.lambda))) {
                last.multiplicity += ev.multiplicity;
                last.residual = std::max(last.residual, ev.residual);
                last.newton_converged = last.newton_converged && ev.newton_converged;
                continue;
            }
        }
        report.eigenvalues.push_back(ev);
    }
    report.total_count = 0;
    for (const auto& ev : report.eigenvalues) report.total_count += ev.multiplicity;
    report.verdict = SpectrumVerdict::FINITE_LIST;
    return report;
}

struct Theorem1Report {
    double max_deviation = 0.0;
    Complex j0;
    bool pass = false;
};

/// Samples Delta on a grid and checks it equals J0 = J12 + J34 everywhere,
/// which is what the minor constraints plus the midpoint symmetry of the
/// potential force. Hypothesis failures throw rather than "fail".
inline Theorem1Report verify_theorem1(const BoundaryMatrix& a, const PotentialSpec& v, int grid_n,
                                      const LambdaBox& box, const IntegratorConfig& cfg = {}) {
    if (!check_rank(a)) throw RankDeficient();
    box.validate();
    if (!classify(a).theorem1_applicable)
        throw HypothesisViolated(HypothesisViolated::Which::BoundaryMinors,
                                 "boundary matrix fails J14 = J23 = J13 + J24 = 0");
    if (!symmetry_report(v).satisfied)
        throw HypothesisViolated(HypothesisViolated::Which::PotentialSymmetry,
                                 "potential fails p(pi-x) = -p(x), q(pi-x) = q(x)");

    Theorem1Report rep;
    rep.j0 = minors(a).J0;
    detail::DeltaMap map(a, v, cfg);
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const double re = grid_n == 1 ? 0.5 * (box.re_lo + box.re_hi)
                                          : box.re_lo + (box.re_hi - box.re_lo) * i / (grid_n - 1);
            const double im = grid_n == 1 ? 0.5 * (box.im_lo + box.im_hi)
                                          : box.im_lo + (box.im_hi - box.im_lo) * j / (grid_n - 1);
            const auto [d, dp] = map.at_dd({re, im});
            (void)dp;
            rep.max_deviation = std::max(rep.max_deviation, std::abs(d - rep.j0));
        }
    }
    rep.pass = rep.max_deviation <= 1e-8 * std::max(1.0, std::abs(rep.j0));
    return rep;
}

} // namespace dirac

#endif
