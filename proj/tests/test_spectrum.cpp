#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dirac/spectrum.hpp"

using namespace dirac;
using std::complex;

namespace {

IntegratorConfig taylor_cfg() {
    IntegratorConfig cfg;
    cfg.method = IntegratorConfig::Method::Taylor;
    return cfg;
}

const BoundaryMatrix kDirichlet = BoundaryMatrix::from_rows({1, 0, 0, 0}, {0, 0, 1, 0});
const BoundaryMatrix kPeriodic = BoundaryMatrix::from_rows({1, 0, -1, 0}, {0, 1, 0, -1});
const BoundaryMatrix kCauchy = BoundaryMatrix::from_rows({1, 0, 0, 0}, {0, 1, 0, 0});

BoundaryMatrix rank_one_family(double b) {
    return BoundaryMatrix::from_rows({1, 0, 0, b}, {0, 1, b, 0});
}

} // namespace

TEST_CASE("zero counting against the closed form") {
    const IntegratorConfig cfg = taylor_cfg();
    SUBCASE("Dirichlet, three integer zeros") {
        CHECK(count_zeros(kDirichlet, PotentialSpec::zero(), {0.5, 3.5, -1.0, 1.0}, cfg) == 3);
    }
    SUBCASE("periodic, one double zero") {
        CHECK(count_zeros(kPeriodic, PotentialSpec::zero(), {1.5, 2.5, -1.0, 1.0}, cfg) == 2);
    }
    SUBCASE("empty spectrum of the b=2 instance") {
        CHECK(count_zeros(rank_one_family(2.0), PotentialSpec::cos_sin(), {-5.0, 5.0, -5.0, 5.0},
                          cfg) == 0);
    }
    SUBCASE("identically-zero determinant is pre-screened") {
        CHECK_THROWS_AS(count_zeros(rank_one_family(1.0), PotentialSpec::cos_sin(),
                                    {-1.0, 1.0, -1.0, 1.0}, cfg),
                        IdenticallyZero);
    }
    SUBCASE("zero on the contour is reported") {
        CHECK_THROWS_AS(count_zeros(kDirichlet, PotentialSpec::zero(), {1.0, 3.0, -1.0, 1.0}, cfg),
                        ZeroOnContour);
    }
}

TEST_CASE("count additivity over a quadrisection") {
    const IntegratorConfig cfg = taylor_cfg();
    const LambdaBox box{0.7, 3.45, -0.8, 0.77};
    detail::DeltaMap map(kDirichlet, PotentialSpec::zero(), cfg);
    const int total = detail::winding_count(map, box);
    const double rm = 0.5 * (box.re_lo + box.re_hi);
    const double im = 0.5 * (box.im_lo + box.im_hi);
    int sum = 0;
    sum += detail::winding_count(map, {box.re_lo, rm, box.im_lo, im});
    sum += detail::winding_count(map, {rm, box.re_hi, box.im_lo, im});
    sum += detail::winding_count(map, {box.re_lo, rm, im, box.im_hi});
    sum += detail::winding_count(map, {rm, box.re_hi, im, box.im_hi});
    CHECK(total == 3);
    CHECK(sum == total);
}

TEST_CASE("eigenvalues of the Dirichlet problem at V = 0") {
    const SpectrumReport rep =
        find_eigenvalues(kDirichlet, PotentialSpec::zero(), {0.5, 3.5, -1.0, 1.0}, taylor_cfg());
    CHECK(rep.verdict == SpectrumVerdict::FINITE_LIST);
    REQUIRE(rep.eigenvalues.size() == 3);
    CHECK(rep.total_count == 3);
    for (int n = 1; n <= 3; ++n) {
        const Eigenvalue& ev = rep.eigenvalues[static_cast<std::size_t>(n - 1)];
        CHECK(std::abs(ev.lambda - complex<double>(n, 0.0)) <= 1e-9);
        CHECK(ev.multiplicity == 1);
        CHECK(ev.newton_converged);
        CHECK(ev.residual <= 1e-9 * rep.delta_scale);
    }
}

TEST_CASE("double zero of the periodic problem") {
    const SpectrumReport rep =
        find_eigenvalues(kPeriodic, PotentialSpec::zero(), {1.5, 2.5, -1.0, 1.0}, taylor_cfg());
    CHECK(rep.verdict == SpectrumVerdict::FINITE_LIST);
    REQUIRE(rep.eigenvalues.size() == 1);
    CHECK(rep.eigenvalues[0].multiplicity == 2);
    CHECK(rep.total_count == 2);
    CHECK(std::abs(rep.eigenvalues[0].lambda - complex<double>(2.0, 0.0)) <= 1e-9);
}

TEST_CASE("degenerate verdicts") {
    SUBCASE("entire-plane spectrum at b = 1 with symmetric potential") {
        const SpectrumReport rep = find_eigenvalues(rank_one_family(1.0), PotentialSpec::cos_sin(),
                                                    {-5.0, 5.0, -5.0, 5.0}, taylor_cfg());
        CHECK(rep.verdict == SpectrumVerdict::IDENTICALLY_ZERO);
        CHECK(rep.eigenvalues.empty());
    }
    SUBCASE("empty spectrum at b = 2 with symmetric potential") {
        const SpectrumReport rep = find_eigenvalues(rank_one_family(2.0), PotentialSpec::cos_sin(),
                                                    {-5.0, 5.0, -5.0, 5.0}, taylor_cfg());
        CHECK(rep.verdict == SpectrumVerdict::EMPTY_IN_BOX);
        CHECK(rep.eigenvalues.empty());
        CHECK(rep.total_count == 0);
    }
}

TEST_CASE("identically-zero screen") {
    SUBCASE("b=1 with symmetric potentials") {
        CHECK(screen_identically_zero(rank_one_family(1.0), PotentialSpec::cos_sin()));
        PotentialSpec v;
        v.p_terms.push_back({0.0, kPi, {{0.2, 0.1}}, TrigFactor{TrigFactor::Kind::Cos, 3}, false});
        v.q_terms.push_back({0.0, kPi, {{-0.4, 0.3}, {0.1, 0.0}}, std::nullopt, false});
        CHECK(screen_identically_zero(rank_one_family(1.0), symmetrize(v)));
    }
    SUBCASE("Dirichlet is not identically zero") {
        CHECK_FALSE(screen_identically_zero(kDirichlet, PotentialSpec::zero()));
    }
    SUBCASE("Cauchy determinant is 1 for any potential") {
        CHECK_FALSE(screen_identically_zero(kCauchy, PotentialSpec::zero()));
        CHECK_FALSE(screen_identically_zero(kCauchy, PotentialSpec::cos_sin()));
        PotentialSpec vx; // asymmetric
        vx.q_terms.push_back({0.0, kPi, {0.0, 1.0}, std::nullopt, false});
        CHECK_FALSE(screen_identically_zero(kCauchy, vx));
    }
}

TEST_CASE("constant-determinant verification") {
    SUBCASE("b=2 with cos/sin potential passes on a 6x6 grid") {
        const Theorem1Report rep = verify_theorem1(rank_one_family(2.0), PotentialSpec::cos_sin(),
                                                   6, {-5.0, 5.0, -5.0, 5.0}, taylor_cfg());
        CHECK(rep.pass);
        CHECK(std::abs(rep.j0 - complex<double>(-3.0)) < 1e-14);
        CHECK(rep.max_deviation <= 1e-8 * 3.0);
    }
    SUBCASE("asymmetric potential is rejected as a hypothesis violation") {
        PotentialSpec vx;
        vx.q_terms.push_back({0.0, kPi, {0.0, 1.0}, std::nullopt, false});
        try {
            verify_theorem1(rank_one_family(2.0), vx, 4, {-2.0, 2.0, -2.0, 2.0}, taylor_cfg());
            FAIL("expected HypothesisViolated");
        } catch (const HypothesisViolated& e) {
            CHECK(e.which == HypothesisViolated::Which::PotentialSymmetry);
        }
    }
    SUBCASE("Dirichlet matrix is rejected as a hypothesis violation") {
        try {
            verify_theorem1(kDirichlet, PotentialSpec::cos_sin(), 4, {-2.0, 2.0, -2.0, 2.0},
                            taylor_cfg());
            FAIL("expected HypothesisViolated");
        } catch (const HypothesisViolated& e) {
            CHECK(e.which == HypothesisViolated::Which::BoundaryMinors);
        }
    }
}

TEST_CASE("hypothesis necessity: breaking the symmetry moves the determinant") {
    // q(x) = x with the b=2 matrix: the determinant must leave J0 = -3 by
    // far more than the verification tolerance somewhere on the grid
    PotentialSpec vx;
    vx.q_terms.push_back({0.0, kPi, {0.0, 1.0}, std::nullopt, false});
    detail::DeltaMap map(rank_one_family(2.0), vx, taylor_cfg());
    double dev = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const complex<double> lambda(-5.0 + 2.5 * i, -5.0 + 2.5 * j);
            dev = std::max(dev, std::abs(map.at(lambda).first - complex<double>(-3.0)));
        }
    CHECK(dev > 1e-3);
}

TEST_CASE("eigenvalues of a real potential stay conjugate-symmetric") {
    const SpectrumReport rep =
        find_eigenvalues(kDirichlet, PotentialSpec::cos_sin(), {0.5, 3.5, -1.0, 1.0}, taylor_cfg());
    CHECK(rep.verdict == SpectrumVerdict::FINITE_LIST);
    CHECK(rep.total_count >= 1);
    for (const auto& ev : rep.eigenvalues) {
        bool has_partner = false;
        for (const auto& other : rep.eigenvalues)
            if (std::abs(std::conj(ev.lambda) - other.lambda) <= 1e-8) has_partner = true;
        CHECK(has_partner);
        CHECK(ev.residual <= 1e-9 * rep.delta_scale);
    }
}

TEST_CASE("box validation") {
    CHECK_THROWS_AS(count_zeros(kDirichlet, PotentialSpec::zero(), {2.0, 1.0, -1.0, 1.0}),
                    OutOfDomain);
}

namespace {

// Closed-form zeros of J0 + J1 cos(lambda pi) - J2 sin(lambda pi) inside a
// box, by substituting w = exp(i lambda pi), which turns the equation into
//   (J1 + iJ2)/2 w^2 + J0 w + (J1 - iJ2)/2 = 0,
// a quadratic whose roots map back to lambda = arg(w)/pi - i ln|w|/pi + 2k.
std::vector<complex<double>> closed_form_zeros(const Minors& m, const LambdaBox& box) {
    const complex<double> a = 0.5 * (m.J1 + complex<double>(0, 1) * m.J2);
    const complex<double> b = m.J0;
    const complex<double> c = 0.5 * (m.J1 - complex<double>(0, 1) * m.J2);
    const complex<double> disc = std::sqrt(b * b - 4.0 * a * c);
    std::vector<complex<double>> ws;
    for (const complex<double> w : {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)})
        if (std::isfinite(w.real()) && std::isfinite(w.imag()) && std::abs(w) > 1e-12)
            ws.push_back(w);

    std::vector<complex<double>> zeros;
    for (const complex<double> w : ws) {
        const complex<double> lambda0(std::arg(w) / kPi, -std::log(std::abs(w)) / kPi);
        const int k_lo = static_cast<int>(std::floor((box.re_lo - lambda0.real()) / 2.0)) - 1;
        const int k_hi = static_cast<int>(std::ceil((box.re_hi - lambda0.real()) / 2.0)) + 1;
        for (int k = k_lo; k <= k_hi; ++k) {
            const complex<double> z = lambda0 + 2.0 * static_cast<double>(k);
            if (z.real() > box.re_lo && z.real() < box.re_hi && z.imag() > box.im_lo &&
                z.imag() < box.im_hi)
                zeros.push_back(z);
        }
    }
    return zeros;
}

} // namespace

TEST_CASE("V = 0 eigenvalues match the closed-form roots for random matrices") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const IntegratorConfig cfg = taylor_cfg();
    const LambdaBox box{-2.3, 2.7, -1.1, 0.9};
    int tested = 0;
    for (int trial = 0; trial < 60 && tested < 12; ++trial) {
        BoundaryMatrix a;
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 4; ++j) a(i, j) = Complex(u(rng), u(rng));
        if (!check_rank(a)) continue;
        const Minors m = minors(a);
        // keep the w-quadratic nondegenerate and its roots well separated
        if (std::abs(m.J1 + Complex(0, 1) * m.J2) < 0.15) continue;
        const auto expected = closed_form_zeros(m, box);
        // skip instances with zeros too close to the contour or to each other
        bool awkward = false;
        for (const auto& z : expected) {
            if (std::min({z.real() - box.re_lo, box.re_hi - z.real(), z.imag() - box.im_lo,
                          box.im_hi - z.imag()}) < 0.08)
                awkward = true;
            for (const auto& y : expected)
                if (&y != &z && std::abs(y - z) < 0.05) awkward = true;
        }
        if (awkward) continue;
        ++tested;

        const SpectrumReport rep = find_eigenvalues(a, PotentialSpec::zero(), box, cfg);
        if (expected.empty()) {
            CHECK(rep.verdict == SpectrumVerdict::EMPTY_IN_BOX);
            continue;
        }
        REQUIRE(rep.verdict == SpectrumVerdict::FINITE_LIST);
        REQUIRE(rep.total_count == static_cast<int>(expected.size()));
        for (const auto& z : expected) {
            double best = 1e300;
            for (const auto& ev : rep.eigenvalues) best = std::min(best, std::abs(ev.lambda - z));
            CHECK(best <= 1e-9);
        }
    }
    CHECK(tested >= 8);
}

TEST_CASE("piecewise potential: counts, locations, and residuals stay consistent") {
    // two-piece real potential with an interior breakpoint
    PotentialSpec v;
    v.p_terms.push_back({0.0, 1.1, {0.4}, std::nullopt, false});
    v.p_terms.push_back({1.1, kPi, {-0.2}, TrigFactor{TrigFactor::Kind::Cos, 1}, false});
    v.q_terms.push_back({0.0, kPi, {0.3, -0.1}, std::nullopt, false});

    const IntegratorConfig cfg = taylor_cfg();
    const LambdaBox box{0.4, 3.6, -0.9, 0.9};
    const SpectrumReport rep = find_eigenvalues(kDirichlet, v, box, cfg);
    REQUIRE(rep.verdict == SpectrumVerdict::FINITE_LIST);

    detail::DeltaMap map(kDirichlet, v, cfg);
    CHECK(rep.total_count == detail::winding_count(map, box));
    CHECK(rep.total_count >= 1);
    for (const auto& ev : rep.eigenvalues) {
        CHECK(ev.newton_converged);
        CHECK(ev.residual <= 1e-9 * rep.delta_scale);
        // each reported eigenvalue really is a zero of the double-path Delta
        CHECK(std::abs(map.at(ev.lambda).first) <= 1e-8 * rep.delta_scale);
    }

    // the two integration methods agree on this problem's determinant
    IntegratorConfig rk;
    for (const Complex lambda : {Complex(0.7, 0.2), Complex(2.9, -0.4)}) {
        const Complex d1 = characteristic_determinant(kDirichlet, v, lambda, rk);
        const Complex d2 = characteristic_determinant(kDirichlet, v, lambda, cfg);
        CHECK(std::abs(d1 - d2) <= 1e-9);
    }
}
