#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "dirac/integrator.hpp"

using namespace dirac;
using std::complex;

namespace {

IntegratorConfig taylor_cfg() {
    IntegratorConfig cfg;
    cfg.method = IntegratorConfig::Method::Taylor;
    return cfg;
}

/// E for V = 0 anchored at a: rotation through lambda*(x - a).
std::array<complex<double>, 4> rotation_oracle(complex<double> lambda, double a, double x) {
    const complex<double> th = lambda * (x - a);
    return {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)};
}

double entry_distance(const FundamentalMatrix& f, const std::array<complex<double>, 4>& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(f.entries[i] - m[i]));
    return d;
}

PotentialSpec random_potential(std::mt19937_64& rng, bool multi_piece = true) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> kdist(0, 3);
    std::uniform_int_distribution<int> trig_choice(0, 2);
    std::uniform_int_distribution<int> npieces(1, multi_piece ? 3 : 1);

    auto make_terms = [&](std::vector<Term>& terms) {
        const int np = npieces(rng);
        std::vector<double> cuts{0.0, kPi};
        for (int i = 1; i < np; ++i) cuts.push_back(kPi * i / np + 0.1 * u(rng));
        std::sort(cuts.begin(), cuts.end());
        for (int i = 0; i < np; ++i) {
            Term t;
            t.lo = cuts[static_cast<std::size_t>(i)];
            t.hi = cuts[static_cast<std::size_t>(i) + 1];
            t.poly = {{u(rng), u(rng)}, {0.5 * u(rng), 0.5 * u(rng)}};
            const int tc = trig_choice(rng);
            if (tc > 0)
                t.trig = TrigFactor{tc == 1 ? TrigFactor::Kind::Cos : TrigFactor::Kind::Sin,
                                    kdist(rng)};
            terms.push_back(t);
        }
    };
    PotentialSpec v;
    make_terms(v.p_terms);
    make_terms(v.q_terms);
    return v;
}

} // namespace

TEST_CASE("zero potential reproduces the rotation closed form") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ure(-10.0, 10.0);
    std::uniform_real_distribution<double> uim(-0.5, 0.5);
    std::uniform_real_distribution<double> ux(0.0, kPi);
    for (auto method : {IntegratorConfig::Method::RK45, IntegratorConfig::Method::Taylor}) {
        IntegratorConfig cfg;
        cfg.method = method;
        for (int i = 0; i < 50; ++i) {
            const complex<double> lambda(ure(rng), uim(rng));
            const double a = ux(rng), x = ux(rng);
            const FundamentalMatrix f = fundamental_matrix(PotentialSpec::zero(), lambda, a, x, cfg);
            CHECK(entry_distance(f, rotation_oracle(lambda, a, x)) < 1e-10);
        }
    }
}

TEST_CASE("identity at the anchor and for the trivial problem") {
    std::mt19937_64 rng(7);
    const PotentialSpec v = random_potential(rng);
    const FundamentalMatrix f = fundamental_matrix(v, {1.3, -0.4}, 0.7, 0.7);
    CHECK(entry_distance(f, {1.0, 0.0, 0.0, 1.0}) == 0.0);

    const FundamentalMatrix g = fundamental_matrix(PotentialSpec::zero(), 0.0, 0.2, 2.9);
    CHECK(entry_distance(g, {1.0, 0.0, 0.0, 1.0}) < 1e-14);
}

TEST_CASE("domain checks") {
    CHECK_THROWS_AS(fundamental_matrix(PotentialSpec::zero(), 1.0, -0.1, 1.0), OutOfDomain);
    CHECK_THROWS_AS(fundamental_matrix(PotentialSpec::zero(), 1.0, 0.5, kPi + 0.2), OutOfDomain);
}

TEST_CASE("unit Wronskian at output points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ure(-20.0, 20.0);
    std::uniform_real_distribution<double> uim(-1.0, 1.0);
    std::uniform_real_distribution<double> ux(0.0, kPi);
    for (auto method : {IntegratorConfig::Method::RK45, IntegratorConfig::Method::Taylor}) {
        IntegratorConfig cfg;
        cfg.method = method;
        for (int i = 0; i < 25; ++i) {
            const PotentialSpec v = random_potential(rng);
            complex<double> lambda(ure(rng), uim(rng));
            if (std::abs(lambda) > 20.0) lambda *= 20.0 / std::abs(lambda);
            const double x = ux(rng);
            const FundamentalMatrix f = fundamental_matrix(v, lambda, kPi / 2, x, cfg);
            CHECK(f.wronskian_defect() <= 1e-10);
        }
    }
}

TEST_CASE("flow property: E_{a->b} = E_{m->b} E_{a->m}") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ux(0.0, kPi);
    std::uniform_real_distribution<double> ul(-3.0, 3.0);
    const IntegratorConfig cfg = taylor_cfg();
    for (int i = 0; i < 20; ++i) {
        const PotentialSpec v = random_potential(rng);
        const complex<double> lambda(ul(rng), 0.3 * ul(rng));
        double a = ux(rng), m = ux(rng), b = ux(rng);
        const FundamentalMatrix fab = fundamental_matrix(v, lambda, a, b, cfg);
        const FundamentalMatrix fam = fundamental_matrix(v, lambda, a, m, cfg);
        const FundamentalMatrix fmb = fundamental_matrix(v, lambda, m, b, cfg);
        // compose
        auto mul = [](const FundamentalMatrix& l, const FundamentalMatrix& r) {
            return std::array<complex<double>, 4>{
                l.e(1, 1) * r.e(1, 1) + l.e(1, 2) * r.e(2, 1),
                l.e(1, 1) * r.e(1, 2) + l.e(1, 2) * r.e(2, 2),
                l.e(2, 1) * r.e(1, 1) + l.e(2, 2) * r.e(2, 1),
                l.e(2, 1) * r.e(1, 2) + l.e(2, 2) * r.e(2, 2)};
        };
        CHECK(entry_distance(fab, mul(fmb, fam)) < 1e-9);
    }
}

TEST_CASE("endpoints from the midpoint anchor: rotations by -/+ lambda pi/2 at V = 0") {
    const complex<double> lambda(1.4, -0.3);
    const auto [e0, epi] = endpoints(PotentialSpec::zero(), lambda, kPi / 2, taylor_cfg());
    CHECK(entry_distance(e0, rotation_oracle(lambda, kPi / 2, 0.0)) < 1e-10);
    CHECK(entry_distance(epi, rotation_oracle(lambda, kPi / 2, kPi)) < 1e-10);

    const auto [z0, zpi] = endpoints(PotentialSpec::zero(), 0.0, kPi / 2);
    CHECK(entry_distance(z0, {1.0, 0.0, 0.0, 1.0}) < 1e-14);
    CHECK(entry_distance(zpi, {1.0, 0.0, 0.0, 1.0}) < 1e-14);
}

TEST_CASE("endpoint reflection relations for midpoint-symmetric potentials") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ul(-2.0, 2.0);
    const IntegratorConfig cfg = taylor_cfg();
    for (int trial = 0; trial < 5; ++trial) {
        const PotentialSpec v =
            trial == 0 ? PotentialSpec::cos_sin() : symmetrize(random_potential(rng, false));
        for (int i = 0; i < 10; ++i) {
            const complex<double> lambda(ul(rng), ul(rng));
            const auto [e0, epi] = endpoints(v, lambda, kPi / 2, cfg);
            CHECK(std::abs(epi.e(1, 1) - e0.e(2, 2)) < 1e-9);
            CHECK(std::abs(epi.e(2, 2) - e0.e(1, 1)) < 1e-9);
            CHECK(std::abs(epi.e(2, 1) - e0.e(1, 2)) < 1e-9);
            CHECK(std::abs(epi.e(1, 2) - e0.e(2, 1)) < 1e-9);
        }
    }
}

TEST_CASE("endpoint relations fail for an asymmetric potential") {
    // q(x) = x breaks the midpoint symmetry
    PotentialSpec v;
    v.q_terms.push_back({0.0, kPi, {0.0, 1.0}, std::nullopt, false});
    const auto [e0, epi] = endpoints(v, {1.0, 0.0}, kPi / 2, taylor_cfg());
    CHECK(std::abs(epi.e(1, 1) - e0.e(2, 2)) > 1e-3);
}

TEST_CASE("anchored-at-zero entries") {
    SUBCASE("zero potential gives c1=c2=cos, s1=s2=sin of lambda*pi") {
        for (complex<double> lambda : {complex<double>(0.7, 0.2), complex<double>(-1.9, -0.4)}) {
            const CsEntries cs = remark2_entries(PotentialSpec::zero(), lambda, taylor_cfg());
            CHECK(std::abs(cs.c1 - std::cos(lambda * kPi)) < 1e-10);
            CHECK(std::abs(cs.c2 - std::cos(lambda * kPi)) < 1e-10);
            CHECK(std::abs(cs.s1 - std::sin(lambda * kPi)) < 1e-10);
            CHECK(std::abs(cs.s2 - std::sin(lambda * kPi)) < 1e-10);
        }
    }
    SUBCASE("lambda = 0, zero potential") {
        const CsEntries cs = remark2_entries(PotentialSpec::zero(), 0.0);
        CHECK(std::abs(cs.c1 - 1.0) < 1e-14);
        CHECK(std::abs(cs.c2 - 1.0) < 1e-14);
        CHECK(std::abs(cs.s1) < 1e-14);
        CHECK(std::abs(cs.s2) < 1e-14);
    }
    SUBCASE("s1 == s2 for midpoint-symmetric potentials") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> ul(-2.0, 2.0);
        for (int trial = 0; trial < 5; ++trial) {
            const PotentialSpec v = symmetrize(random_potential(rng, false));
            for (int i = 0; i < 10; ++i) {
                const complex<double> lambda(ul(rng), ul(rng));
                const CsEntries cs = remark2_entries(v, lambda, taylor_cfg());
                CHECK(std::abs(cs.s1 - cs.s2) < 1e-9);
            }
        }
    }
}

TEST_CASE("variational system matches finite differences") {
    std::mt19937_64 rng(23);
    const PotentialSpec v = random_potential(rng);
    const IntegratorConfig cfg = taylor_cfg();
    for (complex<double> lambda : {complex<double>(0.9, 0.1), complex<double>(-2.3, 0.6)}) {
        detail::Mat2<double> y = detail::Mat2<double>::identity(), w{};
        detail::propagate<double>(v, cx_from_std<double>(lambda), kPi / 2, kPi, y, &w, cfg);

        const double d = 1e-4;
        const FundamentalMatrix fp = fundamental_matrix(v, lambda + d, kPi / 2, kPi, cfg);
        const FundamentalMatrix fm = fundamental_matrix(v, lambda - d, kPi / 2, kPi, cfg);
        const std::array<Cx<double>, 4> wv{w.e11, w.e12, w.e21, w.e22};
        for (std::size_t i = 0; i < 4; ++i) {
            const complex<double> fd = (fp.entries[i] - fm.entries[i]) / (2.0 * d);
            CHECK(std::abs(to_std(wv[i]) - fd) < 1e-6);
        }
    }
}

TEST_CASE("rk45 and taylor agree on piecewise potentials") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> ul(-4.0, 4.0);
    IntegratorConfig rk;
    rk.method = IntegratorConfig::Method::RK45;
    const IntegratorConfig ty = taylor_cfg();
    for (int i = 0; i < 15; ++i) {
        const PotentialSpec v = random_potential(rng);
        const complex<double> lambda(ul(rng), 0.25 * ul(rng));
        const FundamentalMatrix a = fundamental_matrix(v, lambda, kPi / 2, kPi, rk);
        const FundamentalMatrix b = fundamental_matrix(v, lambda, kPi / 2, kPi, ty);
        double dist = 0.0;
        for (std::size_t j = 0; j < 4; ++j) dist = std::max(dist, std::abs(a.entries[j] - b.entries[j]));
        CHECK(dist < 1e-9);
    }
}

TEST_CASE("dd taylor propagation reaches dd accuracy on the rotation oracle") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-26;
    cfg.abs_tol = 1e-26;
    for (double lambda : {0.75, -4.2, 11.0}) {
        detail::Mat2<DD> y = detail::Mat2<DD>::identity();
        detail::propagate<DD>(PotentialSpec::zero(), Cx<DD>{DD(lambda)}, 0.0, kPi, y, nullptr, cfg);
        // the endpoint is the double rounding of pi, exactly as integrated
        DD s, c;
        sincos(DD(lambda) * DD(kPi), s, c);
        CHECK(std::abs((y.e11.re - c).hi) < 1e-25);
        CHECK(std::abs((y.e21.re - s).hi) < 1e-25);
        CHECK(std::abs((y.e12.re + s).hi) < 1e-25);
        CHECK(std::abs((y.e22.re - c).hi) < 1e-25);
        CHECK(std::abs(y.e11.im.hi) < 1e-25);
    }
}

TEST_CASE("mean over a small circle reproduces the center value (analyticity)") {
    // trapezoid mean of an analytic function over a circle equals its center
    const PotentialSpec v = PotentialSpec::cos_sin();
    const IntegratorConfig cfg = taylor_cfg();
    const complex<double> center(1.1, -0.3);
    const double radius = 0.15;
    auto entry = [&](complex<double> lambda) {
        return fundamental_matrix(v, lambda, kPi / 2, 0.0, cfg).e(1, 2);
    };
    complex<double> mean = 0.0;
    const int n = 16;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        mean += entry(center + radius * complex<double>(std::cos(th), std::sin(th)));
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - entry(center)) < 1e-8);
}
