#ifndef DIRAC_BOUNDARY_HPP
#define DIRAC_BOUNDARY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "dirac/errors.hpp"

namespace dirac {

using Complex = std::complex<double>;

/// The 2x4 coefficient matrix of the two boundary forms
///   U_i(y) = a_i1 y1(0) + a_i2 y2(0) + a_i3 y1(pi) + a_i4 y2(pi).
struct BoundaryMatrix {
    std::array<std::array<Complex, 4>, 2> rows{};

    Complex& operator()(int i, int j) { return rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
    const Complex& operator()(int i, int j) const { return rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }

    static BoundaryMatrix from_rows(std::array<Complex, 4> r1, std::array<Complex, 4> r2) {
        BoundaryMatrix a;
        a.rows = {r1, r2};
        return a;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (const auto& row : rows)
            for (const auto& v : row) m = std::max(m, std::abs(v));
        return m;
    }
};

/// All six column minors J_jk = a_1j a_2k - a_1k a_2j together with the
/// combinations J0 = J12+J34, J1 = J14-J23, J2 = J13+J24.
struct Minors {
    Complex J12, J13, J14, J23, J24, J34;
    Complex J0, J1, J2;

    double max_abs() const {
        return std::max({std::abs(J12), std::abs(J13), std::abs(J14), std::abs(J23),
                         std::abs(J24), std::abs(J34)});
    }
};

enum class BoundaryKind {
    NONDEGENERATE,
    DEGENERATE_BOTH,  ///< J1 = J2 = 0
    DEGENERATE_PLUS,  ///< J0 = 0, J1+iJ2 != 0, J1-iJ2 = 0
    DEGENERATE_MINUS, ///< J0 = 0, J1+iJ2 = 0, J1-iJ2 != 0
};

inline const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::NONDEGENERATE: return "NONDEGENERATE";
        case BoundaryKind::DEGENERATE_BOTH: return "DEGENERATE_BOTH";
        case BoundaryKind::DEGENERATE_PLUS: return "DEGENERATE_PLUS";
        case BoundaryKind::DEGENERATE_MINUS: return "DEGENERATE_MINUS";
    }
    return "?";
}

struct BoundaryClass {
    BoundaryKind kind = BoundaryKind::NONDEGENERATE;
    /// J14 = J23 = J13+J24 = 0, the hypothesis under which the characteristic
    /// determinant collapses to J12+J34 for every midpoint-symmetric potential.
    bool theorem1_applicable = false;
};

/// Zero tests on minors scale with the squared entry magnitude, since each
/// minor is a product of two entries.
inline double classification_tolerance(const BoundaryMatrix& a) {
    const double m = a.max_abs_entry();
    return 1e-12 * std::max(1.0, m * m);
}

inline Minors minors(const BoundaryMatrix& a) {
    auto minor = [&](int j, int k) { return a(1, j) * a(2, k) - a(1, k) * a(2, j); };
    Minors m;
    m.J12 = minor(1, 2);
    m.J13 = minor(1, 3);
    m.J14 = minor(1, 4);
    m.J23 = minor(2, 3);
    m.J24 = minor(2, 4);
    m.J34 = minor(3, 4);
    m.J0 = m.J12 + m.J34;
    m.J1 = m.J14 - m.J23;
    m.J2 = m.J13 + m.J24;
    return m;
}

/// Rows are independent iff some minor clears the rank tolerance.
inline bool check_rank(const BoundaryMatrix& a) {
    return minors(a).max_abs() > classification_tolerance(a);
}

inline BoundaryClass classify(const BoundaryMatrix& a) {
    if (!check_rank(a)) throw RankDeficient();
    const Minors m = minors(a);
    const double tol = classification_tolerance(a);
    const auto zero = [tol](const Complex& v) { return std::abs(v) <= tol; };

    BoundaryClass cls;
    const Complex plus = m.J1 + Complex(0, 1) * m.J2;
    const Complex minus = m.J1 - Complex(0, 1) * m.J2;
    if (zero(m.J1) && zero(m.J2)) {
        cls.kind = BoundaryKind::DEGENERATE_BOTH;
    } else if (zero(m.J0) && zero(minus) && !zero(plus)) {
        cls.kind = BoundaryKind::DEGENERATE_PLUS;
    } else if (zero(m.J0) && zero(plus) && !zero(minus)) {
        cls.kind = BoundaryKind::DEGENERATE_MINUS;
    } else {
        cls.kind = BoundaryKind::NONDEGENERATE;
    }
    cls.theorem1_applicable = zero(m.J14) && zero(m.J23) && zero(m.J13 + m.J24);
    return cls;
}

} // namespace dirac

#endif
