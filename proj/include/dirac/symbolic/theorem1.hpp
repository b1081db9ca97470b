#ifndef DIRAC_SYMBOLIC_THEOREM1_HPP
#define DIRAC_SYMBOLIC_THEOREM1_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "dirac/symbolic/poly.hpp"

namespace dirac::symbolic {

/// Substitutions plus side relations used to reduce the expanded
/// characteristic determinant. Substitutions must be triangular: no
/// replacement may mention a substituted symbol.
struct RewriteSystem {
    std::vector<std::pair<std::size_t, Poly>> substitutions;
    std::vector<Poly> side_relations;
};

/// The fixed symbol universe for the determinant replay: the eight boundary
/// coefficients, the fundamental-matrix entries at both endpoints, and the
/// pair (c, s) standing for cos(lambda*pi), sin(lambda*pi).
inline const SymbolTablePtr& problem_symbols() {
    static const SymbolTablePtr table = std::make_shared<SymbolTable>(std::vector<std::string>{
        "a11", "a12", "a13", "a14", "a21", "a22", "a23", "a24",
        "e11_0", "e12_0", "e21_0", "e22_0",
        "e11_pi", "e12_pi", "e21_pi", "e22_pi",
        "c", "s"});
    return table;
}

namespace sym {
inline std::size_t a(int i, int j) { return static_cast<std::size_t>((i - 1) * 4 + (j - 1)); }
inline std::size_t e0(int j, int k) { return static_cast<std::size_t>(8 + (j - 1) * 2 + (k - 1)); }
inline std::size_t epi(int j, int k) { return static_cast<std::size_t>(12 + (j - 1) * 2 + (k - 1)); }
inline constexpr std::size_t c = 16;
inline constexpr std::size_t s = 17;
} // namespace sym

inline Poly boundary_symbol(int i, int j) { return Poly::symbol(problem_symbols(), sym::a(i, j)); }

/// Column minor J_jk = a_1j a_2k - a_1k a_2j as an exact polynomial.
inline Poly minor_poly(int j, int k) {
    return boundary_symbol(1, j) * boundary_symbol(2, k) -
           boundary_symbol(1, k) * boundary_symbol(2, j);
}

/// Boundary form U_i applied to column k of the fundamental matrix, with the
/// endpoint entries kept as independent symbols.
inline Poly boundary_form_poly(int i, int k) {
    const auto& t = problem_symbols();
    return boundary_symbol(i, 1) * Poly::symbol(t, sym::e0(1, k)) +
           boundary_symbol(i, 2) * Poly::symbol(t, sym::e0(2, k)) +
           boundary_symbol(i, 3) * Poly::symbol(t, sym::epi(1, k)) +
           boundary_symbol(i, 4) * Poly::symbol(t, sym::epi(2, k));
}

/// The fully expanded 2x2 characteristic determinant
/// U_1(E1) U_2(E2) - U_1(E2) U_2(E1), before any substitution.
inline Poly expand_characteristic_determinant() {
    return boundary_form_poly(1, 1) * boundary_form_poly(2, 2) -
           boundary_form_poly(1, 2) * boundary_form_poly(2, 1);
}

/// Endpoint reflection relations: e21(pi)=e12(0), e12(pi)=e21(0),
/// e11(pi)=e22(0), e22(pi)=e11(0).
inline RewriteSystem reflection_rules() {
    const auto& t = problem_symbols();
    RewriteSystem rs;
    rs.substitutions = {
        {sym::epi(2, 1), Poly::symbol(t, sym::e0(1, 2))},
        {sym::epi(1, 2), Poly::symbol(t, sym::e0(2, 1))},
        {sym::epi(1, 1), Poly::symbol(t, sym::e0(2, 2))},
        {sym::epi(2, 2), Poly::symbol(t, sym::e0(1, 1))},
    };
    return rs;
}

/// Unit-determinant relation at x=0: e11(0)e22(0) - e12(0)e21(0) - 1 = 0.
inline RewriteSystem wronskian_rules() {
    const auto& t = problem_symbols();
    RewriteSystem rs;
    rs.side_relations = {Poly::symbol(t, sym::e0(1, 1)) * Poly::symbol(t, sym::e0(2, 2)) -
                         Poly::symbol(t, sym::e0(1, 2)) * Poly::symbol(t, sym::e0(2, 1)) -
                         Poly::constant(t, Rational(1))};
    return rs;
}

/// Trigonometric circle relation c^2 + s^2 - 1 = 0.
inline RewriteSystem circle_rules() {
    const auto& t = problem_symbols();
    RewriteSystem rs;
    rs.side_relations = {Poly::symbol(t, sym::c) * Poly::symbol(t, sym::c) +
                         Poly::symbol(t, sym::s) * Poly::symbol(t, sym::s) -
                         Poly::constant(t, Rational(1))};
    return rs;
}

namespace detail {

inline void check_triangular(const RewriteSystem& rs) {
    std::vector<std::size_t> lhs;
    lhs.reserve(rs.substitutions.size());
    for (const auto& [s, p] : rs.substitutions) lhs.push_back(s);
    for (const auto& [s, p] : rs.substitutions)
        if (p.uses_any(lhs)) throw Error("rewrite system is not triangular");
}

/// Lexicographically greatest monomial of a nonzero polynomial.
inline const Monomial& leading_monomial(const Poly& p) {
    return std::prev(p.terms().end())->first;
}

inline bool divides(const Monomial& lead, const Monomial& m) {
    for (std::size_t i = 0; i < lead.size(); ++i)
        if (m[i] < lead[i]) return false;
    return true;
}

/// Reduce p modulo one relation by repeatedly eliminating the relation's
/// leading monomial. Each rewrite strictly decreases the affected term in
/// the lexicographic order, so the loop terminates with a normal form that
/// contains no multiple of the leading monomial.
inline Poly reduce_mod_relation(Poly p, const Poly& relation) {
    if (relation.is_zero()) return p;
    const auto& table = p.table();
    const Monomial lead = leading_monomial(relation);
    const Rational lead_coef = relation.terms().rbegin()->second;

    // rest = lead_coef*lead - relation, i.e. the replacement for `lead`
    Poly lead_poly(table);
    {
        Poly lp(table);
        Poly unit = Poly::constant(table, Rational(1));
        for (std::size_t i = 0; i < lead.size(); ++i)
            for (unsigned k = 0; k < lead[i]; ++k) unit = unit * Poly::symbol(table, i);
        lead_poly = unit;
    }
    const Poly rest = lead_coef * lead_poly - relation;

    for (;;) {
        // pick the lex-greatest reducible term
        const Monomial* target = nullptr;
        Rational coef;
        for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
            if (divides(lead, it->first)) {
                target = &it->first;
                coef = it->second;
                break;
            }
        }
        if (target == nullptr) return p;
        Monomial quotient = *target;
        for (std::size_t i = 0; i < quotient.size(); ++i) quotient[i] -= lead[i];
        Poly q(table);
        {
            Poly unit = Poly::constant(table, coef / lead_coef);
            for (std::size_t i = 0; i < quotient.size(); ++i)
                for (unsigned k = 0; k < quotient[i]; ++k) unit = unit * Poly::symbol(table, i);
            q = unit;
        }
        p = p - q * (lead_coef * lead_poly) + q * rest;
    }
}

} // namespace detail

/// Apply the substitutions, then reduce modulo each side relation.
inline Poly reduce(Poly p, const RewriteSystem& rs) {
    detail::check_triangular(rs);
    for (const auto& [s, replacement] : rs.substitutions) p = p.substituted(s, replacement);
    for (const auto& rel : rs.side_relations) p = detail::reduce_mod_relation(std::move(p), rel);
    return p;
}

struct Theorem1Report {
    bool ok = false;
    /// D reduced by the reflection and Wronskian rules, minus the three
    /// hypothesis-carrying products. Equals J12+J34 exactly iff ok.
    Poly normal_form;
    /// normal_form - (J12+J34); zero iff ok.
    Poly residual;
};

/// Replays the determinant reduction: expand, substitute the endpoint
/// reflection relations, reduce modulo the unit-Wronskian relation, and
/// subtract the three products that the minor constraints
/// J14 = J23 = J13+J24 = 0 annihilate. The remainder must be exactly
/// J12 + J34.
inline Theorem1Report verify_theorem1_identity(bool use_reflection = true,
                                               bool use_wronskian = true) {
    const auto& t = problem_symbols();
    Poly d = expand_characteristic_determinant();
    if (use_reflection) d = reduce(d, reflection_rules());
    if (use_wronskian) d = reduce(d, wronskian_rules());

    const Poly m14 = Poly::symbol(t, sym::e0(1, 1)) * Poly::symbol(t, sym::e0(1, 1)) -
                     Poly::symbol(t, sym::e0(1, 2)) * Poly::symbol(t, sym::e0(1, 2));
    const Poly m23 = Poly::symbol(t, sym::e0(2, 1)) * Poly::symbol(t, sym::e0(2, 1)) -
                     Poly::symbol(t, sym::e0(2, 2)) * Poly::symbol(t, sym::e0(2, 2));
    const Poly m2 = Poly::symbol(t, sym::e0(1, 1)) * Poly::symbol(t, sym::e0(2, 1)) -
                    Poly::symbol(t, sym::e0(2, 2)) * Poly::symbol(t, sym::e0(1, 2));

    Theorem1Report report;
    report.normal_form =
        d - m14 * minor_poly(1, 4) - m23 * minor_poly(2, 3) - m2 * (minor_poly(1, 3) + minor_poly(2, 4));
    report.residual = report.normal_form - (minor_poly(1, 2) + minor_poly(3, 4));
    report.ok = report.residual.is_zero();
    return report;
}

struct UnperturbedForm {
    Poly coeff_one; ///< expected J12 + J34
    Poly coeff_cos; ///< expected J14 - J23
    Poly coeff_sin; ///< expected -(J13 + J24)
    bool pure = false; ///< no residual monomials outside {1, c, s}
};

/// Derives the zero-potential characteristic determinant in closed form.
/// With the fundamental system anchored at 0 the endpoint values are the
/// identity and the rotation through lambda*pi; the determinant does not
/// depend on the anchor because the transition between anchored fundamental
/// systems has unit determinant. Reducing modulo c^2+s^2-1 leaves a
/// polynomial linear in (c, s) whose coefficients are returned.
inline UnperturbedForm derive_unperturbed_form() {
    const auto& t = problem_symbols();
    const Poly one = Poly::constant(t, Rational(1));
    const Poly zero(t);
    const Poly pc = Poly::symbol(t, sym::c);
    const Poly ps = Poly::symbol(t, sym::s);

    // endpoint columns: E(0) = I, E(pi) = [[c, -s], [s, c]]
    const Poly E0[2][2] = {{one, zero}, {zero, one}};
    const Poly Epi[2][2] = {{pc, -ps}, {ps, pc}};

    auto uform = [&](int i, int k) {
        return boundary_symbol(i, 1) * E0[0][k - 1] + boundary_symbol(i, 2) * E0[1][k - 1] +
               boundary_symbol(i, 3) * Epi[0][k - 1] + boundary_symbol(i, 4) * Epi[1][k - 1];
    };

    Poly d = uform(1, 1) * uform(2, 2) - uform(1, 2) * uform(2, 1);
    d = reduce(std::move(d), circle_rules());

    const std::vector<std::size_t> cs{sym::c, sym::s};
    UnperturbedForm form;
    form.coeff_one = d.coefficient_of(cs, {0, 0});
    form.coeff_cos = d.coefficient_of(cs, {1, 0});
    form.coeff_sin = d.coefficient_of(cs, {0, 1});
    const Poly rebuilt = form.coeff_one + form.coeff_cos * pc + form.coeff_sin * ps;
    form.pure = (rebuilt == d);
    return form;
}

} // namespace dirac::symbolic

#endif
