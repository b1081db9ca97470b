#ifndef DIRAC_SYMBOLIC_POLY_HPP
#define DIRAC_SYMBOLIC_POLY_HPP

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dirac/errors.hpp"
#include "dirac/symbolic/rational.hpp"

namespace dirac::symbolic {

/// Fixed, ordered set of indeterminates. Polynomials over the same table
/// share the pointer; arithmetic across tables is rejected.
class SymbolTable {
public:
    explicit SymbolTable(std::vector<std::string> names) : names_(std::move(names)) {}

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return i;
        throw Error("unknown symbol: " + name);
    }

private:
    std::vector<std::string> names_;
};

using SymbolTablePtr = std::shared_ptr<const SymbolTable>;

/// Exponent vector over the table's symbols (componentwise nonnegative).
using Monomial = std::vector<unsigned>;

/// Multivariate polynomial with exact rational coefficients in canonical
/// form: a sorted term map with no zero coefficients. Two polynomials over
/// the same table are equal iff their term maps are identical.
class Poly {
public:
    Poly() = default;
    explicit Poly(SymbolTablePtr table) : table_(std::move(table)) {}

    static Poly constant(SymbolTablePtr table, Rational c) {
        Poly p(std::move(table));
        if (!c.is_zero()) p.terms_.emplace(Monomial(p.table_->size(), 0), std::move(c));
        return p;
    }

    static Poly symbol(SymbolTablePtr table, std::size_t index) {
        Poly p(std::move(table));
        Monomial m(p.table_->size(), 0);
        m[index] = 1;
        p.terms_.emplace(std::move(m), Rational(1));
        return p;
    }

    static Poly symbol(const SymbolTablePtr& table, const std::string& name) {
        return symbol(table, table->index_of(name));
    }

    const SymbolTablePtr& table() const { return table_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        check_same(a, b);
        Poly r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) {
        check_same(a, b);
        Poly r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
        return r;
    }

    friend Poly operator-(const Poly& a) {
        Poly r(a.table_);
        for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        check_same(a, b);
        Poly r(a.table_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m(ma.size());
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                r.add_term(m, ca * cb);
            }
        }
        return r;
    }

    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }

    friend Poly operator*(const Rational& c, const Poly& p) {
        Poly r(p.table_);
        if (c.is_zero()) return r;
        for (const auto& [m, pc] : p.terms_) r.terms_.emplace(m, c * pc);
        return r;
    }

    /// Substitute symbol `index` by `replacement` throughout.
    Poly substituted(std::size_t index, const Poly& replacement) const {
        check_same(*this, replacement);
        Poly r(table_);
        for (const auto& [m, c] : terms_) {
            unsigned e = m[index];
            Monomial rest = m;
            rest[index] = 0;
            Poly term(table_);
            term.terms_.emplace(rest, c);
            for (unsigned k = 0; k < e; ++k) term = term * replacement;
            r = r + term;
        }
        return r;
    }

    /// Coefficient of the exact exponent pattern over the `selected` symbols,
    /// returned as a polynomial in the remaining symbols. Terms whose
    /// exponents on `selected` differ from `pattern` are dropped.
    Poly coefficient_of(const std::vector<std::size_t>& selected,
                        const std::vector<unsigned>& pattern) const {
        Poly r(table_);
        for (const auto& [m, c] : terms_) {
            bool match = true;
            for (std::size_t i = 0; i < selected.size(); ++i)
                if (m[selected[i]] != pattern[i]) { match = false; break; }
            if (!match) continue;
            Monomial rest = m;
            for (std::size_t s : selected) rest[s] = 0;
            r.add_term(rest, c);
        }
        return r;
    }

    /// True if any term uses any of the given symbols.
    bool uses_any(const std::vector<std::size_t>& symbols) const {
        for (const auto& [m, c] : terms_)
            for (std::size_t s : symbols)
                if (m[s] != 0) return true;
        return false;
    }

    /// Numeric evaluation at complex values (one per table symbol).
    std::complex<double> evaluate(const std::vector<std::complex<double>>& values) const {
        std::complex<double> acc = 0.0;
        for (const auto& [m, c] : terms_) {
            std::complex<double> t = c.to_double();
            for (std::size_t i = 0; i < m.size(); ++i)
                for (unsigned k = 0; k < m[i]; ++k) t *= values[i];
            acc += t;
        }
        return acc;
    }

    /// Canonical rendering, terms in the map's (lexicographic) order.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            std::string coef = c.to_string();
            bool neg = !coef.empty() && coef[0] == '-';
            if (first) {
                out += coef;
                first = false;
            } else {
                out += neg ? " - " + coef.substr(1) : " + " + coef;
            }
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] == 0) continue;
                out += "*" + table_->name(i);
                if (m[i] > 1) out += "^" + std::to_string(m[i]);
            }
        }
        return out;
    }

private:
    static void check_same(const Poly& a, const Poly& b) {
        if (a.table_ != b.table_) throw SymbolMismatch();
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    SymbolTablePtr table_;
    std::map<Monomial, Rational> terms_;
};

} // namespace dirac::symbolic

#endif
