#ifndef DIRAC_SYMBOLIC_BIGINT_HPP
#define DIRAC_SYMBOLIC_BIGINT_HPP

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace dirac::symbolic {

/// Arbitrary-precision signed integer, sign-magnitude over 32-bit limbs
/// (little-endian). Only the operations the polynomial engine needs.
class BigInt {
public:
    BigInt() = default;

    BigInt(std::int64_t v) { // NOLINT: implicit by design
        negative_ = v < 0;
        std::uint64_t m = negative_ ? -static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
        while (m != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(m & 0xffffffffu));
            m >>= 32;
        }
    }

    bool is_zero() const { return limbs_.empty(); }
    bool is_negative() const { return negative_; }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }

    friend BigInt operator-(BigInt a) {
        if (!a.is_zero()) a.negative_ = !a.negative_;
        return a;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.negative_ == b.negative_) {
            BigInt r;
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            r.negative_ = a.negative_ && !r.limbs_.empty();
            return r;
        }
        int c = cmp_mag(a.limbs_, b.limbs_);
        if (c == 0) return BigInt{};
        BigInt r;
        if (c > 0) {
            r.limbs_ = sub_mag(a.limbs_, b.limbs_);
            r.negative_ = a.negative_;
        } else {
            r.limbs_ = sub_mag(b.limbs_, a.limbs_);
            r.negative_ = b.negative_;
        }
        if (r.limbs_.empty()) r.negative_ = false;
        return r;
    }

    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.is_zero() || b.is_zero()) return BigInt{};
        BigInt r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] +
                    static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry != 0) {
                std::uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        r.negative_ = a.negative_ != b.negative_;
        return r;
    }

    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    /// Truncated division (quotient rounds toward zero), with remainder.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.is_zero()) std::abort();
        q = BigInt{};
        r = BigInt{};
        if (cmp_mag(a.limbs_, b.limbs_) < 0) {
            r = a;
            return;
        }
        // schoolbook bit-by-bit long division on magnitudes
        std::vector<std::uint32_t> rem;
        std::vector<std::uint32_t> quo(a.limbs_.size(), 0);
        for (std::size_t bit = a.limbs_.size() * 32; bit-- > 0;) {
            shift_left1(rem);
            if ((a.limbs_[bit / 32] >> (bit % 32)) & 1u) {
                if (rem.empty()) rem.push_back(0);
                rem[0] |= 1u;
            }
            if (cmp_mag(rem, b.limbs_) >= 0) {
                rem = sub_mag(rem, b.limbs_);
                quo[bit / 32] |= (1u << (bit % 32));
            }
        }
        q.limbs_ = std::move(quo);
        q.trim();
        r.limbs_ = std::move(rem);
        r.trim();
        q.negative_ = !q.limbs_.empty() && (a.negative_ != b.negative_);
        r.negative_ = !r.limbs_.empty() && a.negative_;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.negative_ = false;
        b.negative_ = false;
        while (!b.is_zero()) {
            BigInt q, r;
            divmod(a, b, q, r);
            a = b;
            b = r;
        }
        return a;
    }

    double to_double() const {
        double v = 0.0;
        for (std::size_t i = limbs_.size(); i-- > 0;) v = v * 4294967296.0 + limbs_[i];
        return negative_ ? -v : v;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        BigInt t = *this;
        t.negative_ = false;
        std::string digits;
        const BigInt ten(10);
        while (!t.is_zero()) {
            BigInt q, r;
            divmod(t, ten, q, r);
            digits.push_back(static_cast<char>('0' + (r.limbs_.empty() ? 0 : r.limbs_[0])));
            t = q;
        }
        if (negative_) digits.push_back('-');
        return std::string(digits.rbegin(), digits.rend());
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) negative_ = false;
    }

    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (std::size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }

    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r;
        r.reserve(std::max(a.size(), b.size()) + 1);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
            std::uint64_t cur = carry;
            if (i < a.size()) cur += a[i];
            if (i < b.size()) cur += b[i];
            r.push_back(static_cast<std::uint32_t>(cur & 0xffffffffu));
            carry = cur >> 32;
        }
        if (carry != 0) r.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r = a;
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                               (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
            borrow = cur < 0 ? 1 : 0;
            if (cur < 0) cur += (std::int64_t{1} << 32);
            r[i] = static_cast<std::uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    static void shift_left1(std::vector<std::uint32_t>& v) {
        std::uint32_t carry = 0;
        for (auto& limb : v) {
            std::uint32_t next = limb >> 31;
            limb = (limb << 1) | carry;
            carry = next;
        }
        if (carry != 0) v.push_back(carry);
    }

    bool negative_ = false;
    std::vector<std::uint32_t> limbs_;
};

} // namespace dirac::symbolic

#endif
