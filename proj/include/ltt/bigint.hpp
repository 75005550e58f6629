#ifndef LTT_BIGINT_HPP
#define LTT_BIGINT_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltt {

// Unsigned arbitrary-precision integer, base 2^32.  Only the operations the
// type-counting formulas need: add, multiply, power, compare, decimal render.
class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v) {
        if (v) {
            limbs_.push_back(static_cast<std::uint32_t>(v));
            if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        }
    }

    bool is_zero() const { return limbs_.empty(); }

    bool fits_u64() const { return limbs_.size() <= 2; }

    std::uint64_t to_u64() const {
        if (!fits_u64()) throw std::overflow_error("BigUint: value exceeds 64 bits");
        std::uint64_t v = 0;
        if (limbs_.size() > 1) v = static_cast<std::uint64_t>(limbs_[1]) << 32;
        if (!limbs_.empty()) v |= limbs_[0];
        return v;
    }

    std::size_t bit_count() const {
        if (limbs_.empty()) return 0;
        std::uint32_t top = limbs_.back();
        std::size_t bits = (limbs_.size() - 1) * 32;
        while (top) { ++bits; top >>= 1; }
        return bits;
    }

    friend int cmp(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (std::size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        return 0;
    }
    friend bool operator==(const BigUint& a, const BigUint& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const BigUint& a, const BigUint& b) { return cmp(a, b) != 0; }
    friend bool operator<(const BigUint& a, const BigUint& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return cmp(a, b) <= 0; }

    friend BigUint operator+(const BigUint& a, const BigUint& b) {
        BigUint r;
        const auto& x = a.limbs_;
        const auto& y = b.limbs_;
        std::size_t n = std::max(x.size(), y.size());
        r.limbs_.resize(n);
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t s = carry;
            if (i < x.size()) s += x[i];
            if (i < y.size()) s += y[i];
            r.limbs_[i] = static_cast<std::uint32_t>(s);
            carry = s >> 32;
        }
        if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
        return r;
    }

    friend BigUint operator*(const BigUint& a, const BigUint& b) {
        if (a.is_zero() || b.is_zero()) return BigUint();
        BigUint r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
            std::uint64_t carry = 0;
            for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
                std::uint64_t cur = r.limbs_[i + j] +
                                    static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
            }
            std::size_t k = i + b.limbs_.size();
            while (carry) {
                std::uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<std::uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    // a^e with a result-size guard so pathological exponents fail loudly
    // instead of exhausting memory.
    static BigUint pow(const BigUint& base, std::uint64_t e, std::size_t max_bits = 1u << 21) {
        BigUint r(1), b = base;
        while (e) {
            if (e & 1) {
                r = r * b;
                if (r.bit_count() > max_bits) throw std::overflow_error("BigUint::pow: result too large");
            }
            e >>= 1;
            if (e) {
                b = b * b;
                if (b.bit_count() > max_bits) throw std::overflow_error("BigUint::pow: result too large");
            }
        }
        return r;
    }

    std::string to_string() const {
        if (limbs_.empty()) return "0";
        std::vector<std::uint32_t> v = limbs_;
        std::string out;
        while (!v.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = v.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | v[i];
                v[i] = static_cast<std::uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!v.empty() && v.back() == 0) v.pop_back();
            std::string chunk = std::to_string(rem);
            if (v.empty())
                out.insert(0, chunk);
            else
                out.insert(0, std::string(9 - chunk.size(), '0') + chunk);
        }
        return out;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<std::uint32_t> limbs_;  // little-endian
};

}  // namespace ltt

#endif
