#ifndef TEPFORGE_BITVEC_HPP
#define TEPFORGE_BITVEC_HPP

#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tepforge {

// Packed binary vector over GF(2). Unused high bits of the last word stay zero.
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_string(const std::string& s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                v.set(i, true);
            else if (s[i] != '0')
                throw std::invalid_argument("BitVec::from_string: character is not 0/1");
        }
        return v;
    }

    std::size_t size() const { return n_; }
    std::size_t word_count() const { return w_.size(); }
    const std::uint64_t* words() const { return w_.data(); }
    std::uint64_t* words() { return w_.data(); }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        std::uint64_t m = std::uint64_t(1) << (i & 63);
        if (v)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void xor_assign(const BitVec& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    }
    BitVec operator^(const BitVec& o) const {
        BitVec r = *this;
        r.xor_assign(o);
        return r;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (std::uint64_t x : w_) c += std::popcount(x);
        return c;
    }
    bool any() const {
        for (std::uint64_t x : w_)
            if (x) return true;
        return false;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    // Visits set-bit indices in ascending order.
    template <typename F>
    void for_each_set(F&& f) const {
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t x = w_[wi];
            while (x) {
                f(wi * 64 + std::countr_zero(x));
                x &= x - 1;
            }
        }
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

   private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace tepforge

#endif
