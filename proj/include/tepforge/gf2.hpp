#ifndef TEPFORGE_GF2_HPP
#define TEPFORGE_GF2_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tepforge/bitvec.hpp"

namespace tepforge {

// Thrown for malformed code/TEP files; message carries line/column context.
class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Dense GF(2) matrix, rows packed into 64-bit words.
class BinaryMatrix {
   public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * wpr_, 0) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("BinaryMatrix: rows and cols must be >= 1");
    }

    static BinaryMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u; }
    void set(std::size_t r, std::size_t c, bool v) {
        std::uint64_t m = std::uint64_t(1) << (c & 63);
        if (v)
            data_[r * wpr_ + (c >> 6)] |= m;
        else
            data_[r * wpr_ + (c >> 6)] &= ~m;
    }

    BitVec row(std::size_t r) const;
    const std::uint64_t* row_words(std::size_t r) const { return data_.data() + r * wpr_; }
    std::size_t words_per_row() const { return wpr_; }
    void xor_row_into(std::size_t r, BitVec& acc) const;  // acc ^= row r
    void xor_rows(std::size_t dst, std::size_t src);      // row dst ^= row src
    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);

    // u (length rows) times this matrix: XOR of the rows selected by u.
    BitVec left_mul(const BitVec& u) const;

    // x times the transpose: bit r of the result is <x, row r>.
    BitVec mul_transpose(const BitVec& x) const;

    // this times other^T, entry (i,j) = <row_i, other.row_j>.
    BinaryMatrix times_transpose(const BinaryMatrix& other) const;

    bool is_zero() const;
    bool operator==(const BinaryMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

   private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> data_;
};

// Column/position permutation in gather form: apply(v)[i] = v[map[i]].
class Permutation {
   public:
    Permutation() = default;
    explicit Permutation(std::vector<std::uint32_t> map);

    static Permutation identity(std::size_t m);

    std::size_t size() const { return map_.size(); }
    std::uint32_t operator[](std::size_t i) const { return map_[i]; }
    const std::vector<std::uint32_t>& map() const { return map_; }

    void swap_entries(std::size_t a, std::size_t b) { std::swap(map_[a], map_[b]); }

    template <typename T>
    std::vector<T> apply(const std::vector<T>& v) const {
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < map_.size(); ++i) out[i] = v[map_[i]];
        return out;
    }
    BitVec apply(const BitVec& v) const;

    // Scatter form: out[map[i]] = v[i]; the inverse of apply().
    template <typename T>
    std::vector<T> apply_inverse(const std::vector<T>& v) const {
        std::vector<T> out(v.size());
        for (std::size_t i = 0; i < map_.size(); ++i) out[map_[i]] = v[i];
        return out;
    }
    BitVec apply_inverse(const BitVec& v) const;

    Permutation inverse() const;

    // Composition such that composed.apply(v) == second.apply-of(first.apply(v)).
    static Permutation composed(const Permutation& first, const Permutation& second);

    bool is_identity() const;

   private:
    std::vector<std::uint32_t> map_;
};

// An [n,k] binary linear code. Construction checks G*H^T = 0 and rank(G) = k.
struct CodeSpec {
    std::size_t n = 0;
    std::size_t k = 0;
    BinaryMatrix generator;  // k x n
    BinaryMatrix parity;     // (n-k) x n

    CodeSpec() = default;
    CodeSpec(BinaryMatrix g, BinaryMatrix h);

    double rate() const { return double(k) / double(n); }
    bool is_systematic() const;  // generator = [I_k | P]
};

BitVec encode(const CodeSpec& code, const BitVec& message);
BitVec syndrome(const CodeSpec& code, const BitVec& word);

std::size_t gf2_rank(BinaryMatrix m);

// Row-reduce with column swaps until the first k columns form the identity.
// Pivoting: lowest-index remaining row with a 1; if the pivot column has none,
// swap in the lowest-index later column that does. Throws on rank deficiency.
std::pair<BinaryMatrix, Permutation> systematic_form(const BinaryMatrix& m);

// Generator [I_k | P] with P uniform from the seeded RNG; parity [P^T | I_{n-k}].
CodeSpec random_linear_code(std::size_t n, std::size_t k, std::uint64_t seed);

// Text format: "n k" header, then k rows of n adjacent 0/1 characters for G,
// optionally followed by n-k rows for H. H is derived when absent.
void save_code(const CodeSpec& code, const std::string& path);
CodeSpec load_code(const std::string& path);

// Derives a parity-check matrix for an arbitrary full-rank generator.
BinaryMatrix derive_parity(const BinaryMatrix& generator);

}  // namespace tepforge

#endif
