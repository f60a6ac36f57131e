#include "tepforge/gf2.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace tepforge {

BinaryMatrix BinaryMatrix::identity(std::size_t n) {
    BinaryMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitVec BinaryMatrix::row(std::size_t r) const {
    BitVec v(cols_);
    for (std::size_t w = 0; w < wpr_; ++w) v.words()[w] = data_[r * wpr_ + w];
    return v;
}

void BinaryMatrix::xor_row_into(std::size_t r, BitVec& acc) const {
    for (std::size_t w = 0; w < wpr_; ++w) acc.words()[w] ^= data_[r * wpr_ + w];
}

void BinaryMatrix::xor_rows(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < wpr_; ++w) data_[dst * wpr_ + w] ^= data_[src * wpr_ + w];
}

void BinaryMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t w = 0; w < wpr_; ++w) std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
}

void BinaryMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) {
        bool va = get(r, a), vb = get(r, b);
        set(r, a, vb);
        set(r, b, va);
    }
}

BitVec BinaryMatrix::left_mul(const BitVec& u) const {
    if (u.size() != rows_) throw std::invalid_argument("left_mul: vector length != row count");
    BitVec out(cols_);
    u.for_each_set([&](std::size_t r) { xor_row_into(r, out); });
    return out;
}

BitVec BinaryMatrix::mul_transpose(const BitVec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("mul_transpose: vector length != column count");
    BitVec out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < wpr_; ++w) acc ^= data_[r * wpr_ + w] & x.words()[w];
        out.set(r, std::popcount(acc) & 1u);
    }
    return out;
}

BinaryMatrix BinaryMatrix::times_transpose(const BinaryMatrix& other) const {
    if (cols_ != other.cols_) throw std::invalid_argument("times_transpose: column counts differ");
    BinaryMatrix out(rows_, other.rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < other.rows_; ++j) {
            std::uint64_t acc = 0;
            for (std::size_t w = 0; w < wpr_; ++w) acc ^= data_[i * wpr_ + w] & other.data_[j * other.wpr_ + w];
            out.set(i, j, std::popcount(acc) & 1u);
        }
    }
    return out;
}

bool BinaryMatrix::is_zero() const {
    for (std::uint64_t w : data_)
        if (w) return false;
    return true;
}

Permutation::Permutation(std::vector<std::uint32_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::uint32_t v : map_) {
        if (v >= map_.size() || seen[v]) throw std::invalid_argument("Permutation: map is not a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t m) {
    std::vector<std::uint32_t> v(m);
    std::iota(v.begin(), v.end(), 0u);
    return Permutation(std::move(v));
}

BitVec Permutation::apply(const BitVec& v) const {
    BitVec out(v.size());
    for (std::size_t i = 0; i < map_.size(); ++i)
        if (v.get(map_[i])) out.set(i, true);
    return out;
}

BitVec Permutation::apply_inverse(const BitVec& v) const {
    BitVec out(v.size());
    for (std::size_t i = 0; i < map_.size(); ++i)
        if (v.get(i)) out.set(map_[i], true);
    return out;
}

Permutation Permutation::inverse() const {
    std::vector<std::uint32_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = std::uint32_t(i);
    return Permutation(std::move(inv));
}

Permutation Permutation::composed(const Permutation& first, const Permutation& second) {
    if (first.size() != second.size()) throw std::invalid_argument("Permutation::composed: size mismatch");
    std::vector<std::uint32_t> m(first.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = first.map_[second.map_[i]];
    return Permutation(std::move(m));
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < map_.size(); ++i)
        if (map_[i] != i) return false;
    return true;
}

CodeSpec::CodeSpec(BinaryMatrix g, BinaryMatrix h) : generator(std::move(g)), parity(std::move(h)) {
    k = generator.rows();
    n = generator.cols();
    if (parity.rows() != n - k || parity.cols() != n)
        throw std::invalid_argument("CodeSpec: parity matrix must be (n-k) x n");
    if (k >= n) throw std::invalid_argument("CodeSpec: requires k < n");
    if (!generator.times_transpose(parity).is_zero())
        throw std::invalid_argument("CodeSpec: G*H^T != 0");
    if (gf2_rank(generator) != k) throw std::invalid_argument("CodeSpec: generator is rank deficient");
}

bool CodeSpec::is_systematic() const {
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            if (generator.get(r, c) != (r == c)) return false;
    return true;
}

BitVec encode(const CodeSpec& code, const BitVec& message) {
    if (message.size() != code.k) throw std::invalid_argument("encode: message length != k");
    return code.generator.left_mul(message);
}

BitVec syndrome(const CodeSpec& code, const BitVec& word) {
    if (word.size() != code.n) throw std::invalid_argument("syndrome: word length != n");
    return code.parity.mul_transpose(word);
}

std::size_t gf2_rank(BinaryMatrix m) {
    std::size_t rank = 0;
    std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rows;
        for (std::size_t r = rank; r < rows; ++r)
            if (m.get(r, c)) {
                pivot = r;
                break;
            }
        if (pivot == rows) continue;
        m.swap_rows(rank, pivot);
        for (std::size_t r = 0; r < rows; ++r)
            if (r != rank && m.get(r, c)) m.xor_rows(r, rank);
        ++rank;
    }
    return rank;
}

std::pair<BinaryMatrix, Permutation> systematic_form(const BinaryMatrix& m) {
    BinaryMatrix a = m;
    std::size_t k = a.rows(), n = a.cols();
    Permutation perm = Permutation::identity(n);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t pivot = k;
        for (std::size_t r = c; r < k; ++r)
            if (a.get(r, c)) {
                pivot = r;
                break;
            }
        if (pivot == k) {
            std::size_t found = n;
            for (std::size_t c2 = c + 1; c2 < n && found == n; ++c2)
                for (std::size_t r = c; r < k; ++r)
                    if (a.get(r, c2)) {
                        found = c2;
                        break;
                    }
            if (found == n) throw std::invalid_argument("systematic_form: matrix is rank deficient");
            a.swap_cols(c, found);
            perm.swap_entries(c, found);
            for (std::size_t r = c; r < k; ++r)
                if (a.get(r, c)) {
                    pivot = r;
                    break;
                }
        }
        a.swap_rows(c, pivot);
        for (std::size_t r = 0; r < k; ++r)
            if (r != c && a.get(r, c)) a.xor_rows(r, c);
    }
    return {std::move(a), std::move(perm)};
}

CodeSpec random_linear_code(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 1 || k >= n) throw std::invalid_argument("random_linear_code: requires 1 <= k < n");
    std::mt19937_64 rng(seed);
    BinaryMatrix g(k, n), h(n - k, n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::size_t r = 0; r < k; ++r) {
        g.set(r, r, true);
        for (std::size_t c = k; c < n; ++c) g.set(r, c, bit(rng) != 0);
    }
    for (std::size_t r = 0; r < n - k; ++r) {
        for (std::size_t c = 0; c < k; ++c) h.set(r, c, g.get(c, k + r));
        h.set(r, k + r, true);
    }
    return CodeSpec(std::move(g), std::move(h));
}

BinaryMatrix derive_parity(const BinaryMatrix& generator) {
    std::size_t k = generator.rows(), n = generator.cols();
    auto [gs, perm] = systematic_form(generator);
    BinaryMatrix hs(n - k, n);
    for (std::size_t r = 0; r < n - k; ++r) {
        for (std::size_t c = 0; c < k; ++c) hs.set(r, c, gs.get(c, k + r));
        hs.set(r, k + r, true);
    }
    // Undo the column permutation so H matches the original column order.
    BinaryMatrix h(n - k, n);
    for (std::size_t r = 0; r < n - k; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (hs.get(r, c)) h.set(r, perm[c], true);
    return h;
}

void save_code(const CodeSpec& code, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_code: cannot open " + path);
    out << code.n << ' ' << code.k << '\n';
    for (std::size_t r = 0; r < code.k; ++r) out << code.generator.row(r).to_string() << '\n';
    for (std::size_t r = 0; r < code.n - code.k; ++r) out << code.parity.row(r).to_string() << '\n';
    if (!out) throw std::runtime_error("save_code: write failed for " + path);
}

namespace {

BinaryMatrix read_rows(std::istream& in, std::size_t rows, std::size_t cols, std::size_t& line_no) {
    BinaryMatrix m(rows, cols);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line))
            throw ParseError("code file: expected " + std::to_string(rows) + " matrix rows, got " +
                             std::to_string(r) + " (line " + std::to_string(line_no) + ")");
        ++line_no;
        if (line.size() != cols)
            throw ParseError("code file line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                             " characters, got " + std::to_string(line.size()));
        for (std::size_t c = 0; c < cols; ++c) {
            if (line[c] == '1')
                m.set(r, c, true);
            else if (line[c] != '0')
                throw ParseError("code file line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                 ": invalid character");
        }
    }
    return m;
}

}  // namespace

CodeSpec load_code(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_code: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("code file: empty file (line 1)");
    std::size_t line_no = 1;
    std::istringstream hs(header);
    long long n = 0, k = 0;
    if (!(hs >> n >> k) || n < 2 || k < 1 || k >= n)
        throw ParseError("code file line 1: header must be 'n k' with 1 <= k < n");
    BinaryMatrix g = read_rows(in, std::size_t(k), std::size_t(n), line_no);

    // Peek for an optional H block.
    std::streampos pos = in.tellg();
    std::string probe;
    bool has_h = bool(std::getline(in, probe)) && !probe.empty();
    in.clear();
    in.seekg(pos);
    if (has_h) {
        BinaryMatrix h = read_rows(in, std::size_t(n - k), std::size_t(n), line_no);
        return CodeSpec(std::move(g), std::move(h));
    }
    BinaryMatrix h = derive_parity(g);
    return CodeSpec(std::move(g), std::move(h));
}

}  // namespace tepforge
