#include "tepforge/decode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tepforge {

double whd(const BitVec& word, const std::vector<double>& llrs) {
    if (word.size() != llrs.size()) throw std::invalid_argument("whd: length mismatch");
    double acc = 0;
    for (std::size_t i = 0; i < llrs.size(); ++i)
        if (word.get(i) != (llrs[i] < 0)) acc += std::fabs(llrs[i]);
    return acc;
}

double whd(const ErrorPattern& pattern, const std::vector<double>& llrs) {
    if (pattern.length != llrs.size()) throw std::invalid_argument("whd: length mismatch");
    double acc = 0;
    for (std::uint32_t i : pattern.support) acc += std::fabs(llrs[i]);
    return acc;
}

double generalized_distance(const ChannelModel& model, const std::vector<double>& received,
                            const BitVec& candidate) {
    if (candidate.size() != received.size()) throw std::invalid_argument("generalized_distance: length mismatch");
    if (model.kind() != ChannelKind::Awgn && model.kind() != ChannelKind::GaussianMixture)
        throw std::invalid_argument("generalized_distance: unsupported channel variant " + model.describe());
    double acc = 0;
    for (std::size_t j = 0; j < received.size(); ++j) {
        const int hard = llr_value(model, received[j]) < 0 ? 1 : 0;
        const int c = candidate.get(j) ? 1 : 0;
        if (hard == c) continue;
        acc += log_noise_pdf_given_bit(model, received[j], hard) - log_noise_pdf_given_bit(model, received[j], c);
    }
    return acc;
}

namespace {

// Ascending-reliability permutation of the given index range.
std::vector<std::uint32_t> sort_by_reliability(const std::vector<double>& llrs, std::size_t count) {
    std::vector<std::uint32_t> order(count);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::fabs(llrs[a]) < std::fabs(llrs[b]);
    });
    return order;
}

class PatternFeed {
   public:
    PatternFeed(const TepSource& src, const std::vector<double>& sorted_reliabilities, std::size_t width)
        : src_(src) {
        if (src_.is_ml()) {
            stream_.emplace(sorted_reliabilities);
        } else if (src_.list().length != width) {
            throw std::invalid_argument("decode: TEP width " + std::to_string(src_.list().length) +
                                        " does not match decoder query width " + std::to_string(width));
        }
    }

    PatternFeed(const PatternFeed&) = delete;

    const ErrorPattern* next() {
        if (src_.is_ml()) {
            double w;
            if (!stream_->next(scratch_, w)) return nullptr;
            return &scratch_;
        }
        if (idx_ >= src_.list().size()) return nullptr;
        return &src_.list().patterns[idx_++];
    }

   private:
    const TepSource& src_;
    std::optional<MlTepStream> stream_;
    ErrorPattern scratch_;
    std::size_t idx_ = 0;
};

struct FlipSearch {
    BitVec best;
    double best_whd = INFINITY;
    std::uint64_t queries = 0;
};

// Minimum-WHD search over message-bit flip patterns: candidate(e) =
// base_codeword XOR the generator rows selected through tep_to_row. The WHD
// accumulation walks the candidate-vs-hard-decision difference and aborts as
// soon as it cannot beat the incumbent; ties keep the first candidate.
FlipSearch min_whd_flip_search(const BinaryMatrix& gen, const BitVec& base_codeword,
                               const std::vector<std::uint32_t>& tep_to_row, const std::vector<double>& llrs,
                               PatternFeed& feed, std::uint64_t max_queries) {
    const std::size_t n = gen.cols();
    const std::size_t words = gen.words_per_row();
    std::vector<double> abs_llr(n);
    BitVec hard(n);
    for (std::size_t i = 0; i < n; ++i) {
        abs_llr[i] = std::fabs(llrs[i]);
        if (llrs[i] < 0) hard.set(i, true);
    }
    std::vector<std::uint64_t> base_diff(words), diff(words);
    for (std::size_t w = 0; w < words; ++w) base_diff[w] = base_codeword.words()[w] ^ hard.words()[w];

    FlipSearch out;
    out.best = BitVec(n);
    while (out.queries < max_queries) {
        const ErrorPattern* pat = feed.next();
        if (!pat) break;
        ++out.queries;
        for (std::size_t w = 0; w < words; ++w) diff[w] = base_diff[w];
        for (std::uint32_t j : pat->support) {
            const std::uint64_t* row = gen.row_words(tep_to_row[j]);
            for (std::size_t w = 0; w < words; ++w) diff[w] ^= row[w];
        }
        double whd_acc = 0;
        bool beaten = false;
        for (std::size_t wi = 0; wi < words && !beaten; ++wi) {
            std::uint64_t x = diff[wi];
            while (x) {
                whd_acc += abs_llr[wi * 64 + std::countr_zero(x)];
                x &= x - 1;
                if (whd_acc >= out.best_whd) {
                    beaten = true;
                    break;
                }
            }
        }
        if (!beaten) {
            out.best_whd = whd_acc;
            for (std::size_t w = 0; w < words; ++w) out.best.words()[w] = diff[w] ^ hard.words()[w];
        }
    }
    return out;
}

}  // namespace

DecodeResult grand_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                          std::uint64_t max_queries) {
    if (llrs.size() != code.n) throw std::invalid_argument("grand_decode: llr length != n");
    const std::size_t n = code.n, r = code.n - code.k;
    const std::size_t words = (r + 63) / 64;

    std::vector<std::uint32_t> order = sort_by_reliability(llrs, n);
    std::vector<double> sorted_abs(n);
    for (std::size_t i = 0; i < n; ++i) sorted_abs[i] = std::fabs(llrs[order[i]]);

    BitVec hard = hard_demod(llrs);
    BitVec s0 = code.parity.mul_transpose(hard);

    // Syndromes of unit flips, indexed by sorted position.
    std::vector<std::uint64_t> col(n * words, 0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t orig = order[j];
        for (std::size_t row = 0; row < r; ++row)
            if (code.parity.get(row, orig)) col[j * words + (row >> 6)] ^= std::uint64_t(1) << (row & 63);
    }

    PatternFeed feed(teps, sorted_abs, n);
    std::vector<std::uint64_t> syn(words);
    DecodeResult res;
    while (res.queries < max_queries) {
        const ErrorPattern* pat = feed.next();
        if (!pat) break;
        ++res.queries;
        for (std::size_t w = 0; w < words; ++w) syn[w] = s0.words()[w];
        for (std::uint32_t j : pat->support)
            for (std::size_t w = 0; w < words; ++w) syn[w] ^= col[j * words + w];
        bool zero = true;
        for (std::size_t w = 0; w < words; ++w) zero &= syn[w] == 0;
        if (zero) {
            BitVec cw = hard;
            for (std::uint32_t j : pat->support) cw.flip(order[j]);
            res.codeword = std::move(cw);
            res.status = DecodeStatus::Decoded;
            res.whd = whd(*pat, sorted_abs);
            return res;
        }
    }
    res.status = DecodeStatus::Abandoned;
    return res;
}

DecodeResult osd_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                        std::uint64_t max_queries) {
    if (llrs.size() != code.n) throw std::invalid_argument("osd_decode: llr length != n");
    const std::size_t n = code.n, k = code.k;

    // phi1: descending reliability over all positions.
    std::vector<std::uint32_t> desc(n);
    std::iota(desc.begin(), desc.end(), 0u);
    std::stable_sort(desc.begin(), desc.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::fabs(llrs[a]) > std::fabs(llrs[b]);
    });
    Permutation phi1(desc);

    BinaryMatrix gperm(k, n);
    for (std::size_t row = 0; row < k; ++row)
        for (std::size_t c = 0; c < n; ++c)
            if (code.generator.get(row, phi1[c])) gperm.set(row, c, true);
    auto [gsys, phi2] = systematic_form(gperm);
    Permutation perm = Permutation::composed(phi1, phi2);

    std::vector<double> lperm = perm.apply(llrs);
    BitVec base_msg(k);
    for (std::size_t i = 0; i < k; ++i)
        if (lperm[i] < 0) base_msg.set(i, true);

    // TEP index j = j-th least reliable basis position.
    std::vector<std::uint32_t> tep_to_basis = sort_by_reliability(lperm, k);
    std::vector<double> basis_abs(k);
    for (std::size_t j = 0; j < k; ++j) basis_abs[j] = std::fabs(lperm[tep_to_basis[j]]);

    PatternFeed feed(teps, basis_abs, k);
    FlipSearch search = min_whd_flip_search(gsys, gsys.left_mul(base_msg), tep_to_basis, lperm, feed, max_queries);
    DecodeResult res;
    res.queries = search.queries;
    res.codeword = perm.apply_inverse(search.best);
    res.status = DecodeStatus::Decoded;
    res.whd = search.best_whd;
    return res;
}

DecodeResult posd_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                         std::uint64_t max_queries) {
    if (llrs.size() != code.n) throw std::invalid_argument("posd_decode: llr length != n");
    if (!code.is_systematic())
        throw std::invalid_argument("posd_decode: generator must be in standard form [I|P]");
    const std::size_t k = code.k;

    std::vector<std::uint32_t> order = sort_by_reliability(llrs, k);
    std::vector<double> sorted_abs(k);
    for (std::size_t j = 0; j < k; ++j) sorted_abs[j] = std::fabs(llrs[order[j]]);

    BitVec base_msg(k);
    for (std::size_t i = 0; i < k; ++i)
        if (llrs[i] < 0) base_msg.set(i, true);

    PatternFeed feed(teps, sorted_abs, k);
    FlipSearch search =
        min_whd_flip_search(code.generator, code.generator.left_mul(base_msg), order, llrs, feed, max_queries);
    DecodeResult res;
    res.queries = search.queries;
    res.codeword = std::move(search.best);
    res.status = DecodeStatus::Decoded;
    res.whd = search.best_whd;
    return res;
}

DecoderKind decoder_from_string(const std::string& s) {
    if (s == "grand") return DecoderKind::Grand;
    if (s == "osd") return DecoderKind::Osd;
    if (s == "posd") return DecoderKind::Posd;
    throw std::invalid_argument("unknown decoder '" + s + "' (expected grand|osd|posd)");
}

std::string to_string(DecoderKind d) {
    switch (d) {
        case DecoderKind::Grand: return "grand";
        case DecoderKind::Osd: return "osd";
        case DecoderKind::Posd: return "posd";
    }
    return "?";
}

DecodeResult decode_with(DecoderKind kind, const CodeSpec& code, const std::vector<double>& llrs,
                         const TepSource& teps, std::uint64_t max_queries) {
    switch (kind) {
        case DecoderKind::Grand: return grand_decode(code, llrs, teps, max_queries);
        case DecoderKind::Osd: return osd_decode(code, llrs, teps, max_queries);
        case DecoderKind::Posd: return posd_decode(code, llrs, teps, max_queries);
    }
    throw std::logic_error("decode_with: unreachable");
}

std::size_t tep_width(DecoderKind kind, const CodeSpec& code) {
    return kind == DecoderKind::Grand ? code.n : code.k;
}

}  // namespace tepforge
