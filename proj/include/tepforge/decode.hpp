#ifndef TEPFORGE_DECODE_HPP
#define TEPFORGE_DECODE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tepforge/channel.hpp"
#include "tepforge/gf2.hpp"
#include "tepforge/tep.hpp"

namespace tepforge {

enum class DecodeStatus { Decoded, Abandoned };

struct DecodeResult {
    std::optional<BitVec> codeword;
    DecodeStatus status = DecodeStatus::Abandoned;
    std::uint64_t queries = 0;
    double whd = 0;  // of the returned codeword
};

// Either a pregenerated list (patterns in ascending-reliability-sorted
// coordinates) or the per-frame maximum-likelihood stream.
class TepSource {
   public:
    static TepSource pregen(const TepList& list) { return TepSource(&list); }
    static TepSource ml_online() { return TepSource(nullptr); }

    bool is_ml() const { return list_ == nullptr; }
    const TepList& list() const { return *list_; }

   private:
    explicit TepSource(const TepList* list) : list_(list) {}
    const TepList* list_;
};

// Weighted Hamming distance of a word against the hard decision.
double whd(const BitVec& word, const std::vector<double>& llrs);
// Expected/realized WHD of a pattern: sum of |L| over its support.
double whd(const ErrorPattern& pattern, const std::vector<double>& llrs);

// Appendix metric: eta(y, c) = sum_j ln P(y_j | theta(L_j)) / P(y_j | c_j),
// computed from the channel's conditional densities (Awgn / GaussianMixture).
double generalized_distance(const ChannelModel& model, const std::vector<double>& received, const BitVec& candidate);

// Flip TEPs on the hard decision (all n positions, ascending-reliability
// coordinates) and return the first syndrome-zero candidate.
DecodeResult grand_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                          std::uint64_t max_queries);

// Reliability sort (descending), Gaussian elimination to a systematic basis,
// TEPs on the k most reliable independent positions, minimum-WHD over queries.
DecodeResult osd_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                        std::uint64_t max_queries);

// TEPs on the first k (message) bits of a systematic code; no per-frame
// elimination. Always returns its minimum-WHD candidate.
DecodeResult posd_decode(const CodeSpec& code, const std::vector<double>& llrs, const TepSource& teps,
                         std::uint64_t max_queries);

enum class DecoderKind { Grand, Osd, Posd };

DecoderKind decoder_from_string(const std::string& s);
std::string to_string(DecoderKind d);

DecodeResult decode_with(DecoderKind kind, const CodeSpec& code, const std::vector<double>& llrs,
                         const TepSource& teps, std::uint64_t max_queries);

// TEP width consumed by each decoder: n for GRAND, k for OSD/POSD.
std::size_t tep_width(DecoderKind kind, const CodeSpec& code);

}  // namespace tepforge

#endif
