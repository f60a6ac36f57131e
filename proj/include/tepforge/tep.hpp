#ifndef TEPFORGE_TEP_HPP
#define TEPFORGE_TEP_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tepforge/channel.hpp"
#include "tepforge/gf2.hpp"
#include "tepforge/reliability.hpp"

namespace tepforge {

// Binary error pattern of width `length`, stored as its ascending support.
struct ErrorPattern {
    std::uint32_t length = 0;
    std::vector<std::uint32_t> support;  // strictly ascending, 0-based

    bool operator==(const ErrorPattern& o) const { return length == o.length && support == o.support; }
    std::size_t weight_hamming() const { return support.size(); }
};

struct ErrorPatternHash {
    std::size_t operator()(const ErrorPattern& p) const {
        std::size_t h = p.length;
        for (std::uint32_t v : p.support) h = h * 1099511628211ull + v + 1;
        return h;
    }
};

// Per-position additive weights; positions are pre-sorted by ascending
// reliability, so the vector must be nonnegative and non-decreasing.
struct WeightProfile {
    std::vector<double> weights;

    explicit WeightProfile(std::vector<double> w);
};

enum class Ordering { HW, LW, ILW, EW, ML, LUT };

std::string to_string(Ordering o);
Ordering ordering_from_string(const std::string& s);

struct TepList {
    Ordering ordering = Ordering::HW;
    std::uint32_t length = 0;
    std::vector<ErrorPattern> patterns;
    std::vector<double> weights;

    std::size_t size() const { return patterns.size(); }
};

// Increasing-weight enumerator over subsets of positions 0..m-1 with an
// additive weight function. Emits every subset exactly once in non-decreasing
// weight; equal weights break by colexicographic support (smallest last
// element first). The streaming state keeps one pending candidate per "last
// error position" slot plus the emission history, which is pruned below the
// minimum live parent pointer when prune is enabled.
class IncreasingWeightEnumerator {
   public:
    explicit IncreasingWeightEnumerator(std::vector<double> weights, bool prune = false);

    // False once all 2^m subsets have been emitted.
    bool next(ErrorPattern& pattern, double& weight);

    std::size_t history_size() const { return hist_.size(); }

   private:
    struct Slot {
        std::vector<std::uint32_t> support;
        double weight = 0;
        std::size_t parent = 0;  // absolute index into the emission history
        bool live = false;
    };
    struct HistEntry {
        std::vector<std::uint32_t> support;
        double weight;
    };

    void prune_history();

    std::vector<double> w_;
    bool prune_ = false;
    bool emitted_root_ = false;
    std::vector<Slot> slots_;
    std::deque<HistEntry> hist_;
    std::size_t hist_base_ = 0;
};

// First M patterns of w(Z) = sum of weights over the support, non-decreasing;
// truncates at 2^m when M exceeds the full power set.
TepList gen_increasing_weight(const WeightProfile& profile, std::uint64_t max_patterns,
                              Ordering tag = Ordering::EW);

TepList hw_teps(std::uint32_t m, std::uint64_t max_patterns);
TepList lw_teps(std::uint32_t m, std::uint64_t max_patterns);
TepList ilw_teps(std::uint32_t m, std::uint64_t max_patterns);
TepList ew_teps(const OrderStatsProfile& profile, std::uint64_t max_patterns);

std::uint64_t ilw_value(const ErrorPattern& p);

// Per-frame stream in non-decreasing weighted Hamming distance.
class MlTepStream {
   public:
    explicit MlTepStream(std::vector<double> sorted_reliabilities);
    bool next(ErrorPattern& pattern, double& whd);

   private:
    IncreasingWeightEnumerator gen_;
};

// Empirical (LUT) patterns: frames are simulated on the model, positions
// sorted by ascending reliability, and the true error pattern recorded in
// sorted coordinates. Patterns seen at least min_count times are ranked by
// descending frequency. Returns an empty list when nothing reaches min_count.
TepList lut_teps(const ChannelModel& model, const CodeSpec& code, ProfileMode mode, std::uint64_t min_count,
                 std::uint64_t max_frames, std::mt19937_64& rng);

// |first-M(a) intersect first-M(b)| / M * 100.
double overlap(const TepList& a, const TepList& b, std::size_t m);

// Text format: "tepfile v1 <ordering> <m> <count>" then one line per pattern,
// weight followed by 1-based support indices.
void save_teps(const TepList& list, const std::string& path);
TepList load_teps(const std::string& path);

}  // namespace tepforge

#endif
