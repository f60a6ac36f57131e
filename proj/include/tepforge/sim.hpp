#ifndef TEPFORGE_SIM_HPP
#define TEPFORGE_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tepforge/channel.hpp"
#include "tepforge/decode.hpp"
#include "tepforge/gf2.hpp"
#include "tepforge/tep.hpp"

namespace tepforge {

// sigma = sqrt(1 / (2 * rate * 10^(ebn0_db/10))); Es/N0 = rate * Eb/N0.
double ebn0_to_sigma(double ebn0_db, double rate);
double sigma_to_ebn0(double sigma, double rate);

// Exact binomial P(hw = x) for error probability p, evaluated in log space.
double hw_floor(std::uint64_t n, double p, std::uint64_t x);

// 95% Wilson interval half-width for a Bernoulli proportion.
double wilson_halfwidth(std::uint64_t successes, std::uint64_t trials);

struct StopRule {
    std::uint64_t min_frame_errors = 100;
    std::uint64_t max_frames = 10'000'000;
};

// How the harness obtains the TEP source for each sweep point.
struct TepSpec {
    Ordering ordering = Ordering::EW;
    std::optional<TepList> fixed;  // loaded from file; used as-is at every point
    std::uint64_t count = 0;       // patterns to generate when not fixed (0 = max mq)
    std::uint64_t lut_min_count = 10;
    std::uint64_t lut_max_frames = 200'000;
};

struct SimConfig {
    CodeSpec code;
    ChannelModel channel = ChannelModel::awgn(1.0);
    DecoderKind decoder = DecoderKind::Grand;
    TepSpec teps;
    std::vector<double> snr_points;      // empty for fixed-parameter channels (mixtures)
    std::vector<std::uint64_t> mq_points;
    StopRule stop;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct SimResultRow {
    double snr_db = 0;  // NaN for fixed-parameter channels
    std::uint64_t mq = 0;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double fer = 0;
    double ber = 0;
    double avg_queries = 0;
    double ci95 = 0;
};

std::vector<SimResultRow> run_fer(const SimConfig& config);

enum class ExportFormat { Csv, Json };

void export_results(const std::vector<SimResultRow>& rows, const std::string& path, ExportFormat format);
std::vector<SimResultRow> load_results_csv(const std::string& path);

// Per-frame RNG derivation: identical frame streams for a fixed seed,
// independently of worker count (and paired across TEP/decoder variants).
std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t point_index, std::uint64_t frame_index);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tepforge

#endif
