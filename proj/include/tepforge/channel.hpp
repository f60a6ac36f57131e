#ifndef TEPFORGE_CHANNEL_HPP
#define TEPFORGE_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tepforge/bitvec.hpp"

namespace tepforge {

struct GaussComponent {
    double omega;  // mixture weight
    double mu;     // mean
    double sigma;  // std-dev
};

enum class ChannelKind { Awgn, GaussianMixture, RayleighCsi, RayleighNcsi };

// Memoryless channel description; immutable after construction.
class ChannelModel {
   public:
    static ChannelModel awgn(double sigma);
    static ChannelModel mixture(std::vector<GaussComponent> components);
    static ChannelModel rayleigh_csi(double sigma);
    static ChannelModel rayleigh_ncsi(double sigma, double mean_h = 0.8862);

    ChannelKind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double mean_h() const { return mean_h_; }
    const std::vector<GaussComponent>& components() const { return components_; }

    bool is_rayleigh() const { return kind_ == ChannelKind::RayleighCsi || kind_ == ChannelKind::RayleighNcsi; }

    std::string describe() const;

   private:
    ChannelModel() = default;
    ChannelKind kind_ = ChannelKind::Awgn;
    double sigma_ = 0;
    double mean_h_ = 0;
    std::vector<GaussComponent> components_;
};

struct TransmitResult {
    std::vector<double> received;
    std::optional<std::vector<double>> fading;  // per-bit gains, Rayleigh variants only
};

// One end-to-end frame: codeword, BPSK symbols, channel output and LLRs.
struct Frame {
    BitVec bits;
    std::vector<double> symbols;
    std::vector<double> received;
    std::optional<std::vector<double>> fading;
    std::vector<double> llrs;
};

std::vector<double> bpsk_modulate(const BitVec& bits);

TransmitResult transmit(const ChannelModel& model, const std::vector<double>& symbols, std::mt19937_64& rng);

// Elementwise exact LLR; fading is required for (and only used by) RayleighCsi.
std::vector<double> llr(const ChannelModel& model, const std::vector<double>& received,
                        const std::optional<std::vector<double>>& fading = std::nullopt);
double llr_value(const ChannelModel& model, double y, double h = 1.0);

BitVec hard_demod(const std::vector<double>& llrs);

// Conditional density of the received value given the transmitted bit
// (Awgn and GaussianMixture only).
double noise_pdf_given_bit(const ChannelModel& model, double y, int bit);
double log_noise_pdf_given_bit(const ChannelModel& model, double y, int bit);

// Unconditional received-signal density (equiprobable bits).
double received_pdf(const ChannelModel& model, double y);

// Rayleigh gain with E[h^2] = 1.
double sample_rayleigh_gain(std::mt19937_64& rng);

Frame transmit_frame(const ChannelModel& model, const BitVec& codeword, std::mt19937_64& rng);

}  // namespace tepforge

#endif
