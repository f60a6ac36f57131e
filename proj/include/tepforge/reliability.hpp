#ifndef TEPFORGE_RELIABILITY_HPP
#define TEPFORGE_RELIABILITY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tepforge/channel.hpp"
#include "tepforge/quadrature.hpp"

namespace tepforge {

// Numerically evaluable density/distribution pair of a nonnegative quantity
// (per-bit reliability |L|, or |y| on the received-signal path) truncated at l_max.
struct ReliabilityDist {
    RealFn pdf;
    RealFn cdf;
    double l_max = 0;

    void check() const;  // cdf(0) ~ 0 and cdf(l_max) >= 1 - 1e-9
};

ReliabilityDist awgn_reliability(double sigma);
ReliabilityDist rayleigh_csi_reliability(double sigma);
ReliabilityDist rayleigh_ncsi_reliability(double sigma, double mean_h = 0.8862);

// Folded distribution of the received magnitude |y| (Awgn / GaussianMixture).
ReliabilityDist received_magnitude_dist(const ChannelModel& model);

// Density of the i-th smallest among N i.i.d. draws; log-gamma internally so
// N = 128 stays finite.
RealFn order_stat_pdf(const ReliabilityDist& dist, int sample_size, int rank);

enum class ProfileMode { Grand, Posd, Osd };

ProfileMode profile_mode_from_string(const std::string& s);
std::string to_string(ProfileMode m);

// Expected sorted reliabilities E(phi(|L|)[i]), ascending. Sample/rank layout:
//   grand: N = n, ranks 1..n          (m = n entries)
//   posd:  N = k, ranks 1..k          (m = k entries)
//   osd:   N = n, ranks n-k+1..n      (m = k entries, the most reliable basis)
struct OrderStatsProfile {
    ProfileMode mode = ProfileMode::Grand;
    int sample_size = 0;
    std::vector<double> expected;

    std::size_t positions() const { return expected.size(); }
};

OrderStatsProfile expected_profile(const ReliabilityDist& dist, int n, int k, ProfileMode mode);

// Received-signal alternative: order statistics of |y|, each expectation mapped
// through the channel LLR, absolute values, final ascending sort. For osd mode
// all n positions are computed and the k most reliable kept.
OrderStatsProfile expected_profile_from_signal(const ChannelModel& model, int n, int k, ProfileMode mode);

// Path picked by channel kind: LLR distribution where it is known in closed
// form (awgn, rayleigh), received-signal distribution for mixtures.
OrderStatsProfile expected_profile_for_channel(const ChannelModel& model, int n, int k, ProfileMode mode);

double log_binomial(int n, int k);

}  // namespace tepforge

#endif
