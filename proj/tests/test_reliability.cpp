#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tepforge/reliability.hpp"
#include "tepforge/sim.hpp"

using namespace tepforge;

namespace {

// Empirical mean of each sorted reliability over simulated frames.
std::vector<double> mc_sorted_means(const ChannelModel& model, int n, int frames, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BitVec zero(n);
    std::vector<double> acc(n, 0.0), a(n);
    for (int f = 0; f < frames; ++f) {
        Frame fr = transmit_frame(model, zero, rng);
        for (int i = 0; i < n; ++i) a[i] = std::fabs(fr.llrs[i]);
        std::sort(a.begin(), a.end());
        for (int i = 0; i < n; ++i) acc[i] += a[i];
    }
    for (double& v : acc) v /= frames;
    return acc;
}

}  // namespace

TEST_CASE("awgn reliability: erfc closed-form cdf equals the integrated pdf at 100 points within 1e-6") {
    ReliabilityDist d = awgn_reliability(0.7);
    for (int i = 1; i <= 100; ++i) {
        double l = d.l_max * i / 100.0;
        double quad = integrate(d.pdf, 0.0, l, 1e-10, 32);
        CHECK(std::fabs(quad - d.cdf(l)) < 1e-6);
    }
}

TEST_CASE("awgn reliability: total probability reaches 1 at l_max") {
    for (double sigma : {0.4, 0.7, 1.2}) {
        ReliabilityDist d = awgn_reliability(sigma);
        CHECK(d.cdf(d.l_max) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("awgn reliability: sigma=0.7 pdf has a single interior mode near 2/sigma^2") {
    ReliabilityDist d = awgn_reliability(0.7);
    double best_l = 0, best = -1;
    int direction_changes = 0;
    double prev = d.pdf(0.0);
    bool rising = true;
    for (double l = 0.01; l < d.l_max; l += 0.01) {
        double v = d.pdf(l);
        if (v > best) {
            best = v;
            best_l = l;
        }
        if (rising && v < prev - 1e-12) {
            rising = false;
            ++direction_changes;
        } else if (!rising && v > prev + 1e-12) {
            rising = true;
            ++direction_changes;
        }
        prev = v;
    }
    CHECK(best_l == doctest::Approx(2.0 / 0.49).epsilon(0.05));
    CHECK(direction_changes == 1);  // unimodal: rise then fall
}

TEST_CASE("rayleigh csi reliability: normalization within 1e-5 and pdf nonnegative") {
    ReliabilityDist d = rayleigh_csi_reliability(0.8);
    double total = integrate(d.pdf, 0.0, d.l_max, 1e-8, 64);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-5));
    for (double l = 0; l < d.l_max; l += d.l_max / 157) CHECK(d.pdf(l) >= 0.0);
}

TEST_CASE("rayleigh csi reliability: quadrature pdf matches the analytic two-sided exponential") {
    // The h-integral collapses in closed form: with r = sqrt(2 sigma^2 + 1),
    // folded pdf = sigma^2/(2r) * (exp(-l(r-1)/2) + exp(-l(r+1)/2)).
    for (double sigma : {0.5, 0.8, 1.1}) {
        ReliabilityDist d = rayleigh_csi_reliability(sigma);
        double r = std::sqrt(2 * sigma * sigma + 1);
        for (double l : {0.0, 0.3, 1.0, 2.5, 6.0, 11.0}) {
            if (l > d.l_max) continue;
            double analytic =
                sigma * sigma / (2 * r) * (std::exp(-l * (r - 1) / 2) + std::exp(-l * (r + 1) / 2));
            CHECK(d.pdf(l) == doctest::Approx(analytic).epsilon(1e-8));
        }
    }
}

TEST_CASE("rayleigh csi reliability: Monte-Carlo |2yh/sigma^2| histogram matches the pdf (chi^2 p > 0.01)") {
    const double sigma = 0.8;
    ReliabilityDist d = rayleigh_csi_reliability(sigma);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> samples(1'000'000);
    for (double& s : samples) {
        double h = sample_rayleigh_gain(rng);
        double y = h + sigma * g(rng);
        s = std::fabs(2.0 * y * h / (sigma * sigma));
    }
    double p = oracles::chi2_pvalue_against_cdf(std::move(samples), d.cdf, 60);
    CHECK(p > 0.01);
}

TEST_CASE("rayleigh ncsi reliability: Delta at sigma=1 is sqrt(1/3)") {
    // Delta enters the closed form; check it through the pdf at l = 0:
    // f_L(0|c=0) = (sigma Delta^2 / (2 E[h])) * sqrt(2/pi), folded doubles it.
    const double sigma = 1.0, eh = 0.8862;
    ReliabilityDist d = rayleigh_ncsi_reliability(sigma, eh);
    double delta2 = 1.0 / 3.0;
    double expect = 2.0 * (sigma * delta2 / (2 * eh)) * std::sqrt(2.0 / M_PI);
    CHECK(d.pdf(0.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rayleigh ncsi reliability: normalization within 1e-6") {
    for (double sigma : {0.6, 1.0}) {
        ReliabilityDist d = rayleigh_ncsi_reliability(sigma);
        double total = integrate(d.pdf, 0.0, d.l_max, 1e-9, 64);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("rayleigh ncsi reliability: Monte-Carlo |2 y E[h] / sigma^2| histogram matches the pdf (chi^2 p > 0.01)") {
    const double sigma = 1.0, eh = 0.8862;
    ReliabilityDist d = rayleigh_ncsi_reliability(sigma, eh);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> samples(1'000'000);
    for (double& s : samples) {
        double h = sample_rayleigh_gain(rng);
        double y = h + sigma * g(rng);
        s = std::fabs(2.0 * y * eh / (sigma * sigma));
    }
    double p = oracles::chi2_pvalue_against_cdf(std::move(samples), d.cdf, 60);
    CHECK(p > 0.01);
}

TEST_CASE("order_stat_pdf: N=1 reduces to the base pdf") {
    ReliabilityDist d = awgn_reliability(0.9);
    RealFn f = order_stat_pdf(d, 1, 1);
    for (double l = 0; l < d.l_max; l += d.l_max / 37) CHECK(f(l) == doctest::Approx(d.pdf(l)).epsilon(1e-12));
}

TEST_CASE("order_stat_pdf: rank out of range rejected") {
    ReliabilityDist d = awgn_reliability(0.9);
    CHECK_THROWS_AS(order_stat_pdf(d, 8, 0), std::invalid_argument);
    CHECK_THROWS_AS(order_stat_pdf(d, 8, 9), std::invalid_argument);
}

TEST_CASE("order_stat_pdf: N=128 family of modes shifts right with rank") {
    ReliabilityDist d = awgn_reliability(0.7);
    double prev_mode = -1;
    for (int rank : {5, 15, 45, 85, 115}) {
        RealFn f = order_stat_pdf(d, 128, rank);
        double best_l = 0, best = -1;
        for (double l = 0; l < d.l_max; l += d.l_max / 800) {
            double v = f(l);
            if (v > best) {
                best = v;
                best_l = l;
            }
        }
        CHECK(best_l > prev_mode);
        prev_mode = best_l;
    }
}

TEST_CASE("order_stat_pdf: normalization within 1e-6 for N=128, i in {1,64,128}") {
    ReliabilityDist d = awgn_reliability(0.7);
    for (int rank : {1, 64, 128}) {
        RealFn f = order_stat_pdf(d, 128, rank);
        double total = integrate(f, 0.0, d.l_max, 1e-9, 64);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("order_stat_pdf: mixture over ranks recovers the base density") {
    ReliabilityDist d = awgn_reliability(0.8);
    const int N = 16;
    std::vector<RealFn> fs;
    for (int i = 1; i <= N; ++i) fs.push_back(order_stat_pdf(d, N, i));
    for (double l : {0.1, 0.9, 2.3, 4.5, 7.0}) {
        double mix = 0;
        for (const RealFn& f : fs) mix += f(l) / N;
        CHECK(std::fabs(mix - d.pdf(l)) < 1e-6);
    }
}

TEST_CASE("expected_profile: non-decreasing and nonnegative") {
    ReliabilityDist d = awgn_reliability(0.7);
    for (ProfileMode mode : {ProfileMode::Grand, ProfileMode::Posd, ProfileMode::Osd}) {
        OrderStatsProfile p = expected_profile(d, 32, 20, mode);
        CHECK(p.positions() == (mode == ProfileMode::Grand ? 32u : 20u));
        for (std::size_t i = 0; i < p.positions(); ++i) {
            CHECK(p.expected[i] >= 0);
            if (i) CHECK(p.expected[i] >= p.expected[i - 1]);
        }
    }
}

TEST_CASE("expected_profile: osd starts higher than grand, same tail rank") {
    ReliabilityDist d = awgn_reliability(0.7);
    OrderStatsProfile grand = expected_profile(d, 128, 105, ProfileMode::Grand);
    OrderStatsProfile osd = expected_profile(d, 128, 105, ProfileMode::Osd);
    CHECK(osd.expected[0] > grand.expected[0]);
    // osd rank i is grand rank n-k+i
    for (std::size_t i = 0; i < osd.positions(); ++i)
        CHECK(osd.expected[i] == doctest::Approx(grand.expected[128 - 105 + i]).epsilon(1e-9));
}

TEST_CASE("expected_profile: grand with (n,n) equals posd with k=n") {
    ReliabilityDist d = awgn_reliability(0.8);
    OrderStatsProfile a = expected_profile(d, 24, 24, ProfileMode::Grand);
    OrderStatsProfile b = expected_profile(d, 24, 24, ProfileMode::Posd);
    REQUIRE(a.positions() == b.positions());
    for (std::size_t i = 0; i < a.positions(); ++i)
        CHECK(a.expected[i] == doctest::Approx(b.expected[i]).epsilon(1e-12));
}

TEST_CASE("expected_profile: osd-mode dominates grand-mode position-wise") {
    ReliabilityDist d = awgn_reliability(0.9);
    OrderStatsProfile grand = expected_profile(d, 24, 16, ProfileMode::Grand);
    OrderStatsProfile osd = expected_profile(d, 24, 16, ProfileMode::Osd);
    for (std::size_t i = 0; i < osd.positions(); ++i) CHECK(osd.expected[i] >= grand.expected[i]);
}

TEST_CASE("expected_profile: matches sorted-reliability Monte-Carlo means within 1% (n=16 smoke)") {
    const double sigma = 0.7;
    ReliabilityDist d = awgn_reliability(sigma);
    OrderStatsProfile p = expected_profile(d, 16, 8, ProfileMode::Grand);
    std::vector<double> mc = mc_sorted_means(ChannelModel::awgn(sigma), 16, 100'000, 17);
    for (int i = 0; i < 16; ++i) CHECK(std::fabs(mc[i] - p.expected[i]) / mc[i] < 0.01);
}

TEST_CASE("expected_profile_from_signal: awgn path agrees with the llr path within 2%") {
    ChannelModel m = ChannelModel::awgn(0.7);
    OrderStatsProfile llr_path = expected_profile(awgn_reliability(0.7), 64, 32, ProfileMode::Grand);
    OrderStatsProfile sig_path = expected_profile_from_signal(m, 64, 32, ProfileMode::Grand);
    REQUIRE(sig_path.positions() == llr_path.positions());
    for (std::size_t i = 0; i < llr_path.positions(); ++i)
        CHECK(std::fabs(sig_path.expected[i] - llr_path.expected[i]) / llr_path.expected[i] < 0.02);
}

TEST_CASE("expected_profile_from_signal: mixture channel 1 uniformly more reliable than channel 2") {
    OrderStatsProfile p1 = expected_profile_from_signal(oracles::mixture_channel(1), 128, 64, ProfileMode::Grand);
    OrderStatsProfile p2 = expected_profile_from_signal(oracles::mixture_channel(2), 128, 64, ProfileMode::Grand);
    int strictly = 0;
    for (int i = 0; i < 128; ++i) {
        CHECK(p1.expected[i] >= p2.expected[i] - 1e-9);
        if (p1.expected[i] > p2.expected[i] + 1e-9) ++strictly;
    }
    CHECK(strictly > 64);
}

TEST_CASE("expected_profile_from_signal: output non-decreasing after the final sort") {
    OrderStatsProfile p = expected_profile_from_signal(oracles::mixture_channel(2), 32, 16, ProfileMode::Posd);
    for (std::size_t i = 1; i < p.positions(); ++i) CHECK(p.expected[i] >= p.expected[i - 1]);
    OrderStatsProfile q = expected_profile_from_signal(oracles::mixture_channel(2), 32, 16, ProfileMode::Osd);
    CHECK(q.positions() == 16);
    for (std::size_t i = 1; i < q.positions(); ++i) CHECK(q.expected[i] >= q.expected[i - 1]);
}

TEST_CASE("reliability dists: pdf/cdf quadrature consistency at l_max") {
    ReliabilityDist awgn = awgn_reliability(0.6);
    CHECK(integrate(awgn.pdf, 0.0, awgn.l_max, 1e-9, 48) == doctest::Approx(awgn.cdf(awgn.l_max)).epsilon(1e-6));
    ReliabilityDist ncsi = rayleigh_ncsi_reliability(0.9);
    CHECK(integrate(ncsi.pdf, 0.0, ncsi.l_max, 1e-9, 48) == doctest::Approx(ncsi.cdf(ncsi.l_max)).epsilon(1e-6));
}
