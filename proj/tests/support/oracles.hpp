#ifndef TEPFORGE_TESTS_ORACLES_HPP
#define TEPFORGE_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tepforge/channel.hpp"
#include "tepforge/decode.hpp"
#include "tepforge/gf2.hpp"
#include "tepforge/tep.hpp"

namespace oracles {

// Full power set sorted by (additive weight, colex) -- colex on an ascending
// support equals integer order of the bitmask. Independent of the streaming
// generator under test.
struct WeightedMask {
    double weight;
    std::uint32_t mask;
};

inline std::vector<WeightedMask> subsets_by_weight(const std::vector<double>& w) {
    const std::uint32_t m = std::uint32_t(w.size());
    std::vector<WeightedMask> all;
    all.reserve(std::size_t(1) << m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        double acc = 0;
        for (std::uint32_t j = 0; j < m; ++j)
            if (mask & (1u << j)) acc += w[j];
        all.push_back({acc, mask});
    }
    std::stable_sort(all.begin(), all.end(), [](const WeightedMask& a, const WeightedMask& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        return a.mask < b.mask;
    });
    return all;
}

inline std::uint32_t support_mask(const tepforge::ErrorPattern& p) {
    std::uint32_t mask = 0;
    for (std::uint32_t v : p.support) mask |= 1u << v;
    return mask;
}

// Same ordering for generic per-pattern value functions (LW, ILW, ...).
template <typename ValueFn>
std::vector<WeightedMask> subsets_by_value(std::uint32_t m, ValueFn value) {
    std::vector<WeightedMask> all;
    all.reserve(std::size_t(1) << m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) all.push_back({value(mask), mask});
    std::stable_sort(all.begin(), all.end(), [](const WeightedMask& a, const WeightedMask& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        return a.mask < b.mask;
    });
    return all;
}

// Exhaustive minimum-WHD decoder over the whole codebook (2^k messages).
inline tepforge::BitVec min_whd_codeword(const tepforge::CodeSpec& code, const std::vector<double>& llrs) {
    tepforge::BitVec best(code.n);
    double best_w = INFINITY;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << code.k); ++m) {
        tepforge::BitVec msg(code.k);
        for (std::size_t i = 0; i < code.k; ++i)
            if (m & (std::uint64_t(1) << i)) msg.set(i, true);
        tepforge::BitVec cw = tepforge::encode(code, msg);
        double w = tepforge::whd(cw, llrs);
        if (w < best_w) {
            best_w = w;
            best = cw;
        }
    }
    return best;
}

// Regularized incomplete gamma Q(a, x) (upper), series + continued fraction.
inline double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) return NAN;
    if (x == 0) return 1.0;
    if (x < a + 1.0) {  // lower series
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // upper continued fraction (Lentz)
    double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Chi-square goodness-of-fit p-value of samples against a cdf, equal-mass bins.
inline double chi2_pvalue_against_cdf(std::vector<double> samples, const std::function<double(double)>& cdf,
                                      int bins) {
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double stat = 0;
    std::size_t lo = 0;
    for (int b = 0; b < bins; ++b) {
        // bin edges at equal expected mass
        double qlo = double(b) / bins, qhi = double(b + 1) / bins;
        // invert cdf by bisection over the sample range extended a bit
        auto invert = [&](double q) {
            double a = 0.0, bb = samples.back() * 1.5 + 1.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (a + bb);
                if (cdf(mid) < q)
                    a = mid;
                else
                    bb = mid;
            }
            return 0.5 * (a + bb);
        };
        double hi_edge = b + 1 == bins ? INFINITY : invert(qhi);
        (void)qlo;
        std::size_t hi = lo;
        while (hi < samples.size() && samples[hi] < hi_edge) ++hi;
        double observed = double(hi - lo);
        double expected = n / bins;
        stat += (observed - expected) * (observed - expected) / expected;
        lo = hi;
    }
    return gamma_q(0.5 * (bins - 1), 0.5 * stat);
}

// Table parameters of the two mixture channels (components as omega, mu, sigma).
inline tepforge::ChannelModel mixture_channel(int which) {
    double outer = which == 1 ? 3.0 : 2.7;
    std::vector<tepforge::GaussComponent> cs = {{0.29, -outer, 0.3555},
                                                {0.01, -0.1, 0.13},
                                                {0.40, 0.0, 0.10},
                                                {0.01, 0.1, 0.13},
                                                {0.29, outer, 0.3555}};
    return tepforge::ChannelModel::mixture(std::move(cs));
}

inline tepforge::BitVec random_message(std::size_t k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    tepforge::BitVec msg(k);
    for (std::size_t i = 0; i < k; ++i)
        if (bit(rng)) msg.set(i, true);
    return msg;
}

}  // namespace oracles

#endif
