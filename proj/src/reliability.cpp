#include "tepforge/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace tepforge {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double qfunc(double x) { return 0.5 * std::erfc(x / kSqrt2); }

}  // namespace

void ReliabilityDist::check() const {
    if (!(l_max > 0)) throw std::invalid_argument("ReliabilityDist: l_max must be > 0");
    if (std::fabs(cdf(0.0)) > 1e-9) throw std::invalid_argument("ReliabilityDist: cdf(0) != 0");
    if (cdf(l_max) < 1.0 - 1e-9) throw std::invalid_argument("ReliabilityDist: cdf(l_max) < 1 - 1e-9");
}

ReliabilityDist awgn_reliability(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("awgn_reliability: sigma must be > 0");
    const double mu = 2.0 / (sigma * sigma);  // |L| mean of the c=0 branch
    const double s = 2.0 / sigma;             // std-dev of L
    ReliabilityDist d;
    d.pdf = [mu, s](double l) {
        const double c = 1.0 / (s * kSqrt2Pi);
        const double a = (l - mu) / s, b = (l + mu) / s;
        return c * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    };
    d.cdf = [mu, s](double l) {
        return 0.5 * (std::erfc((mu - l) / (s * kSqrt2)) - std::erfc((mu + l) / (s * kSqrt2)));
    };
    d.l_max = mu + 10.0 * s;
    d.check();
    return d;
}

ReliabilityDist rayleigh_csi_reliability(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("rayleigh_csi_reliability: sigma must be > 0");
    const double s2 = sigma * sigma;
    const double root = std::sqrt(2.0 * s2 + 1.0);
    // f_L(sign*l | c=0), inner h-integral truncated at h = 8 (Rayleigh tail < 1e-27).
    // The exponential prefactor lives inside the integrand so the combined
    // exponent stays <= 0 and large |l| cannot overflow.
    auto branch = [sigma, s2, root](double l, double sign) {
        const double pref = sign * l * (root - 1.0) / 2.0;
        auto inner = [s2, root, l, sign, pref](double h) {
            const double t = s2 * l / (2.0 * h) + sign * h * root;
            return std::exp(pref - t * t / (2.0 * s2));
        };
        return (sigma / kSqrt2Pi) * integrate(inner, 1e-12, 8.0, 1e-11, 16);
    };
    auto pdf = [branch](double l) { return branch(l, -1.0) + branch(l, +1.0); };
    double l_max = find_support_upper(pdf, 8.0 / s2 + 8.0);
    auto table = std::make_shared<CumulativeCdf>(pdf, l_max, 1e-11);
    ReliabilityDist d;
    d.pdf = pdf;
    d.cdf = [table](double l) { return (*table)(l); };
    d.l_max = l_max;
    d.check();
    return d;
}

ReliabilityDist rayleigh_ncsi_reliability(double sigma, double mean_h) {
    if (!(sigma > 0)) throw std::invalid_argument("rayleigh_ncsi_reliability: sigma must be > 0");
    if (!(mean_h > 0)) throw std::invalid_argument("rayleigh_ncsi_reliability: mean_h must be > 0");
    const double s2 = sigma * sigma;
    const double d2 = s2 / (2.0 * s2 + 1.0);  // Delta^2
    const double delta = std::sqrt(d2);
    // f_L(l | c=0) in closed form; folded pdf adds the mirrored branch.
    auto cond = [sigma, s2, d2, delta, mean_h](double l) {
        const double eh2 = mean_h * mean_h;
        return (sigma * d2 / (2.0 * mean_h)) * std::exp(-d2 * s2 * l * l / (4.0 * eh2)) *
               (std::sqrt(2.0 / M_PI) * std::exp(-d2 * l * l / (8.0 * eh2)) +
                (delta * l / mean_h) * qfunc(-delta * l / (2.0 * mean_h)));
    };
    auto pdf = [cond](double l) { return cond(l) + cond(-l); };
    double l_max = find_support_upper(pdf, 8.0 * mean_h / s2 + 8.0);
    auto table = std::make_shared<CumulativeCdf>(pdf, l_max, 1e-11);
    ReliabilityDist d;
    d.pdf = pdf;
    d.cdf = [table](double l) { return (*table)(l); };
    d.l_max = l_max;
    d.check();
    return d;
}

ReliabilityDist received_magnitude_dist(const ChannelModel& model) {
    if (model.kind() != ChannelKind::Awgn && model.kind() != ChannelKind::GaussianMixture)
        throw std::invalid_argument("received_magnitude_dist: unsupported channel " + model.describe());
    ChannelModel m = model;
    auto pdf = [m](double v) { return received_pdf(m, v) + received_pdf(m, -v); };
    double hi0 = 2.0;
    if (model.kind() == ChannelKind::Awgn) hi0 = 1.0 + 10.0 * model.sigma();
    else
        for (const auto& c : model.components()) hi0 = std::max(hi0, 1.0 + std::fabs(c.mu) + 10.0 * c.sigma);
    double l_max = find_support_upper(pdf, hi0);
    auto table = std::make_shared<CumulativeCdf>(pdf, l_max, 1e-11);
    ReliabilityDist d;
    d.pdf = pdf;
    d.cdf = [table](double v) { return (*table)(v); };
    d.l_max = l_max;
    d.check();
    return d;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

RealFn order_stat_pdf(const ReliabilityDist& dist, int sample_size, int rank) {
    if (rank < 1 || rank > sample_size) throw std::invalid_argument("order_stat_pdf: rank out of range");
    const int N = sample_size, i = rank;
    // N! / ((i-1)! (N-i)!)
    const double lc = std::lgamma(N + 1.0) - std::lgamma(double(i)) - std::lgamma(N - i + 1.0);
    RealFn f = dist.pdf, F = dist.cdf;
    return [lc, N, i, f, F](double l) {
        double fl = f(l);
        if (fl <= 0) return 0.0;
        double Fl = std::clamp(F(l), 0.0, 1.0);
        double lg = lc + std::log(fl);
        if (i > 1) {
            if (Fl <= 0) return 0.0;
            lg += (i - 1) * std::log(Fl);
        }
        if (N - i > 0) {
            if (Fl >= 1) return 0.0;
            lg += (N - i) * std::log1p(-Fl);
        }
        return std::exp(lg);
    };
}

namespace {

void mode_layout(ProfileMode mode, int n, int k, int& sample, int& first_rank, int& count) {
    switch (mode) {
        case ProfileMode::Grand: sample = n; first_rank = 1; count = n; break;
        case ProfileMode::Posd: sample = k; first_rank = 1; count = k; break;
        case ProfileMode::Osd: sample = n; first_rank = n - k + 1; count = k; break;
    }
}

}  // namespace

ProfileMode profile_mode_from_string(const std::string& s) {
    if (s == "grand") return ProfileMode::Grand;
    if (s == "posd") return ProfileMode::Posd;
    if (s == "osd") return ProfileMode::Osd;
    throw std::invalid_argument("unknown profile mode '" + s + "' (expected grand|posd|osd)");
}

std::string to_string(ProfileMode m) {
    switch (m) {
        case ProfileMode::Grand: return "grand";
        case ProfileMode::Posd: return "posd";
        case ProfileMode::Osd: return "osd";
    }
    return "?";
}

OrderStatsProfile expected_profile(const ReliabilityDist& dist, int n, int k, ProfileMode mode) {
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("expected_profile: requires 1 <= k <= n");
    int sample = 0, first = 0, count = 0;
    mode_layout(mode, n, k, sample, first, count);
    OrderStatsProfile prof;
    prof.mode = mode;
    prof.sample_size = sample;
    prof.expected.resize(count);
    for (int j = 0; j < count; ++j) {
        RealFn fi = order_stat_pdf(dist, sample, first + j);
        prof.expected[j] = integrate([&fi](double l) { return l * fi(l); }, 0.0, dist.l_max, 1e-9, 48);
    }
    for (int j = 1; j < count; ++j)
        if (prof.expected[j] + 1e-7 < prof.expected[j - 1])
            throw std::runtime_error("expected_profile: expectations not non-decreasing (quadrature failure)");
    for (int j = 1; j < count; ++j) prof.expected[j] = std::max(prof.expected[j], prof.expected[j - 1]);
    return prof;
}

OrderStatsProfile expected_profile_from_signal(const ChannelModel& model, int n, int k, ProfileMode mode) {
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("expected_profile_from_signal: requires 1 <= k <= n");
    ReliabilityDist sig = received_magnitude_dist(model);
    int sample = mode == ProfileMode::Posd ? k : n;
    std::vector<double> rel(sample);
    for (int i = 1; i <= sample; ++i) {
        RealFn fi = order_stat_pdf(sig, sample, i);
        double ey = integrate([&fi](double v) { return v * fi(v); }, 0.0, sig.l_max, 1e-9, 48);
        rel[i - 1] = std::fabs(llr_value(model, ey));
    }
    std::sort(rel.begin(), rel.end());
    OrderStatsProfile prof;
    prof.mode = mode;
    prof.sample_size = sample;
    if (mode == ProfileMode::Osd)
        prof.expected.assign(rel.end() - k, rel.end());
    else
        prof.expected = std::move(rel);
    return prof;
}

OrderStatsProfile expected_profile_for_channel(const ChannelModel& model, int n, int k, ProfileMode mode) {
    switch (model.kind()) {
        case ChannelKind::Awgn: return expected_profile(awgn_reliability(model.sigma()), n, k, mode);
        case ChannelKind::RayleighCsi: return expected_profile(rayleigh_csi_reliability(model.sigma()), n, k, mode);
        case ChannelKind::RayleighNcsi:
            return expected_profile(rayleigh_ncsi_reliability(model.sigma(), model.mean_h()), n, k, mode);
        case ChannelKind::GaussianMixture: return expected_profile_from_signal(model, n, k, mode);
    }
    throw std::logic_error("expected_profile_for_channel: unreachable");
}

}  // namespace tepforge
