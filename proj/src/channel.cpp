#include "tepforge/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tepforge {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // ln(sqrt(2*pi))

double log_gauss(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}

// ln sum_i omega_i N(x; mu_i + shift, sigma_i), stable for far tails.
double log_mixture_pdf(const std::vector<GaussComponent>& comps, double x, double shift) {
    double m = -INFINITY;
    for (const auto& c : comps) m = std::max(m, std::log(c.omega) + log_gauss(x, c.mu + shift, c.sigma));
    if (!std::isfinite(m)) return -INFINITY;
    double s = 0;
    for (const auto& c : comps) s += std::exp(std::log(c.omega) + log_gauss(x, c.mu + shift, c.sigma) - m);
    return m + std::log(s);
}

}  // namespace

ChannelModel ChannelModel::awgn(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("ChannelModel::awgn: sigma must be > 0");
    ChannelModel m;
    m.kind_ = ChannelKind::Awgn;
    m.sigma_ = sigma;
    return m;
}

ChannelModel ChannelModel::mixture(std::vector<GaussComponent> components) {
    if (components.empty()) throw std::invalid_argument("ChannelModel::mixture: needs at least one component");
    double wsum = 0;
    for (const auto& c : components) {
        if (!(c.sigma > 0)) throw std::invalid_argument("ChannelModel::mixture: component sigma must be > 0");
        if (!(c.omega > 0)) throw std::invalid_argument("ChannelModel::mixture: component weight must be > 0");
        wsum += c.omega;
    }
    if (std::fabs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("ChannelModel::mixture: component weights must sum to 1 within 1e-12");
    ChannelModel m;
    m.kind_ = ChannelKind::GaussianMixture;
    m.components_ = std::move(components);
    return m;
}

ChannelModel ChannelModel::rayleigh_csi(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("ChannelModel::rayleigh_csi: sigma must be > 0");
    ChannelModel m;
    m.kind_ = ChannelKind::RayleighCsi;
    m.sigma_ = sigma;
    return m;
}

ChannelModel ChannelModel::rayleigh_ncsi(double sigma, double mean_h) {
    if (!(sigma > 0)) throw std::invalid_argument("ChannelModel::rayleigh_ncsi: sigma must be > 0");
    if (!(mean_h > 0)) throw std::invalid_argument("ChannelModel::rayleigh_ncsi: mean_h must be > 0");
    ChannelModel m;
    m.kind_ = ChannelKind::RayleighNcsi;
    m.sigma_ = sigma;
    m.mean_h_ = mean_h;
    return m;
}

std::string ChannelModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case ChannelKind::Awgn: os << "awgn(sigma=" << sigma_ << ")"; break;
        case ChannelKind::GaussianMixture: os << "mixture(" << components_.size() << " components)"; break;
        case ChannelKind::RayleighCsi: os << "rayleigh_csi(sigma=" << sigma_ << ")"; break;
        case ChannelKind::RayleighNcsi: os << "rayleigh_ncsi(sigma=" << sigma_ << ",mean_h=" << mean_h_ << ")"; break;
    }
    return os.str();
}

std::vector<double> bpsk_modulate(const BitVec& bits) {
    std::vector<double> x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) x[i] = bits.get(i) ? -1.0 : 1.0;
    return x;
}

double sample_rayleigh_gain(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double g1 = g(rng), g2 = g(rng);
    return std::sqrt((g1 * g1 + g2 * g2) * 0.5);
}

TransmitResult transmit(const ChannelModel& model, const std::vector<double>& symbols, std::mt19937_64& rng) {
    TransmitResult out;
    out.received.resize(symbols.size());
    std::normal_distribution<double> g(0.0, 1.0);
    switch (model.kind()) {
        case ChannelKind::Awgn:
            for (std::size_t i = 0; i < symbols.size(); ++i) out.received[i] = symbols[i] + model.sigma() * g(rng);
            break;
        case ChannelKind::GaussianMixture: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const auto& comps = model.components();
            for (std::size_t i = 0; i < symbols.size(); ++i) {
                double pick = u(rng), acc = 0;
                const GaussComponent* comp = &comps.back();
                for (const auto& c : comps) {
                    acc += c.omega;
                    if (pick <= acc) {
                        comp = &c;
                        break;
                    }
                }
                out.received[i] = symbols[i] + comp->mu + comp->sigma * g(rng);
            }
            break;
        }
        case ChannelKind::RayleighCsi:
        case ChannelKind::RayleighNcsi: {
            out.fading.emplace(symbols.size());
            for (std::size_t i = 0; i < symbols.size(); ++i) {
                double h = sample_rayleigh_gain(rng);
                (*out.fading)[i] = h;
                out.received[i] = h * symbols[i] + model.sigma() * g(rng);
            }
            break;
        }
    }
    return out;
}

double llr_value(const ChannelModel& model, double y, double h) {
    const double s2 = model.sigma() * model.sigma();
    switch (model.kind()) {
        case ChannelKind::Awgn: return 2.0 * y / s2;
        case ChannelKind::GaussianMixture:
            return log_mixture_pdf(model.components(), y, 1.0) - log_mixture_pdf(model.components(), y, -1.0);
        case ChannelKind::RayleighCsi: return 2.0 * y * h / s2;
        case ChannelKind::RayleighNcsi: return 2.0 * y * model.mean_h() / s2;
    }
    return 0;
}

std::vector<double> llr(const ChannelModel& model, const std::vector<double>& received,
                        const std::optional<std::vector<double>>& fading) {
    if (model.kind() == ChannelKind::RayleighCsi) {
        if (!fading || fading->size() != received.size())
            throw std::invalid_argument("llr: RayleighCsi requires per-bit fading gains");
    }
    std::vector<double> out(received.size());
    for (std::size_t i = 0; i < received.size(); ++i)
        out[i] = llr_value(model, received[i], fading ? (*fading)[i] : 1.0);
    return out;
}

BitVec hard_demod(const std::vector<double>& llrs) {
    BitVec b(llrs.size());
    for (std::size_t i = 0; i < llrs.size(); ++i)
        if (llrs[i] < 0) b.set(i, true);
    return b;
}

double log_noise_pdf_given_bit(const ChannelModel& model, double y, int bit) {
    const double x = bit ? -1.0 : 1.0;
    switch (model.kind()) {
        case ChannelKind::Awgn: return log_gauss(y, x, model.sigma());
        case ChannelKind::GaussianMixture: return log_mixture_pdf(model.components(), y, x);
        default:
            throw std::invalid_argument("noise_pdf_given_bit: unsupported channel variant " + model.describe());
    }
}

double noise_pdf_given_bit(const ChannelModel& model, double y, int bit) {
    return std::exp(log_noise_pdf_given_bit(model, y, bit));
}

double received_pdf(const ChannelModel& model, double y) {
    return 0.5 * (noise_pdf_given_bit(model, y, 0) + noise_pdf_given_bit(model, y, 1));
}

Frame transmit_frame(const ChannelModel& model, const BitVec& codeword, std::mt19937_64& rng) {
    Frame f;
    f.bits = codeword;
    f.symbols = bpsk_modulate(codeword);
    TransmitResult tr = transmit(model, f.symbols, rng);
    f.received = std::move(tr.received);
    f.fading = std::move(tr.fading);
    f.llrs = llr(model, f.received, f.fading);
    return f;
}

}  // namespace tepforge
