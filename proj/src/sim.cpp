#include "tepforge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace tepforge {

double ebn0_to_sigma(double ebn0_db, double rate) {
    if (!(rate > 0) || rate > 1) throw std::invalid_argument("ebn0_to_sigma: rate must be in (0,1]");
    return std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0)));
}

double sigma_to_ebn0(double sigma, double rate) {
    if (!(rate > 0) || rate > 1) throw std::invalid_argument("sigma_to_ebn0: rate must be in (0,1]");
    if (!(sigma > 0)) throw std::invalid_argument("sigma_to_ebn0: sigma must be > 0");
    return 10.0 * std::log10(1.0 / (2.0 * rate * sigma * sigma));
}

double hw_floor(std::uint64_t n, double p, std::uint64_t x) {
    if (p < 0 || p > 1) throw std::invalid_argument("hw_floor: p must be in [0,1]");
    if (x > n) throw std::invalid_argument("hw_floor: x must be <= n");
    if (p == 0) return x == 0 ? 1.0 : 0.0;
    if (p == 1) return x == n ? 1.0 : 0.0;
    double lg = std::lgamma(double(n) + 1) - std::lgamma(double(x) + 1) - std::lgamma(double(n - x) + 1);
    lg += double(x) * std::log(p) + double(n - x) * std::log1p(-p);
    return std::exp(lg);
}

double wilson_halfwidth(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    const double z = 1.959963984540054;
    const double nd = double(trials);
    const double phat = double(successes) / nd;
    const double z2 = z * z;
    return (z / (1.0 + z2 / nd)) * std::sqrt(phat * (1.0 - phat) / nd + z2 / (4.0 * nd * nd));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t point_index, std::uint64_t frame_index) {
    std::uint64_t z = splitmix64(seed ^ splitmix64(point_index + 0x517CC1B727220A95ull));
    return std::mt19937_64(splitmix64(z + frame_index));
}

namespace {

struct PointCounts {
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t queries = 0;
};

ChannelModel channel_at_sigma(const ChannelModel& templ, double sigma) {
    switch (templ.kind()) {
        case ChannelKind::Awgn: return ChannelModel::awgn(sigma);
        case ChannelKind::RayleighCsi: return ChannelModel::rayleigh_csi(sigma);
        case ChannelKind::RayleighNcsi: return ChannelModel::rayleigh_ncsi(sigma, templ.mean_h());
        case ChannelKind::GaussianMixture: return templ;
    }
    throw std::logic_error("channel_at_sigma: unreachable");
}

// Resolve the TEP source for one sweep point; returns the storage (if owned)
// plus a view on it.
std::optional<TepList> materialize_teps(const SimConfig& cfg, const ChannelModel& channel, std::uint64_t point_seed,
                                        std::uint64_t max_mq) {
    const std::size_t width = tep_width(cfg.decoder, cfg.code);
    if (cfg.teps.fixed) return std::nullopt;  // caller uses the fixed list
    std::uint64_t count = cfg.teps.count ? cfg.teps.count : max_mq;
    ProfileMode mode = cfg.decoder == DecoderKind::Grand  ? ProfileMode::Grand
                       : cfg.decoder == DecoderKind::Posd ? ProfileMode::Posd
                                                          : ProfileMode::Osd;
    switch (cfg.teps.ordering) {
        case Ordering::HW: return hw_teps(std::uint32_t(width), count);
        case Ordering::LW: return lw_teps(std::uint32_t(width), count);
        case Ordering::ILW: return ilw_teps(std::uint32_t(width), count);
        case Ordering::EW: {
            OrderStatsProfile prof = expected_profile_for_channel(channel, int(cfg.code.n), int(cfg.code.k), mode);
            return ew_teps(prof, count);
        }
        case Ordering::LUT: {
            std::mt19937_64 rng(splitmix64(point_seed ^ 0xC2B2AE3D27D4EB4Full));
            TepList l = lut_teps(channel, cfg.code, mode, cfg.teps.lut_min_count, cfg.teps.lut_max_frames, rng);
            if (l.size() == 0) throw std::runtime_error("simulate: LUT budget produced no pattern with min_count");
            return l;
        }
        case Ordering::ML: return std::nullopt;  // per-frame stream
    }
    throw std::logic_error("materialize_teps: unreachable");
}

PointCounts simulate_block(const SimConfig& cfg, const ChannelModel& channel, const TepSource& teps,
                           std::uint64_t mq, std::uint64_t point_index, std::uint64_t first_frame,
                           std::uint64_t count) {
    PointCounts c;
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::uint64_t f = first_frame; f < first_frame + count; ++f) {
        std::mt19937_64 rng = frame_rng(cfg.seed, point_index, f);
        BitVec msg(cfg.code.k);
        for (std::size_t i = 0; i < cfg.code.k; ++i)
            if (bit(rng)) msg.set(i, true);
        BitVec cw = encode(cfg.code, msg);
        Frame frame = transmit_frame(channel, cw, rng);
        DecodeResult res = decode_with(cfg.decoder, cfg.code, frame.llrs, teps, mq);
        ++c.frames;
        c.queries += res.queries;
        const BitVec& compare = res.codeword ? *res.codeword : hard_demod(frame.llrs);
        std::uint64_t diff = (compare ^ cw).popcount();
        c.bit_errors += diff;
        if (res.status != DecodeStatus::Decoded || diff != 0) ++c.frame_errors;
    }
    return c;
}

}  // namespace

std::vector<SimResultRow> run_fer(const SimConfig& cfg) {
    if (cfg.mq_points.empty()) throw std::invalid_argument("run_fer: mq_points must not be empty");
    if (cfg.stop.min_frame_errors < 1) throw std::invalid_argument("run_fer: min_frame_errors must be >= 1");
    if (cfg.stop.max_frames < cfg.stop.min_frame_errors)
        throw std::invalid_argument("run_fer: max_frames must be >= min_frame_errors");
    const bool fixed_channel = cfg.channel.kind() == ChannelKind::GaussianMixture;
    if (fixed_channel && !cfg.snr_points.empty())
        throw std::invalid_argument("run_fer: mixture channels have fixed parameters; snr_points must be empty");
    if (!fixed_channel && cfg.snr_points.empty())
        throw std::invalid_argument("run_fer: snr_points must not be empty for this channel");
    if (cfg.teps.fixed && cfg.teps.fixed->length != tep_width(cfg.decoder, cfg.code))
        throw std::invalid_argument("run_fer: TEP file width does not match decoder query width");
    const int workers = std::max(1, cfg.workers);

    std::vector<double> snrs = fixed_channel ? std::vector<double>{std::nan("")} : cfg.snr_points;
    std::vector<SimResultRow> rows;
    std::uint64_t point_index = 0;
    for (double snr : snrs) {
        ChannelModel channel =
            fixed_channel ? cfg.channel : channel_at_sigma(cfg.channel, ebn0_to_sigma(snr, cfg.code.rate()));
        std::uint64_t max_mq = *std::max_element(cfg.mq_points.begin(), cfg.mq_points.end());
        std::optional<TepList> owned = materialize_teps(cfg, channel, cfg.seed + point_index, max_mq);
        for (std::uint64_t mq : cfg.mq_points) {
            TepSource src = cfg.teps.fixed        ? TepSource::pregen(*cfg.teps.fixed)
                            : owned               ? TepSource::pregen(*owned)
                                                  : TepSource::ml_online();
            PointCounts total;
            std::uint64_t next_frame = 0;
            // Fixed round size: the stop rule is checked at the same frame
            // boundaries for every worker count, so counts are reproducible.
            const std::uint64_t round = 2048;
            while (total.frame_errors < cfg.stop.min_frame_errors && total.frames < cfg.stop.max_frames) {
                std::uint64_t want = std::min<std::uint64_t>(round, cfg.stop.max_frames - total.frames);
                if (workers == 1) {
                    PointCounts c = simulate_block(cfg, channel, src, mq, point_index, next_frame, want);
                    total.frames += c.frames;
                    total.frame_errors += c.frame_errors;
                    total.bit_errors += c.bit_errors;
                    total.queries += c.queries;
                } else {
                    std::vector<PointCounts> parts(workers);
                    std::vector<std::thread> pool;
                    std::uint64_t per = want / workers, extra = want % workers, start = next_frame;
                    for (int t = 0; t < workers; ++t) {
                        std::uint64_t cnt = per + (std::uint64_t(t) < extra ? 1 : 0);
                        pool.emplace_back([&, t, start, cnt] {
                            parts[t] = simulate_block(cfg, channel, src, mq, point_index, start, cnt);
                        });
                        start += cnt;
                    }
                    for (auto& th : pool) th.join();
                    for (const PointCounts& c : parts) {
                        total.frames += c.frames;
                        total.frame_errors += c.frame_errors;
                        total.bit_errors += c.bit_errors;
                        total.queries += c.queries;
                    }
                }
                next_frame += want;
            }
            SimResultRow row;
            row.snr_db = snr;
            row.mq = mq;
            row.frames = total.frames;
            row.frame_errors = total.frame_errors;
            row.fer = total.frames ? double(total.frame_errors) / double(total.frames) : 0.0;
            row.ber = total.frames ? double(total.bit_errors) / (double(total.frames) * double(cfg.code.n)) : 0.0;
            row.avg_queries = total.frames ? double(total.queries) / double(total.frames) : 0.0;
            row.ci95 = wilson_halfwidth(total.frame_errors, total.frames);
            rows.push_back(row);
        }
        ++point_index;
    }
    return rows;
}

void export_results(const std::vector<SimResultRow>& rows, const std::string& path, ExportFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_results: cannot open " + path);
    char buf[64];
    if (format == ExportFormat::Csv) {
        out << "snr_db,mq,frames,frame_errors,fer,ber,avg_queries,ci95\n";
        for (const SimResultRow& r : rows) {
            std::snprintf(buf, sizeof buf, "%.17g", r.snr_db);
            out << buf << ',' << r.mq << ',' << r.frames << ',' << r.frame_errors << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.fer);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.ber);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.avg_queries);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.ci95);
            out << buf << '\n';
        }
    } else {
        out << "[\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const SimResultRow& r = rows[i];
            std::snprintf(buf, sizeof buf, "%.17g", r.snr_db);
            out << "  {\"snr_db\": " << (std::isnan(r.snr_db) ? std::string("null") : std::string(buf));
            out << ", \"mq\": " << r.mq << ", \"frames\": " << r.frames << ", \"frame_errors\": " << r.frame_errors;
            std::snprintf(buf, sizeof buf, "%.17g", r.fer);
            out << ", \"fer\": " << buf;
            std::snprintf(buf, sizeof buf, "%.17g", r.ber);
            out << ", \"ber\": " << buf;
            std::snprintf(buf, sizeof buf, "%.17g", r.avg_queries);
            out << ", \"avg_queries\": " << buf;
            std::snprintf(buf, sizeof buf, "%.17g", r.ci95);
            out << ", \"ci95\": " << buf << "}" << (i + 1 < rows.size() ? "," : "") << '\n';
        }
        out << "]\n";
    }
    if (!out) throw std::runtime_error("export_results: write failed for " + path);
}

std::vector<SimResultRow> load_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_results_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "snr_db,mq,frames,frame_errors,fer,ber,avg_queries,ci95")
        throw ParseError("results csv: bad header");
    std::vector<SimResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        SimResultRow r;
        if (!(ls >> r.snr_db >> r.mq >> r.frames >> r.frame_errors >> r.fer >> r.ber >> r.avg_queries >> r.ci95))
            throw ParseError("results csv line " + std::to_string(line_no) + ": expected 8 numeric fields");
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tepforge
