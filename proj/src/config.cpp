#include "tepforge/config.hpp"

#include <filesystem>
#include <fstream>

namespace tepforge {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key + ": missing required field");
    return j.at(key);
}

double require_number(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": must be a number");
    return v.get<double>();
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": must be a string");
    return v.get<std::string>();
}

std::string resolve(const std::string& base_dir, const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute() || base_dir.empty()) return rel;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

ChannelModel parse_channel(const json& j, const std::string& path) {
    std::string type = require_string(j, "type", path);
    try {
        if (type == "awgn") return ChannelModel::awgn(require_number(j, "sigma", path));
        if (type == "mixture") {
            const json& comps = require(j, "components", path);
            if (!comps.is_array() || comps.empty())
                throw ConfigError(path + ".components: must be a non-empty array of [omega, mu, sigma] triples");
            std::vector<GaussComponent> cs;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const json& c = comps[i];
                if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number())
                    throw ConfigError(path + ".components[" + std::to_string(i) +
                                      "]: must be an [omega, mu, sigma] triple");
                cs.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
            }
            return ChannelModel::mixture(std::move(cs));
        }
        if (type == "rayleigh_csi") return ChannelModel::rayleigh_csi(require_number(j, "sigma", path));
        if (type == "rayleigh_ncsi") {
            double mean_h = j.contains("mean_h") ? require_number(j, "mean_h", path) : 0.8862;
            return ChannelModel::rayleigh_ncsi(require_number(j, "sigma", path), mean_h);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    throw ConfigError(path + ".type: unknown channel type '" + type + "'");
}

SimConfig parse_experiment(const json& j, const std::string& base_dir) {
    SimConfig cfg;

    const json& code = require(j, "code", "config");
    if (code.contains("file")) {
        cfg.code = load_code(resolve(base_dir, require_string(code, "file", "config.code")));
    } else if (code.contains("random")) {
        const json& r = code.at("random");
        long long n = (long long)require_number(r, "n", "config.code.random");
        long long k = (long long)require_number(r, "k", "config.code.random");
        long long seed = (long long)require_number(r, "seed", "config.code.random");
        if (n < 2 || k < 1 || k >= n) throw ConfigError("config.code.random: requires 1 <= k < n");
        cfg.code = random_linear_code(std::size_t(n), std::size_t(k), std::uint64_t(seed));
    } else {
        throw ConfigError("config.code: must contain 'file' or 'random'");
    }

    // Swept channels take sigma from snr_points; the block may omit it.
    json channel_block = require(j, "channel", "config");
    if (channel_block.is_object() && channel_block.contains("type") && channel_block.at("type") != "mixture" &&
        !channel_block.contains("sigma"))
        channel_block["sigma"] = 1.0;
    cfg.channel = parse_channel(channel_block, "config.channel");

    try {
        cfg.decoder = decoder_from_string(require_string(j, "decoder", "config"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config.decoder: ") + e.what());
    }

    const json& teps = require(j, "teps", "config");
    try {
        cfg.teps.ordering = ordering_from_string(require_string(teps, "order", "config.teps"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config.teps.order: ") + e.what());
    }
    if (teps.contains("file")) {
        cfg.teps.fixed = load_teps(resolve(base_dir, require_string(teps, "file", "config.teps")));
        if (cfg.teps.fixed->ordering != cfg.teps.ordering)
            throw ConfigError("config.teps.file: ordering tag does not match config.teps.order");
    }
    if (teps.contains("count")) cfg.teps.count = (std::uint64_t)require_number(teps, "count", "config.teps");
    if (teps.contains("lut_min_count"))
        cfg.teps.lut_min_count = (std::uint64_t)require_number(teps, "lut_min_count", "config.teps");
    if (teps.contains("lut_max_frames"))
        cfg.teps.lut_max_frames = (std::uint64_t)require_number(teps, "lut_max_frames", "config.teps");

    if (j.contains("snr_points")) {
        const json& pts = j.at("snr_points");
        if (!pts.is_array()) throw ConfigError("config.snr_points: must be an array of Eb/N0 dB values");
        for (const json& p : pts) {
            if (!p.is_number()) throw ConfigError("config.snr_points: entries must be numbers");
            cfg.snr_points.push_back(p.get<double>());
        }
    }
    const json& mqs = require(j, "mq_points", "config");
    if (!mqs.is_array() || mqs.empty()) throw ConfigError("config.mq_points: must be a non-empty array");
    for (const json& p : mqs) {
        if (!p.is_number_unsigned() && !(p.is_number_integer() && p.get<long long>() > 0))
            throw ConfigError("config.mq_points: entries must be positive integers");
        cfg.mq_points.push_back(p.get<std::uint64_t>());
    }

    if (j.contains("stop")) {
        const json& s = j.at("stop");
        if (s.contains("min_frame_errors"))
            cfg.stop.min_frame_errors = (std::uint64_t)require_number(s, "min_frame_errors", "config.stop");
        if (s.contains("max_frames"))
            cfg.stop.max_frames = (std::uint64_t)require_number(s, "max_frames", "config.stop");
        if (cfg.stop.min_frame_errors < 1) throw ConfigError("config.stop.min_frame_errors: must be >= 1");
        if (cfg.stop.max_frames < cfg.stop.min_frame_errors)
            throw ConfigError("config.stop.max_frames: must be >= min_frame_errors");
    }
    if (j.contains("seed")) cfg.seed = (std::uint64_t)require_number(j, "seed", "config");

    // Cross-field dimension checks, surfaced before any simulation work.
    const bool fixed_channel = cfg.channel.kind() == ChannelKind::GaussianMixture;
    if (fixed_channel && !cfg.snr_points.empty())
        throw ConfigError("config.snr_points: mixture channels have fixed parameters; omit snr_points");
    if (!fixed_channel && cfg.snr_points.empty())
        throw ConfigError("config.snr_points: required for awgn/rayleigh channels");
    if (cfg.teps.fixed && cfg.teps.fixed->length != tep_width(cfg.decoder, cfg.code))
        throw ConfigError("config.teps.file: pattern width " + std::to_string(cfg.teps.fixed->length) +
                          " does not match decoder query width " +
                          std::to_string(tep_width(cfg.decoder, cfg.code)));
    return cfg;
}

}  // namespace tepforge
