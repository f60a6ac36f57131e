// tepforge: channel-adaptive test-error-pattern generation and GRAND/OSD/POSD
// decoding experiments. One binary, subcommand per task.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tepforge/config.hpp"
#include "tepforge/decode.hpp"
#include "tepforge/reliability.hpp"
#include "tepforge/sim.hpp"
#include "tepforge/tep.hpp"

namespace tf = tepforge;

namespace {

int log_level() {
    const char* env = std::getenv("TEPFORGE_LOG");
    return env ? std::atoi(env) : 0;
}

void logv(const std::string& msg) {
    if (log_level() > 0) std::cerr << "[tepforge] " << msg << '\n';
}

struct ChannelArgs {
    std::string type = "awgn";
    double sigma = 0;
    double mean_h = 0.8862;
    std::string params_file;

    void attach(CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--channel", type, "Channel type: awgn|mixture|rayleigh_csi|rayleigh_ncsi");
        if (required) opt->required();
        cmd->add_option("--sigma", sigma, "Noise std-dev (awgn/rayleigh channels)");
        cmd->add_option("--mean-h", mean_h, "Expected fading gain for rayleigh_ncsi")->capture_default_str();
        cmd->add_option("--params", params_file, "JSON channel block, e.g. mixture components");
    }

    tf::ChannelModel build() const {
        if (!params_file.empty()) {
            nlohmann::json j = tf::load_json_file(params_file);
            return tf::parse_channel(j, params_file);
        }
        if (type == "awgn") return tf::ChannelModel::awgn(sigma);
        if (type == "rayleigh_csi") return tf::ChannelModel::rayleigh_csi(sigma);
        if (type == "rayleigh_ncsi") return tf::ChannelModel::rayleigh_ncsi(sigma, mean_h);
        if (type == "mixture")
            throw tf::ConfigError("--channel mixture requires --params <file> with the component list");
        throw tf::ConfigError("--channel: unknown channel type '" + type + "'");
    }
};

std::vector<std::vector<double>> load_llr_frames(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open LLR file " + path);
    std::vector<std::vector<double>> frames;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw tf::ParseError("llr file line " + std::to_string(line_no) + ": invalid number");
        if (row.size() != n)
            throw tf::ParseError("llr file line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                                 " values, got " + std::to_string(row.size()));
        frames.push_back(std::move(row));
    }
    return frames;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"channel-adaptive TEP generation and GRAND/OSD/POSD decoding toolkit"};
    app.require_subcommand(1);

    // ---- code-gen ----
    auto* code_gen = app.add_subcommand("code-gen", "Generate a seeded random linear code file");
    std::uint64_t cg_n = 0, cg_k = 0, cg_seed = 1;
    std::string cg_out;
    code_gen->add_option("--n", cg_n, "Code length")->required();
    code_gen->add_option("--k", cg_k, "Message length")->required();
    code_gen->add_option("--seed", cg_seed, "RNG seed")->capture_default_str();
    code_gen->add_option("--out", cg_out, "Output code file")->required();

    // ---- dist-dump ----
    auto* dist_dump = app.add_subcommand("dist-dump", "Dump expected sorted-reliability profiles as CSV");
    ChannelArgs dd_channel;
    dd_channel.attach(dist_dump, true);
    std::string dd_mode = "grand", dd_out, dd_pdf_out, dd_pdf_ranks;
    std::uint64_t dd_n = 0, dd_k = 0, dd_pdf_points = 200;
    dist_dump->add_option("--mode", dd_mode, "grand|posd|osd")->capture_default_str();
    dist_dump->add_option("--n", dd_n, "Code length")->required();
    dist_dump->add_option("--k", dd_k, "Message length")->required();
    dist_dump->add_option("--out", dd_out, "Output CSV")->required();
    dist_dump->add_option("--pdf-out", dd_pdf_out, "Optional CSV of sampled order-statistic pdfs");
    dist_dump->add_option("--pdf-ranks", dd_pdf_ranks, "Comma-separated ranks for --pdf-out");
    dist_dump->add_option("--pdf-points", dd_pdf_points, "Grid points per rank")->capture_default_str();

    // ---- gen-teps ----
    auto* gen_teps = app.add_subcommand("gen-teps", "Generate a TEP file under a chosen ordering");
    ChannelArgs gt_channel;
    gt_channel.attach(gen_teps, false);
    std::string gt_order, gt_mode = "grand", gt_out, gt_code;
    std::uint64_t gt_n = 0, gt_k = 0, gt_m = 0, gt_seed = 1, gt_lut_min = 10, gt_lut_frames = 200000;
    gen_teps->add_option("--order", gt_order, "hw|lw|ilw|ew|lut")->required();
    gen_teps->add_option("--mode", gt_mode, "grand|posd|osd")->capture_default_str();
    gen_teps->add_option("--n", gt_n, "Code length")->required();
    gen_teps->add_option("--k", gt_k, "Message length");
    gen_teps->add_option("-M,--count", gt_m, "Number of patterns")->required();
    gen_teps->add_option("--out", gt_out, "Output TEP file")->required();
    gen_teps->add_option("--seed", gt_seed, "RNG seed (lut)")->capture_default_str();
    gen_teps->add_option("--code", gt_code, "Code file (lut)");
    gen_teps->add_option("--lut-min-count", gt_lut_min, "Minimum occurrences per LUT pattern")
        ->capture_default_str();
    gen_teps->add_option("--lut-frames", gt_lut_frames, "Monte-Carlo frame budget (lut)")->capture_default_str();

    // ---- decode ----
    auto* decode = app.add_subcommand("decode", "Decode LLR frames from CSV (one frame per line)");
    std::string de_code, de_teps, de_decoder, de_in, de_out, de_order;
    std::uint64_t de_mq = 1000;
    decode->add_option("--code", de_code, "Code file")->required();
    decode->add_option("--decoder", de_decoder, "grand|osd|posd")->required();
    decode->add_option("--teps", de_teps, "TEP file (omit with --order ml)");
    decode->add_option("--order", de_order, "'ml' for the per-frame stream");
    decode->add_option("--mq", de_mq, "Maximum queries")->capture_default_str();
    decode->add_option("--llrs", de_in, "Input CSV of LLR frames")->required();
    decode->add_option("--out", de_out, "Output CSV (status,queries,whd)")->required();

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo FER experiment from a JSON config");
    std::string si_config, si_out, si_format = "csv";
    int si_workers = 1;
    simulate->add_option("--config", si_config, "Experiment JSON")->required();
    simulate->add_option("--out", si_out, "Results file")->required();
    simulate->add_option("--format", si_format, "csv|json")->capture_default_str();
    simulate->add_option("--workers", si_workers, "Worker threads")->capture_default_str();

    // ---- overlap ----
    auto* overlap_cmd = app.add_subcommand("overlap", "Percent overlap of the first M patterns of two TEP files");
    std::string ov_a, ov_b;
    std::vector<std::uint64_t> ov_m;
    overlap_cmd->add_option("--a", ov_a, "First TEP file")->required();
    overlap_cmd->add_option("--b", ov_b, "Second TEP file")->required();
    overlap_cmd->add_option("-M", ov_m, "Pattern-count prefixes to compare")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*code_gen) {
            tf::CodeSpec code = tf::random_linear_code(cg_n, cg_k, cg_seed);
            tf::save_code(code, cg_out);
            std::printf("wrote [%zu,%zu] code to %s (rank %zu, G*H^T = 0)\n", code.n, code.k, cg_out.c_str(),
                        tf::gf2_rank(code.generator));
        } else if (*dist_dump) {
            tf::ChannelModel model = dd_channel.build();
            tf::ProfileMode mode = tf::profile_mode_from_string(dd_mode);
            tf::OrderStatsProfile prof = tf::expected_profile_for_channel(model, int(dd_n), int(dd_k), mode);
            std::ofstream out(dd_out);
            if (!out) throw std::runtime_error("cannot open " + dd_out);
            out << "i,expected_reliability\n";
            for (std::size_t i = 0; i < prof.expected.size(); ++i) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.12g", prof.expected[i]);
                out << (i + 1) << ',' << buf << '\n';
            }
            logv("profile written: " + dd_out);
            if (!dd_pdf_out.empty()) {
                if (dd_pdf_ranks.empty()) throw tf::ConfigError("--pdf-out requires --pdf-ranks");
                if (model.kind() == tf::ChannelKind::GaussianMixture)
                    throw tf::ConfigError("--pdf-out: order-statistic pdf dump uses the LLR path; "
                                          "not available for mixture channels");
                tf::ReliabilityDist dist =
                    model.kind() == tf::ChannelKind::Awgn ? tf::awgn_reliability(model.sigma())
                    : model.kind() == tf::ChannelKind::RayleighCsi
                        ? tf::rayleigh_csi_reliability(model.sigma())
                        : tf::rayleigh_ncsi_reliability(model.sigma(), model.mean_h());
                std::ofstream pout(dd_pdf_out);
                if (!pout) throw std::runtime_error("cannot open " + dd_pdf_out);
                pout << "rank,l,pdf\n";
                std::istringstream rs(dd_pdf_ranks);
                std::string tok;
                int sample = mode == tf::ProfileMode::Posd ? int(dd_k) : int(dd_n);
                while (std::getline(rs, tok, ',')) {
                    int rank = std::stoi(tok);
                    tf::RealFn f = tf::order_stat_pdf(dist, sample, rank);
                    for (std::uint64_t p = 0; p <= dd_pdf_points; ++p) {
                        double l = dist.l_max * double(p) / double(dd_pdf_points);
                        pout << rank << ',' << l << ',' << f(l) << '\n';
                    }
                }
            }
        } else if (*gen_teps) {
            tf::Ordering order = tf::ordering_from_string(gt_order);
            tf::ProfileMode mode = tf::profile_mode_from_string(gt_mode);
            if (gt_k == 0 && (mode != tf::ProfileMode::Grand || order == tf::Ordering::EW || order == tf::Ordering::LUT))
                throw tf::ConfigError("--k: required for this order/mode combination");
            std::uint32_t width = std::uint32_t(mode == tf::ProfileMode::Grand ? gt_n : gt_k);
            tf::TepList list;
            switch (order) {
                case tf::Ordering::HW: list = tf::hw_teps(width, gt_m); break;
                case tf::Ordering::LW: list = tf::lw_teps(width, gt_m); break;
                case tf::Ordering::ILW: list = tf::ilw_teps(width, gt_m); break;
                case tf::Ordering::EW: {
                    tf::ChannelModel model = gt_channel.build();
                    tf::OrderStatsProfile prof =
                        tf::expected_profile_for_channel(model, int(gt_n), int(gt_k ? gt_k : gt_n), mode);
                    list = tf::ew_teps(prof, gt_m);
                    break;
                }
                case tf::Ordering::LUT: {
                    if (gt_code.empty()) throw tf::ConfigError("--code: required for --order lut");
                    tf::CodeSpec code = tf::load_code(gt_code);
                    if (code.n != gt_n || (gt_k && code.k != gt_k))
                        throw tf::ConfigError("--code: dimensions do not match --n/--k");
                    tf::ChannelModel model = gt_channel.build();
                    std::mt19937_64 rng(gt_seed);
                    list = tf::lut_teps(model, code, mode, gt_lut_min, gt_lut_frames, rng);
                    if (list.size() == 0)
                        std::fprintf(stderr,
                                     "warning: no pattern reached %llu occurrences within %llu frames; "
                                     "empty list written\n",
                                     (unsigned long long)gt_lut_min, (unsigned long long)gt_lut_frames);
                    if (list.size() > gt_m) {
                        list.patterns.resize(gt_m);
                        list.weights.resize(gt_m);
                    }
                    break;
                }
                case tf::Ordering::ML:
                    throw tf::ConfigError("--order ml is a per-frame stream; it cannot be pregenerated "
                                          "(use the decoder's ml source)");
            }
            tf::save_teps(list, gt_out);
            std::printf("wrote %zu %s patterns of width %u to %s\n", list.size(), tf::to_string(order).c_str(),
                        list.length, gt_out.c_str());
        } else if (*decode) {
            tf::CodeSpec code = tf::load_code(de_code);
            tf::DecoderKind kind = tf::decoder_from_string(de_decoder);
            tf::TepList list;
            bool ml = de_order == "ml";
            if (!ml) {
                if (de_teps.empty()) throw tf::ConfigError("--teps: required unless --order ml");
                list = tf::load_teps(de_teps);
            }
            auto frames = load_llr_frames(de_in, code.n);
            std::ofstream out(de_out);
            if (!out) throw std::runtime_error("cannot open " + de_out);
            out << "status,queries,whd\n";
            for (const auto& llrs : frames) {
                tf::TepSource src = ml ? tf::TepSource::ml_online() : tf::TepSource::pregen(list);
                tf::DecodeResult res = tf::decode_with(kind, code, llrs, src, de_mq);
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.12g", res.whd);
                out << (res.status == tf::DecodeStatus::Decoded ? "decoded" : "abandoned") << ',' << res.queries
                    << ',' << (res.status == tf::DecodeStatus::Decoded ? buf : "") << '\n';
            }
            std::printf("decoded %zu frames -> %s\n", frames.size(), de_out.c_str());
        } else if (*simulate) {
            nlohmann::json j = tf::load_json_file(si_config);
            std::string base = std::filesystem::path(si_config).parent_path().string();
            tf::SimConfig cfg = tf::parse_experiment(j, base);
            cfg.workers = si_workers;
            logv("running " + std::to_string(cfg.snr_points.size() ? cfg.snr_points.size() : 1) + " point(s)");
            auto rows = tf::run_fer(cfg);
            tf::export_results(rows, si_out, si_format == "json" ? tf::ExportFormat::Json : tf::ExportFormat::Csv);
            std::printf("wrote %zu result rows to %s\n", rows.size(), si_out.c_str());
        } else if (*overlap_cmd) {
            tf::TepList a = tf::load_teps(ov_a);
            tf::TepList b = tf::load_teps(ov_b);
            for (std::uint64_t m : ov_m) std::printf("M=%llu overlap=%.2f%%\n", (unsigned long long)m,
                                                     tf::overlap(a, b, m));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
