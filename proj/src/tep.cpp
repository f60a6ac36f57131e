#include "tepforge/tep.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tepforge {

WeightProfile::WeightProfile(std::vector<double> w) : weights(std::move(w)) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0)) throw std::invalid_argument("WeightProfile: weights must be nonnegative");
        if (i > 0 && weights[i] < weights[i - 1])
            throw std::invalid_argument("WeightProfile: weights must be non-decreasing (sort by reliability first)");
    }
}

std::string to_string(Ordering o) {
    switch (o) {
        case Ordering::HW: return "hw";
        case Ordering::LW: return "lw";
        case Ordering::ILW: return "ilw";
        case Ordering::EW: return "ew";
        case Ordering::ML: return "ml";
        case Ordering::LUT: return "lut";
    }
    return "?";
}

Ordering ordering_from_string(const std::string& s) {
    if (s == "hw") return Ordering::HW;
    if (s == "lw") return Ordering::LW;
    if (s == "ilw") return Ordering::ILW;
    if (s == "ew") return Ordering::EW;
    if (s == "ml") return Ordering::ML;
    if (s == "lut") return Ordering::LUT;
    throw std::invalid_argument("unknown TEP ordering '" + s + "'");
}

IncreasingWeightEnumerator::IncreasingWeightEnumerator(std::vector<double> weights, bool prune)
    : w_(std::move(weights)), prune_(prune) {
    for (std::size_t i = 0; i < w_.size(); ++i) {
        if (!(w_[i] >= 0)) throw std::invalid_argument("IncreasingWeightEnumerator: weights must be nonnegative");
        if (i > 0 && w_[i] < w_[i - 1])
            throw std::invalid_argument("IncreasingWeightEnumerator: weights must be non-decreasing");
    }
    hist_.push_back({{}, 0.0});
    slots_.resize(w_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) {
        slots_[j].support = {std::uint32_t(j)};
        slots_[j].weight = w_[j];
        slots_[j].parent = 0;
        slots_[j].live = true;
    }
}

void IncreasingWeightEnumerator::prune_history() {
    std::size_t min_parent = hist_base_ + hist_.size();
    for (const Slot& s : slots_)
        if (s.live) min_parent = std::min(min_parent, s.parent);
    while (hist_base_ < min_parent && !hist_.empty()) {
        hist_.pop_front();
        ++hist_base_;
    }
}

bool IncreasingWeightEnumerator::next(ErrorPattern& pattern, double& weight) {
    pattern.length = std::uint32_t(w_.size());
    if (!emitted_root_) {
        emitted_root_ = true;
        pattern.support.clear();
        weight = 0.0;
        return true;
    }
    std::size_t best = w_.size();
    for (std::size_t j = 0; j < slots_.size(); ++j)
        if (slots_[j].live && (best == w_.size() || slots_[j].weight < slots_[best].weight)) best = j;
    if (best == w_.size()) return false;

    Slot& s = slots_[best];
    pattern.support = s.support;
    weight = s.weight;
    hist_.push_back({s.support, s.weight});

    // Successor: next history entry whose last set position precedes this slot.
    std::size_t p = s.parent + 1;
    const std::size_t end = hist_base_ + hist_.size();
    while (p < end) {
        const HistEntry& e = hist_[p - hist_base_];
        if (e.support.empty() || e.support.back() < std::uint32_t(best)) break;
        ++p;
    }
    if (p < end) {
        const HistEntry& e = hist_[p - hist_base_];
        s.support = e.support;
        s.support.push_back(std::uint32_t(best));
        s.weight = e.weight + w_[best];
        s.parent = p;
    } else {
        s.live = false;
    }
    if (prune_) prune_history();
    return true;
}

TepList gen_increasing_weight(const WeightProfile& profile, std::uint64_t max_patterns, Ordering tag) {
    if (max_patterns < 1) throw std::invalid_argument("gen_increasing_weight: max_patterns must be >= 1");
    TepList out;
    out.ordering = tag;
    out.length = std::uint32_t(profile.weights.size());
    IncreasingWeightEnumerator gen(profile.weights);
    ErrorPattern p;
    double w;
    while (out.patterns.size() < max_patterns && gen.next(p, w)) {
        out.patterns.push_back(p);
        out.weights.push_back(w);
    }
    return out;
}

TepList hw_teps(std::uint32_t m, std::uint64_t max_patterns) {
    if (m < 1) throw std::invalid_argument("hw_teps: m must be >= 1");
    TepList out;
    out.ordering = Ordering::HW;
    out.length = m;
    out.patterns.push_back({m, {}});
    out.weights.push_back(0.0);
    // Within a weight class, colexicographic successor on the ascending support.
    for (std::uint32_t w = 1; w <= m && out.patterns.size() < max_patterns; ++w) {
        std::vector<std::uint32_t> sup(w);
        for (std::uint32_t i = 0; i < w; ++i) sup[i] = i;
        while (out.patterns.size() < max_patterns) {
            out.patterns.push_back({m, sup});
            out.weights.push_back(double(w));
            std::uint32_t i = 0;
            while (i < w) {
                std::uint32_t limit = (i + 1 < w) ? sup[i + 1] : m;
                if (sup[i] + 1 < limit) break;
                ++i;
            }
            if (i == w) break;
            ++sup[i];
            for (std::uint32_t j = 0; j < i; ++j) sup[j] = j;
        }
    }
    return out;
}

TepList lw_teps(std::uint32_t m, std::uint64_t max_patterns) {
    if (m < 1) throw std::invalid_argument("lw_teps: m must be >= 1");
    std::vector<double> w(m);
    for (std::uint32_t i = 0; i < m; ++i) w[i] = double(i + 1);
    return gen_increasing_weight(WeightProfile(std::move(w)), max_patterns, Ordering::LW);
}

std::uint64_t ilw_value(const ErrorPattern& p) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < p.support.size(); ++j) v += std::uint64_t(p.support[j] + 1) * (j + 1);
    return v;
}

namespace {

// Colexicographic comparison of ascending supports.
bool colex_less(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t ia = a.size(), ib = b.size();
    while (ia > 0 && ib > 0) {
        if (a[ia - 1] != b[ib - 1]) return a[ia - 1] < b[ib - 1];
        --ia;
        --ib;
    }
    return ia < ib;
}

}  // namespace

TepList ilw_teps(std::uint32_t m, std::uint64_t max_patterns) {
    if (m < 1) throw std::invalid_argument("ilw_teps: m must be >= 1");
    // ILW is not position-additive, so the increasing-weight engine does not
    // apply. Best-first search with canonical successors: extend the support
    // by (last+1), or bump the last element; both strictly increase ILW and
    // reach every support exactly once.
    struct Node {
        std::uint64_t ilw;
        std::vector<std::uint32_t> sup;
    };
    auto cmp = [](const Node& a, const Node& b) {
        if (a.ilw != b.ilw) return a.ilw > b.ilw;
        return colex_less(b.sup, a.sup);
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> pq(cmp);
    TepList out;
    out.ordering = Ordering::ILW;
    out.length = m;
    out.patterns.push_back({m, {}});
    out.weights.push_back(0.0);
    if (max_patterns > 1) pq.push({1, {0}});
    while (!pq.empty() && out.patterns.size() < max_patterns) {
        Node cur = pq.top();
        pq.pop();
        out.patterns.push_back({m, cur.sup});
        out.weights.push_back(double(cur.ilw));
        const std::uint32_t last = cur.sup.back();
        if (last + 1 < m) {
            Node ext{cur.ilw + std::uint64_t(last + 2) * (cur.sup.size() + 1), cur.sup};
            ext.sup.push_back(last + 1);
            pq.push(std::move(ext));
            Node bump{cur.ilw + std::uint64_t(cur.sup.size()), cur.sup};
            bump.sup.back() = last + 1;
            pq.push(std::move(bump));
        }
    }
    return out;
}

TepList ew_teps(const OrderStatsProfile& profile, std::uint64_t max_patterns) {
    TepList out = gen_increasing_weight(WeightProfile(profile.expected), max_patterns, Ordering::EW);
    return out;
}

MlTepStream::MlTepStream(std::vector<double> sorted_reliabilities)
    : gen_(std::move(sorted_reliabilities), /*prune=*/true) {}

bool MlTepStream::next(ErrorPattern& pattern, double& whd) { return gen_.next(pattern, whd); }

TepList lut_teps(const ChannelModel& model, const CodeSpec& code, ProfileMode mode, std::uint64_t min_count,
                 std::uint64_t max_frames, std::mt19937_64& rng) {
    if (min_count < 1) throw std::invalid_argument("lut_teps: min_count must be >= 1");
    const std::size_t n = code.n, k = code.k;
    const std::size_t width = mode == ProfileMode::Grand ? n : k;
    std::unordered_map<ErrorPattern, std::uint64_t, ErrorPatternHash> counts;
    std::vector<std::uint32_t> order(mode == ProfileMode::Posd ? k : n);
    std::uniform_int_distribution<int> bit(0, 1);
    for (std::uint64_t f = 0; f < max_frames; ++f) {
        BitVec msg(k);
        for (std::size_t i = 0; i < k; ++i)
            if (bit(rng)) msg.set(i, true);
        BitVec cw = encode(code, msg);
        Frame frame = transmit_frame(model, cw, rng);
        BitVec hard = hard_demod(frame.llrs);
        BitVec err = hard ^ cw;

        for (std::size_t i = 0; i < order.size(); ++i) order[i] = std::uint32_t(i);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return std::fabs(frame.llrs[a]) < std::fabs(frame.llrs[b]);
        });

        ErrorPattern pat;
        pat.length = std::uint32_t(width);
        if (mode == ProfileMode::Osd) {
            for (std::size_t j = 0; j < k; ++j)
                if (err.get(order[n - k + j])) pat.support.push_back(std::uint32_t(j));
        } else {
            for (std::size_t j = 0; j < width; ++j)
                if (err.get(order[j])) pat.support.push_back(std::uint32_t(j));
        }
        ++counts[pat];
    }
    struct Ranked {
        const ErrorPattern* pat;
        std::uint64_t count;
    };
    std::vector<Ranked> ranked;
    for (const auto& [pat, c] : counts)
        if (c >= min_count) ranked.push_back({&pat, c});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.count != b.count) return a.count > b.count;
        return colex_less(a.pat->support, b.pat->support);
    });
    TepList out;
    out.ordering = Ordering::LUT;
    out.length = std::uint32_t(width);
    for (const Ranked& r : ranked) {
        out.patterns.push_back(*r.pat);
        out.weights.push_back(double(r.count) / double(max_frames));
    }
    return out;
}

double overlap(const TepList& a, const TepList& b, std::size_t m) {
    if (a.length != b.length) throw std::invalid_argument("overlap: pattern widths differ");
    if (a.size() < m || b.size() < m)
        throw std::invalid_argument("overlap: lists must contain at least " + std::to_string(m) + " patterns");
    if (m == 0) throw std::invalid_argument("overlap: m must be >= 1");
    std::unordered_set<ErrorPattern, ErrorPatternHash> set;
    for (std::size_t i = 0; i < m; ++i) set.insert(a.patterns[i]);
    std::size_t common = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (set.count(b.patterns[i])) ++common;
    return 100.0 * double(common) / double(m);
}

void save_teps(const TepList& list, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_teps: cannot open " + path);
    out << "tepfile v1 " << to_string(list.ordering) << ' ' << list.length << ' ' << list.size() << '\n';
    char buf[40];
    for (std::size_t i = 0; i < list.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", list.weights[i]);
        out << buf;
        for (std::uint32_t v : list.patterns[i].support) out << ' ' << (v + 1);
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_teps: write failed for " + path);
}

TepList load_teps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_teps: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("tep file: empty file (line 1)");
    std::istringstream hs(header);
    std::string magic, version, ordering;
    std::uint64_t m = 0, count = 0;
    if (!(hs >> magic >> version >> ordering >> m >> count) || magic != "tepfile" || version != "v1")
        throw ParseError("tep file line 1: expected header 'tepfile v1 <ordering> <m> <count>'");
    TepList out;
    out.ordering = ordering_from_string(ordering);
    out.length = std::uint32_t(m);
    std::unordered_set<ErrorPattern, ErrorPatternHash> seen;
    std::string line;
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw ParseError("tep file: expected " + std::to_string(count) + " patterns, got " + std::to_string(i));
        std::istringstream ls(line);
        double w;
        if (!(ls >> w)) throw ParseError("tep file line " + std::to_string(i + 2) + ": missing weight");
        ErrorPattern p;
        p.length = std::uint32_t(m);
        std::int64_t idx;
        std::int64_t prev = 0;
        while (ls >> idx) {
            if (idx < 1 || std::uint64_t(idx) > m || idx <= prev)
                throw ParseError("tep file line " + std::to_string(i + 2) +
                                 ": support indices must be ascending in [1, m]");
            p.support.push_back(std::uint32_t(idx - 1));
            prev = idx;
        }
        if (!ls.eof()) throw ParseError("tep file line " + std::to_string(i + 2) + ": invalid support index");
        if (!seen.insert(p).second)
            throw ParseError("tep file line " + std::to_string(i + 2) + ": duplicate pattern");
        out.patterns.push_back(std::move(p));
        out.weights.push_back(w);
    }
    return out;
}

}  // namespace tepforge
