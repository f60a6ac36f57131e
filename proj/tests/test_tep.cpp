#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "support/oracles.hpp"
#include "tepforge/sim.hpp"
#include "tepforge/tep.hpp"

using namespace tepforge;

namespace {

std::string format_pattern(const ErrorPattern& p, double w) {
    std::string s = "{";
    for (std::size_t i = 0; i < p.support.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.support[i] + 1);
    }
    s += "}";
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.1f", w);
    return s + buf;
}

std::vector<double> random_nondecreasing_weights(std::size_t m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> w(m);
    double acc = 0;
    for (double& x : w) {
        acc += u(rng);
        x = acc;
    }
    return w;
}

void check_matches_oracle(const TepList& list, const std::vector<oracles::WeightedMask>& oracle) {
    REQUIRE(list.size() <= oracle.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(oracles::support_mask(list.patterns[i]) == oracle[i].mask);
        CHECK(list.weights[i] == doctest::Approx(oracle[i].weight).epsilon(1e-12));
    }
}

}  // namespace

TEST_CASE("gen_increasing_weight: golden trace for weights (0.3, 0.4, 0.5)") {
    TepList list = gen_increasing_weight(WeightProfile({0.3, 0.4, 0.5}), 8);
    REQUIRE(list.size() == 8);
    const char* expected[] = {"{} 0.0",    "{1} 0.3",   "{2} 0.4",   "{3} 0.5",
                              "{1,2} 0.7", "{1,3} 0.8", "{2,3} 0.9", "{1,2,3} 1.2"};
    for (int i = 0; i < 8; ++i) CHECK(format_pattern(list.patterns[i], list.weights[i]) == expected[i]);
}

TEST_CASE("gen_increasing_weight: all-zero weights, M=1 emits the empty pattern") {
    TepList list = gen_increasing_weight(WeightProfile({0.0, 0.0, 0.0, 0.0}), 1);
    REQUIRE(list.size() == 1);
    CHECK(list.patterns[0].support.empty());
    CHECK(list.weights[0] == 0.0);
}

TEST_CASE("gen_increasing_weight: m=10 random weights match brute force over all 1024 subsets") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> w = random_nondecreasing_weights(10, rng);
        TepList list = gen_increasing_weight(WeightProfile(w), 1024);
        REQUIRE(list.size() == 1024);
        check_matches_oracle(list, oracles::subsets_by_weight(w));
    }
}

TEST_CASE("gen_increasing_weight: tied weights still emit every subset exactly once") {
    std::vector<double> w = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    TepList list = gen_increasing_weight(WeightProfile(w), 1u << 6);
    REQUIRE(list.size() == 64);
    check_matches_oracle(list, oracles::subsets_by_weight(w));
}

TEST_CASE("gen_increasing_weight: M beyond 2^m truncates at 2^m") {
    TepList list = gen_increasing_weight(WeightProfile({0.1, 0.2}), 1000);
    CHECK(list.size() == 4);
}

TEST_CASE("weight profile: decreasing weights rejected") {
    CHECK_THROWS_AS(WeightProfile({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(WeightProfile({-0.1, 0.4}), std::invalid_argument);
}

TEST_CASE("hw_teps: M=1 is the zero pattern; m=4 starts with the four singletons") {
    TepList one = hw_teps(4, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.patterns[0].support.empty());
    TepList five = hw_teps(4, 5);
    REQUIRE(five.size() == 5);
    for (int i = 1; i <= 4; ++i) {
        CHECK(five.patterns[i].support == std::vector<std::uint32_t>{std::uint32_t(i - 1)});
        CHECK(five.weights[i] == 1.0);
    }
}

TEST_CASE("hw_teps: m=12 full list has binomial weight-class counts") {
    TepList list = hw_teps(12, std::uint64_t(1) << 12);
    REQUIRE(list.size() == std::size_t(1) << 12);
    std::vector<int> counts(13, 0);
    double prev = -1;
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(list.weights[i] >= prev);
        prev = list.weights[i];
        ++counts[list.patterns[i].weight_hamming()];
    }
    for (int w = 0; w <= 12; ++w) CHECK(counts[w] == int(std::round(std::exp(log_binomial(12, w)))));
}

TEST_CASE("hw_teps: colex tie order matches the (weight, mask) oracle at m=10") {
    TepList list = hw_teps(10, 512);
    auto oracle = oracles::subsets_by_value(10, [](std::uint32_t mask) { return double(std::popcount(mask)); });
    for (std::size_t i = 0; i < list.size(); ++i)
        CHECK(oracles::support_mask(list.patterns[i]) == oracle[i].mask);
}

TEST_CASE("lw_teps: first four patterns follow the tie rule ({1,2} before {3})") {
    TepList list = lw_teps(6, 5);
    CHECK(list.patterns[0].support.empty());
    CHECK(list.patterns[1].support == std::vector<std::uint32_t>{0});
    CHECK(list.patterns[2].support == std::vector<std::uint32_t>{1});
    CHECK(list.patterns[3].support == std::vector<std::uint32_t>{0, 1});  // LW 3, colex before {3}
    CHECK(list.patterns[4].support == std::vector<std::uint32_t>{2});     // LW 3
    CHECK(list.weights[3] == 3.0);
    CHECK(list.weights[4] == 3.0);
}

TEST_CASE("lw_teps: m=10, M=512 matches the brute-force logistic-weight sort") {
    TepList list = lw_teps(10, 512);
    auto oracle = oracles::subsets_by_value(10, [](std::uint32_t mask) {
        double acc = 0;
        for (int i = 0; i < 10; ++i)
            if (mask & (1u << i)) acc += i + 1;
        return acc;
    });
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(oracles::support_mask(list.patterns[i]) == oracle[i].mask);
        CHECK(list.weights[i] == oracle[i].weight);
    }
}

TEST_CASE("ilw: value formula and the lower-Hamming-weight priority") {
    CHECK(ilw_value({4, {0, 1}}) == 5);  // 1*1 + 2*2
    CHECK(ilw_value({4, {2}}) == 3);
    CHECK(ilw_value({4, {}}) == 0);
    TepList list = ilw_teps(6, 8);
    CHECK(list.patterns[0].support.empty());
    // singleton {3} (ILW 3) precedes the pair {1,2} (ILW 5)
    std::size_t pos3 = 0, pos12 = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list.patterns[i].support == std::vector<std::uint32_t>{2}) pos3 = i;
        if (list.patterns[i].support == std::vector<std::uint32_t>{0, 1}) pos12 = i;
    }
    CHECK(pos3 < pos12);
}

TEST_CASE("ilw_teps: m=10, M=512 matches the brute-force ILW sort") {
    TepList list = ilw_teps(10, 512);
    auto oracle = oracles::subsets_by_value(10, [](std::uint32_t mask) {
        double acc = 0;
        int rank = 1;
        for (int i = 0; i < 10; ++i)
            if (mask & (1u << i)) acc += double(i + 1) * rank++;
        return acc;
    });
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(oracles::support_mask(list.patterns[i]) == oracle[i].mask);
        CHECK(list.weights[i] == oracle[i].weight);
    }
    double prev = -1;
    for (double w : list.weights) {
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("ew_teps: profile (0.3, 0.4, 0.5) reproduces the golden trace order") {
    OrderStatsProfile prof;
    prof.mode = ProfileMode::Grand;
    prof.sample_size = 3;
    prof.expected = {0.3, 0.4, 0.5};
    TepList list = ew_teps(prof, 8);
    TepList direct = gen_increasing_weight(WeightProfile({0.3, 0.4, 0.5}), 8);
    REQUIRE(list.size() == direct.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(list.patterns[i] == direct.patterns[i]);
        CHECK(list.weights[i] == direct.weights[i]);
    }
    CHECK(list.ordering == Ordering::EW);
}

TEST_CASE("ew_teps: uniform profile degenerates to the HW order exactly (colex ties)") {
    OrderStatsProfile prof;
    prof.mode = ProfileMode::Grand;
    prof.sample_size = 9;
    prof.expected.assign(9, 1.0);
    TepList ew = ew_teps(prof, 300);
    TepList hw = hw_teps(9, 300);
    REQUIRE(ew.size() == hw.size());
    for (std::size_t i = 0; i < ew.size(); ++i) CHECK(ew.patterns[i] == hw.patterns[i]);
}

TEST_CASE("ml_tep_stream: first yield is the empty pattern; Table I weights reproduced") {
    MlTepStream stream({0.3, 0.4, 0.5});
    ErrorPattern p;
    double w;
    REQUIRE(stream.next(p, w));
    CHECK(p.support.empty());
    CHECK(w == 0.0);
    std::vector<double> expect_w = {0.3, 0.4, 0.5, 0.7, 0.8, 0.9, 1.2};
    for (double e : expect_w) {
        REQUIRE(stream.next(p, w));
        CHECK(w == doctest::Approx(e).epsilon(1e-12));
    }
    CHECK_FALSE(stream.next(p, w));
}

TEST_CASE("ml_tep_stream: first 100 yields match the brute-force WHD sort on random 10-bit frames") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> abs_llr(10);
        for (double& v : abs_llr) v = u(rng);
        std::sort(abs_llr.begin(), abs_llr.end());
        auto oracle = oracles::subsets_by_weight(abs_llr);
        MlTepStream stream(abs_llr);
        ErrorPattern p;
        double w;
        for (int i = 0; i < 100; ++i) {
            REQUIRE(stream.next(p, w));
            CHECK(oracles::support_mask(p) == oracle[i].mask);
            CHECK(w == doctest::Approx(oracle[i].weight).epsilon(1e-12));
        }
    }
}

TEST_CASE("streaming/batch equivalence: first M stream yields equal gen_increasing_weight(M)") {
    std::mt19937_64 rng(31);
    std::vector<double> w = random_nondecreasing_weights(12, rng);
    TepList batch = gen_increasing_weight(WeightProfile(w), 600);
    MlTepStream stream(w);
    ErrorPattern p;
    double pw;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        REQUIRE(stream.next(p, pw));
        CHECK(p == batch.patterns[i]);
        CHECK(pw == batch.weights[i]);
    }
}

TEST_CASE("completeness: every subset emitted exactly once for m = 12") {
    std::mt19937_64 rng(37);
    std::vector<double> w = random_nondecreasing_weights(12, rng);
    TepList list = gen_increasing_weight(WeightProfile(w), std::uint64_t(1) << 12);
    REQUIRE(list.size() == std::size_t(1) << 12);
    std::set<std::uint32_t> seen;
    for (const ErrorPattern& p : list.patterns) seen.insert(oracles::support_mask(p));
    CHECK(seen.size() == std::size_t(1) << 12);
    double prev = -1;
    for (double v : list.weights) {
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("monotonicity preconditions: additive weights satisfy both order relations") {
    std::mt19937_64 rng(41);
    std::vector<double> w = random_nondecreasing_weights(14, rng);
    auto weight_of = [&](std::uint32_t mask) {
        double acc = 0;
        for (int i = 0; i < 14; ++i)
            if (mask & (1u << i)) acc += w[i];
        return acc;
    };
    std::uniform_int_distribution<std::uint32_t> um(0, (1u << 14) - 1);
    std::uniform_int_distribution<int> uj(0, 13);
    for (int t = 0; t < 2000; ++t) {
        std::uint32_t z = um(rng), z2 = um(rng);
        int j = uj(rng);
        if ((z >> j) & 1u || (z2 >> j) & 1u) continue;
        CHECK(weight_of(z) <= weight_of(z | (1u << j)));
        if (weight_of(z) <= weight_of(z2)) CHECK(weight_of(z | (1u << j)) <= weight_of(z2 | (1u << j)));
    }
}

TEST_CASE("ew/ml consistency: frame reliabilities equal to the expected profile give the same list") {
    OrderStatsProfile prof;
    prof.mode = ProfileMode::Grand;
    prof.sample_size = 10;
    prof.expected = {0.1, 0.3, 0.35, 0.5, 0.82, 1.0, 1.4, 1.45, 2.0, 2.6};
    TepList ew = ew_teps(prof, 400);
    MlTepStream stream(prof.expected);
    ErrorPattern p;
    double w;
    for (std::size_t i = 0; i < ew.size(); ++i) {
        REQUIRE(stream.next(p, w));
        CHECK(p == ew.patterns[i]);
        CHECK(w == doctest::Approx(ew.weights[i]).epsilon(1e-12));
    }
}

TEST_CASE("lut_teps: noiseless channel observes only the empty pattern") {
    CodeSpec code = random_linear_code(16, 8, 3);
    ChannelModel m = ChannelModel::awgn(1e-9);
    std::mt19937_64 rng(43);
    TepList list = lut_teps(m, code, ProfileMode::Grand, 10, 2000, rng);
    REQUIRE(list.size() == 1);
    CHECK(list.patterns[0].support.empty());
}

TEST_CASE("lut_teps: empty pattern is the most frequent at a usable SNR") {
    CodeSpec code = random_linear_code(16, 8, 3);
    ChannelModel m = ChannelModel::awgn(ebn0_to_sigma(5.0, 0.5));
    std::mt19937_64 rng(47);
    for (ProfileMode mode : {ProfileMode::Grand, ProfileMode::Posd, ProfileMode::Osd}) {
        std::mt19937_64 r2 = rng;
        TepList list = lut_teps(m, code, mode, 10, 20'000, r2);
        REQUIRE(list.size() > 1);
        CHECK(list.patterns[0].support.empty());
        double prev = INFINITY;
        for (double w : list.weights) {
            CHECK(w <= prev);
            prev = w;
        }
    }
}

TEST_CASE("lut_teps: top-10 patterns stable across two seeds (n=32, Eb/N0 = 3 dB)") {
    CodeSpec code = random_linear_code(32, 26, 7);
    ChannelModel m = ChannelModel::awgn(ebn0_to_sigma(3.0, 26.0 / 32.0));
    std::mt19937_64 r1(1), r2(2);
    TepList a = lut_teps(m, code, ProfileMode::Grand, 10, 150'000, r1);
    TepList b = lut_teps(m, code, ProfileMode::Grand, 10, 150'000, r2);
    REQUIRE(a.size() >= 10);
    REQUIRE(b.size() >= 10);
    std::set<std::uint64_t> sa, sb;
    for (int i = 0; i < 10; ++i) {
        sa.insert(oracles::support_mask(a.patterns[i]));
        sb.insert(oracles::support_mask(b.patterns[i]));
    }
    CHECK(sa == sb);
}

TEST_CASE("lut_teps: impossible min_count yields the empty-list warning result") {
    CodeSpec code = random_linear_code(16, 8, 3);
    ChannelModel m = ChannelModel::awgn(0.5);
    std::mt19937_64 rng(53);
    TepList list = lut_teps(m, code, ProfileMode::Grand, 1000, 50, rng);
    CHECK(list.size() == 0);
}

TEST_CASE("overlap: identity is 100, disjoint singletons are 0") {
    TepList hw = hw_teps(8, 50);
    CHECK(overlap(hw, hw, 50) == 100.0);
    TepList a, b;
    a.ordering = b.ordering = Ordering::LUT;
    a.length = b.length = 4;
    a.patterns = {{4, {0}}};
    b.patterns = {{4, {1}}};
    a.weights = b.weights = {1.0};
    CHECK(overlap(a, b, 1) == 0.0);
}

TEST_CASE("overlap: insufficient list length rejected, width mismatch rejected") {
    TepList hw = hw_teps(8, 20);
    CHECK_THROWS_AS(overlap(hw, hw, 21), std::invalid_argument);
    TepList other = hw_teps(9, 20);
    CHECK_THROWS_AS(overlap(hw, other, 10), std::invalid_argument);
}

TEST_CASE("save/load teps: lossless round trip with ordering tag and weights") {
    std::mt19937_64 rng(59);
    std::vector<double> w = random_nondecreasing_weights(17, rng);
    TepList list = gen_increasing_weight(WeightProfile(w), 300, Ordering::EW);
    std::string path = (std::filesystem::temp_directory_path() / "tepforge_rt.tep").string();
    save_teps(list, path);
    TepList loaded = load_teps(path);
    CHECK(loaded.ordering == list.ordering);
    CHECK(loaded.length == list.length);
    REQUIRE(loaded.size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(loaded.patterns[i] == list.patterns[i]);
        CHECK(loaded.weights[i] == list.weights[i]);  // exact: %.17g round trip
    }
    std::filesystem::remove(path);
}

TEST_CASE("load teps: corrupted header rejected") {
    std::string path = (std::filesystem::temp_directory_path() / "tepforge_bad.tep").string();
    {
        std::ofstream out(path);
        out << "tepfile v2 ew 8 1\n0\n";
    }
    CHECK_THROWS_AS(load_teps(path), ParseError);
    {
        std::ofstream out(path);
        out << "tepfile v1 ew 8 2\n0\n";  // missing one pattern line
    }
    CHECK_THROWS_AS(load_teps(path), ParseError);
    {
        std::ofstream out(path);
        out << "tepfile v1 ew 8 2\n0.5 1 2\n0.5 1 2\n";  // duplicate pattern
    }
    CHECK_THROWS_AS(load_teps(path), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("ml_tep_stream: sustained streaming on a width-128 profile stays ordered") {
    std::vector<double> w(128);
    for (int i = 0; i < 128; ++i) w[i] = 0.05 * (i + 1);
    MlTepStream stream(w);
    ErrorPattern p;
    double prev = -1, cur = 0;
    for (int i = 0; i < 200'000; ++i) {
        REQUIRE(stream.next(p, cur));
        REQUIRE(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("tep file: 10^4 patterns for n=128 stays small and loads fast") {
    OrderStatsProfile prof = expected_profile(awgn_reliability(0.7), 128, 105, ProfileMode::Grand);
    TepList list = ew_teps(prof, 10'000);
    std::string path = (std::filesystem::temp_directory_path() / "tepforge_big.tep").string();
    save_teps(list, path);
    CHECK(std::filesystem::file_size(path) < 4u * 1024 * 1024);
    auto t0 = std::chrono::steady_clock::now();
    TepList loaded = load_teps(path);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(loaded.size() == 10'000);
    CHECK(secs < 1.0);
    std::filesystem::remove(path);
}
