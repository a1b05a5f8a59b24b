#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <optional>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "polarlab/polarize.hpp"

using namespace polarlab;
using namespace polarlab::testing;

TEST_CASE("single combining step on the erasure channel") {
    auto [minus, plus] = polar_pair(bec(0.5));
    CHECK(symmetric_capacity(minus) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(symmetric_capacity(plus) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(bhattacharyya(minus) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(bhattacharyya(plus) == doctest::Approx(0.25).epsilon(1e-12));

    // the split parts behave exactly as erasure channels again
    CHECK(symmetric_capacity(minus) ==
          doctest::Approx(symmetric_capacity(bec(0.75))).epsilon(1e-12));
    CHECK(symmetric_capacity(plus) ==
          doctest::Approx(symmetric_capacity(bec(0.25))).epsilon(1e-12));

    CHECK_THROWS_AS(polar_pair(qec(0.5)), std::invalid_argument);
}

TEST_CASE("combining conserves symmetric capacity and orders the parts") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 100; ++t) {
        Channel w = random_channel(rng, 2, 2 + t % 3);
        auto [minus, plus] = polar_pair(w);
        double c = symmetric_capacity(w);
        double cm = symmetric_capacity(minus), cp = symmetric_capacity(plus);
        CHECK(std::abs(cm + cp - 2.0 * c) < 1e-10);
        CHECK(cm <= c + 1e-12);
        CHECK(c <= cp + 1e-12);
        if (c > 1e-3 && c < 1.0 - 1e-3) {
            CHECK(cm < c - 1e-12);
            CHECK(cp > c + 1e-12);
        }

        // cutoff rate gain, strict away from the extremes
        double r0 = symmetric_cutoff(w);
        double gain = symmetric_cutoff(minus) + symmetric_cutoff(plus) - 2.0 * r0;
        CHECK(gain > -1e-12);
        if (c > 1e-3 && c < 1.0 - 1e-3) CHECK(gain > 1e-12);

        // Bhattacharyya subadditivity; the plus part squares exactly
        double z = bhattacharyya(w);
        CHECK(bhattacharyya(plus) == doctest::Approx(z * z).epsilon(1e-10));
        CHECK(bhattacharyya(minus) + bhattacharyya(plus) <= 2.0 * z + 1e-12);
    }

    // an extreme channel stays extreme on both sides
    auto [m0, p0] = polar_pair(bsc(0.0));
    CHECK(symmetric_capacity(m0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(symmetric_capacity(p0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("erasure-channel combining gives Bhattacharyya equality") {
    for (double eps : {0.2, 0.5, 0.8}) {
        auto [minus, plus] = polar_pair(bec(eps));
        double z = eps;
        CHECK(std::abs(bhattacharyya(minus) - (2.0 * z - z * z)) < 1e-12);
        CHECK(std::abs(bhattacharyya(plus) - z * z) < 1e-12);
        CHECK(std::abs(bhattacharyya(minus) + bhattacharyya(plus) - 2.0 * z + z * z - z * z) <
              1e-12);
    }
}

TEST_CASE("branch strings and indices") {
    CHECK(branch_of_index(0, 1) == "");
    CHECK(branch_of_index(1, 1) == "-");
    CHECK(branch_of_index(1, 2) == "+");
    CHECK(branch_of_index(2, 1) == "--");
    CHECK(branch_of_index(2, 2) == "-+");
    CHECK(branch_of_index(2, 3) == "+-");
    CHECK(branch_of_index(2, 4) == "++");
    CHECK(branch_of_index(3, 5) == "+--");
    CHECK_THROWS_AS(branch_of_index(2, 5), std::invalid_argument);
    CHECK_THROWS_AS(branch_of_index(2, 0), std::invalid_argument);
}

TEST_CASE("exact synthesis matches a first-principles enumeration") {
    SUBCASE("single step equals the combining step") {
        Channel w = bsc(0.11);
        SynthChannel sc = synthesize_bit_channel(w, 1, 1);
        Channel minus = polar_pair(w).first;
        REQUIRE(sc.channel.output_size() == minus.output_size());
        for (std::size_t x = 0; x < 2; ++x)
            for (std::size_t y = 0; y < minus.output_size(); ++y)
                CHECK(sc.channel.prob(x, y) == minus.prob(x, y));
        CHECK(sc.branch == "-");
        CHECK(sc.index == 1);
    }

    SUBCASE("conservation at depth two") {
        Channel w = bsc(0.11);
        double total = 0.0;
        for (std::size_t i = 1; i <= 4; ++i)
            total += symmetric_capacity(synthesize_bit_channel(w, 2, i).channel);
        CHECK(std::abs(total - 4.0 * symmetric_capacity(w)) < 1e-9);
    }

    SUBCASE("erasure channel depth two matches the closed-form recursion") {
        SynthChannel sc = synthesize_bit_channel(bec(0.5), 2, 4);
        CHECK(bhattacharyya(sc.channel) == doctest::Approx(0.0625).epsilon(1e-12));
        BecProfile profile = bec_polarize(0.5, 2);
        for (std::size_t i = 1; i <= 4; ++i) {
            SynthChannel si = synthesize_bit_channel(bec(0.5), 2, i);
            CHECK(std::abs(bhattacharyya(si.channel) - profile.eps[i - 1]) < 1e-12);
            CHECK(std::abs(symmetric_capacity(si.channel) - (1.0 - profile.eps[i - 1])) <
                  1e-12);
        }
    }

    SUBCASE("independent enumeration oracle, random channels") {
        std::mt19937_64 rng(43);
        for (int t = 0; t < 6; ++t) {
            Channel w = random_channel(rng, 2, 2 + t % 2);
            for (int level = 1; level <= 2; ++level) {
                for (std::size_t i = 1; i <= (std::size_t{1} << level); ++i) {
                    SynthChannel sc = synthesize_bit_channel(w, level, i);
                    Channel oracle = brute_bit_channel(w, level, i);
                    CHECK(std::abs(symmetric_capacity(sc.channel) -
                                   symmetric_capacity(oracle)) < 1e-12);
                    CHECK(std::abs(bhattacharyya(sc.channel) - bhattacharyya(oracle)) <
                          1e-12);
                }
            }
        }
    }

    SUBCASE("recursive consistency of sibling indices") {
        std::mt19937_64 rng(47);
        Channel w = random_channel(rng, 2, 2);
        for (int level = 0; level <= 1; ++level) {
            for (std::size_t i = 1; i <= (std::size_t{1} << level); ++i) {
                Channel parent = synthesize_bit_channel(w, level, i).channel;
                auto pair = polar_pair(parent);
                Channel lo = synthesize_bit_channel(w, level + 1, 2 * i - 1).channel;
                Channel hi = synthesize_bit_channel(w, level + 1, 2 * i).channel;
                CHECK(std::abs(symmetric_capacity(lo) - symmetric_capacity(pair.first)) <
                      1e-12);
                CHECK(std::abs(bhattacharyya(lo) - bhattacharyya(pair.first)) < 1e-12);
                CHECK(std::abs(symmetric_capacity(hi) - symmetric_capacity(pair.second)) <
                      1e-12);
                CHECK(std::abs(bhattacharyya(hi) - bhattacharyya(pair.second)) < 1e-12);
            }
        }
    }

    SUBCASE("alphabet guard") {
        // 4 outputs and an all-plus branch at depth 3 projects past the guard
        std::mt19937_64 rng(61);
        Channel wide = random_channel(rng, 2, 4);
        CHECK_THROWS_AS(synthesize_bit_channel(wide, 3, 8), std::runtime_error);
    }
}

TEST_CASE("lossless output merging") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 10; ++t) {
        Channel w = random_channel(rng, 2, 3);
        SynthChannel raw = synthesize_bit_channel(w, 2, 1 + t % 4, OutputMerge::keep);
        SynthChannel merged =
            synthesize_bit_channel(w, 2, 1 + t % 4, OutputMerge::lossless);
        CHECK(merged.channel.output_size() <= raw.channel.output_size());
        CHECK(std::abs(symmetric_capacity(merged.channel) -
                       symmetric_capacity(raw.channel)) < 1e-12);
        CHECK(std::abs(bhattacharyya(merged.channel) - bhattacharyya(raw.channel)) <
              1e-12);
    }
    // merged synthesis stays within the guard where raw synthesis cannot go
    SynthChannel deep = synthesize_bit_channel(random_channel(rng, 2, 4), 3, 8,
                                               OutputMerge::lossless);
    CHECK(deep.channel.output_size() <= kSynthesisAlphabetGuard);
}

TEST_CASE("erasure recursion") {
    BecProfile one = bec_polarize(0.5, 1);
    CHECK(one.eps == std::vector<double>{0.75, 0.25});
    BecProfile two = bec_polarize(0.5, 2);
    CHECK(two.eps == std::vector<double>{0.9375, 0.5625, 0.4375, 0.0625});
    BecProfile zeros = bec_polarize(0.0, 6);
    for (double e : zeros.eps) CHECK(e == 0.0);

    double total = 0.0;
    for (double e : two.eps) total += 1.0 - e;
    CHECK(std::abs(total - 2.0) < 1e-12);

    CHECK_THROWS_AS(bec_polarize(0.5, 26), std::invalid_argument);
    CHECK_THROWS_AS(bec_polarize(1.5, 3), std::invalid_argument);
}

TEST_CASE("Bhattacharyya bound recursion") {
    // identical to the erasure recursion on erasure inputs
    BecProfile eps = bec_polarize(0.37, 6);
    ZProfile z = z_bound_recursion(0.37, 6);
    REQUIRE(z.z.size() == eps.eps.size());
    for (std::size_t i = 0; i < z.z.size(); ++i) CHECK(z.z[i] == eps.eps[i]);

    // upper bound on the exact parameters
    Channel w = bsc(0.11);
    ZProfile bound = z_bound_recursion(bhattacharyya(w), 2);
    for (std::size_t i = 1; i <= 4; ++i) {
        double exact = bhattacharyya(synthesize_bit_channel(w, 2, i).channel);
        CHECK(bound.z[i - 1] >= exact - 1e-12);
    }
    // the plus step squares the parent parameter exactly, so the all-plus
    // entry of the bound profile matches the exact synthesis
    CHECK(std::abs(bound.z[3] - bhattacharyya(synthesize_bit_channel(w, 2, 4).channel)) <
          1e-10);
    for (std::size_t i = 1; i <= 2; ++i) {
        Channel parent = synthesize_bit_channel(w, 1, i).channel;
        Channel child = synthesize_bit_channel(w, 2, 2 * i).channel;
        double zp = bhattacharyya(parent);
        CHECK(std::abs(bhattacharyya(child) - zp * zp) < 1e-10);
    }
}

TEST_CASE("polarization statistics") {
    std::vector<double> zeros(16, 0.0);
    PolarizationStats s = polarization_stats(zeros, 0.01, ScoreKind::noise);
    CHECK(s.good_fraction == 1.0);
    CHECK(s.bad_fraction == 0.0);
    CHECK(s.middling_fraction == 0.0);

    BecProfile p10 = bec_polarize(0.5, 10);
    PolarizationStats s10 = polarization_stats(p10.eps, 0.001, ScoreKind::noise);
    CHECK(s10.good_fraction < 0.5);
    CHECK(s10.good_count + s10.bad_count + s10.middling_count == p10.eps.size());

    double prev_mid = 1.0;
    for (int n = 10; n <= 20; ++n) {
        BecProfile p = bec_polarize(0.5, n);
        double mid = polarization_stats(p.eps, 0.001, ScoreKind::noise).middling_fraction;
        CHECK(mid <= prev_mid + 1e-12);
        prev_mid = mid;
    }
    CHECK(prev_mid < 0.2);

    // the same values read as rates flips good and bad
    std::vector<double> rates{0.9999, 0.00001, 0.5};
    PolarizationStats sr = polarization_stats(rates, 0.001, ScoreKind::rate);
    CHECK(sr.good_count == 1);
    CHECK(sr.bad_count == 1);
    CHECK(sr.middling_count == 1);

    CHECK_THROWS_AS(polarization_stats(rates, 0.7, ScoreKind::rate), std::invalid_argument);
}

TEST_CASE("normalized cutoff rate climbs toward the symmetric capacity") {
    Channel w = bec(0.5);
    CHECK(normalized_cutoff(bec_polarize(0.5, 0)) ==
          doctest::Approx(symmetric_cutoff(w)).epsilon(1e-12));
    double prev = 0.0;
    for (int n = 0; n <= 20; ++n) {
        double bar = normalized_cutoff(bec_polarize(0.5, n));
        CHECK(bar >= prev - 1e-12);
        prev = bar;
    }
    CHECK(std::abs(prev - 0.5) < 0.05);

    // the channel-set overload agrees with the profile overload
    std::vector<SynthChannel> set;
    for (std::size_t i = 1; i <= 4; ++i) set.push_back(synthesize_bit_channel(w, 2, i));
    CHECK(normalized_cutoff(set) ==
          doctest::Approx(normalized_cutoff(bec_polarize(0.5, 2))).epsilon(1e-12));
}

TEST_CASE("merged synthesis of erasure channels tracks the closed form to depth 6") {
    // the merge collapses every erasure-channel descendant to at most three
    // effective outputs, so deep exact synthesis stays cheap and must agree
    // with the analytic recursion everywhere
    const double eps = 0.5;
    const int level = 6;
    BecProfile profile = bec_polarize(eps, level);
    for (std::size_t i = 1; i <= (std::size_t{1} << level); ++i) {
        SynthChannel sc = synthesize_bit_channel(bec(eps), level, i, OutputMerge::lossless);
        CHECK(sc.channel.output_size() <= 4);
        CHECK(std::abs(bhattacharyya(sc.channel) - profile.eps[i - 1]) < 1e-12);
        CHECK(std::abs(symmetric_capacity(sc.channel) - (1.0 - profile.eps[i - 1])) <
              1e-12);
    }
}

TEST_CASE("concurrent per-index synthesis matches serial results exactly") {
    std::mt19937_64 rng(101);
    Channel w = random_channel(rng, 2, 3);
    const int level = 2;
    std::vector<SynthChannel> serial;
    for (std::size_t i = 1; i <= 4; ++i)
        serial.push_back(synthesize_bit_channel(w, level, i, OutputMerge::lossless));

    std::vector<std::optional<SynthChannel>> parallel(4);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < 4; ++i)
        pool.emplace_back([&, i] {
            parallel[i] = synthesize_bit_channel(w, level, i + 1, OutputMerge::lossless);
        });
    for (auto& th : pool) th.join();

    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(parallel[i].has_value());
        CHECK(parallel[i]->branch == serial[i].branch);
        REQUIRE(parallel[i]->channel.output_size() == serial[i].channel.output_size());
        CHECK(parallel[i]->channel.transitions() == serial[i].channel.transitions());
    }
}

TEST_CASE("output processing cannot raise the cutoff rate") {
    std::mt19937_64 rng(59);
    for (int t = 0; t < 20; ++t) {
        Channel w = random_channel(rng, 2, 2);
        Channel synth = synthesize_bit_channel(w, 2, 1 + t % 4).channel;
        std::size_t smaller = 2 + rng() % (synth.output_size() - 2);
        Channel coarse = coarsen_outputs(synth, smaller, rng);
        InputDist u = InputDist::uniform(2);
        CHECK(cutoff_rate(coarse, u) <= cutoff_rate(synth, u) + 1e-12);
        CHECK(capacity(coarse, u) <= capacity(synth, u) + 1e-12);
    }
}
