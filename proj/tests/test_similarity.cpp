#include "tssim/dtw.hpp"
#include "tssim/similarity.hpp"
#include "tssim/stl.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace tssim;

namespace {

StlDecomposition decomposition(std::vector<double> trend, std::vector<double> seasonal) {
    std::vector<double> remainder(trend.size(), 0.0);
    return {std::move(trend), std::move(seasonal), std::move(remainder), 2000};
}

StlDecomposition random_decomposition(std::mt19937_64& rng, std::size_t n = 24) {
    return decomposition(oracle::random_vector(rng, n, -3, 3), oracle::random_vector(rng, n));
}

std::vector<double> wave(std::size_t n, double phase) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = 0.1 * static_cast<double>(k) + std::sin(1.5707963267948966 * static_cast<double>(k) + phase);
    }
    return out;
}

} // namespace

TEST(Composite, ArithmeticOfWeights) {
    const auto c = combine(10.0, 20.0, {});
    EXPECT_NEAR(c.combined, 13.0, 1e-12);
    EXPECT_EQ(combine(10.0, 20.0, {1.0, 0.0}).combined, 10.0);
    EXPECT_EQ(combine(10.0, 20.0, {0.0, 1.0}).combined, 20.0);
    EXPECT_THROW((CompositeWeights{0.6, 0.3}.validate()), InvalidArgument);
    EXPECT_THROW((CompositeWeights{1.2, -0.2}.validate()), InvalidArgument);
}

TEST(Composite, ExtremeWeightsReproduceComponentCostsBitExactly) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const auto a = random_decomposition(rng);
        const auto b = random_decomposition(rng);
        const auto trend_only = composite_distance(a, b, {1.0, 0.0});
        const auto seasonal_only = composite_distance(a, b, {0.0, 1.0});
        EXPECT_EQ(trend_only.combined, trend_only.trend);
        EXPECT_EQ(seasonal_only.combined, seasonal_only.seasonal);
        EXPECT_EQ(trend_only.trend, seasonal_only.trend);
    }
}

TEST(Composite, SelfDistanceIsZero) {
    std::mt19937_64 rng(6);
    const auto a = random_decomposition(rng);
    const auto d = composite_distance(a, a);
    EXPECT_EQ(d.trend, 0.0);
    EXPECT_EQ(d.seasonal, 0.0);
    EXPECT_EQ(d.combined, 0.0);
}

TEST(Composite, SymmetricUnderArgumentSwap) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const auto a = random_decomposition(rng, 8 + rng() % 20);
        const auto b = random_decomposition(rng, 8 + rng() % 20);
        const auto ab = composite_distance(a, b);
        const auto ba = composite_distance(b, a);
        EXPECT_EQ(ab.trend, ba.trend);
        EXPECT_EQ(ab.seasonal, ba.seasonal);
        EXPECT_EQ(ab.combined, ba.combined);
    }
}

TEST(Composite, IdenticalComponentsGiveZeroComponentDistance) {
    std::mt19937_64 rng(8);
    const auto a = random_decomposition(rng);
    auto b = decomposition(a.trend, oracle::random_vector(rng, 24));
    const auto d = composite_distance(a, b);
    EXPECT_EQ(d.trend, 0.0);
    EXPECT_GT(d.seasonal, 0.0);
    EXPECT_NEAR(d.combined, 0.3 * d.seasonal, 1e-15);
}

TEST(Composite, ComponentDistanceBoundedByExactAndNonNegative) {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const auto a = random_decomposition(rng);
        const auto b = random_decomposition(rng);
        const auto d = composite_distance(a, b);
        EXPECT_GE(d.trend, dtw::dtw_exact(a.trend, b.trend).cost);
        EXPECT_GE(d.seasonal, 0.0);
    }
}

TEST(PairwiseMatrix, SingleKeyHasZeroDiagonal) {
    std::mt19937_64 rng(10);
    std::map<SeriesKey, StlDecomposition> decomps{{{"AAA", "X"}, random_decomposition(rng)}};
    const auto m = pairwise_matrix(decomps, {{"AAA", "X"}});
    ASSERT_EQ(m.size(), 1U);
    EXPECT_EQ(m[0][0].combined, 0.0);
}

TEST(PairwiseMatrix, MatchesIndividualCallsAndPermutes) {
    std::mt19937_64 rng(11);
    std::map<SeriesKey, StlDecomposition> decomps;
    std::vector<SeriesKey> keys{{"AAA", "X"}, {"BBB", "X"}, {"CCC", "Y"}, {"DDD", "Z"}};
    for (const auto& k : keys) {
        decomps.emplace(k, random_decomposition(rng));
    }
    const auto m = pairwise_matrix(decomps, keys);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        EXPECT_EQ(m[i][i].combined, 0.0);
        for (std::size_t j = 0; j < keys.size(); ++j) {
            EXPECT_EQ(m[i][j].combined, m[j][i].combined);
            if (i != j) {
                EXPECT_EQ(m[i][j].combined, composite_distance(decomps.at(keys[i]), decomps.at(keys[j])).combined);
            }
        }
    }
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<SeriesKey> permuted;
    for (auto p : perm) {
        permuted.push_back(keys[p]);
    }
    const auto mp = pairwise_matrix(decomps, permuted);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (std::size_t j = 0; j < keys.size(); ++j) {
            EXPECT_EQ(mp[i][j].combined, m[perm[i]][perm[j]].combined);
        }
    }
    EXPECT_THROW(pairwise_matrix(decomps, {{"ZZZ", "X"}}), LookupError);
}

TEST(CountrySimilarity, PlantedOrderingAndTies) {
    std::map<SeriesKey, StlDecomposition> decomps;
    const auto ref = decomposition(wave(24, 0.0), wave(24, 0.5));
    decomps.emplace(SeriesKey{"REF", "T"}, ref);
    decomps.emplace(SeriesKey{"CPY", "T"}, ref);
    decomps.emplace(SeriesKey{"AAA", "T"}, ref); // tie with CPY at zero
    decomps.emplace(SeriesKey{"NEAR", "T"}, decomposition(wave(24, 0.1), wave(24, 0.5)));
    auto far_trend = wave(24, 0.0);
    for (auto& v : far_trend) {
        v = 5.0 - v;
    }
    decomps.emplace(SeriesKey{"FAR", "T"}, decomposition(far_trend, wave(24, 2.0)));
    const auto s = country_similarity(decomps, "T", "REF", {"FAR", "NEAR", "CPY", "AAA", "GONE"});
    ASSERT_EQ(s.by_combined.size(), 4U);
    EXPECT_EQ(s.by_combined[0].country, "AAA");
    EXPECT_EQ(s.by_combined[1].country, "CPY");
    EXPECT_EQ(s.by_combined[2].country, "NEAR");
    EXPECT_EQ(s.by_combined[3].country, "FAR");
    EXPECT_EQ(s.by_combined[0].distance.combined, 0.0);
    EXPECT_EQ(s.skipped.count("GONE"), 1U);
    ASSERT_EQ(s.by_trend.size(), 4U);
    EXPECT_EQ(s.by_trend.back().country, "FAR");
    EXPECT_THROW(country_similarity(decomps, "T", "NOPE", {"CPY"}), LookupError);
}

TEST(CountrySimilarity, PanelOverloadRanksCopyFirst) {
    std::mt19937_64 rng(12);
    const std::vector<std::string> countries{"AAA", "BBB", "REF"};
    std::vector<std::optional<double>> cells(3 * 24);
    const auto base = wave(24, 0.3);
    const auto noise = oracle::random_vector(rng, 24, -2, 2);
    for (std::size_t t = 0; t < 24; ++t) {
        cells[0 * 24 + t] = base[t];
        cells[1 * 24 + t] = noise[t];
        cells[2 * 24 + t] = base[t];
    }
    IndicatorPanel panel(countries, {"T"}, synthetic::years(2000, 24), cells, {});
    const auto s = country_similarity(panel, "T", "REF", {"BBB", "AAA"}, StlConfig{});
    ASSERT_EQ(s.by_combined.size(), 2U);
    EXPECT_EQ(s.by_combined[0].country, "AAA");
    EXPECT_EQ(s.by_combined[0].distance.combined, 0.0);
    EXPECT_GT(s.by_combined[1].distance.combined, 0.0);
}
