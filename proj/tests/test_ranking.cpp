#include "tssim/ranking.hpp"
#include "tssim/taxonomy.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

using namespace tssim;

namespace {

StlDecomposition flat(double level, double amplitude, std::size_t n = 16) {
    StlDecomposition d{std::vector<double>(n, level), std::vector<double>(n), std::vector<double>(n, 0.0), 2000};
    for (std::size_t k = 0; k < n; ++k) {
        d.seasonal[k] = (k % 2 == 0 ? amplitude : -amplitude);
    }
    return d;
}

RankingTable table_from(const std::vector<std::pair<std::string, double>>& distances) {
    RankingTable t{"AAA", "T", {}, {}};
    for (const auto& [ind, d] : distances) {
        t.rows.push_back({ind, {d, d, d}, 0});
    }
    assign_ranks(t.rows);
    return t;
}

std::size_t rank_of(const RankingTable& t, const std::string& indicator) {
    for (const auto& r : t.rows) {
        if (r.indicator == indicator) {
            return r.rank;
        }
    }
    return 0;
}

bool is_permutation_of_1_to_n(const RankingTable& t) {
    std::vector<std::size_t> ranks;
    for (const auto& r : t.rows) {
        ranks.push_back(r.rank);
    }
    std::sort(ranks.begin(), ranks.end());
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        if (ranks[k] != k + 1) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST(Ranks, SmallestDistanceRanksFirst) {
    const auto t = table_from({{"A", 0.5}, {"B", 0.2}, {"C", 0.9}});
    EXPECT_EQ(rank_of(t, "A"), 2U);
    EXPECT_EQ(rank_of(t, "B"), 1U);
    EXPECT_EQ(rank_of(t, "C"), 3U);
}

TEST(Ranks, EqualDistancesBreakByCode) {
    const auto t = table_from({{"ZED", 1.0}, {"ALPHA", 1.0}, {"MID", 0.5}});
    EXPECT_EQ(rank_of(t, "MID"), 1U);
    EXPECT_EQ(rank_of(t, "ALPHA"), 2U);
    EXPECT_EQ(rank_of(t, "ZED"), 3U);
}

TEST(Ranks, IdenticalIndicatorRanksFirstAndTargetExcluded) {
    std::map<SeriesKey, StlDecomposition> decomps{
        {{"AAA", "T"}, flat(1.0, 0.5)},
        {{"AAA", "COPY"}, flat(1.0, 0.5)},
        {{"AAA", "NEAR"}, flat(1.2, 0.5)},
        {{"AAA", "FAR"}, flat(4.0, 0.1)},
    };
    const auto t = rank_indicators(decomps, {"COPY", "FAR", "GONE", "NEAR", "T"}, "AAA", "T");
    ASSERT_EQ(t.rows.size(), 3U);
    EXPECT_EQ(t.rows[0].indicator, "COPY");
    EXPECT_EQ(t.rows[0].distance.combined, 0.0);
    EXPECT_EQ(t.rows[1].indicator, "NEAR");
    EXPECT_EQ(t.rows[2].indicator, "FAR");
    EXPECT_EQ(t.skipped.count("GONE"), 1U);
    EXPECT_TRUE(is_permutation_of_1_to_n(t));
    EXPECT_THROW(rank_indicators(decomps, {"COPY"}, "AAA", "MISSING"), LookupError);
}

TEST(Ranks, PermutationAndMonotoneInvariance) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, double>> d, transformed;
        const auto n = 1 + rng() % 40;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = std::floor(std::uniform_real_distribution<>(0, 10)(rng)); // force ties
            d.push_back({"I" + std::to_string(1000 + rng() % 9000), v});
        }
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end(), [](auto& a, auto& b) { return a.first == b.first; }), d.end());
        for (const auto& [ind, v] : d) {
            transformed.push_back({ind, std::exp(v) * 3.0 + 7.0});
        }
        const auto a = table_from(d);
        const auto b = table_from(transformed);
        ASSERT_TRUE(is_permutation_of_1_to_n(a));
        for (std::size_t k = 0; k < a.rows.size(); ++k) {
            EXPECT_EQ(a.rows[k].indicator, b.rows[k].indicator);
        }
    }
}

TEST(Ranks, RestrictRenumbers) {
    const auto t = table_from({{"A", 0.1}, {"B", 0.2}, {"C", 0.3}, {"D", 0.4}});
    const auto r = restrict_table(t, {"B", "D"});
    ASSERT_EQ(r.rows.size(), 2U);
    EXPECT_EQ(rank_of(r, "B"), 1U);
    EXPECT_EQ(rank_of(r, "D"), 2U);
}

TEST(GroupRanks, MeanPerGroupAndCountWeightedIdentity) {
    TopicTaxonomy tax = TopicTaxonomy::world_bank_default();
    tax.set_indicator_topic("P1", "Poverty: Poverty rates");
    tax.set_indicator_topic("P2", "Poverty: Poverty rates");
    tax.set_indicator_topic("H1", "Health: Mortality");
    tax.set_indicator_topic("H2", "Health: Mortality");
    tax.set_indicator_topic("E1", "Economic Policy & Debt: Purchasing power parity");
    const auto t = table_from({{"P1", 0.1}, {"H1", 0.2}, {"P2", 0.3}, {"E1", 0.4}, {"H2", 0.5}});
    const auto groups = group_mean_ranks(t, tax);
    double weighted = 0;
    std::size_t total = 0;
    for (const auto& g : groups) {
        weighted += g.mean_rank * static_cast<double>(g.count);
        total += g.count;
        if (g.group == 9) {
            EXPECT_EQ(g.mean_rank, 2.0);
            EXPECT_EQ(g.name, "Poverty");
            EXPECT_DOUBLE_EQ(g.share, 0.4);
        }
    }
    EXPECT_EQ(total, 5U);
    EXPECT_NEAR(weighted / static_cast<double>(total), 3.0, 1e-9);

    tax.set_indicator_topic("ORPHAN", "Not A Topic");
    EXPECT_THROW(group_mean_ranks(table_from({{"ORPHAN", 1.0}}), tax), LookupError);
}

TEST(GroupRanks, SingleGroupMeanIsMidpoint) {
    TopicTaxonomy tax = TopicTaxonomy::world_bank_default();
    std::vector<std::pair<std::string, double>> d;
    for (int k = 0; k < 7; ++k) {
        const std::string code = "H" + std::to_string(k);
        tax.set_indicator_topic(code, "Health: Mortality");
        d.push_back({code, k * 0.5});
    }
    const auto groups = group_mean_ranks(table_from(d), tax);
    ASSERT_EQ(groups.size(), 1U);
    EXPECT_EQ(groups[0].mean_rank, 4.0);
    EXPECT_EQ(groups[0].share, 1.0);
}

TEST(RankSequences, CanonicalOrderAndErrors) {
    const auto t = table_from({{"A", 0.3}, {"B", 0.1}, {"C", 0.2}});
    const auto seq = rank_sequence(t, {"A", "B", "C"});
    EXPECT_EQ(seq.ranks, (std::vector<double>{3, 1, 2}));
    EXPECT_THROW(rank_sequence(t, {"A", "B"}), InvalidArgument);
    EXPECT_THROW(rank_sequence(t, {"A", "B", "C", "D"}), InvalidArgument);
}

TEST(RankSequences, DtwOnRanks) {
    const RankSequence ref{"REF", {1, 2, 3}};
    const auto out = country_rank_distance(ref, {{"REV", {3, 2, 1}}, {"SAME", {1, 2, 3}}, {"ALSO", {1, 2, 3}}});
    ASSERT_EQ(out.size(), 3U);
    EXPECT_EQ(out[0].country, "ALSO");
    EXPECT_EQ(out[0].cost, 0.0);
    EXPECT_EQ(out[1].country, "SAME");
    EXPECT_EQ(out[2].country, "REV");
    EXPECT_EQ(out[2].cost, 4.0);
    EXPECT_THROW(country_rank_distance(ref, {{"SHORT", {1, 2}}}), InvalidArgument);
}

TEST(RankSequences, RandomPermutationsMatchBruteForce) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 1 + rng() % 6;
        std::vector<double> a(n), b(n);
        std::iota(a.begin(), a.end(), 1.0);
        std::iota(b.begin(), b.end(), 1.0);
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        const auto out = country_rank_distance({"R", a}, {{"X", b}, {"Y", a}});
        for (const auto& row : out) {
            EXPECT_EQ(row.cost, row.country == "Y" ? 0.0 : oracle::brute_force_dtw(a, b));
        }
        EXPECT_LE(out[0].cost, out[1].cost);
    }
}

TEST(Stats, DescribeKnownSample) {
    const auto s = describe("AAA", {3.0, 1.0, 2.0});
    EXPECT_EQ(s.count, 3U);
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(s.stddev, 1.0);
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.q25, 1.5);
    EXPECT_EQ(s.median, 2.0);
    EXPECT_EQ(s.q75, 2.5);
    EXPECT_EQ(s.max, 3.0);
    const auto c = describe("BBB", {4.0, 4.0, 4.0, 4.0});
    EXPECT_EQ(c.stddev, 0.0);
    EXPECT_EQ(c.q25, 4.0);
    EXPECT_TRUE(std::isnan(describe("CCC", {7.0}).stddev));
}

TEST(Stats, QuantilesMatchOracleOnFixture) {
    std::ifstream in(std::string(TSSIM_DATA_DIR) + "/fixture_panel.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto panel = parse_panel(ss.str());
    for (const auto& indicator : {"GB.XPD.RSDV.GD.ZS", panel.indicators().front().c_str()}) {
        const auto report = descriptive_stats(panel, indicator);
        ASSERT_EQ(report.rows.size(), panel.countries().size());
        const auto i = panel.indicator_index(indicator);
        for (const auto& row : report.rows) {
            const auto c = panel.country_index(row.country);
            std::vector<double> values;
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                if (auto v = panel.at(c, i, t)) {
                    values.push_back(*v);
                }
            }
            EXPECT_EQ(row.count, values.size());
            EXPECT_NEAR(row.q25, oracle::quantile(values, 0.25), 1e-12);
            EXPECT_NEAR(row.median, oracle::quantile(values, 0.5), 1e-12);
            EXPECT_NEAR(row.q75, oracle::quantile(values, 0.75), 1e-12);
            EXPECT_LE(row.min, row.q25);
            EXPECT_LE(row.q75, row.max);
        }
    }
    EXPECT_THROW(descriptive_stats(panel, "NOPE"), LookupError);
}
