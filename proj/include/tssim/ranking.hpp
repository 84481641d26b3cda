#pragma once

// Indicator rankings against a target indicator, topic-group mean ranks,
// cross-country comparison of rank sequences, and descriptive statistics.

#include "tssim/dtw.hpp"
#include "tssim/error.hpp"
#include "tssim/panel.hpp"
#include "tssim/similarity.hpp"
#include "tssim/stl.hpp"
#include "tssim/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tssim {

struct RankingRow {
    std::string indicator;
    CompositeDistance distance;
    std::size_t rank = 0;
};

struct RankingTable {
    std::string country;
    std::string target_indicator;
    std::vector<RankingRow> rows; // ascending rank
    std::map<std::string, std::string> skipped;
};

/// Sorts rows by combined distance (ties by indicator code) and numbers them 1..N.
inline void assign_ranks(std::vector<RankingRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        return a.distance.combined != b.distance.combined ? a.distance.combined < b.distance.combined
                                                          : a.indicator < b.indicator;
    });
    for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k].rank = k + 1;
    }
}

/// Ranks every other decomposed indicator of `country` by composite distance
/// to the target. Indicators absent from `decomps` are reported as skipped.
inline RankingTable rank_indicators(const std::map<SeriesKey, StlDecomposition>& decomps,
                                    const std::vector<std::string>& indicators, const std::string& country,
                                    const std::string& target_indicator, const CompositeWeights& weights = {},
                                    const dtw::DtwConfig& dtw_config = {}) {
    auto target = decomps.find({country, target_indicator});
    if (target == decomps.end()) {
        throw LookupError("rank_indicators: target series " + country + "/" + target_indicator +
                          " is missing or could not be decomposed");
    }
    RankingTable table{country, target_indicator, {}, {}};
    for (const auto& indicator : indicators) {
        if (indicator == target_indicator) {
            continue;
        }
        auto it = decomps.find({country, indicator});
        if (it == decomps.end()) {
            table.skipped.emplace(indicator, "no decomposition");
            continue;
        }
        table.rows.push_back({indicator, composite_distance(target->second, it->second, weights, dtw_config), 0});
    }
    assign_ranks(table.rows);
    return table;
}

inline RankingTable rank_indicators(const IndicatorPanel& panel, const std::string& country,
                                    const std::string& target_indicator, const StlConfig& stl_config,
                                    const CompositeWeights& weights = {}, const dtw::DtwConfig& dtw_config = {}) {
    const auto c = panel.country_index(country);
    panel.indicator_index(target_indicator);
    std::map<SeriesKey, StlDecomposition> decomps;
    std::map<std::string, std::string> skipped;
    for (const auto& indicator : panel.indicators()) {
        const auto series = extract_series(panel, panel.countries()[c], indicator);
        try {
            decomps.emplace(SeriesKey{country, indicator}, stl_decompose(series.to_time_series(), stl_config));
        } catch (const InvalidArgument& e) {
            if (indicator == target_indicator) {
                throw InvalidArgument("rank_indicators: target series " + country + "/" + indicator + ": " +
                                      e.what());
            }
            skipped.emplace(indicator, e.what());
        }
    }
    auto table = rank_indicators(decomps, panel.indicators(), country, target_indicator, weights, dtw_config);
    for (auto& [indicator, reason] : skipped) {
        table.skipped[indicator] = reason;
    }
    return table;
}

/// Keeps only the listed indicators and renumbers ranks 1..N among them.
inline RankingTable restrict_table(const RankingTable& table, const std::set<std::string>& indicators) {
    RankingTable out{table.country, table.target_indicator, {}, table.skipped};
    for (const auto& row : table.rows) {
        if (indicators.count(row.indicator) != 0) {
            out.rows.push_back(row);
        }
    }
    assign_ranks(out.rows);
    return out;
}

struct GroupRank {
    int group = 0;
    std::string name;
    double mean_rank = 0.0;
    std::size_t count = 0;
    double share = 0.0;
};

/// Per-group mean rank, count and share of ranked indicators, ascending group id.
inline std::vector<GroupRank> group_mean_ranks(const RankingTable& table, const TopicTaxonomy& taxonomy) {
    std::map<int, std::pair<double, std::size_t>> acc;
    for (const auto& row : table.rows) {
        const auto group = taxonomy.group_of_indicator(row.indicator);
        if (!group) {
            throw LookupError("group_mean_ranks: indicator " + row.indicator + " has no taxonomy group");
        }
        auto& [sum, count] = acc[*group];
        sum += static_cast<double>(row.rank);
        ++count;
    }
    std::vector<GroupRank> out;
    const auto total = static_cast<double>(table.rows.size());
    for (const auto& [group, sc] : acc) {
        out.push_back({group, taxonomy.group_name(group), sc.first / static_cast<double>(sc.second), sc.second,
                       static_cast<double>(sc.second) / total});
    }
    return out;
}

struct RankSequence {
    std::string country;
    std::vector<double> ranks;
};

/// Ranks laid out in canonical indicator order (not rank order).
inline RankSequence rank_sequence(const RankingTable& table, const std::vector<std::string>& canonical) {
    std::map<std::string, std::size_t> by_indicator;
    for (const auto& row : table.rows) {
        by_indicator.emplace(row.indicator, row.rank);
    }
    std::string missing;
    RankSequence seq{table.country, {}};
    for (const auto& indicator : canonical) {
        auto it = by_indicator.find(indicator);
        if (it == by_indicator.end()) {
            missing += (missing.empty() ? "" : ", ") + indicator;
            continue;
        }
        seq.ranks.push_back(static_cast<double>(it->second));
    }
    if (!missing.empty()) {
        throw InvalidArgument("rank_sequence: " + table.country + " lacks indicators: " + missing);
    }
    if (by_indicator.size() != canonical.size()) {
        std::set<std::string> canon(canonical.begin(), canonical.end());
        std::string extra;
        for (const auto& [indicator, rank] : by_indicator) {
            if (canon.count(indicator) == 0) {
                extra += (extra.empty() ? "" : ", ") + indicator;
            }
        }
        throw InvalidArgument("rank_sequence: " + table.country + " has indicators outside the canonical list: " +
                              extra);
    }
    return seq;
}

struct CountryRankDistance {
    std::string country;
    double cost = 0.0;
};

/// Exact DTW (absolute local cost) between the reference rank sequence and
/// each other; ascending cost, ties by country code.
inline std::vector<CountryRankDistance> country_rank_distance(const RankSequence& ref,
                                                              const std::vector<RankSequence>& others) {
    dtw::DtwConfig config;
    config.local_cost = dtw::LocalCost::absolute;
    std::vector<CountryRankDistance> out;
    for (const auto& other : others) {
        if (other.ranks.size() != ref.ranks.size()) {
            throw InvalidArgument("country_rank_distance: sequence for " + other.country + " has length " +
                                  std::to_string(other.ranks.size()) + ", expected " +
                                  std::to_string(ref.ranks.size()));
        }
        out.push_back({other.country, ref.ranks.empty() ? 0.0 : dtw::dtw_exact(ref.ranks, other.ranks, config).cost});
    }
    std::sort(out.begin(), out.end(), [](const CountryRankDistance& a, const CountryRankDistance& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.country < b.country;
    });
    return out;
}

/// Quantile by linear interpolation between order statistics at position
/// (n - 1) * q of the sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double pos = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

struct DescriptiveStats {
    std::string country;
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample (n - 1); NaN for a single observation
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

inline DescriptiveStats describe(const std::string& country, std::vector<double> values) {
    DescriptiveStats s;
    s.country = country;
    s.count = values.size();
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.stddev = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1))
                                  : std::numeric_limits<double>::quiet_NaN();
    s.min = values.front();
    s.max = values.back();
    s.q25 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q75 = quantile_sorted(values, 0.75);
    return s;
}

struct StatsReport {
    std::vector<DescriptiveStats> rows;
    std::vector<std::string> omitted; // countries without observations
};

/// Per-country summary of one indicator over observed years.
inline StatsReport descriptive_stats(const IndicatorPanel& panel, const std::string& indicator) {
    const auto i = panel.indicator_index(indicator);
    StatsReport report;
    for (std::size_t c = 0; c < panel.countries().size(); ++c) {
        std::vector<double> values;
        for (std::size_t t = 0; t < panel.years().size(); ++t) {
            if (auto v = panel.at(c, i, t)) {
                values.push_back(*v);
            }
        }
        if (values.empty()) {
            report.omitted.push_back(panel.countries()[c]);
            continue;
        }
        report.rows.push_back(describe(panel.countries()[c], std::move(values)));
    }
    return report;
}

} // namespace tssim
