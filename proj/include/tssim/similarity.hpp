#pragma once

// Composite distance: FastDTW on the trend and seasonal STL components,
// combined as dist_trend * w_trend + dist_seasonal * w_seasonal. The
// remainder component does not enter the distance.

#include "tssim/dtw.hpp"
#include "tssim/error.hpp"
#include "tssim/panel.hpp"
#include "tssim/stl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tssim {

struct CompositeWeights {
    double trend = 0.7;
    double seasonal = 0.3;

    void validate() const {
        if (!(trend >= 0.0 && trend <= 1.0 && seasonal >= 0.0 && seasonal <= 1.0)) {
            throw InvalidArgument("weights must lie in [0, 1]");
        }
        if (std::abs(trend + seasonal - 1.0) > 1e-12) {
            throw InvalidArgument("weights must sum to 1");
        }
    }
};

struct CompositeDistance {
    double trend = 0.0;
    double seasonal = 0.0;
    double combined = 0.0;
};

namespace detail {

// FastDTW is not guaranteed symmetric under argument swap (tie-breaking picks
// different coarse paths), so pairs are always evaluated in a fixed order.
inline double symmetric_fastdtw(std::span<const double> a, std::span<const double> b, const dtw::DtwConfig& config) {
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) {
        std::swap(a, b);
    }
    return dtw::fastdtw(a, b, config).cost;
}

} // namespace detail

inline CompositeDistance combine(double dist_trend, double dist_seasonal, const CompositeWeights& weights) {
    return {dist_trend, dist_seasonal, dist_trend * weights.trend + dist_seasonal * weights.seasonal};
}

inline CompositeDistance composite_distance(const StlDecomposition& da, const StlDecomposition& db,
                                            const CompositeWeights& weights = {},
                                            const dtw::DtwConfig& dtw_config = {}) {
    weights.validate();
    return combine(detail::symmetric_fastdtw(da.trend, db.trend, dtw_config),
                   detail::symmetric_fastdtw(da.seasonal, db.seasonal, dtw_config), weights);
}

/// Symmetric matrix of composite distances between the listed keys, with a
/// zero diagonal.
inline std::vector<std::vector<CompositeDistance>>
pairwise_matrix(const std::map<SeriesKey, StlDecomposition>& decomps, const std::vector<SeriesKey>& keys,
                const CompositeWeights& weights = {}, const dtw::DtwConfig& dtw_config = {}) {
    std::vector<const StlDecomposition*> items;
    for (const auto& key : keys) {
        auto it = decomps.find(key);
        if (it == decomps.end()) {
            throw LookupError("pairwise_matrix: no decomposition for " + key.country + "/" + key.indicator);
        }
        items.push_back(&it->second);
    }
    const std::size_t n = keys.size();
    std::vector<std::vector<CompositeDistance>> m(n, std::vector<CompositeDistance>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            m[i][j] = composite_distance(*items[i], *items[j], weights, dtw_config);
            m[j][i] = m[i][j];
        }
    }
    return m;
}

struct CountryDistance {
    std::string country;
    CompositeDistance distance;
};

struct CountrySimilarity {
    std::vector<CountryDistance> by_combined;
    std::vector<CountryDistance> by_trend;
    std::vector<CountryDistance> by_seasonal;
    std::map<std::string, std::string> skipped;
};

namespace detail {

inline std::vector<CountryDistance> sorted_by(std::vector<CountryDistance> v, double CompositeDistance::*field) {
    std::sort(v.begin(), v.end(), [field](const CountryDistance& a, const CountryDistance& b) {
        const double x = a.distance.*field;
        const double y = b.distance.*field;
        return x != y ? x < y : a.country < b.country;
    });
    return v;
}

} // namespace detail

/// Distances from the reference country's series to each other country's
/// series for one indicator, using precomputed decompositions. Ties are broken
/// by ascending country code.
inline CountrySimilarity country_similarity(const std::map<SeriesKey, StlDecomposition>& decomps,
                                            const std::string& indicator, const std::string& reference,
                                            const std::vector<std::string>& others,
                                            const CompositeWeights& weights = {},
                                            const dtw::DtwConfig& dtw_config = {}) {
    auto ref = decomps.find({reference, indicator});
    if (ref == decomps.end()) {
        throw LookupError("country_similarity: no decomposition for reference " + reference + "/" + indicator);
    }
    CountrySimilarity out;
    std::vector<CountryDistance> rows;
    for (const auto& country : others) {
        auto it = decomps.find({country, indicator});
        if (it == decomps.end()) {
            out.skipped.emplace(country, "no decomposition for " + country + "/" + indicator);
            continue;
        }
        rows.push_back({country, composite_distance(ref->second, it->second, weights, dtw_config)});
    }
    out.by_combined = detail::sorted_by(rows, &CompositeDistance::combined);
    out.by_trend = detail::sorted_by(rows, &CompositeDistance::trend);
    out.by_seasonal = detail::sorted_by(std::move(rows), &CompositeDistance::seasonal);
    return out;
}

/// Convenience overload decomposing the needed series from a completed panel.
inline CountrySimilarity country_similarity(const IndicatorPanel& panel, const std::string& indicator,
                                            const std::string& reference, const std::vector<std::string>& others,
                                            const StlConfig& stl_config, const CompositeWeights& weights = {},
                                            const dtw::DtwConfig& dtw_config = {}) {
    std::map<SeriesKey, StlDecomposition> decomps;
    std::map<std::string, std::string> skipped;
    auto add = [&](const std::string& country) {
        if (decomps.count({country, indicator}) != 0) {
            return;
        }
        if (!panel.find_country(country) || !panel.find_indicator(indicator)) {
            skipped.emplace(country, "series " + country + "/" + indicator + " not in panel");
            return;
        }
        const auto series = extract_series(panel, country, indicator);
        if (!series.complete()) {
            skipped.emplace(country, "series " + country + "/" + indicator + " has missing values");
            return;
        }
        try {
            decomps.emplace(SeriesKey{country, indicator}, stl_decompose(series.to_time_series(), stl_config));
        } catch (const InvalidArgument& e) {
            skipped.emplace(country, e.what());
        }
    };
    add(reference);
    if (decomps.empty()) {
        throw LookupError("country_similarity: reference series unavailable: " + skipped.begin()->second);
    }
    for (const auto& c : others) {
        add(c);
    }
    auto out = country_similarity(decomps, indicator, reference, others, weights, dtw_config);
    for (auto& [country, reason] : skipped) {
        out.skipped[country] = reason;
    }
    return out;
}

} // namespace tssim
