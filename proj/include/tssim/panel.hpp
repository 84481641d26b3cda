#pragma once

// Country x indicator x year panel: long-format CSV ingestion, canonical
// serialization, coverage accounting and series extraction.

#include "tssim/csv.hpp"
#include "tssim/error.hpp"
#include "tssim/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace tssim {

struct PanelSchema {
    std::string country_column = "country";
    std::string indicator_column = "indicator";
    std::string topic_column = "topic";
    std::string year_column = "year";
    std::string value_column = "value";
    int year_min = 2000;
    int year_max = 2023;
    // When set, every topic must resolve to a taxonomy group.
    bool strict_taxonomy = false;
};

struct Observation {
    std::string country;
    std::string indicator;
    int year = 0;
    std::optional<double> value;
};

/// Gap-free series ready for decomposition.
struct TimeSeries {
    std::vector<double> values;
    int start_year = 0;
};

/// One (country, indicator) slice of a panel, missing years kept explicit.
struct PanelSeries {
    std::string country;
    std::string indicator;
    std::vector<int> years;
    std::vector<std::optional<double>> values;

    bool complete() const {
        return std::all_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
    }

    TimeSeries to_time_series() const {
        if (!complete()) {
            throw InvalidArgument("series " + country + "/" + indicator + " has missing values");
        }
        TimeSeries ts;
        ts.start_year = years.empty() ? 0 : years.front();
        ts.values.reserve(values.size());
        for (const auto& v : values) {
            ts.values.push_back(*v);
        }
        return ts;
    }
};

/// Immutable dense cube. Countries and indicators are sorted ascending by code,
/// years ascending and contiguous.
class IndicatorPanel {
public:
    IndicatorPanel() = default;

    IndicatorPanel(std::vector<std::string> countries, std::vector<std::string> indicators, std::vector<int> years,
                   std::vector<std::optional<double>> cells, TopicTaxonomy taxonomy)
        : countries_(std::move(countries)), indicators_(std::move(indicators)), years_(std::move(years)),
          taxonomy_(std::move(taxonomy)) {
        if (!std::is_sorted(countries_.begin(), countries_.end()) ||
            std::adjacent_find(countries_.begin(), countries_.end()) != countries_.end()) {
            throw InvalidArgument("panel: countries must be strictly ascending");
        }
        if (!std::is_sorted(indicators_.begin(), indicators_.end()) ||
            std::adjacent_find(indicators_.begin(), indicators_.end()) != indicators_.end()) {
            throw InvalidArgument("panel: indicators must be strictly ascending");
        }
        for (std::size_t i = 1; i < years_.size(); ++i) {
            if (years_[i] != years_[i - 1] + 1) {
                throw InvalidArgument("panel: years must be ascending and contiguous");
            }
        }
        if (cells.size() != cell_count()) {
            throw InvalidArgument("panel: cell vector has wrong size");
        }
        values_.resize(cells.size(), std::numeric_limits<double>::quiet_NaN());
        observed_.resize(cells.size(), 0);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].has_value()) {
                if (!std::isfinite(*cells[k])) {
                    throw InvalidArgument("panel: non-finite cell value");
                }
                values_[k] = *cells[k];
                observed_[k] = 1;
            }
        }
    }

    const std::vector<std::string>& countries() const { return countries_; }
    const std::vector<std::string>& indicators() const { return indicators_; }
    const std::vector<int>& years() const { return years_; }
    const TopicTaxonomy& taxonomy() const { return taxonomy_; }

    std::size_t cell_count() const { return countries_.size() * indicators_.size() * years_.size(); }

    std::size_t observed_count() const {
        return static_cast<std::size_t>(std::count(observed_.begin(), observed_.end(), 1));
    }

    std::size_t index(std::size_t country, std::size_t indicator, std::size_t year) const {
        return (country * indicators_.size() + indicator) * years_.size() + year;
    }

    std::optional<double> at(std::size_t country, std::size_t indicator, std::size_t year) const {
        const auto k = index(country, indicator, year);
        if (observed_[k] == 0) {
            return std::nullopt;
        }
        return values_[k];
    }

    bool observed(std::size_t country, std::size_t indicator, std::size_t year) const {
        return observed_[index(country, indicator, year)] != 0;
    }

    std::optional<std::size_t> find_country(std::string_view code) const { return find(countries_, code); }
    std::optional<std::size_t> find_indicator(std::string_view code) const { return find(indicators_, code); }

    std::size_t country_index(std::string_view code) const {
        auto idx = find_country(code);
        if (!idx) {
            throw LookupError("unknown country '" + std::string(code) + "'");
        }
        return *idx;
    }

    std::size_t indicator_index(std::string_view code) const {
        auto idx = find_indicator(code);
        if (!idx) {
            throw LookupError("unknown indicator '" + std::string(code) + "'");
        }
        return *idx;
    }

    /// All cells in storage order (country-major, then indicator, then year).
    std::vector<std::optional<double>> cells() const {
        std::vector<std::optional<double>> out(values_.size());
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (observed_[k] != 0) {
                out[k] = values_[k];
            }
        }
        return out;
    }

    /// Same axes and taxonomy, new cell values.
    IndicatorPanel with_cells(std::vector<std::optional<double>> cells) const {
        return IndicatorPanel(countries_, indicators_, years_, std::move(cells), taxonomy_);
    }

    /// Copy without the listed indicators.
    IndicatorPanel without_indicators(const std::set<std::string>& drop) const {
        std::vector<std::string> kept;
        std::vector<std::size_t> kept_idx;
        for (std::size_t i = 0; i < indicators_.size(); ++i) {
            if (drop.count(indicators_[i]) == 0) {
                kept.push_back(indicators_[i]);
                kept_idx.push_back(i);
            }
        }
        std::vector<std::optional<double>> cells;
        cells.reserve(countries_.size() * kept.size() * years_.size());
        for (std::size_t c = 0; c < countries_.size(); ++c) {
            for (auto i : kept_idx) {
                for (std::size_t t = 0; t < years_.size(); ++t) {
                    cells.push_back(at(c, i, t));
                }
            }
        }
        return IndicatorPanel(countries_, std::move(kept), years_, std::move(cells), taxonomy_);
    }

    friend bool operator==(const IndicatorPanel& a, const IndicatorPanel& b) {
        if (a.countries_ != b.countries_ || a.indicators_ != b.indicators_ || a.years_ != b.years_ ||
            a.observed_ != b.observed_ || !(a.taxonomy_ == b.taxonomy_)) {
            return false;
        }
        for (std::size_t k = 0; k < a.values_.size(); ++k) {
            if (a.observed_[k] != 0 && a.values_[k] != b.values_[k]) {
                return false;
            }
        }
        return true;
    }

private:
    static std::optional<std::size_t> find(const std::vector<std::string>& axis, std::string_view code) {
        auto it = std::lower_bound(axis.begin(), axis.end(), code);
        if (it == axis.end() || *it != code) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - axis.begin());
    }

    std::vector<std::string> countries_;
    std::vector<std::string> indicators_;
    std::vector<int> years_;
    std::vector<double> values_;
    std::vector<std::uint8_t> observed_;
    TopicTaxonomy taxonomy_;
};

/// Parses long-format CSV. Rows outside [year_min, year_max] are dropped. The
/// year axis spans the smallest to the largest retained year.
inline IndicatorPanel parse_panel(std::string_view csv_text, const PanelSchema& schema = {},
                                  TopicTaxonomy taxonomy = TopicTaxonomy::world_bank_default()) {
    const auto table = csv::parse(csv_text);
    const std::pair<const char*, const std::string*> required[] = {
        {"country", &schema.country_column}, {"indicator", &schema.indicator_column},
        {"topic", &schema.topic_column},     {"year", &schema.year_column},
        {"value", &schema.value_column},
    };
    std::size_t cols[5];
    for (std::size_t k = 0; k < 5; ++k) {
        cols[k] = table.column(*required[k].second);
        if (cols[k] == csv::Table::npos) {
            throw ParseError(std::string("missing ") + required[k].first + " column '" + *required[k].second +
                             "' in header");
        }
    }

    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, std::optional<double>> cells;
    std::map<std::string, std::string> topics;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = std::to_string(table.line_numbers[r]);
        const auto& country = row[cols[0]];
        const auto& indicator = row[cols[1]];
        const auto& topic = row[cols[2]];
        if (country.empty() || indicator.empty()) {
            throw ParseError("row at line " + line + ": empty country or indicator code");
        }
        long long year = 0;
        if (!csv::parse_int(row[cols[3]], year)) {
            throw ParseError("row at line " + line + ": unparseable year '" + row[cols[3]] + "'");
        }
        std::optional<double> value;
        if (!row[cols[4]].empty()) {
            double v = 0.0;
            if (!csv::parse_double(row[cols[4]], v) || !std::isfinite(v)) {
                throw ParseError("row at line " + line + ": unparseable value '" + row[cols[4]] + "'");
            }
            value = v;
        }

        if (schema.strict_taxonomy && !taxonomy.group_of_topic(topic)) {
            throw ParseError("row at line " + line + ": unknown topic '" + topic + "' for indicator " + indicator);
        }
        auto [tit, fresh] = topics.emplace(indicator, topic);
        if (!fresh && tit->second != topic) {
            throw ParseError("row at line " + line + ": indicator " + indicator + " has conflicting topics '" +
                             tit->second + "' and '" + topic + "'");
        }

        if (year < schema.year_min || year > schema.year_max) {
            continue;
        }
        Key key{country, indicator, static_cast<int>(year)};
        auto [it, inserted] = cells.emplace(key, value);
        if (!inserted && it->second != value) {
            throw ParseError("conflicting duplicate for (" + country + ", " + indicator + ", " +
                             std::to_string(year) + ") at line " + line);
        }
    }

    std::set<std::string> country_set;
    std::set<std::string> indicator_set;
    int ymin = std::numeric_limits<int>::max();
    int ymax = std::numeric_limits<int>::min();
    for (const auto& [key, value] : cells) {
        country_set.insert(std::get<0>(key));
        indicator_set.insert(std::get<1>(key));
        ymin = std::min(ymin, std::get<2>(key));
        ymax = std::max(ymax, std::get<2>(key));
    }
    std::vector<std::string> countries(country_set.begin(), country_set.end());
    std::vector<std::string> indicators(indicator_set.begin(), indicator_set.end());
    std::vector<int> years;
    if (!cells.empty()) {
        for (int y = ymin; y <= ymax; ++y) {
            years.push_back(y);
        }
    }
    for (const auto& indicator : indicators) {
        taxonomy.set_indicator_topic(indicator, topics.at(indicator));
    }

    std::vector<std::optional<double>> dense(countries.size() * indicators.size() * years.size());
    std::map<std::string, std::size_t> cidx;
    std::map<std::string, std::size_t> iidx;
    for (std::size_t c = 0; c < countries.size(); ++c) {
        cidx[countries[c]] = c;
    }
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        iidx[indicators[i]] = i;
    }
    for (const auto& [key, value] : cells) {
        const auto c = cidx[std::get<0>(key)];
        const auto i = iidx[std::get<1>(key)];
        const auto t = static_cast<std::size_t>(std::get<2>(key) - ymin);
        dense[(c * indicators.size() + i) * years.size() + t] = value;
    }
    return IndicatorPanel(std::move(countries), std::move(indicators), std::move(years), std::move(dense),
                          std::move(taxonomy));
}

/// Canonical CSV: header country,indicator,topic,year,value; one row per cell
/// in (country, indicator, year) order; missing cells have an empty value.
inline std::string serialize_panel(const IndicatorPanel& panel) {
    std::string out;
    csv::append_row(out, {"country", "indicator", "topic", "year", "value"});
    for (std::size_t c = 0; c < panel.countries().size(); ++c) {
        for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
            const auto topic = panel.taxonomy().topic_of(panel.indicators()[i]).value_or("");
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                const auto v = panel.at(c, i, t);
                csv::append_row(out, {panel.countries()[c], panel.indicators()[i], topic,
                                      std::to_string(panel.years()[t]), v ? csv::format_double(*v) : ""});
            }
        }
    }
    return out;
}

struct CoverageEntry {
    std::string country;
    std::string indicator;
    std::size_t observed_years = 0;
    bool excluded = false;
};

/// Observed-year counts per (country, indicator), flagging series with fewer
/// than `min_years` observations.
inline std::vector<CoverageEntry> coverage_report(const IndicatorPanel& panel, std::size_t min_years = 3) {
    std::vector<CoverageEntry> out;
    out.reserve(panel.countries().size() * panel.indicators().size());
    for (std::size_t c = 0; c < panel.countries().size(); ++c) {
        for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
            CoverageEntry e{panel.countries()[c], panel.indicators()[i], 0, false};
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                e.observed_years += panel.observed(c, i, t) ? 1 : 0;
            }
            e.excluded = e.observed_years < min_years;
            out.push_back(std::move(e));
        }
    }
    return out;
}

inline PanelSeries extract_series(const IndicatorPanel& panel, std::string_view country, std::string_view indicator) {
    const auto c = panel.country_index(country);
    const auto i = panel.indicator_index(indicator);
    PanelSeries s{std::string(country), std::string(indicator), panel.years(), {}};
    s.values.reserve(panel.years().size());
    for (std::size_t t = 0; t < panel.years().size(); ++t) {
        s.values.push_back(panel.at(c, i, t));
    }
    return s;
}

} // namespace tssim
