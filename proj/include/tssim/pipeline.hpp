#pragma once

// End-to-end batch pipeline: validate -> standardize -> impute -> decompose ->
// rank -> group-ranks -> compare-rankings -> compare-countries -> stats.
// Every stage writes its CSV as soon as it finishes; manifest.json records the
// settings, stage timings and skipped series.

#include "tssim/autoencoder.hpp"
#include "tssim/csv.hpp"
#include "tssim/error.hpp"
#include "tssim/panel.hpp"
#include "tssim/ranking.hpp"
#include "tssim/settings.hpp"
#include "tssim/similarity.hpp"
#include "tssim/standardize.hpp"
#include "tssim/stl.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tssim {

inline constexpr const char* kVersion = "0.1.0";

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidArgument("cannot read " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationProblem {
    std::string kind; // input | schema | settings | coverage | taxonomy
    std::string country;
    std::string indicator;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationProblem> problems;

    bool fatal() const {
        for (const auto& p : problems) {
            if (p.kind == "input" || p.kind == "schema" || p.kind == "settings") {
                return true;
            }
        }
        return false;
    }
};

inline ValidationReport validate_panel(const IndicatorPanel& panel, const RunSettings& settings) {
    ValidationReport report;
    if (!panel.find_indicator(settings.target_indicator)) {
        report.problems.push_back({"settings", "", settings.target_indicator, "target indicator not in panel"});
    }
    if (!panel.find_country(settings.reference_country)) {
        report.problems.push_back({"settings", settings.reference_country, "", "reference country not in panel"});
    }
    for (const auto& indicator : panel.indicators()) {
        if (!panel.taxonomy().group_of_indicator(indicator)) {
            report.problems.push_back({"taxonomy", "", indicator,
                                      "topic '" + panel.taxonomy().topic_of(indicator).value_or("") +
                                          "' has no group"});
        }
    }
    for (const auto& e : coverage_report(panel, settings.min_years)) {
        if (e.excluded) {
            report.problems.push_back({"coverage", e.country, e.indicator,
                                      std::to_string(e.observed_years) + " observed years, minimum " +
                                          std::to_string(settings.min_years)});
        }
    }
    return report;
}

/// Report-only check of a settings file's input. Never throws for data
/// problems; they are listed instead.
inline ValidationReport validate(const RunSettings& settings) {
    ValidationReport report;
    std::string text;
    try {
        text = read_file(settings.input);
    } catch (const Error& e) {
        report.problems.push_back({"input", "", "", e.what()});
        return report;
    }
    try {
        return validate_panel(parse_panel(text, settings.schema, settings.taxonomy()), settings);
    } catch (const Error& e) {
        report.problems.push_back({"schema", "", "", e.what()});
        return report;
    }
}

// ---------------------------------------------------------------------------
// CSV renderers

inline std::string validation_csv(const ValidationReport& report) {
    std::string out;
    csv::append_row(out, {"kind", "country", "indicator", "detail"});
    for (const auto& p : report.problems) {
        csv::append_row(out, {p.kind, p.country, p.indicator, p.detail});
    }
    return out;
}

inline std::string training_log_csv(const std::vector<TrainingLogEntry>& log) {
    std::string out;
    csv::append_row(out, {"round", "epoch", "loss"});
    for (const auto& e : log) {
        csv::append_row(out, {std::to_string(e.round), std::to_string(e.epoch), csv::format_double(e.loss)});
    }
    return out;
}

inline std::string decomposition_csv(const std::map<SeriesKey, StlDecomposition>& decomps) {
    std::string out;
    csv::append_row(out, {"country", "indicator", "year", "trend", "seasonal", "remainder"});
    for (const auto& [key, d] : decomps) {
        for (std::size_t t = 0; t < d.trend.size(); ++t) {
            csv::append_row(out, {key.country, key.indicator, std::to_string(d.start_year + static_cast<int>(t)),
                                  csv::format_double(d.trend[t]), csv::format_double(d.seasonal[t]),
                                  csv::format_double(d.remainder[t])});
        }
    }
    return out;
}

inline std::string rankings_csv(const std::vector<RankingTable>& tables) {
    std::string out;
    csv::append_row(out, {"country", "target_indicator", "indicator", "dist_trend", "dist_seasonal", "combined",
                          "rank"});
    for (const auto& table : tables) {
        for (const auto& row : table.rows) {
            csv::append_row(out, {table.country, table.target_indicator, row.indicator,
                                  csv::format_double(row.distance.trend), csv::format_double(row.distance.seasonal),
                                  csv::format_double(row.distance.combined), std::to_string(row.rank)});
        }
    }
    return out;
}

inline std::string group_ranks_csv(const std::map<std::string, std::vector<GroupRank>>& groups) {
    std::string out;
    csv::append_row(out, {"country", "group", "group_name", "mean_rank", "count", "share"});
    for (const auto& [country, rows] : groups) {
        for (const auto& g : rows) {
            csv::append_row(out, {country, std::to_string(g.group), g.name, csv::format_double(g.mean_rank),
                                  std::to_string(g.count), csv::format_double(g.share)});
        }
    }
    return out;
}

inline std::string compare_rankings_csv(const std::string& reference, std::size_t sequence_length,
                                        const std::vector<CountryRankDistance>& rows) {
    std::string out;
    csv::append_row(out, {"reference", "country", "dtw_distance", "position", "sequence_length"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        csv::append_row(out, {reference, rows[k].country, csv::format_double(rows[k].cost), std::to_string(k + 1),
                              std::to_string(sequence_length)});
    }
    return out;
}

inline std::string compare_countries_csv(const CountrySimilarity& sim) {
    std::map<std::string, std::size_t> trend_pos;
    std::map<std::string, std::size_t> seasonal_pos;
    for (std::size_t k = 0; k < sim.by_trend.size(); ++k) {
        trend_pos[sim.by_trend[k].country] = k + 1;
    }
    for (std::size_t k = 0; k < sim.by_seasonal.size(); ++k) {
        seasonal_pos[sim.by_seasonal[k].country] = k + 1;
    }
    std::string out;
    csv::append_row(out, {"country", "dist_trend", "dist_seasonal", "combined", "position", "trend_position",
                          "seasonal_position"});
    for (std::size_t k = 0; k < sim.by_combined.size(); ++k) {
        const auto& r = sim.by_combined[k];
        csv::append_row(out, {r.country, csv::format_double(r.distance.trend), csv::format_double(r.distance.seasonal),
                              csv::format_double(r.distance.combined), std::to_string(k + 1),
                              std::to_string(trend_pos[r.country]), std::to_string(seasonal_pos[r.country])});
    }
    return out;
}

inline std::string stats_csv(const std::string& indicator, const StatsReport& report) {
    std::string out;
    csv::append_row(out, {"country", "indicator", "count", "mean", "std", "min", "q25", "median", "q75", "max"});
    for (const auto& s : report.rows) {
        csv::append_row(out, {s.country, indicator, std::to_string(s.count), csv::format_double(s.mean),
                              csv::format_double(s.stddev), csv::format_double(s.min), csv::format_double(s.q25),
                              csv::format_double(s.median), csv::format_double(s.q75), csv::format_double(s.max)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage functions (in-memory)

struct SkipRecord {
    std::string stage;
    std::string country;
    std::string indicator;
    std::string reason;
};

struct PreparedPanel {
    IndicatorPanel raw;
    StandardizedPanel standardized;
    ImputationResult imputed;
    std::set<SeriesKey> excluded;
    std::vector<SkipRecord> skipped;
};

inline std::set<SeriesKey> excluded_series(const IndicatorPanel& panel, std::size_t min_years) {
    std::set<SeriesKey> out;
    for (const auto& e : coverage_report(panel, min_years)) {
        if (e.excluded) {
            out.insert({e.country, e.indicator});
        }
    }
    return out;
}

/// Indicators with no observation anywhere cannot be standardized; they are
/// dropped before imputation.
inline IndicatorPanel drop_empty_indicators(const IndicatorPanel& panel, std::vector<SkipRecord>& skipped) {
    std::set<std::string> drop;
    for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
        bool any = false;
        for (std::size_t c = 0; c < panel.countries().size() && !any; ++c) {
            for (std::size_t t = 0; t < panel.years().size() && !any; ++t) {
                any = panel.observed(c, i, t);
            }
        }
        if (!any) {
            drop.insert(panel.indicators()[i]);
            skipped.push_back({"standardize", "", panel.indicators()[i], "indicator has no observations"});
        }
    }
    return drop.empty() ? panel : panel.without_indicators(drop);
}

/// Decomposes every non-excluded series of the completed panel.
inline BatchDecomposition decompose_included(const IndicatorPanel& completed, const std::set<SeriesKey>& excluded,
                                             const StlConfig& config) {
    auto batch = batch_decompose(completed, config);
    for (const auto& key : excluded) {
        if (batch.decompositions.erase(key) != 0) {
            batch.skipped.emplace(key, "excluded by coverage threshold");
        }
    }
    return batch;
}

struct RankingResult {
    std::vector<RankingTable> tables;
    std::vector<SkipRecord> skipped;
};

inline RankingResult rank_all_countries(const IndicatorPanel& completed,
                                        const std::map<SeriesKey, StlDecomposition>& decomps,
                                        const RunSettings& settings) {
    RankingResult out;
    for (const auto& country : completed.countries()) {
        if (decomps.count({country, settings.target_indicator}) == 0) {
            out.skipped.push_back({"rank", country, settings.target_indicator, "target series unavailable"});
            continue;
        }
        auto table = rank_indicators(decomps, completed.indicators(), country, settings.target_indicator,
                                     settings.weights, settings.dtw);
        for (const auto& [indicator, reason] : table.skipped) {
            out.skipped.push_back({"rank", country, indicator, reason});
        }
        out.tables.push_back(std::move(table));
    }
    return out;
}

struct RankComparison {
    std::vector<std::string> canonical;
    std::vector<CountryRankDistance> rows;
};

/// Rank sequences over the indicators ranked in every country, compared with
/// the reference country's sequence by exact DTW.
inline RankComparison compare_rankings(const std::vector<RankingTable>& tables, const std::string& reference) {
    const RankingTable* ref = nullptr;
    std::set<std::string> shared;
    bool first = true;
    for (const auto& table : tables) {
        std::set<std::string> mine;
        for (const auto& row : table.rows) {
            mine.insert(row.indicator);
        }
        if (first) {
            shared = std::move(mine);
            first = false;
        } else {
            std::set<std::string> both;
            std::set_intersection(shared.begin(), shared.end(), mine.begin(), mine.end(),
                                  std::inserter(both, both.begin()));
            shared = std::move(both);
        }
        if (table.country == reference) {
            ref = &table;
        }
    }
    if (ref == nullptr) {
        throw LookupError("compare_rankings: no ranking for reference country " + reference);
    }
    RankComparison out;
    out.canonical.assign(shared.begin(), shared.end());
    const auto ref_seq = rank_sequence(restrict_table(*ref, shared), out.canonical);
    std::vector<RankSequence> others;
    for (const auto& table : tables) {
        if (table.country != reference) {
            others.push_back(rank_sequence(restrict_table(table, shared), out.canonical));
        }
    }
    out.rows = country_rank_distance(ref_seq, others);
    return out;
}

// ---------------------------------------------------------------------------
// File-level pipeline

struct StageRecord {
    std::string name;
    std::string status; // ok | failed
    double seconds = 0.0;
    std::string error;
};

struct RunResult {
    int exit_code = 0;
    std::vector<StageRecord> stages;
    std::vector<std::string> outputs;
    nlohmann::json manifest;
};

inline const std::vector<std::string>& pipeline_stages() {
    static const std::vector<std::string> stages = {"validate",         "standardize",       "impute",
                                                    "decompose",        "rank",              "group-ranks",
                                                    "compare-rankings", "compare-countries", "stats"};
    return stages;
}

/// Loads, validates and imputes. Shared by the pipeline and the individual
/// subcommands.
inline PreparedPanel prepare_panel(const IndicatorPanel& raw, const RunSettings& settings) {
    PreparedPanel prep{raw, {}, {}, excluded_series(raw, settings.min_years), {}};
    for (const auto& key : prep.excluded) {
        prep.skipped.push_back({"validate", key.country, key.indicator, "below minimum observed years"});
    }
    const auto usable = drop_empty_indicators(raw, prep.skipped);
    prep.standardized = standardize(usable);
    prep.imputed = train_impute(prep.standardized.panel, settings.seeded_autoencoder());
    return prep;
}

inline IndicatorPanel load_panel(const RunSettings& settings) {
    return parse_panel(read_file(settings.input), settings.schema, settings.taxonomy());
}

inline RunResult run_pipeline(const RunSettings& settings) {
    namespace fs = std::filesystem;
    RunResult result;
    if (!fs::exists(settings.input)) {
        result.exit_code = 2;
        result.stages.push_back({"validate", "failed", 0.0, "input file not found: " + settings.input.string()});
        return result;
    }
    fs::create_directories(settings.output_dir);

    std::vector<SkipRecord> skipped;
    std::string failed_stage;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(settings.output_dir / name, text);
        result.outputs.push_back(name);
    };
    auto stage = [&](const std::string& name, const std::function<void()>& body) {
        if (!failed_stage.empty()) {
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        StageRecord rec{name, "ok", 0.0, ""};
        try {
            body();
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.error = e.what();
            failed_stage = name;
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.stages.push_back(std::move(rec));
    };

    IndicatorPanel raw;
    IndicatorPanel usable;
    std::set<SeriesKey> excluded;
    StandardizedPanel standardized;
    ImputationResult imputed;
    BatchDecomposition batch;
    RankingResult rankings;

    stage("validate", [&] {
        raw = load_panel(settings);
        const auto report = validate_panel(raw, settings);
        emit("validation.csv", validation_csv(report));
        if (report.fatal()) {
            throw InvalidArgument("validation found fatal problems (see validation.csv)");
        }
        excluded = excluded_series(raw, settings.min_years);
        for (const auto& key : excluded) {
            skipped.push_back({"validate", key.country, key.indicator, "below minimum observed years"});
        }
    });
    stage("standardize", [&] {
        usable = drop_empty_indicators(raw, skipped);
        standardized = standardize(usable);
        emit("standardized.csv", serialize_panel(standardized.panel));
    });
    stage("impute", [&] {
        imputed = train_impute(standardized.panel, settings.seeded_autoencoder());
        emit("imputed.csv", serialize_panel(imputed.panel));
        emit("training_log.csv", training_log_csv(imputed.log));
    });
    stage("decompose", [&] {
        batch = decompose_included(imputed.panel, excluded, settings.stl);
        for (const auto& [key, reason] : batch.skipped) {
            skipped.push_back({"decompose", key.country, key.indicator, reason});
        }
        emit("decomposition.csv", decomposition_csv(batch.decompositions));
    });
    stage("rank", [&] {
        rankings = rank_all_countries(imputed.panel, batch.decompositions, settings);
        skipped.insert(skipped.end(), rankings.skipped.begin(), rankings.skipped.end());
        emit("rankings.csv", rankings_csv(rankings.tables));
    });
    stage("group-ranks", [&] {
        std::map<std::string, std::vector<GroupRank>> groups;
        for (const auto& table : rankings.tables) {
            groups[table.country] = group_mean_ranks(table, imputed.panel.taxonomy());
        }
        emit("group_ranks.csv", group_ranks_csv(groups));
    });
    stage("compare-rankings", [&] {
        const auto cmp = compare_rankings(rankings.tables, settings.reference_country);
        emit("compare_rankings.csv", compare_rankings_csv(settings.reference_country, cmp.canonical.size(), cmp.rows));
    });
    stage("compare-countries", [&] {
        std::vector<std::string> others;
        for (const auto& c : imputed.panel.countries()) {
            if (c != settings.reference_country) {
                others.push_back(c);
            }
        }
        const auto sim = country_similarity(batch.decompositions, settings.target_indicator,
                                            settings.reference_country, others, settings.weights, settings.dtw);
        for (const auto& [country, reason] : sim.skipped) {
            skipped.push_back({"compare-countries", country, settings.target_indicator, reason});
        }
        emit("compare_countries.csv", compare_countries_csv(sim));
    });
    stage("stats", [&] {
        emit("stats.csv", stats_csv(settings.target_indicator, descriptive_stats(raw, settings.target_indicator)));
    });

    nlohmann::json manifest;
    manifest["tool"] = "tssim";
    manifest["version"] = kVersion;
    manifest["compiler"] = __VERSION__;
    manifest["seed"] = settings.seed;
    manifest["settings"] = settings_to_json(settings);
    manifest["stages"] = nlohmann::json::array();
    for (const auto& s : result.stages) {
        nlohmann::json sj = {{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}};
        if (!s.error.empty()) {
            sj["error"] = s.error;
        }
        manifest["stages"].push_back(sj);
    }
    manifest["failed_stage"] = failed_stage.empty() ? nlohmann::json(nullptr) : nlohmann::json(failed_stage);
    manifest["failures"] = failed_stage.empty() ? 0 : 1;
    manifest["skipped"] = nlohmann::json::array();
    for (const auto& s : skipped) {
        manifest["skipped"].push_back(
            {{"stage", s.stage}, {"country", s.country}, {"indicator", s.indicator}, {"reason", s.reason}});
    }
    manifest["outputs"] = result.outputs;
    if (!imputed.round_losses.empty()) {
        manifest["imputation_round_losses"] = imputed.round_losses;
    }
    write_file(settings.output_dir / "manifest.json", manifest.dump(2) + "\n");
    result.manifest = std::move(manifest);
    result.exit_code = failed_stage.empty() ? 0 : 1;
    return result;
}

} // namespace tssim
