// tssim: command-line front end for the decomposition-aware similarity engine.

#include "tssim/csv.hpp"
#include "tssim/dtw.hpp"
#include "tssim/pipeline.hpp"
#include "tssim/settings.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tssim;

namespace {

struct CommonOptions {
    std::string settings_path;
    std::optional<std::string> input;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-s,--settings", opts.settings_path, "JSON settings file")->required();
    cmd->add_option("--input", opts.input, "override the input CSV path");
    cmd->add_option("--out", opts.out, "override the output directory");
    cmd->add_option("--seed", opts.seed, "override the run seed");
}

RunSettings resolve(const CommonOptions& opts) {
    auto settings = load_settings(opts.settings_path);
    if (opts.input) {
        settings.input = *opts.input;
    }
    if (opts.out) {
        settings.output_dir = *opts.out;
    }
    if (opts.seed) {
        settings.seed = *opts.seed;
        settings.autoencoder.seed = *opts.seed;
    }
    return settings;
}

// Writes to <out>/<name> when --out was given, stdout otherwise.
void emit(const CommonOptions& opts, const RunSettings& settings, const std::string& name, const std::string& text) {
    if (opts.out) {
        fs::create_directories(settings.output_dir);
        write_file(settings.output_dir / name, text);
        std::cerr << "wrote " << (settings.output_dir / name).string() << "\n";
    } else {
        std::cout << text;
    }
}

SeriesKey parse_key(const std::string& text) {
    const auto pos = text.find(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == text.size()) {
        throw InvalidArgument("series key must look like COUNTRY:INDICATOR, got '" + text + "'");
    }
    return {text.substr(0, pos), text.substr(pos + 1)};
}

std::vector<double> csv_column(const std::string& path, const std::string& column) {
    const auto table = csv::parse(read_file(path));
    const auto idx = table.column(column);
    if (idx == csv::Table::npos) {
        throw LookupError("column '" + column + "' not found in " + path);
    }
    std::vector<double> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& field = table.rows[r][idx];
        if (field.empty()) {
            continue;
        }
        double v = 0.0;
        if (!csv::parse_double(field, v)) {
            throw ParseError("line " + std::to_string(table.line_numbers[r]) + ": bad number '" + field + "'");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decomposition-aware time-series similarity over country x indicator panels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions opts;

    auto* validate_cmd = app.add_subcommand("validate", "check schema, coverage and taxonomy");
    add_common(validate_cmd, opts);

    std::optional<std::string> stats_indicator;
    auto* stats_cmd = app.add_subcommand("stats", "descriptive statistics of one indicator per country");
    add_common(stats_cmd, opts);
    stats_cmd->add_option("--indicator", stats_indicator, "indicator code (default: target indicator)");

    bool raw_units = false;
    auto* impute_cmd = app.add_subcommand("impute", "standardize and fill missing cells");
    add_common(impute_cmd, opts);
    impute_cmd->add_flag("--raw-units", raw_units, "write the completed panel in original units");

    auto* decompose_cmd = app.add_subcommand("decompose", "STL-decompose every series of the completed panel");
    add_common(decompose_cmd, opts);

    std::optional<std::string> key_a;
    std::optional<std::string> key_b;
    std::optional<std::string> csv_path;
    std::optional<std::string> col_a;
    std::optional<std::string> col_b;
    std::string component = "series";
    bool exact = false;
    std::optional<std::string> path_out;
    auto* distance_cmd = app.add_subcommand("distance", "DTW cost between two series");
    distance_cmd->add_option("-s,--settings", opts.settings_path, "JSON settings file");
    distance_cmd->add_option("--input", opts.input, "override the input CSV path");
    distance_cmd->add_option("--seed", opts.seed, "override the run seed");
    distance_cmd->add_option("--a", key_a, "first series as COUNTRY:INDICATOR");
    distance_cmd->add_option("--b", key_b, "second series as COUNTRY:INDICATOR");
    distance_cmd->add_option("--csv", csv_path, "CSV file holding both series as columns");
    distance_cmd->add_option("--col-a", col_a, "first column name in --csv");
    distance_cmd->add_option("--col-b", col_b, "second column name in --csv");
    distance_cmd->add_option("--component", component, "series | trend | seasonal (panel keys only)")
        ->check(CLI::IsMember({"series", "trend", "seasonal"}));
    distance_cmd->add_flag("--exact", exact, "use exact DTW instead of FastDTW");
    distance_cmd->add_option("--path", path_out, "write the warping path CSV (i,j,local_cost) here");

    std::optional<std::string> cc_indicator;
    std::optional<std::string> cc_reference;
    auto* cc_cmd = app.add_subcommand("compare-countries", "composite distance from the reference country");
    add_common(cc_cmd, opts);
    cc_cmd->add_option("--indicator", cc_indicator, "indicator code (default: target indicator)");
    cc_cmd->add_option("--reference", cc_reference, "reference country (default: from settings)");

    std::optional<std::string> rank_country;
    auto* rank_cmd = app.add_subcommand("rank", "rank indicators by similarity to the target indicator");
    add_common(rank_cmd, opts);
    rank_cmd->add_option("--country", rank_country, "restrict to one country");

    auto* group_cmd = app.add_subcommand("group-ranks", "mean rank per topic group");
    add_common(group_cmd, opts);
    group_cmd->add_option("--country", rank_country, "restrict to one country");

    auto* cr_cmd = app.add_subcommand("compare-rankings", "DTW between rank sequences of countries");
    add_common(cr_cmd, opts);
    cr_cmd->add_option("--reference", cc_reference, "reference country (default: from settings)");

    auto* run_cmd = app.add_subcommand("run", "full pipeline with manifest");
    add_common(run_cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto settings = resolve(opts);
            const auto result = run_pipeline(settings);
            for (const auto& s : result.stages) {
                std::cerr << s.name << ": " << s.status << " (" << s.seconds << " s)";
                if (!s.error.empty()) {
                    std::cerr << " - " << s.error;
                }
                std::cerr << "\n";
            }
            return result.exit_code;
        }

        if (distance_cmd->parsed()) {
            std::vector<double> a;
            std::vector<double> b;
            dtw::DtwConfig dtw_config;
            if (csv_path) {
                if (!col_a || !col_b) {
                    throw InvalidArgument("--csv requires --col-a and --col-b");
                }
                a = csv_column(*csv_path, *col_a);
                b = csv_column(*csv_path, *col_b);
                if (!opts.settings_path.empty()) {
                    dtw_config = resolve(opts).dtw;
                }
            } else {
                if (!key_a || !key_b || opts.settings_path.empty()) {
                    throw InvalidArgument("panel keys need --settings, --a and --b");
                }
                const auto settings = resolve(opts);
                dtw_config = settings.dtw;
                const auto prep = prepare_panel(load_panel(settings), settings);
                auto series_of = [&](const SeriesKey& key) {
                    auto ts = extract_series(prep.imputed.panel, key.country, key.indicator).to_time_series();
                    if (component == "series") {
                        return ts.values;
                    }
                    const auto d = stl_decompose(ts, settings.stl);
                    return component == "trend" ? d.trend : d.seasonal;
                };
                a = series_of(parse_key(*key_a));
                b = series_of(parse_key(*key_b));
            }
            const auto path = exact ? dtw::dtw_exact(a, b, dtw_config) : dtw::fastdtw(a, b, dtw_config);
            std::cout << "cost," << csv::format_double(path.cost) << "\n";
            if (path_out) {
                std::string text;
                csv::append_row(text, {"i", "j", "local_cost"});
                for (const auto& [i, j] : path.pairs) {
                    csv::append_row(text, {std::to_string(i), std::to_string(j),
                                           csv::format_double(dtw::local_cost(a[i], b[j], dtw_config.local_cost))});
                }
                write_file(*path_out, text);
            }
            return 0;
        }

        const auto settings = resolve(opts);

        if (validate_cmd->parsed()) {
            const auto report = validate(settings);
            emit(opts, settings, "validation.csv", validation_csv(report));
            return report.problems.empty() ? 0 : 1;
        }
        if (stats_cmd->parsed()) {
            const auto indicator = stats_indicator.value_or(settings.target_indicator);
            const auto report = descriptive_stats(load_panel(settings), indicator);
            for (const auto& c : report.omitted) {
                std::cerr << "note: " << c << " has no observations of " << indicator << "\n";
            }
            emit(opts, settings, "stats.csv", stats_csv(indicator, report));
            return 0;
        }

        const auto prep = prepare_panel(load_panel(settings), settings);
        if (impute_cmd->parsed()) {
            const auto panel = raw_units ? unstandardize(prep.imputed.panel, prep.standardized.params)
                                         : prep.imputed.panel;
            emit(opts, settings, "imputed.csv", serialize_panel(panel));
            if (opts.out) {
                write_file(settings.output_dir / "training_log.csv", training_log_csv(prep.imputed.log));
            }
            return 0;
        }

        const auto batch = decompose_included(prep.imputed.panel, prep.excluded, settings.stl);
        for (const auto& [key, reason] : batch.skipped) {
            std::cerr << "skipped " << key.country << "/" << key.indicator << ": " << reason << "\n";
        }
        if (decompose_cmd->parsed()) {
            emit(opts, settings, "decomposition.csv", decomposition_csv(batch.decompositions));
            return 0;
        }
        if (cc_cmd->parsed()) {
            const auto indicator = cc_indicator.value_or(settings.target_indicator);
            const auto reference = cc_reference.value_or(settings.reference_country);
            std::vector<std::string> others;
            for (const auto& c : prep.imputed.panel.countries()) {
                if (c != reference) {
                    others.push_back(c);
                }
            }
            const auto sim =
                country_similarity(batch.decompositions, indicator, reference, others, settings.weights, settings.dtw);
            for (const auto& [country, reason] : sim.skipped) {
                std::cerr << "skipped " << country << ": " << reason << "\n";
            }
            emit(opts, settings, "compare_countries.csv", compare_countries_csv(sim));
            return 0;
        }

        auto rankings = rank_all_countries(prep.imputed.panel, batch.decompositions, settings);
        if (rank_country) {
            std::erase_if(rankings.tables, [&](const RankingTable& t) { return t.country != *rank_country; });
            if (rankings.tables.empty()) {
                throw LookupError("no ranking for country " + *rank_country);
            }
        }
        if (rank_cmd->parsed()) {
            emit(opts, settings, "rankings.csv", rankings_csv(rankings.tables));
            return 0;
        }
        if (group_cmd->parsed()) {
            std::map<std::string, std::vector<GroupRank>> groups;
            for (const auto& table : rankings.tables) {
                groups[table.country] = group_mean_ranks(table, prep.imputed.panel.taxonomy());
            }
            emit(opts, settings, "group_ranks.csv", group_ranks_csv(groups));
            return 0;
        }
        if (cr_cmd->parsed()) {
            const auto reference = cc_reference.value_or(settings.reference_country);
            const auto cmp = compare_rankings(rankings.tables, reference);
            emit(opts, settings, "compare_rankings.csv",
                 compare_rankings_csv(reference, cmp.canonical.size(), cmp.rows));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
