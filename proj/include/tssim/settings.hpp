#pragma once

// Run settings: one JSON file configuring ingestion, imputation,
// decomposition, DTW, weights and the analysis targets.

#include "tssim/autoencoder.hpp"
#include "tssim/dtw.hpp"
#include "tssim/error.hpp"
#include "tssim/panel.hpp"
#include "tssim/similarity.hpp"
#include "tssim/stl.hpp"
#include "tssim/taxonomy.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace tssim {

struct RunSettings {
    std::filesystem::path input;
    std::filesystem::path output_dir = "out";
    PanelSchema schema;
    StlConfig stl;
    dtw::DtwConfig dtw;
    CompositeWeights weights;
    AutoencoderConfig autoencoder;
    std::string target_indicator = "GB.XPD.RSDV.GD.ZS";
    std::string reference_country = "IRN";
    std::size_t min_years = 3;
    std::uint64_t seed = 42;
    // Replaces the default topic table when present.
    std::optional<std::map<std::string, int>> taxonomy_topics;
    std::optional<std::map<int, std::string>> taxonomy_groups;

    /// Autoencoder config with the run seed applied.
    AutoencoderConfig seeded_autoencoder() const {
        auto cfg = autoencoder;
        cfg.seed = seed;
        return cfg;
    }

    TopicTaxonomy taxonomy() const {
        if (!taxonomy_topics) {
            return TopicTaxonomy::world_bank_default();
        }
        auto groups = taxonomy_groups.value_or(TopicTaxonomy::world_bank_default().group_names());
        return TopicTaxonomy(*taxonomy_topics, std::move(groups));
    }

    void validate() const {
        stl.validate();
        dtw.validate();
        weights.validate();
        autoencoder.validate();
        if (schema.year_min > schema.year_max) {
            throw InvalidArgument("settings: year_min exceeds year_max");
        }
    }
};

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        out = it->get<T>();
    }
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (auto it = j.find(key); it != j.end()) {
        if (it->is_null()) {
            out.reset();
        } else {
            out = it->get<T>();
        }
    }
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace detail

/// Relative paths are resolved against `base_dir`.
inline RunSettings settings_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    RunSettings s;
    try {
        std::string input;
        std::string output;
        detail::read_if(j, "input", input);
        detail::read_if(j, "output_dir", output);
        if (!input.empty()) {
            s.input = std::filesystem::path(input).is_absolute() ? std::filesystem::path(input) : base_dir / input;
        }
        if (!output.empty()) {
            s.output_dir =
                std::filesystem::path(output).is_absolute() ? std::filesystem::path(output) : base_dir / output;
        }
        if (auto it = j.find("schema"); it != j.end()) {
            const auto& sj = *it;
            detail::read_if(sj, "country", s.schema.country_column);
            detail::read_if(sj, "indicator", s.schema.indicator_column);
            detail::read_if(sj, "topic", s.schema.topic_column);
            detail::read_if(sj, "year", s.schema.year_column);
            detail::read_if(sj, "value", s.schema.value_column);
            detail::read_if(sj, "year_min", s.schema.year_min);
            detail::read_if(sj, "year_max", s.schema.year_max);
            detail::read_if(sj, "strict_taxonomy", s.schema.strict_taxonomy);
        }
        if (auto it = j.find("stl"); it != j.end()) {
            const auto& sj = *it;
            detail::read_if(sj, "period", s.stl.period);
            detail::read_if(sj, "seasonal_smoother", s.stl.seasonal_smoother);
            detail::read_optional(sj, "trend_smoother", s.stl.trend_smoother);
            detail::read_optional(sj, "lowpass_smoother", s.stl.lowpass_smoother);
            detail::read_if(sj, "inner_iterations", s.stl.inner_iterations);
            detail::read_if(sj, "outer_iterations", s.stl.outer_iterations);
        }
        if (auto it = j.find("dtw"); it != j.end()) {
            const auto& dj = *it;
            std::string cost = "absolute";
            detail::read_if(dj, "local_cost", cost);
            if (cost == "absolute") {
                s.dtw.local_cost = dtw::LocalCost::absolute;
            } else if (cost == "squared") {
                s.dtw.local_cost = dtw::LocalCost::squared;
            } else {
                throw InvalidArgument("settings: unknown dtw.local_cost '" + cost + "'");
            }
            detail::read_if(dj, "radius", s.dtw.radius);
            detail::read_optional(dj, "min_size", s.dtw.min_size);
        }
        if (auto it = j.find("weights"); it != j.end()) {
            detail::read_if(*it, "trend", s.weights.trend);
            detail::read_if(*it, "seasonal", s.weights.seasonal);
        }
        if (auto it = j.find("autoencoder"); it != j.end()) {
            const auto& aj = *it;
            detail::read_optional(aj, "hidden_width", s.autoencoder.hidden_width);
            std::string act = "tanh";
            detail::read_if(aj, "activation", act);
            if (act == "tanh") {
                s.autoencoder.activation = Activation::tanh;
            } else if (act == "rectifier" || act == "relu") {
                s.autoencoder.activation = Activation::rectifier;
            } else {
                throw InvalidArgument("settings: unknown autoencoder.activation '" + act + "'");
            }
            detail::read_if(aj, "learning_rate", s.autoencoder.learning_rate);
            detail::read_if(aj, "epochs", s.autoencoder.epochs);
            detail::read_if(aj, "refinement_rounds", s.autoencoder.refinement_rounds);
            detail::read_if(aj, "init_scale", s.autoencoder.init_scale);
        }
        detail::read_if(j, "target_indicator", s.target_indicator);
        detail::read_if(j, "reference_country", s.reference_country);
        detail::read_if(j, "min_years", s.min_years);
        detail::read_if(j, "seed", s.seed);
        if (auto it = j.find("taxonomy"); it != j.end() && !it->is_null()) {
            s.taxonomy_topics = it->at("topics").get<std::map<std::string, int>>();
            if (auto g = it->find("groups"); g != it->end()) {
                std::map<int, std::string> groups;
                for (const auto& [key, name] : g->items()) {
                    groups[std::stoi(key)] = name.get<std::string>();
                }
                s.taxonomy_groups = std::move(groups);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("settings: ") + e.what());
    }
    s.autoencoder.seed = s.seed;
    s.validate();
    return s;
}

inline nlohmann::json settings_to_json(const RunSettings& s) {
    nlohmann::json j;
    j["input"] = s.input.generic_string();
    j["output_dir"] = s.output_dir.generic_string();
    j["schema"] = {{"country", s.schema.country_column},   {"indicator", s.schema.indicator_column},
                   {"topic", s.schema.topic_column},       {"year", s.schema.year_column},
                   {"value", s.schema.value_column},       {"year_min", s.schema.year_min},
                   {"year_max", s.schema.year_max},        {"strict_taxonomy", s.schema.strict_taxonomy}};
    j["stl"] = {{"period", s.stl.period},
                {"seasonal_smoother", s.stl.seasonal_smoother},
                {"trend_smoother", detail::optional_json(s.stl.trend_smoother)},
                {"lowpass_smoother", detail::optional_json(s.stl.lowpass_smoother)},
                {"inner_iterations", s.stl.inner_iterations},
                {"outer_iterations", s.stl.outer_iterations}};
    j["dtw"] = {{"local_cost", s.dtw.local_cost == dtw::LocalCost::absolute ? "absolute" : "squared"},
                {"radius", s.dtw.radius},
                {"min_size", detail::optional_json(s.dtw.min_size)}};
    j["weights"] = {{"trend", s.weights.trend}, {"seasonal", s.weights.seasonal}};
    j["autoencoder"] = {{"hidden_width", detail::optional_json(s.autoencoder.hidden_width)},
                        {"activation", s.autoencoder.activation == Activation::tanh ? "tanh" : "rectifier"},
                        {"learning_rate", s.autoencoder.learning_rate},
                        {"epochs", s.autoencoder.epochs},
                        {"refinement_rounds", s.autoencoder.refinement_rounds},
                        {"init_scale", s.autoencoder.init_scale}};
    j["target_indicator"] = s.target_indicator;
    j["reference_country"] = s.reference_country;
    j["min_years"] = s.min_years;
    j["seed"] = s.seed;
    if (s.taxonomy_topics) {
        nlohmann::json groups = nlohmann::json::object();
        for (const auto& [id, name] : s.taxonomy_groups.value_or(std::map<int, std::string>{})) {
            groups[std::to_string(id)] = name;
        }
        j["taxonomy"] = {{"topics", *s.taxonomy_topics}, {"groups", groups}};
    } else {
        j["taxonomy"] = nullptr;
    }
    return j;
}

inline RunSettings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open settings file " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("settings file " + path.string() + ": " + e.what());
    }
    return settings_from_json(j, path.parent_path());
}

} // namespace tssim
