#pragma once

#include "tssim/panel.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace tssim {

/// Per-indicator z-score parameters, pooled over countries and years. The
/// deviation uses divisor n.
struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<bool> constant;
};

struct StandardizedPanel {
    IndicatorPanel panel;
    StandardizationParams params;
};

inline StandardizedPanel standardize(const IndicatorPanel& panel) {
    const auto ni = panel.indicators().size();
    StandardizationParams params{std::vector<double>(ni, 0.0), std::vector<double>(ni, 0.0),
                                 std::vector<bool>(ni, true)};
    for (std::size_t i = 0; i < ni; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t c = 0; c < panel.countries().size(); ++c) {
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                if (auto v = panel.at(c, i, t)) {
                    sum += *v;
                    ++count;
                }
            }
        }
        if (count == 0) {
            continue;
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (std::size_t c = 0; c < panel.countries().size(); ++c) {
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                if (auto v = panel.at(c, i, t)) {
                    ss += (*v - mean) * (*v - mean);
                }
            }
        }
        params.mean[i] = mean;
        params.stddev[i] = std::sqrt(ss / static_cast<double>(count));
        params.constant[i] = !(params.stddev[i] > 0.0);
    }

    auto cells = panel.cells();
    for (std::size_t c = 0; c < panel.countries().size(); ++c) {
        for (std::size_t i = 0; i < ni; ++i) {
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                auto& cell = cells[panel.index(c, i, t)];
                if (cell) {
                    *cell = params.constant[i] ? 0.0 : (*cell - params.mean[i]) / params.stddev[i];
                }
            }
        }
    }
    return {panel.with_cells(std::move(cells)), std::move(params)};
}

/// Inverse of standardize. Constant indicators map back to their mean.
inline IndicatorPanel unstandardize(const IndicatorPanel& panel, const StandardizationParams& params) {
    if (params.mean.size() != panel.indicators().size()) {
        throw InvalidArgument("unstandardize: parameter width does not match panel");
    }
    auto cells = panel.cells();
    for (std::size_t c = 0; c < panel.countries().size(); ++c) {
        for (std::size_t i = 0; i < panel.indicators().size(); ++i) {
            for (std::size_t t = 0; t < panel.years().size(); ++t) {
                auto& cell = cells[panel.index(c, i, t)];
                if (cell) {
                    *cell = params.constant[i] ? params.mean[i] : *cell * params.stddev[i] + params.mean[i];
                }
            }
        }
    }
    return panel.with_cells(std::move(cells));
}

} // namespace tssim
