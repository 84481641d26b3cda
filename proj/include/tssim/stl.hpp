#pragma once

// Seasonal-trend decomposition by loess (additive), with the classic inner
// loop and optional bisquare robustness iterations.

#include "tssim/error.hpp"
#include "tssim/loess.hpp"
#include "tssim/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tssim {

struct StlConfig {
    std::size_t period = 4;
    std::size_t seasonal_smoother = 7;
    std::optional<std::size_t> trend_smoother;
    std::optional<std::size_t> lowpass_smoother;
    std::size_t inner_iterations = 2;
    std::size_t outer_iterations = 0;
    int seasonal_degree = 1;
    int trend_degree = 1;

    static std::size_t next_odd(double x) {
        auto v = static_cast<std::size_t>(std::ceil(x - 1e-12));
        if (v % 2 == 0) {
            ++v;
        }
        return std::max<std::size_t>(v, 3);
    }

    /// Smallest odd integer >= 1.5 * period / (1 - 1.5 / seasonal_smoother).
    std::size_t effective_trend_smoother() const {
        if (trend_smoother) {
            return *trend_smoother;
        }
        const double p = static_cast<double>(period);
        const double ns = static_cast<double>(seasonal_smoother);
        return next_odd(1.5 * p / (1.0 - 1.5 / ns));
    }

    /// Smallest odd integer >= period.
    std::size_t effective_lowpass_smoother() const {
        return lowpass_smoother ? *lowpass_smoother : next_odd(static_cast<double>(period));
    }

    void validate() const {
        if (period < 1) {
            throw InvalidArgument("stl: period must be positive");
        }
        if (seasonal_smoother < 7 || seasonal_smoother % 2 == 0) {
            throw InvalidArgument("stl: seasonal_smoother must be odd and >= 7");
        }
        for (auto len : {effective_trend_smoother(), effective_lowpass_smoother()}) {
            if (len < 3 || len % 2 == 0) {
                throw InvalidArgument("stl: smoother lengths must be odd and >= 3");
            }
        }
        if (inner_iterations < 1) {
            throw InvalidArgument("stl: inner_iterations must be positive");
        }
        if ((seasonal_degree != 0 && seasonal_degree != 1) || (trend_degree != 0 && trend_degree != 1)) {
            throw InvalidArgument("stl: loess degrees must be 0 or 1");
        }
    }
};

struct StlDecomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
    int start_year = 0;
};

namespace detail {

// Moving average of length `len` with the window kept inside the series: at
// the edges the window is shifted inward rather than truncated. For even
// lengths `lead` selects which side gets the extra point.
inline std::vector<double> moving_average(std::span<const double> x, std::size_t len, bool lead) {
    const std::size_t n = x.size();
    len = std::min(len, n);
    const std::size_t back = (len % 2 == 1 || !lead) ? (len - 1) / 2 : len / 2;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = i >= back ? i - back : 0;
        start = std::min(start, n - len);
        double s = 0.0;
        for (std::size_t k = start; k < start + len; ++k) {
            s += x[k];
        }
        out[i] = s / static_cast<double>(len);
    }
    return out;
}

inline std::vector<double> low_pass(std::span<const double> c, std::size_t period, std::size_t lowpass_smoother) {
    auto m1 = moving_average(c, period, true);
    auto m2 = moving_average(m1, period, false);
    auto m3 = moving_average(m2, 3, false);
    return loess_smooth(m3, lowpass_smoother, 1);
}

inline std::vector<double> cycle_subseries_smooth(std::span<const double> detrended, std::size_t period,
                                                  std::size_t window, int degree,
                                                  std::optional<std::span<const double>> robustness) {
    const std::size_t n = detrended.size();
    std::vector<double> out(n);
    std::vector<double> sub;
    std::vector<double> sub_w;
    for (std::size_t phase = 0; phase < period; ++phase) {
        sub.clear();
        sub_w.clear();
        for (std::size_t k = phase; k < n; k += period) {
            sub.push_back(detrended[k]);
            if (robustness) {
                sub_w.push_back((*robustness)[k]);
            }
        }
        std::optional<std::span<const double>> w;
        if (robustness) {
            w = std::span<const double>(sub_w);
        }
        const auto smoothed = loess_smooth(sub, window, degree, w);
        for (std::size_t k = phase, m = 0; k < n; k += period, ++m) {
            out[k] = smoothed[m];
        }
    }
    return out;
}

inline std::vector<double> bisquare_weights(std::span<const double> residual) {
    std::vector<double> abs_r(residual.size());
    std::transform(residual.begin(), residual.end(), abs_r.begin(), [](double r) { return std::abs(r); });
    std::vector<double> sorted = abs_r;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    const double h = 6.0 * median;
    std::vector<double> w(n, 1.0);
    if (h <= 0.0) {
        return w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double u = abs_r[i] / h;
        w[i] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
    return w;
}

} // namespace detail

inline StlDecomposition stl_decompose(const TimeSeries& series, const StlConfig& config) {
    config.validate();
    const auto& y = series.values;
    const std::size_t n = y.size();
    if (n < 2 * config.period || n < 2) {
        throw InvalidArgument("stl: series of length " + std::to_string(n) + " is shorter than two periods (" +
                              std::to_string(2 * config.period) + ")");
    }
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("stl: non-finite value in series");
        }
    }

    StlDecomposition out;
    out.start_year = series.start_year;
    out.seasonal.assign(n, 0.0);
    out.trend.assign(n, 0.0);
    const std::size_t trend_len = config.effective_trend_smoother();

    if (config.period == 1) {
        out.trend = loess_smooth(y, trend_len, config.trend_degree);
    } else {
        const std::size_t lowpass_len = config.effective_lowpass_smoother();
        std::vector<double> robustness;
        std::vector<double> work(n);
        for (std::size_t outer = 0; outer <= config.outer_iterations; ++outer) {
            std::optional<std::span<const double>> rw;
            if (outer > 0) {
                rw = std::span<const double>(robustness);
            }
            for (std::size_t inner = 0; inner < config.inner_iterations; ++inner) {
                for (std::size_t i = 0; i < n; ++i) {
                    work[i] = y[i] - out.trend[i];
                }
                const auto cycle = detail::cycle_subseries_smooth(work, config.period, config.seasonal_smoother,
                                                                  config.seasonal_degree, rw);
                const auto low = detail::low_pass(cycle, config.period, lowpass_len);
                for (std::size_t i = 0; i < n; ++i) {
                    out.seasonal[i] = cycle[i] - low[i];
                    work[i] = y[i] - out.seasonal[i];
                }
                out.trend = loess_smooth(work, trend_len, config.trend_degree, rw);
            }
            if (outer < config.outer_iterations) {
                for (std::size_t i = 0; i < n; ++i) {
                    work[i] = y[i] - out.trend[i] - out.seasonal[i];
                }
                robustness = detail::bisquare_weights(work);
            }
        }
    }

    out.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.remainder[i] = y[i] - out.trend[i] - out.seasonal[i];
    }
    return out;
}

struct SeriesKey {
    std::string country;
    std::string indicator;

    friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

struct BatchDecomposition {
    std::map<SeriesKey, StlDecomposition> decompositions;
    // Keys that failed a precondition, with the reason.
    std::map<SeriesKey, std::string> skipped;
};

/// Decomposes every complete series of the panel with the same config. Series
/// that fail (missing cells, too short) are recorded in `skipped`.
inline BatchDecomposition batch_decompose(const IndicatorPanel& panel, const StlConfig& config) {
    config.validate();
    BatchDecomposition out;
    for (const auto& country : panel.countries()) {
        for (const auto& indicator : panel.indicators()) {
            SeriesKey key{country, indicator};
            const auto series = extract_series(panel, country, indicator);
            if (!series.complete()) {
                out.skipped.emplace(key, "series has missing values");
                continue;
            }
            try {
                out.decompositions.emplace(key, stl_decompose(series.to_time_series(), config));
            } catch (const InvalidArgument& e) {
                out.skipped.emplace(key, e.what());
            }
        }
    }
    return out;
}

} // namespace tssim
