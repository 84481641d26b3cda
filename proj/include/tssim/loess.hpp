#pragma once

#include "tssim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tssim {

inline double tricube(double u) {
    u = std::abs(u);
    if (u >= 1.0) {
        return 0.0;
    }
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

namespace detail {

// Neighbourhood [left, right] of the `window` nearest indices to `i`, and the
// kernel half-width. For windows wider than the series the half-width grows by
// the excess, as in STL.
struct Neighbourhood {
    std::size_t left;
    std::size_t right;
    double half_width;
};

inline Neighbourhood neighbourhood(std::size_t i, std::size_t n, std::size_t window) {
    if (window >= n) {
        const double reach = static_cast<double>(std::max(i, n - 1 - i));
        return {0, n - 1, reach + static_cast<double>(window - n) / 2.0};
    }
    const std::size_t half = window / 2;
    std::size_t left = i >= half ? i - half : 0;
    left = std::min(left, n - window);
    const std::size_t right = left + window - 1;
    const double reach = static_cast<double>(std::max(i - left, right - i));
    return {left, right, reach};
}

// Weighted polynomial fit of degree 0 or 1 over [left, right], evaluated at x0.
inline double local_fit(std::span<const double> y, std::span<const double> w, std::size_t left, std::size_t right,
                        double x0, int degree) {
    double sw = 0.0;
    double sx = 0.0;
    for (std::size_t j = left; j <= right; ++j) {
        sw += w[j - left];
        sx += w[j - left] * static_cast<double>(j);
    }
    const double xbar = sx / sw;
    double slope_num = 0.0;
    double sxx = 0.0;
    double sy = 0.0;
    for (std::size_t j = left; j <= right; ++j) {
        const double wj = w[j - left] / sw;
        const double dx = static_cast<double>(j) - xbar;
        sy += wj * y[j];
        sxx += wj * dx * dx;
        slope_num += wj * dx * y[j];
    }
    if (degree == 0 || sxx <= 1e-12) {
        return sy;
    }
    return sy + (slope_num / sxx) * (x0 - xbar);
}

} // namespace detail

/// Locally weighted regression at every index of `y`. Each point is fitted over
/// its `window` nearest neighbours with tricube distance weights, multiplied by
/// the optional robustness weights.
inline std::vector<double> loess_smooth(std::span<const double> y, std::size_t window, int degree = 1,
                                        std::optional<std::span<const double>> weights = std::nullopt) {
    if (window < 3 || window % 2 == 0) {
        throw InvalidArgument("loess: window must be odd and at least 3");
    }
    if (degree != 0 && degree != 1) {
        throw InvalidArgument("loess: degree must be 0 or 1");
    }
    if (weights && weights->size() != y.size()) {
        throw InvalidArgument("loess: weights length differs from series length");
    }
    const std::size_t n = y.size();
    std::vector<double> out(n);
    if (n == 0) {
        return out;
    }
    if (n == 1) {
        out[0] = y[0];
        return out;
    }
    if (weights) {
        for (double w : *weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw InvalidArgument("loess: weights must be finite and non-negative");
            }
        }
    }

    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = detail::neighbourhood(i, n, window);
        w.assign(nb.right - nb.left + 1, 0.0);
        double total = 0.0;
        for (std::size_t j = nb.left; j <= nb.right; ++j) {
            const double r = std::abs(static_cast<double>(j) - static_cast<double>(i));
            double wj = tricube(r / nb.half_width);
            if (weights) {
                wj *= (*weights)[j];
            }
            w[j - nb.left] = wj;
            total += wj;
        }
        if (!(total > 0.0)) {
            std::fill(w.begin(), w.end(), 1.0);
        }
        out[i] = detail::local_fit(y, w, nb.left, nb.right, static_cast<double>(i), degree);
    }
    return out;
}

} // namespace tssim
