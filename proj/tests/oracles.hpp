#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it is used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Minimum over every monotone continuous path of the summed local cost,
/// by exhaustive recursion.
inline double brute_force_dtw(const std::vector<double>& a, const std::vector<double>& b, bool squared = false) {
    double best = std::numeric_limits<double>::infinity();
    auto cost = [&](std::size_t i, std::size_t j) {
        const double d = a[i] - b[j];
        return squared ? d * d : std::abs(d);
    };
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += cost(i, j);
        if (i + 1 == a.size() && j + 1 == b.size()) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < a.size()) {
            walk(i + 1, j, acc);
        }
        if (j + 1 < b.size()) {
            walk(i, j + 1, acc);
        }
        if (i + 1 < a.size() && j + 1 < b.size()) {
            walk(i + 1, j + 1, acc);
        }
    };
    walk(0, 0, 0.0);
    return best;
}

/// Local linear fit at x0 by solving the 2x2 weighted normal equations in raw
/// (uncentered) coordinates with Cramer's rule.
inline double wls_at(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                     double x0) {
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        s0 += w[k];
        s1 += w[k] * x[k];
        s2 += w[k] * x[k] * x[k];
        t0 += w[k] * y[k];
        t1 += w[k] * x[k] * y[k];
    }
    const double det = s0 * s2 - s1 * s1;
    if (std::abs(det) < 1e-12 * s0 * s0) {
        return t0 / s0;
    }
    const double intercept = (t0 * s2 - s1 * t1) / det;
    const double slope = (s0 * t1 - s1 * t0) / det;
    return intercept + slope * x0;
}

/// Degree-1 loess with tricube weights, window strictly inside the series.
/// Neighbourhood: the `window` indices nearest to i (shifted at the edges);
/// bandwidth: distance to the farthest of them.
inline std::vector<double> loess_linear(const std::vector<double>& y, std::size_t window) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        long left = static_cast<long>(i) - static_cast<long>(window / 2);
        left = std::max(0L, std::min(left, static_cast<long>(n - window)));
        std::vector<double> xs, ys, ws;
        double h = 0;
        for (long j = left; j < left + static_cast<long>(window); ++j) {
            h = std::max(h, std::abs(static_cast<double>(j) - static_cast<double>(i)));
        }
        for (long j = left; j < left + static_cast<long>(window); ++j) {
            const double u = std::abs(static_cast<double>(j) - static_cast<double>(i)) / h;
            const double w = u < 1 ? std::pow(1 - u * u * u, 3) : 0.0;
            xs.push_back(static_cast<double>(j));
            ys.push_back(y[static_cast<std::size_t>(j)]);
            ws.push_back(w);
        }
        out[i] = wls_at(xs, ys, ws, static_cast<double>(i));
    }
    return out;
}

/// Quantile via the 1-based "h = (n - 1) p + 1" rule, computed from a copy
/// sorted with a different algorithm than the implementation uses.
inline double quantile(std::vector<double> v, double p) {
    std::stable_sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p + 1.0;
    const auto fl = static_cast<std::size_t>(std::floor(h));
    if (fl >= v.size()) {
        return v.back();
    }
    return v[fl - 1] + (h - static_cast<double>(fl)) * (v[fl] - v[fl - 1]);
}

/// Straight-line forward pass: plain loops over the weight arrays.
inline std::vector<double> forward(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1, const Eigen::MatrixXd& w2,
                                   const Eigen::VectorXd& b2, const std::vector<double>& x, bool tanh_act) {
    std::vector<double> hidden(static_cast<std::size_t>(w1.rows()));
    for (Eigen::Index h = 0; h < w1.rows(); ++h) {
        double z = b1(h);
        for (Eigen::Index i = 0; i < w1.cols(); ++i) {
            z += w1(h, i) * x[static_cast<std::size_t>(i)];
        }
        hidden[static_cast<std::size_t>(h)] = tanh_act ? std::tanh(z) : std::max(0.0, z);
    }
    std::vector<double> out(static_cast<std::size_t>(w2.rows()));
    for (Eigen::Index o = 0; o < w2.rows(); ++o) {
        double z = b2(o);
        for (Eigen::Index h = 0; h < w2.cols(); ++h) {
            z += w2(o, h) * hidden[static_cast<std::size_t>(h)];
        }
        out[static_cast<std::size_t>(o)] = z;
    }
    return out;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

inline std::vector<double> random_int_vector(std::mt19937_64& rng, std::size_t n, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

} // namespace oracle
