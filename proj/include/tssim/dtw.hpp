#pragma once

// Dynamic time warping: exact DP, window-constrained DP and the multiresolution
// FastDTW approximation (coarsen, solve, project, dilate, refine).

#include "tssim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tssim::dtw {

enum class LocalCost { absolute, squared };

struct DtwConfig {
    LocalCost local_cost = LocalCost::absolute;
    std::size_t radius = 1;
    // Base-case length for FastDTW; unset means 2 * radius + 2.
    std::optional<std::size_t> min_size;

    std::size_t effective_min_size() const { return min_size.value_or(2 * radius + 2); }

    void validate() const {
        if (effective_min_size() < 2) {
            throw InvalidArgument("dtw: min_size must be at least 2");
        }
    }
};

inline double local_cost(double x, double y, LocalCost kind) {
    const double d = x - y;
    return kind == LocalCost::absolute ? std::abs(d) : d * d;
}

struct WarpingPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double cost = 0.0;
};

/// Inclusive column range [lo, hi] allowed in each row.
struct SearchWindow {
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    std::size_t columns = 0;

    static SearchWindow full(std::size_t len_a, std::size_t len_b) {
        SearchWindow w;
        w.columns = len_b;
        w.rows.assign(len_a, {0, len_b == 0 ? 0 : len_b - 1});
        return w;
    }

    bool contains(std::size_t i, std::size_t j) const {
        return i < rows.size() && j >= rows[i].first && j <= rows[i].second;
    }

    std::size_t cell_count() const {
        std::size_t n = 0;
        for (const auto& [lo, hi] : rows) {
            n += hi - lo + 1;
        }
        return n;
    }
};

/// Throws unless the window is non-empty per row, monotone, connected and
/// spans (0,0) to (len_a-1, len_b-1).
inline void validate_window(const SearchWindow& w, std::size_t len_a, std::size_t len_b) {
    if (w.rows.size() != len_a || w.columns != len_b || len_a == 0 || len_b == 0) {
        throw InvalidArgument("dtw: window shape does not match the inputs");
    }
    if (w.rows.front().first != 0) {
        throw InvalidArgument("dtw: window excludes the start cell (0,0)");
    }
    if (w.rows.back().second != len_b - 1) {
        throw InvalidArgument("dtw: window excludes the terminal cell");
    }
    for (std::size_t i = 0; i < len_a; ++i) {
        const auto [lo, hi] = w.rows[i];
        if (lo > hi || hi >= len_b) {
            throw InvalidArgument("dtw: empty or out-of-range window row " + std::to_string(i));
        }
        if (i > 0) {
            const auto [plo, phi] = w.rows[i - 1];
            if (lo < plo || hi < phi) {
                throw InvalidArgument("dtw: window not monotone at row " + std::to_string(i));
            }
            if (lo > phi + 1) {
                throw InvalidArgument("dtw: window disconnected at row " + std::to_string(i));
            }
        }
    }
}

namespace detail {

inline void check_series(std::span<const double> s, const char* name) {
    if (s.empty()) {
        throw InvalidArgument(std::string("dtw: empty input ") + name);
    }
    for (double v : s) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string("dtw: non-finite value in ") + name);
        }
    }
}

// Cumulative cost stored only inside the window, one offset row per i.
class BandMatrix {
public:
    explicit BandMatrix(const SearchWindow& w) : window_(w), offsets_(w.rows.size() + 1, 0) {
        for (std::size_t i = 0; i < w.rows.size(); ++i) {
            offsets_[i + 1] = offsets_[i] + (w.rows[i].second - w.rows[i].first + 1);
        }
        data_.assign(offsets_.back(), std::numeric_limits<double>::infinity());
    }

    double get(std::size_t i, std::size_t j) const {
        if (!window_.contains(i, j)) {
            return std::numeric_limits<double>::infinity();
        }
        return data_[offsets_[i] + (j - window_.rows[i].first)];
    }

    void set(std::size_t i, std::size_t j, double v) { data_[offsets_[i] + (j - window_.rows[i].first)] = v; }

private:
    const SearchWindow& window_;
    std::vector<std::size_t> offsets_;
    std::vector<double> data_;
};

} // namespace detail

/// Minimum-cost path restricted to `window`. Backtrace prefers the diagonal
/// predecessor, then (i-1, j), then (i, j-1).
inline WarpingPath dtw_windowed(std::span<const double> a, std::span<const double> b, const SearchWindow& window,
                                const DtwConfig& config = {}) {
    detail::check_series(a, "a");
    detail::check_series(b, "b");
    validate_window(window, a.size(), b.size());
    constexpr double inf = std::numeric_limits<double>::infinity();

    detail::BandMatrix acc(window);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [lo, hi] = window.rows[i];
        for (std::size_t j = lo; j <= hi; ++j) {
            const double c = local_cost(a[i], b[j], config.local_cost);
            if (i == 0 && j == 0) {
                acc.set(0, 0, c);
                continue;
            }
            double best = inf;
            if (i > 0 && j > 0) {
                best = acc.get(i - 1, j - 1);
            }
            if (i > 0) {
                best = std::min(best, acc.get(i - 1, j));
            }
            if (j > 0) {
                best = std::min(best, acc.get(i, j - 1));
            }
            acc.set(i, j, c + best);
        }
    }

    WarpingPath path;
    path.cost = acc.get(a.size() - 1, b.size() - 1);
    if (!std::isfinite(path.cost)) {
        throw InvalidArgument("dtw: terminal cell unreachable inside window");
    }
    std::size_t i = a.size() - 1;
    std::size_t j = b.size() - 1;
    path.pairs.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = acc.get(i - 1, j - 1);
            const double up = acc.get(i - 1, j);
            const double left = acc.get(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        path.pairs.emplace_back(i, j);
    }
    std::reverse(path.pairs.begin(), path.pairs.end());
    return path;
}

inline WarpingPath dtw_exact(std::span<const double> a, std::span<const double> b, const DtwConfig& config = {}) {
    detail::check_series(a, "a");
    detail::check_series(b, "b");
    return dtw_windowed(a, b, SearchWindow::full(a.size(), b.size()), config);
}

/// Halves resolution by averaging adjacent pairs; an odd tail is kept.
inline std::vector<double> coarsen(std::span<const double> a) {
    std::vector<double> out;
    out.reserve((a.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < a.size(); i += 2) {
        out.push_back((a[i] + a[i + 1]) / 2.0);
    }
    if (a.size() % 2 == 1) {
        out.push_back(a.back());
    }
    return out;
}

/// True if the path starts at (0,0), ends at (len_a-1, len_b-1) and every
/// step is one of (1,0), (0,1), (1,1).
inline bool path_is_valid(const WarpingPath& path, std::size_t len_a, std::size_t len_b) {
    if (path.pairs.empty() || len_a == 0 || len_b == 0) {
        return false;
    }
    if (path.pairs.front() != std::pair<std::size_t, std::size_t>{0, 0} ||
        path.pairs.back() != std::pair<std::size_t, std::size_t>{len_a - 1, len_b - 1}) {
        return false;
    }
    for (std::size_t k = 1; k < path.pairs.size(); ++k) {
        const auto [pi, pj] = path.pairs[k - 1];
        const auto [ci, cj] = path.pairs[k];
        const auto di = ci - pi;
        const auto dj = cj - pj;
        if (ci < pi || cj < pj || di > 1 || dj > 1 || (di == 0 && dj == 0)) {
            return false;
        }
    }
    return true;
}

/// Projects a half-resolution path onto the full grid and dilates it by
/// `radius` cells in every direction.
inline SearchWindow expand_window(const WarpingPath& coarse, std::size_t len_a, std::size_t len_b,
                                  std::size_t radius) {
    if (len_a == 0 || len_b == 0) {
        throw InvalidArgument("expand_window: empty target grid");
    }
    const std::size_t coarse_a = (len_a + 1) / 2;
    const std::size_t coarse_b = (len_b + 1) / 2;
    if (!path_is_valid(coarse, coarse_a, coarse_b)) {
        throw InvalidArgument("expand_window: coarse path is not a valid path on the half-resolution grid");
    }
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    // Projected column extent per fine row.
    std::vector<std::size_t> lo(len_a, none);
    std::vector<std::size_t> hi(len_a, 0);
    for (const auto& [ci, cj] : coarse.pairs) {
        for (std::size_t fi = 2 * ci; fi <= std::min(2 * ci + 1, len_a - 1); ++fi) {
            const std::size_t flo = 2 * cj;
            const std::size_t fhi = std::min(2 * cj + 1, len_b - 1);
            lo[fi] = lo[fi] == none ? flo : std::min(lo[fi], flo);
            hi[fi] = std::max(hi[fi], fhi);
        }
    }

    SearchWindow w;
    w.columns = len_b;
    w.rows.resize(len_a);
    for (std::size_t i = 0; i < len_a; ++i) {
        const std::size_t from = i >= radius ? i - radius : 0;
        const std::size_t to = std::min(len_a - 1, i + radius);
        std::size_t row_lo = none;
        std::size_t row_hi = 0;
        for (std::size_t k = from; k <= to; ++k) {
            if (lo[k] == none) {
                continue;
            }
            row_lo = std::min(row_lo, lo[k]);
            row_hi = std::max(row_hi, hi[k]);
        }
        row_lo = row_lo >= radius ? row_lo - radius : 0;
        row_hi = std::min(len_b - 1, row_hi + radius);
        w.rows[i] = {row_lo, row_hi};
    }
    // Every fine row is covered by some projected block, so the rows above are
    // already monotone; these passes only guard the invariant.
    for (std::size_t i = len_a - 1; i > 0; --i) {
        w.rows[i - 1].first = std::min(w.rows[i - 1].first, w.rows[i].first);
    }
    for (std::size_t i = 1; i < len_a; ++i) {
        w.rows[i].second = std::max(w.rows[i].second, w.rows[i - 1].second);
    }
    return w;
}

inline WarpingPath fastdtw(std::span<const double> a, std::span<const double> b, const DtwConfig& config = {}) {
    config.validate();
    detail::check_series(a, "a");
    detail::check_series(b, "b");
    if (std::max(a.size(), b.size()) <= config.effective_min_size()) {
        return dtw_exact(a, b, config);
    }
    const auto coarse_a = coarsen(a);
    const auto coarse_b = coarsen(b);
    const auto coarse_path = fastdtw(coarse_a, coarse_b, config);
    const auto window = expand_window(coarse_path, a.size(), b.size(), config.radius);
    return dtw_windowed(a, b, window, config);
}

/// Sum of local costs along a path.
inline double path_cost(const WarpingPath& path, std::span<const double> a, std::span<const double> b,
                        LocalCost kind = LocalCost::absolute) {
    double total = 0.0;
    for (const auto& [i, j] : path.pairs) {
        total += local_cost(a[i], b[j], kind);
    }
    return total;
}

} // namespace tssim::dtw
