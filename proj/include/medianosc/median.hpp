#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "medianosc/error.hpp"
#include "medianosc/grid.hpp"

namespace medianosc {

/// floor(s * m) computed exactly for a double s and an integer m.
inline std::int64_t floor_product(double s, std::size_t m) {
    const double x = static_cast<double>(m);
    auto k = static_cast<std::int64_t>(std::floor(s * x));
    // fma rounds once, so the sign of s*m - k is exact.
    while (std::fma(s, x, -static_cast<double>(k)) < 0.0) --k;
    while (std::fma(s, x, -static_cast<double>(k + 1)) >= 0.0) ++k;
    return k;
}

inline bool product_is_integral(double s, std::size_t m) {
    return std::fma(s, static_cast<double>(m), -static_cast<double>(floor_product(s, m))) == 0.0;
}

/// The cell values of f on one cube together with the common cell volume.
class WeightedSamples {
public:
    WeightedSamples(std::vector<double> values, double cell_volume)
        : values_(std::move(values)), cell_volume_(cell_volume) {
        detail::require(!values_.empty(), ErrorCode::InvalidParameter, "samples must be nonempty");
        detail::require(cell_volume_ > 0.0, ErrorCode::InvalidParameter, "cell volume must be > 0");
    }

    static WeightedSamples from(const SampledFunction& f, const CubeRegion& q) {
        return WeightedSamples(gather(f, q), f.frame().cell_volume());
    }

    std::span<const double> values() const { return values_; }
    double cell_volume() const { return cell_volume_; }
    std::size_t count() const { return values_.size(); }
    double total_measure() const { return static_cast<double>(values_.size()) * cell_volume_; }

    WeightedSamples abs() const {
        std::vector<double> v(values_);
        for (double& x : v) x = std::fabs(x);
        return WeightedSamples(std::move(v), cell_volume_);
    }

private:
    std::vector<double> values_;
    double cell_volume_;
};

enum class Selection { Auto, Sort, Select };

/// Inputs at or below this size are fully sorted; larger ones use nth_element.
inline constexpr std::size_t kSortThreshold = 4096;

/// k-th smallest value (0-based); reorders `scratch`.
inline double order_statistic_inplace(std::span<double> scratch, std::size_t k, Selection sel = Selection::Auto) {
    detail::require(k < scratch.size(), ErrorCode::InvalidParameter, "order statistic out of range");
    const bool sort = sel == Selection::Sort || (sel == Selection::Auto && scratch.size() <= kSortThreshold);
    if (sort) {
        std::sort(scratch.begin(), scratch.end());
    } else {
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
    }
    return scratch[k];
}

inline double order_statistic(std::span<const double> values, std::size_t k, Selection sel = Selection::Auto) {
    std::vector<double> scratch(values.begin(), values.end());
    return order_statistic_inplace(scratch, k, sel);
}

/// 0-based rank of the maximal median with parameter s among m sorted values.
inline std::size_t median_rank(double s, std::size_t m) {
    return static_cast<std::size_t>(floor_product(s, m));
}

inline void check_open_unit(double s) {
    if (!(s > 0.0 && s < 1.0))
        detail::fail(ErrorCode::InvalidParameter, "parameter must lie in (0, 1), got " + std::to_string(s));
}

/// m_f(s, Q) = sup{M : |{f < M}| <= s|Q|}: the order statistic of rank floor(s*M) + 1.
inline double maximal_median(std::span<const double> values, double s, Selection sel = Selection::Auto) {
    check_open_unit(s);
    detail::require(!values.empty(), ErrorCode::InvalidParameter, "samples must be nonempty");
    return order_statistic(values, median_rank(s, values.size()), sel);
}

inline double maximal_median(const WeightedSamples& samples, double s) {
    return maximal_median(samples.values(), s);
}

/// Median of already sorted values; no copy.
inline double maximal_median_sorted(std::span<const double> sorted, double s) {
    check_open_unit(s);
    return sorted[median_rank(s, sorted.size())];
}

/// Cell counts behind the four defining properties of a median value m.
struct MedianCounts {
    std::size_t count = 0;
    std::size_t less = 0;
    std::size_t less_equal = 0;
    std::size_t greater = 0;
    std::size_t greater_equal = 0;
};

inline MedianCounts defining_counts(std::span<const double> values, double m) {
    MedianCounts c;
    c.count = values.size();
    for (double v : values) {
        c.less += v < m;
        c.less_equal += v <= m;
        c.greater += v > m;
        c.greater_equal += v >= m;
    }
    return c;
}

namespace detail {

// f*(lambda) once the admissible exceedance count is known.
inline double rearrangement_for_budget(std::span<const double> values, std::size_t budget) {
    if (budget >= values.size()) return 0.0;
    std::vector<double> mags(values.size());
    std::transform(values.begin(), values.end(), mags.begin(), [](double v) { return std::fabs(v); });
    // descending rank `budget` == ascending rank size-1-budget
    return order_statistic_inplace(mags, values.size() - 1 - budget);
}

}  // namespace detail

/// Nonincreasing rearrangement f*(lambda) = inf{alpha : |{|f| > alpha}| <= lambda}.
inline double rearrangement_value(const WeightedSamples& samples, double lambda) {
    if (!(lambda > 0.0))
        detail::fail(ErrorCode::InvalidParameter, "lambda must be > 0");
    const double vol = samples.cell_volume();
    const std::size_t m = samples.count();
    if (lambda >= samples.total_measure()) return 0.0;
    auto budget = static_cast<std::size_t>(std::floor(lambda / vol));
    while (budget > 0 && std::fma(static_cast<double>(budget), vol, -lambda) > 0.0) --budget;
    while (budget < m && std::fma(static_cast<double>(budget + 1), vol, -lambda) <= 0.0) ++budget;
    return detail::rearrangement_for_budget(samples.values(), budget);
}

/// True where the two sides of the median/rearrangement identity may legitimately differ:
/// s*M integral, or the rounded complement 1-s crossing an integer.
inline bool on_rearrangement_boundary(double s, std::size_t m) {
    const auto a = floor_product(s, m);
    const auto b = floor_product(1.0 - s, m);
    return a + b != static_cast<std::int64_t>(m) - 1;
}

/// (m_{|f|}(1-s, Q), (f chi_Q)^*(s|Q|)). The rearrangement side uses the exact
/// exceedance budget floor(s*M) so that no rounding of s|Q| enters.
inline std::pair<double, double> median_rearrangement_identity(const WeightedSamples& samples, double s) {
    check_open_unit(s);
    const WeightedSamples mags = samples.abs();
    const double median_side = maximal_median(mags, 1.0 - s);
    const double rearrangement_side =
        detail::rearrangement_for_budget(samples.values(), median_rank(s, samples.count()));
    return {median_side, rearrangement_side};
}

/// omega_s(f, Q) = inf_c m_{|f-c|}(1-s, Q) together with a minimizing constant.
struct OscillationValue {
    double omega = 0.0;
    double best_c = 0.0;
    /// Inclusive rank range, in ascending order, of the minimizing window.
    std::pair<std::size_t, std::size_t> window{0, 0};
};

inline void check_sharp_parameter(double s) {
    if (!(s > 0.0 && s <= 0.5))
        detail::fail(ErrorCode::InvalidParameter, "parameter must lie in (0, 1/2], got " + std::to_string(s));
}

/// Number of values the minimizing window must cover: the rank of m_{|f-c|}(1-s).
inline std::size_t oscillation_window(double s, std::size_t m) {
    return median_rank(1.0 - s, m) + 1;
}

/// Window rule on sorted input: the (1-s)-median of |f - c| is at most r iff
/// [c - r, c + r] holds `window` values, so the infimum is the narrowest such run.
inline OscillationValue oscillation_of_sorted(std::span<const double> sorted, double s) {
    const std::size_t m = sorted.size();
    const std::size_t k = oscillation_window(s, m);
    OscillationValue best;
    best.omega = (sorted[k - 1] - sorted[0]) / 2.0;
    best.window = {0, k - 1};
    for (std::size_t i = 1; i + k <= m; ++i) {
        const double w = (sorted[i + k - 1] - sorted[i]) / 2.0;
        if (w < best.omega) {
            best.omega = w;
            best.window = {i, i + k - 1};
        }
    }
    best.best_c = (sorted[best.window.first] + sorted[best.window.second]) / 2.0;
    return best;
}

inline OscillationValue best_constant_oscillation(std::span<const double> values, double s) {
    check_sharp_parameter(s);
    detail::require(!values.empty(), ErrorCode::InvalidParameter, "samples must be nonempty");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return oscillation_of_sorted(sorted, s);
}

inline OscillationValue best_constant_oscillation(const WeightedSamples& samples, double s) {
    return best_constant_oscillation(samples.values(), s);
}

/// m_{|f - m_f(1-s,Q)|}(1-s, Q); lies in [omega, 2 omega].
inline double oscillation_about_median(std::span<const double> values, double s) {
    check_sharp_parameter(s);
    const double med = maximal_median(values, 1.0 - s);
    std::vector<double> dev(values.size());
    std::transform(values.begin(), values.end(), dev.begin(), [med](double v) { return std::fabs(v - med); });
    return maximal_median(dev, 1.0 - s);
}

inline double oscillation_about_median(const WeightedSamples& samples, double s) {
    return oscillation_about_median(samples.values(), s);
}

inline double mean(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

/// (1/|Q|) * integral over Q of |f - f_Q|.
inline double mean_oscillation(std::span<const double> values) {
    const double avg = mean(values);
    double acc = 0.0;
    for (double v : values) acc += std::fabs(v - avg);
    return acc / static_cast<double>(values.size());
}

struct ConvergencePoint {
    std::size_t cells_per_side = 0;
    double diameter = 0.0;
    double median = 0.0;
    double error = 0.0;
};

/// |m_f(s, Q) - f(x)| down the nested dyadic cubes containing cell x, ending at the cell itself.
inline std::vector<ConvergencePoint> median_convergence_profile(const SampledFunction& f, std::size_t cell,
                                                                double s) {
    check_open_unit(s);
    const GridFrame& frame = f.frame();
    detail::require(cell < f.size(), ErrorCode::InvalidParameter, "cell index out of range");
    const Index x = frame.unravel(cell);
    const double fx = f[cell];
    std::vector<ConvergencePoint> out;
    std::size_t len = frame.cells_per_side;
    while (true) {
        CubeRegion q{frame.dim, {}, len};
        // clamping only triggers on grids whose side is not a power of two
        for (int i = 0; i < frame.dim; ++i)
            q.lo[i] = std::min((x[i] / len) * len, frame.cells_per_side - len);
        const double med = maximal_median(gather(f, q), s);
        out.push_back({len, diameter(frame, q), med, std::fabs(med - fx)});
        if (len == 1) break;
        len = (len % 2 == 0) ? len / 2 : 1;
    }
    return out;
}

}  // namespace medianosc
