#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"

namespace medianosc {

/// Two cubes with disjoint interiors (shared faces allowed).
struct CubePair {
    CubeRegion q1;
    CubeRegion q2;
};

inline CubePair make_cube_pair(const CubeRegion& q1, const CubeRegion& q2) {
    if (q1.dim != q2.dim) detail::fail(ErrorCode::InvalidParameter, "pair cubes differ in dimension");
    if (q1.overlaps(q2)) detail::fail(ErrorCode::OverlappingPair, "pair cubes overlap");
    return {q1, q2};
}

/// Euclidean diameter of the bounding box of q1 and q2.
inline double pair_diameter(const GridFrame& frame, const CubePair& p) {
    double acc = 0.0;
    for (int i = 0; i < p.q1.dim; ++i) {
        const std::size_t lo = std::min(p.q1.lo[i], p.q2.lo[i]);
        const std::size_t hi = std::max(p.q1.lo[i] + p.q1.len, p.q2.lo[i] + p.q2.len);
        const double ext = static_cast<double>(hi - lo) * frame.cell_width();
        acc += ext * ext;
    }
    return std::sqrt(acc);
}

inline void check_pair_parameter(double s) {
    if (!(s > 0.5 && s < 1.0))
        detail::fail(ErrorCode::InvalidParameter, "pair parameter must lie in (1/2, 1), got " + std::to_string(s));
}

namespace detail {

// k-th smallest |v - c| over sorted v: the k nearest values form a run, so take the best run.
inline double kth_distance(std::span<const double> sorted, std::size_t k, double c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + k <= sorted.size(); ++i) {
        const double left = c - sorted[i];
        const double right = sorted[i + k - 1] - c;
        best = std::min(best, std::max(left, right));
    }
    return best;
}

// Cell counts of the two cubes; the weighted average is formed as (n1 a + n2 b) / (n1 + n2)
// so that it never leaves [min(a, b), max(a, b)].
struct PairWeights {
    double n1;
    double n2;

    double average(double a, double b) const { return (n1 * a + n2 * b) / (n1 + n2); }
};

inline PairWeights pair_weights(const CubePair& p) {
    return {static_cast<double>(p.q1.cell_count()), static_cast<double>(p.q2.cell_count())};
}

struct PairOptimumRaw {
    double c;
    double value;
};

// The objective is piecewise linear with slopes from {+-w1 +- w2}; its minima sit at
// local minima of one of the two terms, i.e. at midpoints of that cube's k-windows.
inline PairOptimumRaw minimize_pair(std::span<const double> s1, std::span<const double> s2, double s,
                                    PairWeights w) {
    const std::size_t k1 = median_rank(s, s1.size()) + 1;
    const std::size_t k2 = median_rank(s, s2.size()) + 1;
    std::vector<double> candidates;
    candidates.reserve(s1.size() + s2.size());
    for (std::size_t i = 0; i + k1 <= s1.size(); ++i) candidates.push_back((s1[i] + s1[i + k1 - 1]) / 2.0);
    for (std::size_t i = 0; i + k2 <= s2.size(); ++i) candidates.push_back((s2[i] + s2[i + k2 - 1]) / 2.0);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    PairOptimumRaw best{0.0, std::numeric_limits<double>::infinity()};
    for (double c : candidates) {
        const double v = w.average(kth_distance(s1, k1, c), kth_distance(s2, k2, c));
        if (v < best.value) best = {c, v};
    }
    return best;
}

}  // namespace detail

/// Psi_s(|f - c|, Q1, Q2): measure-weighted average of the s-medians of |f - c| on each cube.
inline double psi_s(const SampledFunction& f, const CubePair& pair, double s, double c) {
    check_pair_parameter(s);
    if (pair.q1.overlaps(pair.q2)) detail::fail(ErrorCode::OverlappingPair, "pair cubes overlap");
    auto dev = [&](const CubeRegion& q) {
        std::vector<double> v = gather(f, q);
        for (double& x : v) x = std::fabs(x - c);
        return maximal_median(v, s);
    };
    const auto w = detail::pair_weights(pair);
    return w.average(dev(pair.q1), dev(pair.q2));
}

struct PairOptimum {
    double c = 0.0;
    double value = 0.0;
};

/// inf_c Psi_s(|f - c|, Q1, Q2), exact; ties go to the smallest c.
inline PairOptimum best_constant_pair(const SampledFunction& f, const CubePair& pair, double s) {
    check_pair_parameter(s);
    if (pair.q1.overlaps(pair.q2)) detail::fail(ErrorCode::OverlappingPair, "pair cubes overlap");
    std::vector<double> a = gather(f, pair.q1);
    std::vector<double> b = gather(f, pair.q2);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto r = detail::minimize_pair(a, b, s, detail::pair_weights(pair));
    return {r.c, r.value};
}

enum class PairFamily {
    /// Equal cubes with sides 1, 2, 4, ... at every grid offset.
    EqualDyadic,
    /// Every pair of disjoint grid cubes; 1D grids of at most 64 cells only.
    All,
};

struct PairFamilyOptions {
    PairFamily kind = PairFamily::EqualDyadic;
    /// Largest cube side, in cells, for EqualDyadic.
    std::size_t max_side_cells = 8;
};

namespace detail {

class SortedCubeCache {
public:
    explicit SortedCubeCache(const SampledFunction& f) : f_(f) {}

    const std::vector<double>& get(const CubeRegion& q) {
        auto key = std::make_pair(q.len, f_.frame().linear(q.lo));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<double> v = gather(f_, q);
        std::sort(v.begin(), v.end());
        return cache_.emplace(key, std::move(v)).first->second;
    }

private:
    const SampledFunction& f_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cache_;
};

template <typename Fn>
void for_each_pair(const GridFrame& frame, double delta, const PairFamilyOptions& opts, Fn&& fn) {
    const std::size_t n = frame.cells_per_side;
    const int dim = frame.dim;
    const double w = frame.cell_width();
    if (opts.kind == PairFamily::All) {
        detail::require(dim == 1 && n <= 64, ErrorCode::FamilyTooLarge, "ALL pair mode is limited to 1D grids of <= 64 cells");
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t l1 = 1; a + l1 <= n; ++l1)
                for (std::size_t b = a + l1; b < n; ++b)
                    for (std::size_t l2 = 1; b + l2 <= n; ++l2) {
                        if (static_cast<double>(b + l2 - a) * w > delta) break;
                        fn(CubePair{CubeRegion{1, {a}, l1}, CubeRegion{1, {b}, l2}});
                    }
        return;
    }
    for (std::size_t len = 1; len <= opts.max_side_cells && 2 * len <= n; len *= 2) {
        // reach: largest per-axis offset between the two corners that can still fit
        const auto reach = static_cast<std::size_t>(std::floor(delta / w)) + 1;
        const std::size_t positions = n - len + 1;
        detail::for_each_index(dim, positions, [&](const Index& lo1) {
            // offsets d in [-reach, reach]^dim, lexicographically positive
            const std::size_t span = 2 * reach + 1;
            detail::for_each_index(dim, span, [&](const Index& raw) {
                std::array<long long, kMaxDim> d{};
                bool positive = false, decided = false;
                for (int i = 0; i < dim; ++i) {
                    d[i] = static_cast<long long>(raw[i]) - static_cast<long long>(reach);
                    if (!decided && d[i] != 0) {
                        positive = d[i] > 0;
                        decided = true;
                    }
                }
                if (!positive) return;
                CubeRegion q2{dim, {}, len};
                bool disjoint = false;
                double acc = 0.0;
                for (int i = 0; i < dim; ++i) {
                    const long long lo2 = static_cast<long long>(lo1[i]) + d[i];
                    if (lo2 < 0 || lo2 + static_cast<long long>(len) > static_cast<long long>(n)) return;
                    q2.lo[i] = static_cast<std::size_t>(lo2);
                    const auto ad = static_cast<std::size_t>(d[i] < 0 ? -d[i] : d[i]);
                    if (ad >= len) disjoint = true;
                    const double ext = static_cast<double>(ad + len) * w;
                    acc += ext * ext;
                }
                if (!disjoint || std::sqrt(acc) > delta) return;
                fn(CubePair{CubeRegion{dim, lo1, len}, q2});
            });
        });
    }
}

}  // namespace detail

/// Lower estimate of Omega(f, s, delta): max of best_constant_pair over the pair family.
inline double omega_estimate(const SampledFunction& f, double s, double delta, PairFamilyOptions opts = {}) {
    check_pair_parameter(s);
    detail::require(delta > 0.0, ErrorCode::InvalidParameter, "delta must be > 0");
    detail::SortedCubeCache cache(f);
    double best = 0.0;
    detail::for_each_pair(f.frame(), delta, opts, [&](const CubePair& p) {
        const auto r = detail::minimize_pair(cache.get(p.q1), cache.get(p.q2), s, detail::pair_weights(p));
        best = std::max(best, r.value);
    });
    return best;
}

/// omega(f, delta): max over integer shifts h with |h| * cell_width <= delta of max |f(x+h) - f(x)|.
inline double essential_modulus(const SampledFunction& f, double delta) {
    detail::require(delta > 0.0, ErrorCode::InvalidParameter, "delta must be > 0");
    const GridFrame& frame = f.frame();
    const std::size_t n = frame.cells_per_side;
    const int dim = frame.dim;
    const double w = frame.cell_width();
    const auto reach = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(delta / w)));
    double best = 0.0;
    detail::for_each_index(dim, 2 * reach + 1, [&](const Index& raw) {
        std::array<long long, kMaxDim> h{};
        double norm2 = 0.0;
        bool positive = false, decided = false;
        for (int i = 0; i < dim; ++i) {
            h[i] = static_cast<long long>(raw[i]) - static_cast<long long>(reach);
            norm2 += static_cast<double>(h[i] * h[i]);
            if (!decided && h[i] != 0) {
                positive = h[i] > 0;
                decided = true;
            }
        }
        if (!positive || std::sqrt(norm2) * w > delta) return;
        for (std::size_t cell = 0; cell < f.size(); ++cell) {
            const Index x = frame.unravel(cell);
            Index y{};
            bool inside = true;
            for (int i = 0; i < dim; ++i) {
                const long long yi = static_cast<long long>(x[i]) + h[i];
                if (yi < 0 || yi >= static_cast<long long>(n)) {
                    inside = false;
                    break;
                }
                y[i] = static_cast<std::size_t>(yi);
            }
            if (inside) best = std::max(best, std::fabs(f.at(y) - f[cell]));
        }
    });
    return best;
}

enum class Continuity { ContinuousConsistent, DiscontinuousConsistent };

inline std::string_view to_string(Continuity c) {
    return c == Continuity::ContinuousConsistent ? "CONTINUOUS-CONSISTENT" : "DISCONTINUOUS-CONSISTENT";
}

struct OscillationRow {
    double delta = 0.0;
    double omega_estimate = 0.0;
    double modulus = 0.0;
    /// omega_estimate / (modulus / 2); 1 when both vanish.
    double ratio = 1.0;
};

struct OscillationReport {
    double s = 0.75;
    std::vector<OscillationRow> rows;
    double omega_big = 0.0;        // estimate at the largest delta
    double lipschitz_estimate = 0.0;
    double threshold = 0.0;
    std::string threshold_source;
    Continuity verdict = Continuity::ContinuousConsistent;
};

/// 0.9-quantile of |f(x + e_i) - f(x)| / cell_width over axis neighbours; isolated jumps do not move it.
inline double local_lipschitz_estimate(const SampledFunction& f) {
    const GridFrame& frame = f.frame();
    std::vector<double> slopes;
    const double w = frame.cell_width();
    for (std::size_t cell = 0; cell < f.size(); ++cell) {
        const Index x = frame.unravel(cell);
        for (int i = 0; i < frame.dim; ++i) {
            if (x[i] + 1 >= frame.cells_per_side) continue;
            Index y = x;
            ++y[i];
            slopes.push_back(std::fabs(f.at(y) - f[cell]) / w);
        }
    }
    if (slopes.empty()) return 0.0;
    return maximal_median(slopes, 0.9);
}

/// Profiles omega_estimate against omega/2 along delta_grid and classifies the finest value
/// against `threshold` (default: 3 cell widths times the local Lipschitz estimate).
inline OscillationReport continuity_verdict(const SampledFunction& f, double s, std::span<const double> delta_grid,
                                            std::optional<double> threshold = std::nullopt,
                                            PairFamilyOptions opts = {}) {
    check_pair_parameter(s);
    detail::require(!delta_grid.empty(), ErrorCode::InvalidParameter, "delta grid is empty");
    OscillationReport rep;
    rep.s = s;
    rep.lipschitz_estimate = local_lipschitz_estimate(f);
    if (threshold) {
        rep.threshold = *threshold;
        rep.threshold_source = "caller";
    } else {
        rep.threshold = 3.0 * f.frame().cell_width() * rep.lipschitz_estimate;
        rep.threshold_source = "3 cell widths x local Lipschitz estimate (0.9-quantile of neighbour slopes)";
    }
    double finest_delta = std::numeric_limits<double>::infinity();
    double finest_value = 0.0;
    double largest_delta = 0.0;
    for (double d : delta_grid) {
        OscillationRow row;
        row.delta = d;
        row.omega_estimate = omega_estimate(f, s, d, opts);
        row.modulus = essential_modulus(f, d);
        row.ratio = row.modulus > 0.0 ? row.omega_estimate / (row.modulus / 2.0) : 1.0;
        rep.rows.push_back(row);
        if (d < finest_delta) {
            finest_delta = d;
            finest_value = row.omega_estimate;
        }
        if (d >= largest_delta) {
            largest_delta = d;
            rep.omega_big = row.omega_estimate;
        }
    }
    rep.verdict = finest_value <= rep.threshold ? Continuity::ContinuousConsistent : Continuity::DiscontinuousConsistent;
    return rep;
}

}  // namespace medianosc
