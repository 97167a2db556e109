#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"

// Deterministic test fields on the unit cube [0,1]^n.
namespace medianosc::corpus {

inline SampledFunction constant(int dim, std::size_t n, double value = 0.0) {
    return SampledFunction(unit_frame(dim, n), std::vector<double>(detail::ipow(n, dim), value));
}

/// chi_{[1/2,1)} along the first axis.
inline SampledFunction step(int dim, std::size_t n) {
    return SampledFunction::sample(unit_frame(dim, n), [](std::span<const double> x) { return x[0] >= 0.5 ? 1.0 : 0.0; });
}

/// -2 on [0,1/2), +1 on [1/2,1) along the first axis.
inline SampledFunction signed_step(int dim, std::size_t n) {
    return SampledFunction::sample(unit_frame(dim, n), [](std::span<const double> x) { return x[0] >= 0.5 ? 1.0 : -2.0; });
}

inline SampledFunction linear(int dim, std::size_t n) {
    return SampledFunction::sample(unit_frame(dim, n), [](std::span<const double> x) { return x[0]; });
}

/// (L / 2pi) sin(2pi <x, 1>/sqrt(n)); Lipschitz constant exactly L.
inline SampledFunction lipschitz(int dim, std::size_t n, double L = 1.0) {
    const double root = std::sqrt(static_cast<double>(dim));
    return SampledFunction::sample(unit_frame(dim, n), [&](std::span<const double> x) {
        double sum = 0.0;
        for (double xi : x) sum += xi;
        return L / (2.0 * std::numbers::pi) * std::sin(2.0 * std::numbers::pi * sum / root);
    });
}

/// 1 on a centered block of width^dim cells, 0 elsewhere.
inline SampledFunction spike(int dim, std::size_t n, std::size_t width = 1) {
    detail::require(width >= 1 && width <= n, ErrorCode::InvalidParameter, "spike width must be in [1, N]");
    const GridFrame frame = unit_frame(dim, n);
    const std::size_t lo = (n - width) / 2;
    std::vector<double> v(frame.cell_count(), 0.0);
    for_each_cell(CubeRegion{dim, {lo, lo, lo}, width}, [&](const Index& i) { v[frame.linear(i)] = 1.0; });
    return SampledFunction(frame, std::move(v));
}

/// ln(1/|x - c|) with c on the diagonal; cell centers never coincide with c for even N and c = 1/2.
inline SampledFunction log_singularity(int dim, std::size_t n, double center = 0.5) {
    const GridFrame frame = unit_frame(dim, n);
    const double floor_dist = frame.cell_width() / 4.0;
    return SampledFunction::sample(frame, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double xi : x) r2 += (xi - center) * (xi - center);
        return -std::log(std::max(std::sqrt(r2), floor_dist));
    });
}

/// Integer levels 0..K-1: random breakpoints in 1D, random levels on an 8x8 block layout in 2D.
inline SampledFunction piecewise(int dim, std::size_t n, unsigned levels, std::uint64_t seed) {
    detail::require(levels >= 1, ErrorCode::InvalidParameter, "piecewise needs at least one level");
    std::mt19937_64 rng(seed);
    const GridFrame frame = unit_frame(dim, n);
    std::vector<double> v(frame.cell_count(), 0.0);
    std::uniform_int_distribution<unsigned> level(0, levels - 1);
    if (dim == 1) {
        std::uniform_int_distribution<std::size_t> cut(1, n - 1);
        std::vector<std::size_t> cuts{0, n};
        for (unsigned i = 0; i + 1 < levels && n > 1; ++i) cuts.push_back(cut(rng));
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double lv = (j < levels) ? static_cast<double>(j % levels) : 0.0;
            for (std::size_t c = cuts[j]; c < cuts[j + 1]; ++c) v[c] = lv;
        }
        // shuffle level labels between the pieces
        std::vector<double> perm(levels);
        for (unsigned i = 0; i < levels; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (double& x : v) x = perm[static_cast<std::size_t>(x)];
        return SampledFunction(frame, std::move(v));
    }
    const std::size_t block = std::max<std::size_t>(1, n / 8);
    const std::size_t blocks = (n + block - 1) / block;
    std::vector<double> lv(detail::ipow(blocks, dim));
    for (double& x : lv) x = level(rng);
    for (std::size_t c = 0; c < v.size(); ++c) {
        const Index i = frame.unravel(c);
        std::size_t b = 0;
        for (int a = 0; a < dim; ++a) b = b * blocks + i[a] / block;
        v[c] = lv[b];
    }
    return SampledFunction(frame, std::move(v));
}

/// 2D checkerboard of block x block cells.
inline SampledFunction checkerboard(std::size_t n, std::size_t block = 1) {
    detail::require(block >= 1, ErrorCode::InvalidParameter, "checkerboard block must be >= 1");
    const GridFrame frame = unit_frame(2, n);
    std::vector<double> v(frame.cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) {
        const Index i = frame.unravel(c);
        v[c] = static_cast<double>((i[0] / block + i[1] / block) % 2);
    }
    return SampledFunction(frame, std::move(v));
}

struct PairCounterexample {
    SampledFunction f;
    SampledFunction g;
    double s = 0.0;
    double s1 = 0.0;
    double t = 0.0;  // smallest t at which m_{f+g}(t) = 1
};

/// f = indicator of [0, 1-s], g = indicator of [1-s1, 2(1-s1)] on N cells (1/2 < s1 <= s < 1,
/// s N and s1 N integers). `strict` drops the last cell of each support so the zero sets
/// carry strictly more than s (resp. s1) of the mass.
inline PairCounterexample pair_counterexample(double s, double s1, std::size_t n, bool strict = true) {
    detail::require(0.5 < s1 && s1 <= s && s < 1.0, ErrorCode::InvalidParameter, "need 1/2 < s1 <= s < 1");
    detail::require(product_is_integral(s, n) && product_is_integral(s1, n), ErrorCode::InvalidParameter,
                    "s*N and s1*N must be integers");
    const auto a = static_cast<std::size_t>(n - floor_product(s, n));    // (1-s) N
    const auto b = static_cast<std::size_t>(n - floor_product(s1, n));   // (1-s1) N
    const std::size_t drop = strict ? 1 : 0;
    const GridFrame frame = unit_frame(1, n);
    std::vector<double> fv(n, 0.0), gv(n, 0.0);
    // closed supports [0, 1-s] and [1-s1, 2(1-s1)] cover a and b cells
    for (std::size_t i = 0; i + drop < a; ++i) fv[i] = 1.0;
    for (std::size_t i = b; i + drop < 2 * b && i < n; ++i) gv[i] = 1.0;
    PairCounterexample out{SampledFunction(frame, fv), SampledFunction(frame, gv), s, s1, 0.0};
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i) below += (fv[i] + gv[i] < 1.0) ? 1 : 0;
    out.t = static_cast<double>(below) / static_cast<double>(n);
    return out;
}

inline SampledFunction sum(const SampledFunction& f, const SampledFunction& g) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += g[i];
    return SampledFunction(f.frame(), std::move(v));
}

}  // namespace medianosc::corpus
