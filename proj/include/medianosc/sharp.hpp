#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"
#include "medianosc/parallel.hpp"

namespace medianosc {

/// M#_{0,s,Q0} f sampled on every cell of the region Q0 it was computed for.
/// `values` is row-major over the region's own cells.
struct SharpField {
    CubeRegion region;
    CubeFamily family = CubeFamily::All;
    double s = 0.25;
    std::vector<double> values;

    std::size_t local_index(const Index& cell) const {
        std::size_t r = 0;
        for (int i = 0; i < region.dim; ++i) r = r * region.len + (cell[i] - region.lo[i]);
        return r;
    }

    double at(const Index& cell) const { return values[local_index(cell)]; }

    double sup() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

    /// inf over the cells of `sub`, which must lie inside the region.
    double inf_over(const CubeRegion& sub) const {
        double m = std::numeric_limits<double>::infinity();
        for_each_cell(sub, [&](const Index& idx) { m = std::min(m, at(idx)); });
        return m;
    }

    /// True when every cell of `sub` has a value strictly above beta.
    bool all_above(const CubeRegion& sub, double beta) const {
        bool all = true;
        for_each_cell(sub, [&](const Index& idx) { all = all && at(idx) > beta; });
        return all;
    }

    /// The field as a function on the region, for the shared field file format.
    SampledFunction to_function(const GridFrame& frame) const {
        GridFrame sub = frame;
        for (int i = 0; i < frame.dim; ++i)
            sub.origin[i] = frame.origin[i] + static_cast<double>(region.lo[i]) * frame.cell_width();
        sub.side = static_cast<double>(region.len) * frame.cell_width();
        sub.cells_per_side = region.len;
        return SampledFunction(sub, values);
    }
};

namespace detail {

// 1D, ALL family: grow each left-anchored interval one cell at a time, keeping it sorted.
inline std::vector<double> sharp_all_1d(const SampledFunction& f, const CubeRegion& region, double s) {
    const std::size_t n = region.len;
    std::vector<double> out(n, 0.0);
    const unsigned workers = worker_count();
    std::vector<std::vector<double>> partial(workers, std::vector<double>(n, 0.0));
    parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        std::vector<double> sorted;
        std::vector<double> osc(n);
        auto& local = partial[w];
        for (std::size_t a = begin; a < end; ++a) {
            sorted.clear();
            for (std::size_t b = a; b < n; ++b) {
                const double v = f[region.lo[0] + b];
                sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), v), v);
                osc[b] = oscillation_of_sorted(sorted, s).omega;
            }
            // cell x in [a, n) lies in every interval [a, b] with b >= x
            double run = 0.0;
            for (std::size_t x = n; x-- > a;) {
                run = std::max(run, osc[x]);
                local[x] = std::max(local[x], run);
            }
        }
    });
    for (const auto& p : partial)
        for (std::size_t i = 0; i < n; ++i) out[i] = std::max(out[i], p[i]);
    return out;
}

inline std::vector<double> sharp_general(const SampledFunction& f, const CubeRegion& region, double s,
                                         CubeFamily family, EnumerationLimits limits) {
    const std::vector<CubeRegion> cubes = enumerate_cubes(region, family, limits);
    const std::size_t ncells = region.cell_count();
    const unsigned workers = worker_count();
    std::vector<std::vector<double>> partial(workers, std::vector<double>(ncells, 0.0));
    SharpField addressing{region, family, s, {}};
    parallel_chunks(cubes.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        std::vector<double> scratch;
        auto& local = partial[w];
        for (std::size_t c = begin; c < end; ++c) {
            const CubeRegion& q = cubes[c];
            scratch = gather(f, q);
            std::sort(scratch.begin(), scratch.end());
            const double omega = oscillation_of_sorted(scratch, s).omega;
            if (omega == 0.0) continue;
            for_each_cell(q, [&](const Index& idx) {
                double& slot = local[addressing.local_index(idx)];
                slot = std::max(slot, omega);
            });
        }
    });
    std::vector<double> out(ncells, 0.0);
    for (const auto& p : partial)
        for (std::size_t i = 0; i < ncells; ++i) out[i] = std::max(out[i], p[i]);
    return out;
}

}  // namespace detail

/// For each cell x of `region`: the max of omega_s(f, Q) over family cubes Q with x in Q, Q inside region.
inline SharpField local_sharp_maximal(const SampledFunction& f, const CubeRegion& region, double s,
                                      CubeFamily family, EnumerationLimits limits = {}) {
    check_sharp_parameter(s);
    detail::require(region.valid_in(f.frame()), ErrorCode::InvalidParameter, "region outside the grid");
    SharpField field{region, family, s, {}};
    if (region.dim == 1 && family == CubeFamily::All) {
        // same cap as the general path
        if (family_size(region, family) > limits.max_cubes)
            detail::fail(ErrorCode::FamilyTooLarge, "ALL family exceeds the enumeration cap; use DYADIC");
        field.values = detail::sharp_all_1d(f, region, s);
    } else {
        field.values = detail::sharp_general(f, region, s, family, limits);
    }
    return field;
}

inline SharpField local_sharp_maximal(const SampledFunction& f, double s, CubeFamily family,
                                      EnumerationLimits limits = {}) {
    return local_sharp_maximal(f, f.whole(), s, family, limits);
}

/// inf over x in region of M#_{0,s,region} f(x).
inline double sharp_infimum(const SampledFunction& f, const CubeRegion& region, double s, CubeFamily family,
                            EnumerationLimits limits = {}) {
    const SharpField field = local_sharp_maximal(f, region, s, family, limits);
    return *std::min_element(field.values.begin(), field.values.end());
}

/// inf over x in `inner` of the sharp function restricted to `outer`, computed on the r-fold
/// refinement of f over `outer`. Grid-aligned cubes only see part of the cubes the continuum
/// supremum ranges over; subcell positions recover more of them, so the value can only grow with r.
inline double sharp_infimum_refined(const SampledFunction& f, const CubeRegion& outer, const CubeRegion& inner,
                                    double s, CubeFamily family, std::size_t r, EnumerationLimits limits = {}) {
    detail::require(outer.contains(inner), ErrorCode::InvalidParameter, "inner cube must lie in the outer cube");
    const SampledFunction g = refine(f, outer, r);
    const SharpField field = local_sharp_maximal(g, s, family, limits);
    CubeRegion sub{inner.dim, {}, inner.len * r};
    for (int a = 0; a < inner.dim; ++a) sub.lo[a] = (inner.lo[a] - outer.lo[a]) * r;
    return field.inf_over(sub);
}

}  // namespace medianosc
