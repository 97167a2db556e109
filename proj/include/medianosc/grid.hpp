#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medianosc/error.hpp"

namespace medianosc {

/// Dimensions above this are rejected; acceptance covers n <= 2.
inline constexpr int kMaxDim = 3;

using Index = std::array<std::size_t, kMaxDim>;
using Point = std::array<double, kMaxDim>;

namespace detail {

inline std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// Row-major walk over [0, extent)^dim; the last axis varies fastest.
template <typename Fn>
void for_each_index(int dim, std::size_t extent, Fn&& fn) {
    if (extent == 0) return;
    Index idx{};
    while (true) {
        fn(static_cast<const Index&>(idx));
        int axis = dim - 1;
        while (axis >= 0) {
            if (++idx[axis] < extent) break;
            idx[axis] = 0;
            --axis;
        }
        if (axis < 0) return;
    }
}

}  // namespace detail

/// Geometry of the sampling grid over Q0: a cube [origin, origin + side]^dim cut
/// into cells_per_side^dim equal cells.
struct GridFrame {
    int dim = 1;
    Point origin{};
    double side = 1.0;
    std::size_t cells_per_side = 1;

    double cell_width() const { return side / static_cast<double>(cells_per_side); }
    double cell_volume() const { return std::pow(cell_width(), dim); }
    std::size_t cell_count() const { return detail::ipow(cells_per_side, dim); }
    double measure() const { return std::pow(side, dim); }
    bool is_dyadic() const { return std::has_single_bit(cells_per_side); }

    std::size_t linear(const Index& idx) const {
        std::size_t r = 0;
        for (int i = 0; i < dim; ++i) r = r * cells_per_side + idx[i];
        return r;
    }

    Index unravel(std::size_t linear_index) const {
        Index idx{};
        for (int i = dim - 1; i >= 0; --i) {
            idx[i] = linear_index % cells_per_side;
            linear_index /= cells_per_side;
        }
        return idx;
    }

    Point cell_center(const Index& idx) const {
        Point p{};
        const double w = cell_width();
        for (int i = 0; i < dim; ++i) p[i] = origin[i] + (static_cast<double>(idx[i]) + 0.5) * w;
        return p;
    }

    void validate() const {
        detail::require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidGrid, "dimension must be in [1, 3]");
        detail::require(std::isfinite(side) && side > 0.0, ErrorCode::InvalidGrid, "side must be finite and > 0");
        detail::require(cells_per_side >= 1, ErrorCode::InvalidGrid, "cells_per_side must be >= 1");
        for (int i = 0; i < dim; ++i)
            detail::require(std::isfinite(origin[i]), ErrorCode::InvalidGrid, "origin must be finite");
    }

    friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

inline GridFrame unit_frame(int dim, std::size_t cells_per_side) {
    GridFrame frame{dim, Point{}, 1.0, cells_per_side};
    frame.validate();
    return frame;
}

/// Axis-parallel cube of len^dim cells whose lowest corner cell is `lo`.
struct CubeRegion {
    int dim = 1;
    Index lo{};
    std::size_t len = 1;

    std::size_t cell_count() const { return detail::ipow(len, dim); }

    bool contains_cell(const Index& idx) const {
        for (int i = 0; i < dim; ++i)
            if (idx[i] < lo[i] || idx[i] >= lo[i] + len) return false;
        return true;
    }

    bool contains(const CubeRegion& other) const {
        for (int i = 0; i < dim; ++i)
            if (other.lo[i] < lo[i] || other.lo[i] + other.len > lo[i] + len) return false;
        return true;
    }

    /// True when the cell sets intersect (shared faces do not count).
    bool overlaps(const CubeRegion& other) const {
        for (int i = 0; i < dim; ++i)
            if (other.lo[i] >= lo[i] + len || lo[i] >= other.lo[i] + other.len) return false;
        return true;
    }

    bool valid_in(const GridFrame& frame) const {
        if (dim != frame.dim || len == 0) return false;
        for (int i = 0; i < dim; ++i)
            if (lo[i] + len > frame.cells_per_side) return false;
        return true;
    }

    friend bool operator==(const CubeRegion&, const CubeRegion&) = default;
    friend auto operator<=>(const CubeRegion& a, const CubeRegion& b) {
        if (auto c = a.len <=> b.len; c != 0) return c;
        return a.lo <=> b.lo;
    }
};

inline CubeRegion whole_region(const GridFrame& frame) {
    return CubeRegion{frame.dim, Index{}, frame.cells_per_side};
}

/// |Q| computed as an integer cell count times the cell volume.
inline double measure(const GridFrame& frame, const CubeRegion& q) {
    return static_cast<double>(q.cell_count()) * frame.cell_volume();
}

/// Euclidean diameter of the cube in physical units.
inline double diameter(const GridFrame& frame, const CubeRegion& q) {
    return static_cast<double>(q.len) * frame.cell_width() * std::sqrt(static_cast<double>(q.dim));
}

template <typename Fn>
void for_each_cell(const CubeRegion& q, Fn&& fn) {
    detail::for_each_index(q.dim, q.len, [&](const Index& off) {
        Index idx{};
        for (int i = 0; i < q.dim; ++i) idx[i] = q.lo[i] + off[i];
        fn(static_cast<const Index&>(idx));
    });
}

inline std::vector<std::size_t> cell_indices(const GridFrame& frame, const CubeRegion& q) {
    std::vector<std::size_t> out;
    out.reserve(q.cell_count());
    for_each_cell(q, [&](const Index& idx) { out.push_back(frame.linear(idx)); });
    return out;
}

/// Real values on the cells of a uniform grid; the function is constant on each cell.
class SampledFunction {
public:
    SampledFunction() = default;

    SampledFunction(GridFrame frame, std::vector<double> values)
        : frame_(frame), values_(std::move(values)) {
        frame_.validate();
        detail::require(values_.size() == frame_.cell_count(), ErrorCode::InvalidGrid,
                        "value count must equal cells_per_side^dim");
        for (double v : values_)
            detail::require(std::isfinite(v), ErrorCode::InvalidGrid, "values must be finite");
    }

    /// Samples `fn` at every cell center.
    template <typename Fn>
    static SampledFunction sample(const GridFrame& frame, Fn&& fn) {
        frame.validate();
        std::vector<double> values(frame.cell_count());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const Point p = frame.cell_center(frame.unravel(i));
            values[i] = fn(std::span<const double>(p.data(), static_cast<std::size_t>(frame.dim)));
        }
        return SampledFunction(frame, std::move(values));
    }

    const GridFrame& frame() const { return frame_; }
    int dim() const { return frame_.dim; }
    std::size_t cells_per_side() const { return frame_.cells_per_side; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t linear_index) const { return values_[linear_index]; }
    double at(const Index& idx) const { return values_[frame_.linear(idx)]; }
    CubeRegion whole() const { return whole_region(frame_); }

    SampledFunction shifted(double c) const {
        std::vector<double> v(values_);
        for (double& x : v) x -= c;
        return SampledFunction(frame_, std::move(v));
    }

    SampledFunction scaled(double a) const {
        std::vector<double> v(values_);
        for (double& x : v) x *= a;
        return SampledFunction(frame_, std::move(v));
    }

private:
    GridFrame frame_{};
    std::vector<double> values_;
};

/// The same cell-wise constant function on q, each cell split into r^n equal subcells.
inline SampledFunction refine(const SampledFunction& f, const CubeRegion& q, std::size_t r) {
    detail::require(r >= 1, ErrorCode::InvalidParameter, "refinement factor must be >= 1");
    detail::require(q.valid_in(f.frame()), ErrorCode::InvalidParameter, "region outside the grid");
    const GridFrame& src = f.frame();
    GridFrame frame = src;
    for (int a = 0; a < src.dim; ++a) frame.origin[a] = src.origin[a] + static_cast<double>(q.lo[a]) * src.cell_width();
    frame.side = static_cast<double>(q.len) * src.cell_width();
    frame.cells_per_side = q.len * r;
    std::vector<double> v(frame.cell_count());
    for (std::size_t c = 0; c < v.size(); ++c) {
        const Index i = frame.unravel(c);
        Index j{};
        for (int a = 0; a < src.dim; ++a) j[a] = q.lo[a] + i[a] / r;
        v[c] = f.at(j);
    }
    return SampledFunction(frame, std::move(v));
}

/// Values of f restricted to q, in row-major order of q's cells.
inline std::vector<double> gather(const SampledFunction& f, const CubeRegion& q) {
    std::vector<double> out;
    out.reserve(q.cell_count());
    const GridFrame& frame = f.frame();
    for_each_cell(q, [&](const Index& idx) { out.push_back(f[frame.linear(idx)]); });
    return out;
}

/// Splits q into its 2^dim half-size children, in row-major child order.
inline std::vector<CubeRegion> subdivide(const CubeRegion& q) {
    if (q.len < 2 || q.len % 2 != 0)
        detail::fail(ErrorCode::IndivisibleCube, "cube side of " + std::to_string(q.len) + " cells cannot be halved");
    const std::size_t half = q.len / 2;
    std::vector<CubeRegion> children;
    children.reserve(detail::ipow(2, q.dim));
    detail::for_each_index(q.dim, 2, [&](const Index& bits) {
        CubeRegion c{q.dim, q.lo, half};
        for (int i = 0; i < q.dim; ++i) c.lo[i] += bits[i] * half;
        children.push_back(c);
    });
    return children;
}

/// Dyadic subcube of a root cube: level k has side root.len / 2^k.
struct DyadicCube {
    int dim = 1;
    unsigned level = 0;
    Index index{};

    CubeRegion region(const CubeRegion& root) const {
        const std::size_t len = root.len >> level;
        detail::require(len >= 1 && (len << level) == root.len, ErrorCode::InvalidGrid,
                        "dyadic level exceeds the root's power-of-two depth");
        CubeRegion q{dim, root.lo, len};
        for (int i = 0; i < dim; ++i) q.lo[i] += index[i] * len;
        return q;
    }

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

inline std::vector<DyadicCube> subdivide(const DyadicCube& q, const CubeRegion& root) {
    const CubeRegion r = q.region(root);
    if (r.len < 2 || r.len % 2 != 0)
        detail::fail(ErrorCode::IndivisibleCube, "dyadic cube at the recursion floor");
    std::vector<DyadicCube> children;
    detail::for_each_index(q.dim, 2, [&](const Index& bits) {
        DyadicCube c{q.dim, q.level + 1, {}};
        for (int i = 0; i < q.dim; ++i) c.index[i] = 2 * q.index[i] + bits[i];
        children.push_back(c);
    });
    return children;
}

enum class CubeFamily { All, Dyadic, DyadicShifted };

inline std::string_view to_string(CubeFamily family) {
    switch (family) {
        case CubeFamily::All: return "ALL";
        case CubeFamily::Dyadic: return "DYADIC";
        case CubeFamily::DyadicShifted: return "DYADIC_SHIFTED";
    }
    return "ALL";
}

inline CubeFamily parse_family(std::string_view name) {
    if (name == "ALL" || name == "all") return CubeFamily::All;
    if (name == "DYADIC" || name == "dyadic") return CubeFamily::Dyadic;
    if (name == "DYADIC_SHIFTED" || name == "dyadic-shifted" || name == "dyadic_shifted")
        return CubeFamily::DyadicShifted;
    detail::fail(ErrorCode::InvalidParameter, "unknown cube family '" + std::string(name) + "'");
}

/// ALL for small regions (1D <= 64 cells, 2D <= 32 per side), DYADIC_SHIFTED above.
inline CubeFamily default_family(int dim, std::size_t len) {
    if (dim == 1 && len <= 64) return CubeFamily::All;
    if (dim == 2 && len <= 32) return CubeFamily::All;
    if (dim >= 3 && len <= 8) return CubeFamily::All;
    return CubeFamily::DyadicShifted;
}

struct EnumerationLimits {
    std::size_t max_cubes = std::size_t{1} << 26;
};

namespace detail {

inline std::vector<std::size_t> family_lengths(CubeFamily family, std::size_t len) {
    std::vector<std::size_t> lens;
    if (family == CubeFamily::All) {
        for (std::size_t l = 1; l <= len; ++l) lens.push_back(l);
        return lens;
    }
    std::size_t l = len;
    while (true) {
        lens.push_back(l);
        if (l < 2 || l % 2 != 0) break;
        l /= 2;
    }
    std::reverse(lens.begin(), lens.end());
    return lens;
}

inline std::size_t family_step(CubeFamily family, std::size_t l) {
    switch (family) {
        case CubeFamily::All: return 1;
        case CubeFamily::Dyadic: return l;
        case CubeFamily::DyadicShifted: return l >= 2 ? l / 2 : 1;
    }
    return 1;
}

inline std::size_t positions_per_axis(CubeFamily family, std::size_t region_len, std::size_t l) {
    return (region_len - l) / family_step(family, l) + 1;
}

}  // namespace detail

/// Number of cubes `for_each_cube` would visit.
inline std::size_t family_size(const CubeRegion& region, CubeFamily family) {
    std::size_t total = 0;
    for (std::size_t l : detail::family_lengths(family, region.len))
        total += detail::ipow(detail::positions_per_axis(family, region.len, l), region.dim);
    return total;
}

/// Visits every cube of `family` inside `region`, ordered by (len, lo).
template <typename Fn>
void for_each_cube(const CubeRegion& region, CubeFamily family, Fn&& fn, EnumerationLimits limits = {}) {
    const std::size_t count = family_size(region, family);
    if (count > limits.max_cubes)
        detail::fail(ErrorCode::FamilyTooLarge, std::string(to_string(family)) + " family has " +
                                                    std::to_string(count) + " cubes (cap " +
                                                    std::to_string(limits.max_cubes) + "); use DYADIC");
    for (std::size_t l : detail::family_lengths(family, region.len)) {
        const std::size_t step = detail::family_step(family, l);
        const std::size_t npos = detail::positions_per_axis(family, region.len, l);
        detail::for_each_index(region.dim, npos, [&](const Index& pos) {
            CubeRegion q{region.dim, region.lo, l};
            for (int i = 0; i < region.dim; ++i) q.lo[i] += pos[i] * step;
            fn(static_cast<const CubeRegion&>(q));
        });
    }
}

inline std::vector<CubeRegion> enumerate_cubes(const CubeRegion& region, CubeFamily family,
                                               EnumerationLimits limits = {}) {
    std::vector<CubeRegion> out;
    out.reserve(std::min(family_size(region, family), limits.max_cubes));
    for_each_cube(region, family, [&](const CubeRegion& q) { out.push_back(q); }, limits);
    return out;
}

inline std::vector<CubeRegion> enumerate_cubes(const SampledFunction& f, CubeFamily family,
                                               EnumerationLimits limits = {}) {
    return enumerate_cubes(f.whole(), family, limits);
}

}  // namespace medianosc
