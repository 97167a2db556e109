#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"
#include "medianosc/modulus.hpp"
#include "medianosc/sharp.hpp"

namespace medianosc {

struct DecompositionParams {
    double s = 0.25;
    double t = 0.5;
    double delta = 1.0;
    double beta = 1.0;

    void validate() const {
        check_sharp_parameter(s);
        if (!(t >= 0.5 && t <= 1.0 - s))
            detail::fail(ErrorCode::InvalidParameter, "t must lie in [1/2, 1 - s]");
        if (!(delta > 0.0 && beta > 0.0))
            detail::fail(ErrorCode::InvalidParameter, "delta and beta must be > 0");
    }
};

struct SelectedCube {
    CubeRegion cube;
    unsigned level = 0;
    /// m_g(t, cube) for the decomposed function g.
    double median = 0.0;
};

/// Cell-level verification of the decomposition's three guarantees.
struct DecompositionReport {
    double packing_ratio = 0.0;
    unsigned max_depth = 0;
    bool nonoverlapping = true;
    bool contains_low_sharp_cell = true;  // (1)
    bool median_above_delta = true;       // (2), lower bound
    bool median_within_upper = true;      // (2), upper bound delta + 10 n beta, cubes above the cell floor
    bool small_outside = true;            // (3)
    std::size_t upper_bound_violations = 0;
    std::size_t floor_level_selections = 0;
    // single cells collected at the floor are not covered by the nested-median argument; flagged only
    std::size_t floor_upper_exceedances = 0;

    bool all_hold() const {
        return nonoverlapping && contains_low_sharp_cell && median_above_delta && median_within_upper && small_outside;
    }
};

/// Result of the recursive selection on one dyadic root. The decomposed function is g = f - offset.
struct DecompositionForest {
    CubeRegion root;
    DecompositionParams params;
    double offset = 0.0;
    std::vector<SelectedCube> selected;
    std::vector<CubeRegion> discarded;
    std::vector<CubeRegion> floor_cells;
    DecompositionReport report;

    double selected_measure(const GridFrame& frame) const {
        double total = 0.0;
        for (const auto& c : selected) total += measure(frame, c.cube);
        return total;
    }

    /// Row-major over the root's cells: 0 untouched, 1 discarded, 2 selected.
    std::vector<std::uint8_t> mask() const {
        std::vector<std::uint8_t> m(root.cell_count(), 0);
        SharpField addressing{root, CubeFamily::All, 0.25, {}};
        for (const auto& q : discarded) for_each_cell(q, [&](const Index& i) { m[addressing.local_index(i)] = 1; });
        for (const auto& c : selected)
            for_each_cell(c.cube, [&](const Index& i) { m[addressing.local_index(i)] = 2; });
        return m;
    }
};

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline double shifted_median(const SampledFunction& f, const CubeRegion& q, double t, double offset) {
    std::vector<double> v = gather(f, q);
    for (double& x : v) x -= offset;
    return maximal_median(v, t);
}

inline void verify_forest(const SampledFunction& f, const SharpField& sharp, DecompositionForest& forest) {
    const auto& p = forest.params;
    auto& r = forest.report;
    const GridFrame& frame = f.frame();
    const double upper = p.delta + 10.0 * static_cast<double>(frame.dim) * p.beta;

    SharpField addressing{forest.root, CubeFamily::All, p.s, {}};
    std::vector<std::uint8_t> cover(forest.root.cell_count(), 0);
    auto paint = [&](const CubeRegion& q) {
        for_each_cell(q, [&](const Index& i) {
            auto& c = cover[addressing.local_index(i)];
            if (c != 0) r.nonoverlapping = false;
            c = 1;
        });
    };
    for (const auto& q : forest.discarded) paint(q);
    for (const auto& c : forest.selected) {
        paint(c.cube);
        if (sharp.all_above(c.cube, p.beta)) r.contains_low_sharp_cell = false;
        const double m = std::fabs(shifted_median(f, c.cube, p.t, forest.offset));
        if (!(m > p.delta)) r.median_above_delta = false;
        const bool floor = c.cube.len == 1 && forest.root.len > 1;
        if (m > upper) {
            if (floor) {
                ++r.floor_upper_exceedances;
            } else {
                r.median_within_upper = false;
                ++r.upper_bound_violations;
            }
        }
        if (floor) ++r.floor_level_selections;
    }
    for_each_cell(forest.root, [&](const Index& i) {
        if (cover[addressing.local_index(i)] == 0 && std::fabs(f.at(i) - forest.offset) > p.delta)
            r.small_outside = false;
    });
    r.packing_ratio = forest.selected_measure(frame) / measure(frame, forest.root);
}

}  // namespace detail

/// Dyadic selection on g = f - offset over `root`: each child is discarded when all of its
/// cells have sharp value > beta, collected when |m_g(t, child)| > delta, and otherwise
/// subdivided down to single cells.
inline DecompositionForest median_decompose(const SampledFunction& f, const CubeRegion& root,
                                               const DecompositionParams& params, const SharpField& sharp,
                                               double offset = 0.0) {
    params.validate();
    detail::require(root.valid_in(f.frame()), ErrorCode::InvalidParameter, "root cube outside the grid");
    detail::require(detail::is_pow2(root.len), ErrorCode::InvalidParameter,
                    "decomposition needs a power-of-two cube side");
    detail::require(sharp.region.contains(root), ErrorCode::InvalidParameter, "sharp field does not cover the root");
    detail::require(sharp.s == params.s, ErrorCode::InvalidParameter, "sharp field computed with a different s");

    const double root_median = detail::shifted_median(f, root, params.t, offset);
    if (std::fabs(root_median) > params.delta)
        detail::fail(ErrorCode::HypothesisViolated, "|m_f(t, Q)| exceeds delta");

    DecompositionForest forest;
    forest.root = root;
    forest.params = params;
    forest.offset = offset;

    if (sharp.all_above(root, params.beta)) {
        forest.discarded.push_back(root);
    } else if (root.len == 1) {
        forest.floor_cells.push_back(root);
    } else {
        struct Frame {
            CubeRegion cube;
            unsigned level;
        };
        std::vector<Frame> stack{{root, 0}};
        while (!stack.empty()) {
            const Frame top = stack.back();
            stack.pop_back();
            const auto children = subdivide(top.cube);
            // reverse push keeps depth-first order equal to child order
            std::vector<Frame> next;
            for (const auto& child : children) {
                const unsigned level = top.level + 1;
                forest.report.max_depth = std::max(forest.report.max_depth, level);
                if (sharp.all_above(child, params.beta)) {
                    forest.discarded.push_back(child);
                    continue;
                }
                const double m = detail::shifted_median(f, child, params.t, offset);
                if (std::fabs(m) > params.delta) {
                    forest.selected.push_back({child, level, m});
                } else if (child.len == 1) {
                    forest.floor_cells.push_back(child);
                } else {
                    next.push_back({child, level});
                }
            }
            for (auto it = next.rbegin(); it != next.rend(); ++it) stack.push_back(*it);
        }
    }
    auto by_lo = [](const auto& a, const auto& b) { return a.lo < b.lo; };
    std::sort(forest.selected.begin(), forest.selected.end(),
              [&](const SelectedCube& a, const SelectedCube& b) { return by_lo(a.cube, b.cube); });
    std::sort(forest.discarded.begin(), forest.discarded.end(), by_lo);
    std::sort(forest.floor_cells.begin(), forest.floor_cells.end(), by_lo);
    detail::verify_forest(f, sharp, forest);
    return forest;
}

struct TwoThresholdResult {
    DecompositionForest generation_j;  // threshold delta_1 = 4 beta + 2 eta
    DecompositionForest generation_k;  // threshold delta_2 = 2 delta_1 + 10 n beta
    double median = 0.0;               // m_f(t, Q), subtracted before decomposing
    double beta = 0.0;
    double eta = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double packing = 0.0;              // sum |Q_k| / |Q|
    double packing_bound = 0.0;        // s / (2 (1 - s))
    double j_packing = 0.0;            // sum |Q_j| / |Q|
    bool nesting_ok = true;            // every Q_k lies in some Q_j
    bool disjoint_ok = true;           // the near-median sets of Q, Q_j, Q_k are pairwise disjoint
    bool packing_ok = true;            // packing <= packing_bound <= s

    bool all_hold() const {
        return nesting_ok && disjoint_ok && packing_ok && generation_j.report.all_hold() &&
               generation_k.report.all_hold();
    }
};

/// Runs the decomposition on f - m_f(t, q) twice, with delta_1 and delta_2, and checks the
/// nesting, disjointness and packing consequences. beta must dominate the sharp field on q.
inline TwoThresholdResult two_threshold_decompose(const SampledFunction& f, const CubeRegion& q, double s, double t,
                                                  double beta, double eta, const SharpField& sharp) {
    detail::require(eta > 0.0, ErrorCode::InvalidParameter, "eta must be > 0");
    double sharp_sup = 0.0;
    for_each_cell(q, [&](const Index& i) { sharp_sup = std::max(sharp_sup, sharp.at(i)); });
    if (beta < sharp_sup)
        detail::fail(ErrorCode::BetaTooSmall, "beta " + std::to_string(beta) + " below sup of the sharp field " +
                                                  std::to_string(sharp_sup));

    const double n = static_cast<double>(f.dim());
    TwoThresholdResult r;
    r.median = maximal_median(gather(f, q), t);
    r.beta = beta;
    r.eta = eta;
    r.delta1 = 4.0 * beta + 2.0 * eta;
    r.delta2 = 2.0 * r.delta1 + 10.0 * n * beta;
    r.generation_j = median_decompose(f, q, {s, t, r.delta1, beta}, sharp, r.median);
    r.generation_k = median_decompose(f, q, {s, t, r.delta2, beta}, sharp, r.median);

    const GridFrame& frame = f.frame();
    const double qm = measure(frame, q);
    r.packing = r.generation_k.selected_measure(frame) / qm;
    r.j_packing = r.generation_j.selected_measure(frame) / qm;
    r.packing_bound = s / (2.0 * (1.0 - s));
    r.packing_ok = r.packing <= r.packing_bound && r.packing_bound <= s;

    SharpField addressing{q, CubeFamily::All, s, {}};
    std::vector<std::uint8_t> in_j(q.cell_count(), 0);
    for (const auto& c : r.generation_j.selected)
        for_each_cell(c.cube, [&](const Index& i) { in_j[addressing.local_index(i)] = 1; });
    for (const auto& c : r.generation_k.selected)
        for_each_cell(c.cube, [&](const Index& i) {
            if (!in_j[addressing.local_index(i)]) r.nesting_ok = false;
        });

    // near-median sets {|f - m_f(t, .)| <= 2 beta + eta} for Q, each Q_j and each Q_k
    const double radius = 2.0 * beta + eta;
    std::vector<std::uint8_t> hits(q.cell_count(), 0);
    auto mark = [&](const CubeRegion& cube, double med) {
        for_each_cell(cube, [&](const Index& i) {
            if (std::fabs(f.at(i) - med) <= radius) {
                auto& h = hits[addressing.local_index(i)];
                if (h) r.disjoint_ok = false;
                h = 1;
            }
        });
    };
    mark(q, r.median);
    for (const auto& c : r.generation_j.selected) mark(c.cube, maximal_median(gather(f, c.cube), t));
    for (const auto& c : r.generation_k.selected) mark(c.cube, maximal_median(gather(f, c.cube), t));
    return r;
}

inline TwoThresholdResult two_threshold_decompose(const SampledFunction& f, const CubeRegion& q, double s, double t,
                                                  std::optional<double> beta, std::optional<double> eta,
                                                  CubeFamily family) {
    const SharpField sharp = local_sharp_maximal(f, q, s, family);
    const double b = beta.value_or(sharp.sup());
    return two_threshold_decompose(f, q, s, t, b, eta.value_or(b / 10.0), sharp);
}

struct CascadeGeneration {
    unsigned k = 0;
    double beta = 0.0;          // 2 phi(|Q0| / 2^{nk}), used to decompose this generation's cubes
    double delta = 0.0;         // (10n + 9) beta
    std::size_t cubes = 0;
    double measure = 0.0;       // total measure of generation-k cubes
    double packing_bound = 0.0; // s^k |Q0|
    bool packing_ok = true;
    double lambda = 0.0;        // (20n + 9) * sum_{j<k} beta_j
    double tail_measure = 0.0;  // |{|f| > lambda}|
    bool containment_ok = true; // {|f| > lambda} covered by the generation-k cubes
    std::size_t upper_bound_violations = 0;
};

struct CascadeReport {
    std::vector<CascadeGeneration> generations;
    std::vector<std::pair<double, double>> bound_curve;  // (lambda_k, measure_k)
    std::string phi;
    CubeFamily family = CubeFamily::All;
    std::string note;
    bool measures_nonincreasing = true;
};

struct CascadeOptions {
    std::optional<CubeFamily> family;
    unsigned max_generations = 64;
};

/// Generational decomposition of a normalized f (||f||_{s,phi,Q0} <= 1, m_f(1-s, Q0) = 0).
inline CascadeReport tail_cascade(const SampledFunction& f, const CubeRegion& q0, double s, double t,
                                const Modulus& phi, CascadeOptions opts = {}) {
    check_sharp_parameter(s);
    const GridFrame& frame = f.frame();
    const int n = frame.dim;
    const double nn = static_cast<double>(n);
    const double q0_measure = measure(frame, q0);

    CascadeReport report;
    report.phi = phi.describe();
    report.family = opts.family.value_or(default_family(n, q0.len));

    const std::vector<double> values = gather(f, q0);
    const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });

    CascadeGeneration g0;
    g0.k = 0;
    g0.beta = 2.0 * phi(q0_measure);
    g0.delta = (10.0 * nn + 9.0) * g0.beta;
    g0.cubes = 1;
    g0.measure = q0_measure;
    g0.packing_bound = q0_measure;
    g0.lambda = 0.0;
    for (double v : values) g0.tail_measure += (std::fabs(v) > 0.0) ? frame.cell_volume() : 0.0;
    report.generations.push_back(g0);
    report.bound_curve.emplace_back(g0.lambda, g0.measure);
    if (constant) {
        report.note = "medians constant; f a.e. constant";
        report.generations.front().cubes = 0;
        report.generations.front().measure = 0.0;
        report.bound_curve.front().second = 0.0;
        return report;
    }

    std::vector<CubeRegion> current{q0};
    double beta_sum = 0.0;
    for (unsigned k = 1; k <= opts.max_generations && !current.empty(); ++k) {
        const double beta_prev = 2.0 * phi(q0_measure / std::ldexp(1.0, n * static_cast<int>(k - 1)));
        const double delta_prev = (10.0 * nn + 9.0) * beta_prev;
        beta_sum += beta_prev;

        CascadeGeneration gen;
        gen.k = k;
        gen.beta = 2.0 * phi(q0_measure / std::ldexp(1.0, n * static_cast<int>(k)));
        gen.delta = (10.0 * nn + 9.0) * gen.beta;
        gen.lambda = (20.0 * nn + 9.0) * beta_sum;

        std::vector<CubeRegion> next;
        for (const auto& cube : current) {
            // generation 0 decomposes f itself; later ones re-center on the parent's t-median
            const double offset = (k == 1) ? 0.0 : maximal_median(gather(f, cube), t);
            const CubeFamily fam = opts.family.value_or(default_family(n, cube.len));
            const SharpField sharp = local_sharp_maximal(f, cube, s, fam);
            const DecompositionForest forest =
                median_decompose(f, cube, {s, t, delta_prev, beta_prev}, sharp, offset);
            gen.upper_bound_violations += forest.report.upper_bound_violations;
            for (const auto& c : forest.selected) next.push_back(c.cube);
        }
        gen.cubes = next.size();
        for (const auto& c : next) gen.measure += measure(frame, c);
        gen.packing_bound = std::pow(s, static_cast<double>(k)) * q0_measure;
        gen.packing_ok = gen.measure <= gen.packing_bound;

        SharpField addressing{q0, CubeFamily::All, s, {}};
        std::vector<std::uint8_t> covered(q0.cell_count(), 0);
        for (const auto& c : next) for_each_cell(c, [&](const Index& i) { covered[addressing.local_index(i)] = 1; });
        for_each_cell(q0, [&](const Index& i) {
            if (std::fabs(f.at(i)) > gen.lambda) {
                gen.tail_measure += frame.cell_volume();
                if (!covered[addressing.local_index(i)]) gen.containment_ok = false;
            }
        });
        if (gen.measure > report.generations.back().measure) report.measures_nonincreasing = false;
        report.generations.push_back(gen);
        report.bound_curve.emplace_back(gen.lambda, gen.measure);
        current = std::move(next);
    }
    return report;
}

}  // namespace medianosc
