#pragma once

// Randomized invariant suites. Every case draws its inputs from a generator seeded by
// (seed, case index), so a failing case can be replayed on its own.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "medianosc/bmo.hpp"
#include "medianosc/decompose.hpp"
#include "medianosc/median.hpp"
#include "medianosc/modulus.hpp"
#include "medianosc/oscillation.hpp"
#include "medianosc/sharp.hpp"
#include "medianosc/testing/oracles.hpp"

namespace medianosc::propcheck {

using testing::exact;
using testing::Rational;
using testing::Rng;

struct PropertyTally {
    std::string name;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::size_t skipped = 0;
    std::string first_violation;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::size_t cases = 0;
    double seconds = 0.0;
    std::vector<PropertyTally> properties;
    std::vector<std::string> notes;

    bool ok() const {
        for (const auto& p : properties)
            if (p.violations) return false;
        return true;
    }

    PropertyTally& property(const std::string& name) {
        for (auto& p : properties)
            if (p.name == name) return p;
        properties.push_back(PropertyTally{name, 0, 0, 0, {}});
        return properties.back();
    }

    const PropertyTally* find(const std::string& name) const {
        for (const auto& p : properties)
            if (p.name == name) return &p;
        return nullptr;
    }
};

namespace detail {

class Checker {
public:
    Checker(SuiteReport& report, std::size_t case_index) : report_(report), case_(case_index) {}

    template <typename Describe>
    void expect(const std::string& name, bool ok, Describe&& describe) {
        auto& p = report_.property(name);
        ++p.checked;
        if (!ok) {
            if (p.violations++ == 0) p.first_violation = "case " + std::to_string(case_) + ": " + describe();
        }
    }

    void expect(const std::string& name, bool ok) {
        expect(name, ok, [] { return std::string("violated"); });
    }

    void skip(const std::string& name) { ++report_.property(name).skipped; }

private:
    SuiteReport& report_;
    std::size_t case_;
};

inline Rng case_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

inline std::string show(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "]";
    return os.str();
}

inline std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline std::vector<double> abs_values(std::vector<double> v) {
    for (double& x : v) x = std::fabs(x);
    return v;
}

inline std::vector<double> minus(std::vector<double> v, double c) {
    for (double& x : v) x -= c;
    return v;
}

}  // namespace detail

// ---- median properties -------------------------------------------------------------

inline void median_case(SuiteReport& rep, std::size_t index) {
    using detail::show, detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::vector<double> f = testing::random_values(rng, 256);
    const std::size_t m = f.size();
    const double s = testing::random_parameter(rng, 0.0, 1.0);
    const double med = maximal_median(f, s);

    // defining counts of the returned value and its maximality
    const MedianCounts c = defining_counts(f, med);
    const Rational sm = exact(s) * m, rm = (1 - exact(s)) * m;
    ck.expect("median-defining-counts", testing::count_times(c.less) <= sm && testing::count_times(c.greater) <= rm &&
                              testing::count_times(c.less_equal) >= sm &&
                              testing::count_times(c.greater_equal) >= rm,
              [&] { return "s=" + num(s) + " f=" + show(f); });
    ck.expect("median-threshold-scan", med == testing::median_by_threshold_scan(f, s),
              [&] { return "s=" + num(s) + " f=" + show(f); });
    ck.expect("selection-agrees-with-sort", med == maximal_median(f, s, Selection::Select) &&
                               med == maximal_median(f, s, Selection::Sort));

    // monotone in the parameter
    double a = s, b = testing::random_parameter(rng, 0.0, 1.0);
    if (a > b) std::swap(a, b);
    if (a < b)
        ck.expect("monotone-in-parameter", maximal_median(f, a) <= maximal_median(f, b),
                  [&] { return "s=" + num(a) + " t=" + num(b) + " f=" + show(f); });
    else
        ck.skip("monotone-in-parameter");

    // monotone in the function
    std::vector<double> g(f);
    std::bernoulli_distribution bump(0.5);
    for (double& x : g)
        if (bump(rng)) x += testing::dyadic_uniform(rng, 0.0, 4.0, 10);
    ck.expect("monotone-in-function", maximal_median(f, s) <= maximal_median(g, s),
              [&] { return "s=" + num(s) + " f=" + show(f) + " g=" + show(g); });

    // translation
    const double shift = testing::dyadic_uniform(rng, -8.0, 8.0, 10);
    ck.expect("translation", maximal_median(detail::minus(f, shift), s) == med - shift,
              [&] { return "c=" + num(shift) + " s=" + num(s) + " f=" + show(f); });

    // subadditivity for 0 < t < s + s1 - 1 strictly
    {
        const std::vector<double> p = detail::abs_values(f);
        std::vector<double> q = testing::random_values(rng, m, m);
        q = detail::abs_values(q);
        const double s8 = testing::random_parameter(rng, 0.0, 1.0);
        const double s1 = testing::random_parameter(rng, 1.0 - s8, 1.0);
        const double bound = s8 + s1 - 1.0;  // exact on the 2^-20 lattice
        if (bound > std::ldexp(1.0, -19)) {
            const double t = testing::random_parameter(rng, 0.0, bound);
            std::vector<double> sum(m);
            for (std::size_t i = 0; i < m; ++i) sum[i] = p[i] + q[i];
            ck.expect("subadditive", maximal_median(sum, t) <= maximal_median(p, s8) + maximal_median(q, s1),
                      [&] { return "s=" + num(s8) + " s1=" + num(s1) + " t=" + num(t) + " f=" + show(p) + " g=" + show(q); });
        } else {
            ck.skip("subadditive");
        }
    }

    // nonpositive median: shift so the median is <= 0
    {
        const double c9 = med + testing::dyadic_uniform(rng, 0.0, 2.0, 10);
        const std::vector<double> h = detail::minus(f, c9);
        const double mh = maximal_median(h, s);
        ck.expect("nonpositive-median-bound", mh <= 0.0 && std::fabs(mh) <= maximal_median(detail::abs_values(h), 1.0 - s),
                  [&] { return "s=" + num(s) + " h=" + show(h); });
    }

    // |m_f(s)| <= m_{|f|}(s) for s >= 1/2, and the general sandwich m_{-|f|} <= m_f <= m_{|f|}
    {
        const double s10 = testing::random_parameter_closed(rng, 0.5, 1.0 - std::ldexp(1.0, -20));
        const std::vector<double> af = detail::abs_values(f);
        ck.expect("abs-bound-upper-half", std::fabs(maximal_median(f, s10)) <= maximal_median(af, s10),
                  [&] { return "s=" + num(s10) + " f=" + show(f); });
        std::vector<double> neg(af);
        for (double& x : neg) x = -x;
        ck.expect("abs-sandwich", maximal_median(neg, s) <= med && med <= maximal_median(af, s));
    }

    // mean bound for f >= 0, exact: m (1-s) M <= sum f
    {
        const std::vector<double> af = detail::abs_values(f);
        Rational total = 0;
        for (double x : af) total += exact(x);
        ck.expect("mean-bound", exact(maximal_median(af, s)) * (1 - exact(s)) * m <= total,
                  [&] { return "s=" + num(s) + " f=" + show(af); });
    }
}

inline void rearrangement_case(SuiteReport& rep, std::size_t index) {
    using detail::show, detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::vector<double> f = testing::random_values(rng, 256);
    const std::size_t m = f.size();
    std::bernoulli_distribution dyadic_vol(0.5);
    const double vol = dyadic_vol(rng) ? std::ldexp(1.0, -static_cast<int>(rng() % 12)) : 1.0 / static_cast<double>(m);
    const WeightedSamples w(f, vol);

    // draw s, logging draws that land on the boundary; a quarter of draws aim at k/M on purpose
    std::bernoulli_distribution aim(0.25);
    double s = 0.5;
    for (int tries = 0; tries < 64; ++tries) {
        if (aim(rng) && m > 1) {
            std::uniform_int_distribution<std::size_t> k(1, m - 1);
            s = static_cast<double>(k(rng)) / static_cast<double>(m);
        } else {
            s = testing::random_parameter(rng, 0.0, 1.0);
        }
        if (!on_rearrangement_boundary(s, m)) break;
        ck.skip("median-rearrangement-identity");
    }
    if (!on_rearrangement_boundary(s, m)) {
        const auto [lhs, rhs] = median_rearrangement_identity(w, s);
        ck.expect("median-rearrangement-identity", lhs == rhs,
                  [&] { return "s=" + num(s) + " lhs=" + num(lhs) + " rhs=" + num(rhs) + " f=" + show(f); });
        const Rational lambda = exact(s) * m * exact(vol);
        ck.expect("median-rearrangement-oracles", lhs == testing::median_by_threshold_scan(detail::abs_values(f), 1.0 - s) &&
                                         rhs == testing::rearrangement_by_scan(f, vol, lambda));
    }

    // exceedance bound on the breakpoint grid u = k * vol, and the scan oracle
    std::uniform_int_distribution<std::size_t> k(1, m);
    const double u = static_cast<double>(k(rng)) * vol;
    const double fu = rearrangement_value(w, u);
    std::size_t above = 0;
    for (double x : f) above += std::fabs(x) > fu;
    ck.expect("exceedance-bound", testing::count_times(above) * exact(vol) <= exact(u),
              [&] { return "u=" + num(u) + " f=" + show(f); });
    ck.expect("rearrangement-oracle", fu == testing::rearrangement_by_scan(f, vol, exact(u)),
              [&] { return "u=" + num(u) + " f=" + show(f); });
}

inline void sandwich_case(SuiteReport& rep, std::size_t index) {
    using detail::show, detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::vector<double> f = testing::random_values(rng, 256);
    const double s = testing::random_parameter_closed(rng, std::ldexp(1.0, -20), 0.5);
    const OscillationValue w = best_constant_oscillation(f, s);
    const double about = oscillation_about_median(f, s);
    ck.expect("about-median-sandwich", w.omega <= about && about <= 2.0 * w.omega,
              [&] { return "s=" + num(s) + " f=" + show(f); });

    std::vector<double> dev(f);
    for (double& x : dev) x = std::fabs(x - w.best_c);
    ck.expect("best-c-reproduces-omega", maximal_median(dev, 1.0 - s) == w.omega);

    const double c = testing::dyadic_uniform(rng, -8.0, 8.0, 10);
    const std::vector<double> fc = detail::abs_values(detail::minus(f, c));
    ck.expect("median-distance-bound", std::fabs(maximal_median(f, 1.0 - s) - c) <= maximal_median(fc, 1.0 - s),
              [&] { return "c=" + num(c) + " s=" + num(s) + " f=" + show(f); });

    // omega <= (1/s) * mean |f - f_Q|, exactly
    Rational mean_r = 0;
    for (double x : f) mean_r += exact(x);
    mean_r /= static_cast<long long>(f.size());
    Rational dev_sum = 0;
    for (double x : f) dev_sum += boost::multiprecision::abs(exact(x) - mean_r);
    ck.expect("mean-domination", exact(s) * exact(w.omega) * static_cast<long long>(f.size()) <= dev_sum,
              [&] { return "s=" + num(s) + " f=" + show(f); });
}

inline void oracle_case(SuiteReport& rep, std::size_t index) {
    using detail::show, detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::vector<double> f = testing::random_values(rng, 64);
    std::bernoulli_distribution half(0.2);
    const double s = half(rng) ? 0.5 : testing::random_parameter_closed(rng, std::ldexp(1.0, -20), 0.5);
    const OscillationValue w = best_constant_oscillation(f, s);
    const testing::OracleOscillation o = testing::oscillation_by_candidates(f, s);
    ck.expect("omega-oracle", w.omega == o.omega && w.best_c == o.best_c, [&] {
        return "s=" + num(s) + " window=" + num(w.omega) + "@" + num(w.best_c) + " oracle=" + num(o.omega) + "@" +
               num(o.best_c) + " f=" + show(f);
    });

    // two-cube functional on a small 1D field with values on the 2^-4 lattice
    std::uniform_int_distribution<std::size_t> nd(8, 32);
    const std::size_t n = nd(rng);
    std::vector<double> v(n);
    std::uniform_int_distribution<int> kind(0, 1);
    const bool atomic = kind(rng) == 0;
    for (double& x : v) x = atomic ? std::floor(testing::dyadic_uniform(rng, -3.0, 3.99, 4)) : testing::dyadic_uniform(rng, -4.0, 4.0, 4);
    const SampledFunction field(unit_frame(1, n), v);
    std::uniform_int_distribution<std::size_t> len1(1, n / 2);
    const std::size_t l1 = len1(rng);
    std::uniform_int_distribution<std::size_t> lo1(0, n - l1 - 1);
    const std::size_t a = lo1(rng);
    std::uniform_int_distribution<std::size_t> lo2(a + l1, n - 1);
    const std::size_t b = lo2(rng);
    std::uniform_int_distribution<std::size_t> len2(1, n - b);
    const CubePair pair = make_cube_pair(CubeRegion{1, {a}, l1}, CubeRegion{1, {b}, len2(rng)});
    const double sp = testing::random_parameter(rng, 0.5, 1.0);
    const PairOptimum got = best_constant_pair(field, pair, sp);
    const PairOptimum cand = testing::pair_by_candidates(field, pair, sp);
    ck.expect("pair-candidates", got.value == cand.value && got.c == cand.c, [&] {
        return "s=" + num(sp) + " got=" + num(got.value) + "@" + num(got.c) + " oracle=" + num(cand.value) + "@" +
               num(cand.c) + " f=" + show(v);
    });
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    const PairOptimum dense = testing::pair_by_dense_grid(field, pair, sp, lo, hi, std::ldexp(1.0, -6));
    ck.expect("pair-dense-grid", std::fabs(got.value - dense.value) <= 1e-12,
              [&] { return "s=" + num(sp) + " got=" + num(got.value) + " dense=" + num(dense.value); });
}

// ---- sharp-function bounds ----------------------------------------------------------

inline SampledFunction sharp_field_input(Rng& rng, int& dim) {
    std::uniform_int_distribution<int> d(1, 2);
    dim = d(rng);
    const std::size_t sizes1[] = {64, 128, 256};
    const std::size_t sizes2[] = {64};
    std::uniform_int_distribution<int> pick(0, 2);
    const std::size_t n = dim == 1 ? sizes1[pick(rng)] : sizes2[0];
    return testing::random_piecewise_field(rng, dim, n);
}

/// Random dyadic cube of the root with side in [2 min_inner, max_side], and a dyadic subcube
/// j levels down with side >= min_inner.
inline std::pair<CubeRegion, CubeRegion> random_nested_pair(Rng& rng, const CubeRegion& root, std::size_t max_side,
                                                            unsigned& levels, std::size_t min_inner = 1) {
    std::vector<std::size_t> sides;
    for (std::size_t l = 2 * min_inner; l <= std::min(max_side, root.len); l *= 2) sides.push_back(l);
    std::uniform_int_distribution<std::size_t> ps(0, sides.size() - 1);
    const std::size_t l1 = sides[ps(rng)];
    CubeRegion q1{root.dim, root.lo, l1};
    for (int a = 0; a < root.dim; ++a) {
        std::uniform_int_distribution<std::size_t> pos(0, root.len / l1 - 1);
        q1.lo[a] += pos(rng) * l1;
    }
    std::uniform_int_distribution<unsigned> lv(1, static_cast<unsigned>(std::log2(static_cast<double>(l1 / min_inner))));
    levels = lv(rng);
    const std::size_t l0 = l1 >> levels;
    CubeRegion q0{root.dim, q1.lo, l0};
    for (int a = 0; a < root.dim; ++a) {
        std::uniform_int_distribution<std::size_t> pos(0, l1 / l0 - 1);
        q0.lo[a] += pos(rng) * l0;
    }
    return {q1, q0};
}

inline bool excess_count_ok(const std::vector<double>& v, double t, double radius, double s) {
    const double med = maximal_median(v, t);
    std::size_t far = 0;
    for (double x : v) far += std::fabs(x - med) >= radius;
    return testing::count_times(far) < exact(s) * static_cast<long long>(v.size());
}

inline void sharp_case(SuiteReport& rep, std::size_t index) {
    using detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    int dim = 1;
    const SampledFunction f = sharp_field_input(rng, dim);
    const double s = testing::random_parameter_closed(rng, std::ldexp(1.0, -20), 0.5);
    const double t = testing::random_parameter_closed(rng, 0.5, 1.0 - s);
    double scale = 1.0;
    for (double x : f.values()) scale = std::max(scale, std::fabs(x));
    const double eta = 1e-9 * scale;

    // excess set, strong form with A = omega_s(f, Q) <= inf_Q of the sharp function restricted to Q
    const std::vector<CubeRegion> cubes = enumerate_cubes(f, CubeFamily::All);
    std::vector<std::size_t> picks;
    if (dim == 1) {
        for (std::size_t i = 0; i < cubes.size(); ++i) picks.push_back(i);
    } else {
        std::uniform_int_distribution<std::size_t> any(0, cubes.size() - 1);
        for (int i = 0; i < 1500; ++i) picks.push_back(any(rng));
    }
    std::vector<double> v;
    for (std::size_t i : picks) {
        v = gather(f, cubes[i]);
        const double a = best_constant_oscillation(v, s).omega;
        ck.expect("excess-set-own-omega", excess_count_ok(v, t, 2.0 * a + eta, s),
                  [&] { return "cube len " + std::to_string(cubes[i].len) + " s=" + num(s) + " t=" + num(t); });
    }
    // literal form on a few cubes, with the sharp function restricted to the cube itself
    std::uniform_int_distribution<std::size_t> any(0, cubes.size() - 1);
    for (int i = 0; i < 3; ++i) {
        CubeRegion q = cubes[any(rng)];
        if (dim == 2) q.len = std::min<std::size_t>(q.len, 16);
        const double a = sharp_infimum(f, q, s, CubeFamily::All);
        ck.expect("excess-set-sharp-inf", excess_count_ok(gather(f, q), t, 2.0 * a + eta, s));
    }

    // median drift on nested dyadic pairs, sharp function over Q1 with the ALL family
    for (int i = 0; i < 4; ++i) {
        unsigned levels = 1;
        const auto [q1, q0] = random_nested_pair(rng, f.whole(), dim == 1 ? 128 : 32, levels);
        const SharpField sharp = local_sharp_maximal(f, q1, s, CubeFamily::All);
        double a = sharp.inf_over(q0);
        const double k = static_cast<double>(dim) * levels;
        const double diff = std::fabs(maximal_median(gather(f, q0), t) - maximal_median(gather(f, q1), t));
        // grid-aligned cubes can miss the intermediate cube the bound relies on; refine a window
        // around Q0 inside Q1 (its cubes are Q1's cubes too, so the value stays a lower bound)
        const std::size_t cap = dim == 1 ? 512 : 32;
        for (std::size_t r = 2; diff > 10.0 * k * a && r <= 4; r *= 2) {
            const std::size_t side = std::min(q1.len, cap / r);
            if (side < q0.len) break;
            CubeRegion window{dim, {}, side};
            for (int ax = 0; ax < dim; ++ax) {
                const std::size_t want = q0.lo[ax] - std::min(q0.lo[ax] - q1.lo[ax], (side - q0.len) / 2);
                window.lo[ax] = std::min(want, q1.lo[ax] + q1.len - side);
            }
            a = std::max(a, sharp_infimum_refined(f, window, q0, s, CubeFamily::All, r));
        }
        ck.expect("nested-median-drift", diff <= 10.0 * k * a, [&] {
            return "q1 len " + std::to_string(q1.len) + " q0 len " + std::to_string(q0.len) + " diff=" + num(diff) +
                   " A=" + num(a) + " s=" + num(s) + " dim=" + std::to_string(dim);
        });
        const SharpField dyadic = local_sharp_maximal(f, q1, s, CubeFamily::Dyadic);
        const SharpField shifted = local_sharp_maximal(f, q1, s, CubeFamily::DyadicShifted);
        bool mono = true;
        for (std::size_t c = 0; c < sharp.values.size(); ++c)
            mono = mono && dyadic.values[c] <= shifted.values[c] && shifted.values[c] <= sharp.values[c];
        ck.expect("sharp-family-monotone", mono);
    }
}

// ---- decomposition -----------------------------------------------------------------

inline void decompose_case(SuiteReport& rep, std::size_t index) {
    using detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    std::uniform_int_distribution<int> d(1, 2);
    const int dim = d(rng);
    const std::size_t n = dim == 1 ? (std::size_t{16} << (rng() % 3)) : (std::size_t{8} << (rng() % 2));
    const SampledFunction f = testing::random_piecewise_field(rng, dim, n);
    const double svals[] = {0.125, 0.25, 0.5};
    const double s = svals[rng() % 3];
    const double t = 0.5;
    const SharpField sharp = local_sharp_maximal(f, s, CubeFamily::All);
    const double offset = maximal_median(f.values(), t);
    const double scale = std::max(sharp.sup(), 1.0);
    const double decades[] = {0.01, 0.1, 1.0, 10.0};
    for (double db : decades)
        for (double dd : decades) {
            const DecompositionParams p{s, t, dd * scale, db * scale};
            const DecompositionForest forest = median_decompose(f, f.whole(), p, sharp, offset);
            const auto& r = forest.report;
            auto where = [&] { return "dim=" + std::to_string(dim) + " N=" + std::to_string(n) + " s=" + num(s) +
                                      " delta=" + num(p.delta) + " beta=" + num(p.beta); };
            ck.expect("selected-nonoverlapping", r.nonoverlapping, where);
            ck.expect("selected-has-low-sharp-cell", r.contains_low_sharp_cell, where);
            ck.expect("selected-median-above-delta", r.median_above_delta, where);
            // at s = 1/2 the drift bound relies on a cube holding exactly half of a level, which a
            // grid rarely offers; tracked under its own name
            ck.expect(s < 0.5 ? "selected-median-below-upper" : "selected-median-below-upper-half", r.median_within_upper,
                      where);
            ck.expect("small-outside-selection", r.small_outside, where);
        }
    if (sharp.sup() > 0.0) {
        const TwoThresholdResult tt = two_threshold_decompose(f, f.whole(), s, t, sharp.sup(), sharp.sup() / 10.0, sharp);
        ck.expect("two-threshold-nesting", tt.nesting_ok);
        ck.expect("two-threshold-disjoint", tt.disjoint_ok);
        ck.expect("two-threshold-packing", tt.packing_ok,
                  [&] { return "packing " + num(tt.packing) + " bound " + num(tt.packing_bound); });
    } else {
        ck.skip("two-threshold-packing");
    }
}

// ---- two-cube oscillation ----------------------------------------------------------

inline void oscillation_case(SuiteReport& rep, std::size_t index) {
    using detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::size_t n = std::size_t{16} << (rng() % 2);
    const SampledFunction f = testing::random_piecewise_field(rng, 1, n);
    const double s = testing::random_parameter(rng, 0.5, 1.0);
    const double w = f.frame().cell_width();
    std::uniform_int_distribution<int> cells(1, static_cast<int>(n / 2));
    double d1 = cells(rng) * w, d2 = cells(rng) * w;
    if (d1 > d2) std::swap(d1, d2);

    const double e1 = omega_estimate(f, s, d1), e2 = omega_estimate(f, s, d2);
    const double w1 = essential_modulus(f, d1), w2 = essential_modulus(f, d2);
    ck.expect("easy-direction", e1 <= w1 / 2.0 && e2 <= w2 / 2.0,
              [&] { return "d=" + num(d1) + "," + num(d2) + " est=" + num(e1) + "," + num(e2); });
    ck.expect("monotone-delta", e1 <= e2 && w1 <= w2);

    // per pair: value <= (max - min over the union)/2 <= omega(f, diam)/2
    bool per_pair = true;
    medianosc::detail::for_each_pair(f.frame(), d2, PairFamilyOptions{PairFamily::All, 0}, [&](const CubePair& p) {
        std::vector<double> u = gather(f, p.q1);
        const auto b = gather(f, p.q2);
        u.insert(u.end(), b.begin(), b.end());
        const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
        const double osc = *hi - *lo;
        const double val = best_constant_pair(f, p, s).value;
        per_pair = per_pair && val <= osc / 2.0 && osc <= essential_modulus(f, pair_diameter(f.frame(), p));
    });
    ck.expect("easy-direction-per-pair", per_pair);

    const double small = omega_estimate(f, s, d2, {PairFamily::EqualDyadic, 2});
    const double mid = omega_estimate(f, s, d2, {PairFamily::EqualDyadic, 8});
    const double all = omega_estimate(f, s, d2, {PairFamily::All, 0});
    ck.expect("monotone-family", small <= mid && mid <= all,
              [&] { return num(small) + " " + num(mid) + " " + num(all); });
}

// ---- norms and the Psi transform ---------------------------------------------------

inline void bmo_case(SuiteReport& rep, std::size_t index) {
    using detail::num;
    Rng rng = detail::case_rng(rep.seed, index);
    detail::Checker ck(rep, index);
    const std::size_t n = std::size_t{16} << (rng() % 3);
    const SampledFunction f = testing::random_piecewise_field(rng, 1, n);
    const double s = testing::random_parameter_closed(rng, std::ldexp(1.0, -20), 0.5);
    const Modulus phis[] = {Modulus::constant(), Modulus::power(0.5), Modulus::power(1.0), Modulus::log()};
    const Modulus& phi = phis[rng() % 4];
    const CubeRegion q = f.whole();
    const SizeProfile prof = size_profile(f, q, s, CubeFamily::All);
    const BmoNorm norm = bmo_phi_norm(prof, phi);

    const double c = testing::dyadic_uniform(rng, -8.0, 8.0, 10);
    ck.expect("norm-translation", bmo_phi_norm(f.shifted(c), q, s, phi, CubeFamily::All).value == norm.value);
    ck.expect("norm-homogeneity", bmo_phi_norm(f.scaled(2.0), q, s, phi, CubeFamily::All).value == 2.0 * norm.value &&
                                      bmo_phi_norm(f.scaled(-0.5), q, s, phi, CubeFamily::All).value ==
                                          0.5 * norm.value);
    const double n3 = bmo_phi_norm(f.scaled(-3.0), q, s, phi, CubeFamily::All).value;
    ck.expect("norm-homogeneity-rounded", std::fabs(n3 - 3.0 * norm.value) <= 4e-16 * 3.0 * norm.value);
    bool constant = true;
    for (double x : f.values()) constant = constant && x == f[0];
    ck.expect("norm-zero-iff-constant", (norm.value == 0.0) == constant);
    ck.expect("norm-comparability", norm.value <= norm.about_median && norm.about_median <= 2.0 * norm.value);

    std::vector<double> ugrid;
    for (std::size_t l = 1; l <= n; l *= 2) ugrid.push_back(static_cast<double>(l) / static_cast<double>(n));
    const VmoProfile vm = vmo_modulus(prof, ugrid);
    bool mono = vm.phi_s.front() == 0.0;
    for (std::size_t i = 1; i < vm.phi_s.size(); ++i) mono = mono && vm.phi_s[i - 1] <= vm.phi_s[i];
    ck.expect("vmo-monotone-zero-at-cell", mono);

    // Psi round trip and strict decrease
    const int dim = 1;
    const double q0 = 1.0;
    const double upper = psi_upper(q0, dim);
    const double u1 = std::exp(testing::dyadic_uniform(rng, std::log(1e-6), std::log(upper), 20));
    const double u2 = std::min(upper, u1 * (1.0 + testing::dyadic_uniform(rng, 0.01, 1.0, 10)));
    const double y = psi_integral(phi, q0, dim, u1);
    const PsiInverse inv = psi_inverse(phi, q0, dim, y);
    ck.expect("psi-round-trip", std::fabs(inv.u - u1) <= 1e-8 * u1,
              [&] { return phi.describe() + " u=" + num(u1) + " back=" + num(inv.u); });
    if (u2 > u1)
        ck.expect("psi-decreasing", psi_integral(phi, q0, dim, u2) < y);
}

// ---- driver ------------------------------------------------------------------------

using CaseFn = void (*)(SuiteReport&, std::size_t);

inline const std::map<std::string, CaseFn>& suites() {
    static const std::map<std::string, CaseFn> table{
        {"median", median_case},   {"rearrangement", rearrangement_case},     {"sandwich", sandwich_case},
        {"oracle", oracle_case},   {"sharp", sharp_case},     {"decompose", decompose_case},
        {"oscillation", oscillation_case}, {"bmo", bmo_case},
    };
    return table;
}

inline SuiteReport run_suite(const std::string& name, std::size_t cases, std::uint64_t seed) {
    const auto it = suites().find(name);
    if (it == suites().end()) medianosc::detail::fail(ErrorCode::InvalidParameter, "unknown suite '" + name + "'");
    SuiteReport rep;
    rep.suite = name;
    rep.seed = seed;
    rep.cases = cases;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < cases; ++i) it->second(rep, i);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (name == "rearrangement") {
        const auto* p = rep.find("median-rearrangement-identity");
        if (p) rep.notes.push_back(std::to_string(p->skipped) + " boundary draws (integral s*M) logged and excluded");
    }
    return rep;
}

}  // namespace medianosc::propcheck
