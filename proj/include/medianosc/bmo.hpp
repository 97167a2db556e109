#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medianosc/grid.hpp"
#include "medianosc/median.hpp"
#include "medianosc/modulus.hpp"
#include "medianosc/parallel.hpp"

namespace medianosc {

/// Per cube side: the largest omega_s, median-about-median oscillation and mean oscillation
/// over the family cubes of that side.
struct SizeProfile {
    double s = 0.25;
    CubeFamily family = CubeFamily::All;
    std::vector<std::size_t> lengths;
    std::vector<double> measures;
    std::vector<double> omega;
    std::vector<double> about_median;
    std::vector<double> mean_osc;
};

inline SizeProfile size_profile(const SampledFunction& f, const CubeRegion& region, double s, CubeFamily family,
                                EnumerationLimits limits = {}) {
    check_sharp_parameter(s);
    detail::require(region.valid_in(f.frame()), ErrorCode::InvalidParameter, "region outside the grid");
    SizeProfile p;
    p.s = s;
    p.family = family;
    p.lengths = detail::family_lengths(family, region.len);
    const std::size_t nl = p.lengths.size();
    for (std::size_t l : p.lengths) p.measures.push_back(measure(f.frame(), CubeRegion{region.dim, {}, l}));

    std::vector<std::size_t> slot(region.len + 1, 0);
    for (std::size_t i = 0; i < nl; ++i) slot[p.lengths[i]] = i;

    const std::vector<CubeRegion> cubes = enumerate_cubes(region, family, limits);
    const unsigned workers = worker_count();
    struct Acc {
        std::vector<double> omega, about, mean;
    };
    std::vector<Acc> partial(workers, Acc{std::vector<double>(nl, 0.0), std::vector<double>(nl, 0.0),
                                          std::vector<double>(nl, 0.0)});
    parallel_chunks(cubes.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
        std::vector<double> v;
        auto& acc = partial[w];
        for (std::size_t c = begin; c < end; ++c) {
            const CubeRegion& q = cubes[c];
            const std::size_t k = slot[q.len];
            v = gather(f, q);
            acc.mean[k] = std::max(acc.mean[k], mean_oscillation(v));
            acc.about[k] = std::max(acc.about[k], oscillation_about_median(v, s));
            std::sort(v.begin(), v.end());
            acc.omega[k] = std::max(acc.omega[k], oscillation_of_sorted(v, s).omega);
        }
    });
    p.omega.assign(nl, 0.0);
    p.about_median.assign(nl, 0.0);
    p.mean_osc.assign(nl, 0.0);
    for (const auto& a : partial)
        for (std::size_t i = 0; i < nl; ++i) {
            p.omega[i] = std::max(p.omega[i], a.omega[i]);
            p.about_median[i] = std::max(p.about_median[i], a.about[i]);
            p.mean_osc[i] = std::max(p.mean_osc[i], a.mean[i]);
        }
    return p;
}

namespace detail {

// max of values[i] over sizes with measures[i] <= u (0 when none qualifies)
inline double max_up_to(const std::vector<double>& measures, const std::vector<double>& values, double u) {
    double best = 0.0;
    for (std::size_t i = 0; i < measures.size(); ++i)
        if (measures[i] <= u * (1.0 + 1e-12)) best = std::max(best, values[i]);
    return best;
}

}  // namespace detail

struct VmoProfile {
    double s = 0.25;
    CubeFamily family = CubeFamily::All;
    std::vector<double> u;
    std::vector<double> phi_s;
};

inline VmoProfile vmo_modulus(const SizeProfile& profile, std::span<const double> u_grid) {
    for (std::size_t i = 1; i < u_grid.size(); ++i)
        detail::require(u_grid[i] > u_grid[i - 1], ErrorCode::InvalidParameter, "u grid must be increasing");
    VmoProfile out{profile.s, profile.family, {u_grid.begin(), u_grid.end()}, {}};
    for (double u : u_grid) out.phi_s.push_back(detail::max_up_to(profile.measures, profile.omega, u));
    return out;
}

/// phi_s(u) = max omega_s(f, Q) over family cubes Q in region with |Q| <= u.
inline VmoProfile vmo_modulus(const SampledFunction& f, const CubeRegion& region, double s,
                              std::span<const double> u_grid, CubeFamily family) {
    return vmo_modulus(size_profile(f, region, s, family), u_grid);
}

struct BmoNorm {
    double value = 0.0;           // sup omega_s(f,Q) / phi(|Q|)
    double about_median = 0.0;    // same with m_{|f - m_f(1-s,Q)|}(1-s,Q) in the numerator
    std::size_t argmax_len = 0;   // cube side achieving `value`
    CubeFamily family = CubeFamily::All;
    std::string phi;
};

inline BmoNorm bmo_phi_norm(const SizeProfile& profile, const Modulus& phi) {
    BmoNorm out;
    out.family = profile.family;
    out.phi = phi.describe();
    for (std::size_t i = 0; i < profile.lengths.size(); ++i) {
        const double d = phi(profile.measures[i]);
        if (!(d > 0.0))
            detail::fail(ErrorCode::DegenerateModulus,
                         "phi vanishes at cube measure " + std::to_string(profile.measures[i]));
        const double r = profile.omega[i] / d;
        if (r > out.value) {
            out.value = r;
            out.argmax_len = profile.lengths[i];
        }
        out.about_median = std::max(out.about_median, profile.about_median[i] / d);
    }
    return out;
}

/// ||f||_{s,phi,region} over the given cube family (a lower bound for the full sup).
inline BmoNorm bmo_phi_norm(const SampledFunction& f, const CubeRegion& region, double s, const Modulus& phi,
                            CubeFamily family) {
    return bmo_phi_norm(size_profile(f, region, s, family), phi);
}

/// Which statement the parameter s supports: the identification with VMO needs s <= 2^-n.
inline std::string s_regime(double s, int dim) {
    return s <= std::ldexp(1.0, -dim) ? "s<=2^-n" : "s<=1/2";
}

struct Normalized {
    SampledFunction g;
    double median = 0.0;  // m_f(1-s, region), subtracted
    double norm = 0.0;    // ||f||_{s,phi,region}, divided out when positive
};

/// g = (f - m_f(1-s,Q0)) / ||f||_{s,phi,Q0}, so that g has zero median and norm at most 1.
inline Normalized normalize_for_cascade(const SampledFunction& f, const CubeRegion& region, double s,
                                        const Modulus& phi, CubeFamily family) {
    const double m = maximal_median(gather(f, region), 1.0 - s);
    const double norm = bmo_phi_norm(f, region, s, phi, family).value;
    SampledFunction g = f.shifted(m);
    if (norm > 0.0) g = g.scaled(1.0 / norm);
    return {std::move(g), m, norm};
}

struct TailCurve {
    std::vector<double> lambdas;
    std::vector<double> measures;
    double median = 0.0;       // m_f(1-s, Q)
    double normalizer = 0.0;   // ||f||_{s,phi,Q}
    double q_measure = 0.0;
    int dim = 1;
};

/// |{y in Q : |f(y) - m_f(1-s,Q)| > lambda}| on each lambda, by exact cell counts.
inline TailCurve deviation_tail(const SampledFunction& f, const CubeRegion& q, double s, std::span<const double> lambda_grid,
                         double normalizer) {
    check_sharp_parameter(s);
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        detail::require(lambda_grid[i] > lambda_grid[i - 1], ErrorCode::InvalidParameter,
                        "lambda grid must be increasing");
    TailCurve t;
    t.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
    t.normalizer = normalizer;
    t.q_measure = measure(f.frame(), q);
    t.dim = f.dim();
    std::vector<double> dev = gather(f, q);
    t.median = maximal_median(dev, 1.0 - s);
    for (double& v : dev) v = std::fabs(v - t.median);
    std::sort(dev.begin(), dev.end());
    for (double lam : t.lambdas) {
        const auto above = static_cast<std::size_t>(dev.end() - std::upper_bound(dev.begin(), dev.end(), lam));
        t.measures.push_back(static_cast<double>(above) * f.frame().cell_volume());
    }
    return t;
}

inline TailCurve deviation_tail(const SampledFunction& f, const CubeRegion& q, double s, std::span<const double> lambda_grid,
                         const Modulus& phi, CubeFamily family) {
    return deviation_tail(f, q, s, lambda_grid, bmo_phi_norm(f, q, s, phi, family).value);
}

/// Evenly spaced lambdas from 0 to the largest deviation from the (1-s)-median.
inline std::vector<double> default_lambda_grid(const SampledFunction& f, const CubeRegion& q, double s,
                                               std::size_t points = 200) {
    std::vector<double> v = gather(f, q);
    const double m = maximal_median(v, 1.0 - s);
    double top = 0.0;
    for (double x : v) top = std::max(top, std::fabs(x - m));
    std::vector<double> grid;
    for (std::size_t i = 0; i < points; ++i)
        grid.push_back(top * static_cast<double>(i) / static_cast<double>(points));
    return grid;
}

struct TailFit {
    std::size_t points = 0;
    double slope = 0.0;      // of ln(measure) against lambda
    double intercept = 0.0;
    double r2 = 0.0;
    double c1 = 0.0;         // model measure ~ c1 * Psi^{-1}(c2 * lambda / ||f||)
    double c2 = 0.0;
    double model_rss = 0.0;  // residual sum of squares of the model in log space
    double c2_reference = 0.0;
    double lo_fraction = 1e-3;
    double hi_fraction = 1e-1;
};

/// Least-squares fit over the points whose measure lies in [lo, hi] * |Q|.
inline TailFit fit_tail(const TailCurve& curve, const Modulus& phi, double lo_fraction = 1e-3,
                        double hi_fraction = 1e-1) {
    TailFit fit;
    fit.lo_fraction = lo_fraction;
    fit.hi_fraction = hi_fraction;
    const double n = static_cast<double>(curve.dim);
    fit.c2_reference = n * std::log(2.0) / (2.0 * (4.0 + 10.0 * n));
    std::vector<double> x, y;
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
        const double m = curve.measures[i];
        if (m > 0.0 && m >= lo_fraction * curve.q_measure && m <= hi_fraction * curve.q_measure) {
            x.push_back(curve.lambdas[i]);
            y.push_back(std::log(m));
        }
    }
    fit.points = x.size();
    if (x.size() < 2) return fit;
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / k;
    const double vy = syy - sy * sy / k;
    const double cxy = sxy - sx * sy / k;
    if (vx <= 0.0) return fit;
    fit.slope = cxy / vx;
    fit.intercept = (sy - fit.slope * sx) / k;
    fit.r2 = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;

    const double norm = curve.normalizer;
    const double upper = psi_upper(curve.q_measure, curve.dim);
    if (!(norm > 0.0)) return fit;
    if (phi.kind() == Modulus::Kind::Constant) {
        // Psi^{-1}(y) = U exp(-y / c): the log-linear fit is the model
        fit.c2 = -fit.slope * phi.scale() * norm;
        fit.c1 = std::exp(fit.intercept) / upper;
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += r * r;
        }
        fit.model_rss = rss;
        return fit;
    }
    // general phi: for fixed c2 the best ln c1 is the mean residual; golden section on ln c2
    auto rss_for = [&](double log_c2, double* log_c1) {
        const double c2 = std::exp(log_c2);
        std::vector<double> model(x.size());
        double mean = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const PsiInverse inv = psi_inverse(phi, curve.q_measure, curve.dim, c2 * x[i] / norm);
            model[i] = inv.clamped ? -745.0 : inv.log_u;
            mean += y[i] - model[i];
        }
        mean /= k;
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - model[i] - mean;
            rss += r * r;
        }
        if (log_c1) *log_c1 = mean;
        return rss;
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(1e-4), b = std::log(1e2);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = rss_for(c, nullptr), fd = rss_for(d, nullptr);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = rss_for(c, nullptr);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = rss_for(d, nullptr);
        }
    }
    const double best = 0.5 * (a + b);
    double log_c1 = 0.0;
    fit.model_rss = rss_for(best, &log_c1);
    fit.c2 = std::exp(best);
    fit.c1 = std::exp(log_c1);
    return fit;
}

struct EmbeddingRow {
    double u = 0.0;
    double mean_oscillation = 0.0;  // sup over |Q| <= u of avg_Q |f - f_Q|
    double phi_scaled = 0.0;        // phi(2^n u)
    double ratio = 0.0;
};

struct EmbeddingReport {
    std::vector<EmbeddingRow> rows;
    double norm = 0.0;            // ||f||_{s,phi,Q0}
    double max_ratio = 0.0;
    double normalized_max_ratio = 0.0;  // max_ratio / norm, 0 when norm vanishes
    CubeFamily family = CubeFamily::All;
    std::string phi;
    std::string regime;
};

/// Mean-oscillation modulus against phi(2^n u) on each u; the max ratio is the empirical constant.
inline EmbeddingReport mean_oscillation_embedding(const SampledFunction& f, const CubeRegion& region, double s,
                                               const Modulus& phi, std::span<const double> u_grid, CubeFamily family) {
    const SizeProfile profile = size_profile(f, region, s, family);
    EmbeddingReport rep;
    rep.family = family;
    rep.phi = phi.describe();
    rep.regime = s_regime(s, f.dim());
    rep.norm = bmo_phi_norm(profile, phi).value;
    for (double u : u_grid) {
        EmbeddingRow row;
        row.u = u;
        row.mean_oscillation = detail::max_up_to(profile.measures, profile.mean_osc, u);
        row.phi_scaled = phi(std::ldexp(u, f.dim()));
        if (!(row.phi_scaled > 0.0))
            detail::fail(ErrorCode::DegenerateModulus, "phi(2^n u) vanishes at u = " + std::to_string(u));
        row.ratio = row.mean_oscillation / row.phi_scaled;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        rep.rows.push_back(row);
    }
    rep.normalized_max_ratio = rep.norm > 0.0 ? rep.max_ratio / rep.norm : 0.0;
    return rep;
}

}  // namespace medianosc
