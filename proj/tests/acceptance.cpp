// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "medianosc/medianosc.hpp"
#include "medianosc/propcheck.hpp"

using namespace medianosc;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Summarizes a suite run restricted to the listed properties; every one must have been checked.
Outcome suite_outcome(const propcheck::SuiteReport& rep, const std::vector<std::string>& props, double max_seconds) {
    Outcome o{true, {}};
    std::size_t checked = 0, violations = 0;
    for (const auto& name : props) {
        const auto* p = rep.find(name);
        if (!p || p->checked == 0) {
            o.pass = false;
            o.detail += " missing:" + name;
            continue;
        }
        checked += p->checked;
        violations += p->violations;
        if (p->violations) {
            o.pass = false;
            o.detail += " " + name + " -> " + p->first_violation;
        }
    }
    if (rep.seconds > max_seconds) o.pass = false;
    o.detail = std::to_string(rep.cases) + " cases, " + std::to_string(checked) + " checks, " +
               std::to_string(violations) + " violations, " + fmt("%.1f s", rep.seconds) + o.detail;
    return o;
}

Outcome median_suite() {
    const auto rep = propcheck::run_suite("median", 1000, kSeed);
    return suite_outcome(rep,
                         {"median-defining-counts", "median-threshold-scan", "monotone-in-parameter",
                          "monotone-in-function", "translation", "subadditive", "nonpositive-median-bound",
                          "abs-bound-upper-half", "abs-sandwich", "mean-bound"},
                         60.0);
}

Outcome rearrangement_identity() {
    const auto rep = propcheck::run_suite("rearrangement", 1000, kSeed);
    Outcome o = suite_outcome(rep, {"median-rearrangement-identity"}, 1e9);
    const auto* p = rep.find("median-rearrangement-identity");
    if (p) o.detail += ", " + std::to_string(p->skipped) + " boundary draws excluded";
    return o;
}

Outcome counterexamples() {
    bool ok = true;
    std::string d;
    const SampledFunction f = corpus::signed_step(1, 64);
    for (double s : {0.1, 0.25, 0.4}) {
        const double m = maximal_median(f.values(), s);
        std::vector<double> a(f.values().begin(), f.values().end());
        for (double& x : a) x = std::fabs(x);
        const double ma = maximal_median(a, s);
        ok = ok && m == -2.0 && ma == 1.0;
        d += fmt("s=%g: ", s) + fmt("m_f=%g ", m) + fmt("m_|f|=%g; ", ma);
    }
    const auto pc = corpus::pair_counterexample(0.75, 0.625, 64, true);
    const double mf = maximal_median(pc.f.values(), pc.s);
    const double mg = maximal_median(pc.g.values(), pc.s1);
    const double msum = maximal_median(corpus::sum(pc.f, pc.g).values(), pc.t);
    ok = ok && mf == 0.0 && mg == 0.0 && msum == 1.0;
    d += fmt("pair: m_f=%g ", mf) + fmt("m_g=%g ", mg) + fmt("m_f+g(t)=%g", msum) + fmt(" at t=%.17g", pc.t);
    return {ok, d};
}

Outcome oracle_equivalence() {
    const auto rep = propcheck::run_suite("oracle", 500, kSeed);
    return suite_outcome(rep, {"omega-oracle", "pair-dense-grid"}, 1e9);
}

Outcome sharp_inequalities() {
    const auto rep = propcheck::run_suite("sharp", 200, kSeed);
    return suite_outcome(rep, {"excess-set-own-omega", "excess-set-sharp-inf", "nested-median-drift"}, 1e9);
}

// Decomposition postconditions over the designated corpus and the full parameter grid.
Outcome decomposition_grid() {
    struct Member {
        std::string name;
        SampledFunction f;
    };
    std::vector<Member> corpus{
        {"constant-1d", corpus::constant(1, 64, 3.0)},
        {"step-1d", corpus::step(1, 64)},
        {"signed-step-1d", corpus::signed_step(1, 64)},
        {"linear-1d", corpus::linear(1, 64)},
        {"lipschitz-1d", corpus::lipschitz(1, 64, 2.0)},
        {"spike-block-1d", corpus::spike(1, 64, 4)},
        {"log-singularity-1d", corpus::log_singularity(1, 64)},
        {"piecewise-4-1d", corpus::piecewise(1, 64, 4, 7)},
        {"step-2d", corpus::step(2, 16)},
        {"lipschitz-2d", corpus::lipschitz(2, 16, 2.0)},
        {"spike-block-2d", corpus::spike(2, 16, 2)},
        {"piecewise-4-2d", corpus::piecewise(2, 16, 4, 7)},
        {"checkerboard-2d", corpus::checkerboard(16, 2)},
    };
    const double svals[] = {0.125, 0.25, 0.5};
    const double decades[] = {0.01, 0.1, 1.0, 10.0};
    const double t = 0.5;
    std::size_t runs = 0, failures = 0, floor_flags = 0;
    std::string first;
    for (const auto& m : corpus) {
        for (double s : svals) {
            const SharpField sharp = local_sharp_maximal(m.f, s, CubeFamily::All);
            const double offset = maximal_median(m.f.values(), t);
            const double scale = std::max(sharp.sup(), 1.0);
            for (double dd : decades)
                for (double db : decades) {
                    const DecompositionParams p{s, t, dd * scale, db * scale};
                    const auto forest = median_decompose(m.f, m.f.whole(), p, sharp, offset);
                    ++runs;
                    floor_flags += forest.report.floor_upper_exceedances;
                    if (!forest.report.all_hold()) {
                        if (failures++ == 0)
                            first = m.name + fmt(" s=%g", s) + fmt(" delta=%g", p.delta) + fmt(" beta=%g", p.beta);
                    }
                }
        }
    }
    // two-threshold packing on the designated members
    std::size_t packing_runs = 0, packing_failures = 0;
    const std::vector<SampledFunction> designated{corpus::step(1, 64), corpus::piecewise(1, 64, 4, 7),
                                                  corpus::spike(1, 64, 4), corpus::step(2, 16),
                                                  corpus::piecewise(2, 16, 4, 7), corpus::spike(2, 16, 2)};
    for (const auto& f : designated)
        for (double s : svals) {
            const SharpField sharp = local_sharp_maximal(f, s, CubeFamily::All);
            const double beta = sharp.sup() > 0.0 ? sharp.sup() : 1.0;
            const auto tt = two_threshold_decompose(f, f.whole(), s, t, beta, beta / 10.0, sharp);
            ++packing_runs;
            if (!(tt.packing_ok && tt.nesting_ok)) ++packing_failures;
        }
    Outcome o;
    o.pass = failures == 0 && packing_failures == 0;
    o.detail = std::to_string(runs) + " decompositions, " + std::to_string(failures) + " failing" +
               (first.empty() ? "" : " (first: " + first + ")") + ", " + std::to_string(floor_flags) +
               " floor-cell upper-bound flags; packing " + std::to_string(packing_runs - packing_failures) + "/" +
               std::to_string(packing_runs);
    return o;
}

Outcome tail_fit() {
    const auto t0 = std::chrono::steady_clock::now();
    const SampledFunction f = corpus::log_singularity(1, 4096);
    const double s = 0.25;
    const Modulus phi = Modulus::constant(1.0);
    const CubeFamily family = default_family(1, 4096);
    const std::vector<double> grid = default_lambda_grid(f, f.whole(), s, 400);
    const TailCurve curve = deviation_tail(f, f.whole(), s, grid, phi, family);
    const TailFit fit = fit_tail(curve, phi);
    const double secs = elapsed(t0);
    Outcome o;
    o.pass = fit.points >= 3 && fit.slope < 0.0 && fit.r2 >= 0.9 && secs < 300.0;
    o.detail = std::to_string(fit.points) + " points, slope " + fmt("%.6g", fit.slope) + ", R^2 " +
               fmt("%.6f", fit.r2) + ", c1 " + fmt("%.6g", fit.c1) + ", c2 " + fmt("%.6g", fit.c2) +
               " (reference c2 " + fmt("%.6g", fit.c2_reference) + "), family " + std::string(to_string(family)) +
               ", " + fmt("%.1f s", secs);
    return o;
}

Outcome oscillation_convergence() {
    const double s = 0.75;
    const double delta = 1.0 / 16.0;
    bool ok = true;
    std::string d;
    for (const char* name : {"step", "lipschitz"}) {
        double prev = -1.0;
        d += std::string(name) + ":";
        for (std::size_t n : {256u, 512u, 1024u}) {
            const SampledFunction f = std::string(name) == "step" ? corpus::step(1, n) : corpus::lipschitz(1, n, 1.0);
            const double est = omega_estimate(f, s, delta);
            const double mod = essential_modulus(f, delta);
            const double ratio = est / (mod / 2.0);
            ok = ok && est <= mod / 2.0;  // easy direction, exact
            ok = ok && ratio >= prev;
            if (n == 1024) ok = ok && ratio >= 0.8 && ratio <= 1.0;
            prev = ratio;
            d += fmt(" N=%g ", static_cast<double>(n)) + fmt("ratio %.6f", ratio);
        }
        d += "; ";
    }
    return {ok, d};
}

Outcome lipschitz_profile() {
    bool ok = true;
    std::size_t towers = 0;
    double worst = 0.0;  // largest error / (L diam)
    struct Field {
        SampledFunction f;
        double L;
    };
    const std::vector<Field> fields{{corpus::lipschitz(1, 1024, 1.0), 1.0},
                                    {corpus::lipschitz(1, 256, 3.0), 3.0},
                                    {corpus::lipschitz(2, 64, 1.0), 1.0}};
    for (const auto& fl : fields)
        for (double s : {0.25, 0.5, 0.75})
            for (std::size_t cell = 0; cell < fl.f.size(); ++cell) {
                const auto prof = median_convergence_profile(fl.f, cell, s);
                ++towers;
                for (const auto& pt : prof) {
                    const double bound = fl.L * pt.diameter;
                    if (pt.error > bound) ok = false;
                    if (bound > 0.0) worst = std::max(worst, pt.error / bound);
                }
                ok = ok && prof.back().cells_per_side == 1 && prof.back().error == 0.0;
            }
    return {ok, std::to_string(towers) + " towers, largest error/(L diam) " + fmt("%.6f", worst)};
}

Outcome vmo_discriminator() {
    const std::size_t n = 256;
    const double s = 0.25;
    const double w = 1.0 / static_cast<double>(n);
    std::vector<double> u_grid;
    for (double u = 4.0 * w; u <= 0.5 + 1e-12; u *= 2.0) u_grid.push_back(u);

    const double L = 1.0;
    const SampledFunction lip = corpus::lipschitz(1, n, L);
    const SampledFunction step = corpus::step(1, n);
    const VmoProfile vl = vmo_modulus(lip, lip.whole(), s, u_grid, CubeFamily::All);
    const VmoProfile vs = vmo_modulus(step, step.whole(), s, u_grid, CubeFamily::All);
    const bool lip_ok = vl.phi_s.front() < 2.0 * L * w;
    double step_min = 1e300;
    for (double v : vs.phi_s) step_min = std::min(step_min, v);
    const bool step_ok = step_min >= 0.4;

    const auto el = mean_oscillation_embedding(lip, lip.whole(), s, Modulus::power(1.0), u_grid, CubeFamily::All);
    const auto es = mean_oscillation_embedding(step, step.whole(), s, Modulus::constant(1.0), u_grid, CubeFamily::All);
    const bool embed_ok = el.normalized_max_ratio <= 4.0 && es.normalized_max_ratio <= 4.0;
    return {lip_ok && step_ok && embed_ok,
            "lipschitz phi_s(4 cells) " + fmt("%.6g", vl.phi_s.front()) + " < " + fmt("%.6g", 2.0 * L * w) +
                "; step min phi_s " + fmt("%.6g", step_min) + "; embedding ratio/norm lipschitz " +
                fmt("%.4f", el.normalized_max_ratio) + ", step " + fmt("%.4f", es.normalized_max_ratio) + " (<= 4)"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* label;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"AC1 median properties, 1000 instances, < 60 s", median_suite},
        {"AC2 median / rearrangement identity off-boundary", rearrangement_identity},
        {"AC3 signed-step and pair counterexamples", counterexamples},
        {"AC4 sliding window and pair optimum vs oracles", oracle_equivalence},
        {"AC5 excess-set and nested-median drift bounds", sharp_inequalities},
        {"AC6 decomposition postconditions and packing on corpus", decomposition_grid},
        {"AC7 deviation tail log-linear fit (N=4096)", tail_fit},
        {"AC8 two-cube oscillation vs half the modulus", oscillation_convergence},
        {"AC9 median towers within L diam for Lipschitz fields", lipschitz_profile},
        {"AC10 vmo discriminator and embedding ratio", vmo_discriminator},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s  %s  [%s]\n", o.pass ? "PASS" : "FAIL", c.label, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
