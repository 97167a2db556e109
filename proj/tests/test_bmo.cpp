#include <gtest/gtest.h>

#include <random>

#include "medianosc/bmo.hpp"
#include "medianosc/corpus.hpp"

using namespace medianosc;

namespace {

std::vector<double> cell_grid(std::size_t n, std::size_t from_cells) {
    std::vector<double> u;
    for (std::size_t c = from_cells; c <= n; c *= 2) u.push_back(static_cast<double>(c) / static_cast<double>(n));
    return u;
}

}  // namespace

TEST(Vmo, ConstantIsZero) {
    const SampledFunction f = corpus::constant(1, 64, 1.5);
    const auto u = cell_grid(64, 1);
    const VmoProfile p = vmo_modulus(f, f.whole(), 0.25, u, CubeFamily::All);
    for (double v : p.phi_s) EXPECT_EQ(v, 0.0);
}

TEST(Vmo, StepKeepsHalf) {
    const std::size_t n = 256;
    const SampledFunction f = corpus::step(1, n);
    const auto u = cell_grid(n, 4);
    const VmoProfile p = vmo_modulus(f, f.whole(), 0.25, u, CubeFamily::All);
    for (double v : p.phi_s) EXPECT_EQ(v, 0.5);
    const VmoProfile cell = vmo_modulus(f, f.whole(), 0.25, std::vector<double>{1.0 / n}, CubeFamily::All);
    EXPECT_EQ(cell.phi_s[0], 0.0);
}

TEST(Vmo, LipschitzDecays) {
    const std::size_t n = 256;
    const double L = 2.0;
    const SampledFunction f = corpus::lipschitz(1, n, L);
    const auto u = cell_grid(n, 1);
    const VmoProfile p = vmo_modulus(f, f.whole(), 0.25, u, CubeFamily::All);
    for (std::size_t i = 0; i < u.size(); ++i) {
        EXPECT_LE(p.phi_s[i], L * u[i] / 2.0 + L / n) << "u " << u[i];
        if (i > 0) {
            EXPECT_GE(p.phi_s[i], p.phi_s[i - 1]);
        }
    }
}

TEST(Vmo, GridMustIncrease) {
    const SampledFunction f = corpus::step(1, 16);
    EXPECT_THROW(vmo_modulus(f, f.whole(), 0.25, std::vector<double>{0.5, 0.25}, CubeFamily::All), Error);
}

TEST(Norm, ConstantStepAndInvariances) {
    const Modulus one = Modulus::constant();
    const SampledFunction c = corpus::constant(1, 32, 4.0);
    EXPECT_EQ(bmo_phi_norm(c, c.whole(), 0.25, one, CubeFamily::All).value, 0.0);
    const SampledFunction step = corpus::step(1, 64);
    EXPECT_EQ(bmo_phi_norm(step, step.whole(), 0.25, one, CubeFamily::All).value, 0.5);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int k = 0; k < 5; ++k) {
        std::vector<double> v(32);
        for (double& x : v) x = U(rng);
        const SampledFunction f(unit_frame(1, 32), v);
        const double base = bmo_phi_norm(f, f.whole(), 0.25, one, CubeFamily::All).value;
        EXPECT_EQ(bmo_phi_norm(f.scaled(2.0), f.whole(), 0.25, one, CubeFamily::All).value, 2.0 * base);
        EXPECT_EQ(bmo_phi_norm(f.scaled(-0.5), f.whole(), 0.25, one, CubeFamily::All).value, 0.5 * base);
        const double shifted = bmo_phi_norm(f.shifted(1.25), f.whole(), 0.25, one, CubeFamily::All).value;
        EXPECT_NEAR(shifted, base, 1e-12 * std::max(1.0, base));
    }
}

TEST(Norm, AboutMedianWithinFactorTwo) {
    const SampledFunction f = corpus::piecewise(1, 64, 6, 17);
    const BmoNorm n = bmo_phi_norm(f, f.whole(), 0.3, Modulus::constant(), CubeFamily::All);
    EXPECT_GE(n.about_median, n.value);
    EXPECT_LE(n.about_median, 2.0 * n.value);
}

TEST(Norm, VanishingModulusRejected) {
    const SampledFunction f = corpus::step(1, 16);
    const Modulus t = Modulus::table({{0.5, 0.0}, {1.0, 1.0}});
    try {
        bmo_phi_norm(f, f.whole(), 0.25, t, CubeFamily::All);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateModulus);
    }
}

TEST(Psi, Examples) {
    const Modulus one = Modulus::constant();
    EXPECT_EQ(psi_integral(one, 1.0, 1, 2.0), 0.0);
    EXPECT_NEAR(psi_integral(one, 1.0, 1, 0.5), std::log(4.0), 1e-15);
    EXPECT_NEAR(psi_integral(Modulus::power(1.0), 1.0, 1, 1.0), 1.0, 1e-15);
    EXPECT_THROW(psi_integral(one, 1.0, 1, 2.5), Error);
    EXPECT_THROW(psi_integral(one, 1.0, 1, 0.0), Error);
}

TEST(Psi, QuadratureMatchesClosedForm) {
    // a table through the points of phi(v) = v on [0,2] is exactly linear
    const Modulus lin_table = Modulus::table({{0.5, 0.5}, {1.0, 1.0}, {2.0, 2.0}});
    for (double u : {0.01, 0.3, 1.0, 1.7})
        EXPECT_NEAR(psi_integral(lin_table, 1.0, 1, u), psi_integral(Modulus::power(1.0), 1.0, 1, u), 1e-8 * 2.0);
    // log kind: integral of 1/(v (1 + ln(1/v))) from u to 1 is ln(1 + ln(1/u)), plus ln 2 from 1 to 2
    for (double u : {1e-6, 0.01, 0.5})
        EXPECT_NEAR(psi_integral(Modulus::log(), 1.0, 1, u), std::log(1.0 + std::log(1.0 / u)) + std::log(2.0), 1e-8);
}

TEST(Psi, InverseExamplesAndRoundTrip) {
    const Modulus one = Modulus::constant();
    EXPECT_EQ(psi_inverse(one, 1.0, 1, 0.0).u, 2.0);
    EXPECT_NEAR(psi_inverse(one, 1.0, 1, std::log(4.0)).u, 0.5, 1e-9);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(-12.0, std::log(2.0));
    for (const Modulus& phi : {one, Modulus::power(0.5), Modulus::log(2.0)}) {
        for (int i = 0; i < 50; ++i) {
            const double u = std::exp(U(rng));
            const double back = psi_inverse(phi, 1.0, 1, psi_integral(phi, 1.0, 1, u)).u;
            EXPECT_NEAR(back, u, 1e-8 * u) << phi.describe();
        }
    }
}

TEST(Psi, BoundedTransformClamps) {
    const Modulus p = Modulus::power(1.0);
    const PsiInverse r = psi_inverse(p, 1.0, 1, 5.0);  // Psi(0+) = 2
    EXPECT_TRUE(r.clamped);
    EXPECT_EQ(r.u, 0.0);
    try {
        psi_inverse(Modulus::table({{0.5, 0.0}, {1.0, 1.0}}), 1.0, 1, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonInvertible);
    }
}

TEST(Tail, ConstantStepAndLog) {
    const std::vector<double> lambdas{0.1, 0.4, 0.6, 1.0};
    const SampledFunction c = corpus::constant(1, 64, 3.0);
    for (double m : deviation_tail(c, c.whole(), 0.25, lambdas, 1.0).measures) EXPECT_EQ(m, 0.0);

    const SampledFunction step = corpus::step(1, 64);
    const TailCurve t = deviation_tail(step, step.whole(), 0.25, lambdas, 1.0);
    // median at 3/4 is 1: deviations are 0 or 1, so nothing exceeds lambda >= 1
    EXPECT_EQ(t.median, 1.0);
    EXPECT_EQ(t.measures[3], 0.0);
    EXPECT_EQ(t.measures[0], 0.5);

    const SampledFunction lg = corpus::log_singularity(1, 4096);
    const Modulus one = Modulus::constant();
    const auto grid = default_lambda_grid(lg, lg.whole(), 0.25, 400);
    const TailCurve curve = deviation_tail(lg, lg.whole(), 0.25, grid, one, default_family(1, 4096));
    for (std::size_t i = 1; i < curve.measures.size(); ++i) EXPECT_LE(curve.measures[i], curve.measures[i - 1]);
    const TailFit fit = fit_tail(curve, one);
    EXPECT_GE(fit.points, 10u);
    EXPECT_LT(fit.slope, 0.0);
    EXPECT_GT(fit.r2, 0.99);
}

TEST(Embedding, Examples) {
    const std::size_t n = 256;
    const auto u = cell_grid(n, 4);
    const auto flat = corpus::constant(1, n, 1.0);
    for (const auto& row : mean_oscillation_embedding(flat, flat.whole(), 0.25, Modulus::constant(), u, CubeFamily::All).rows)
        EXPECT_EQ(row.ratio, 0.0);

    const auto lip = corpus::lipschitz(1, n, 1.0);
    const auto rl = mean_oscillation_embedding(lip, lip.whole(), 0.25, Modulus::power(1.0), u, CubeFamily::All);
    EXPECT_GT(rl.norm, 0.0);
    EXPECT_LE(rl.normalized_max_ratio, 4.0);

    const auto step = corpus::step(1, n);
    const auto rs = mean_oscillation_embedding(step, step.whole(), 0.25, Modulus::constant(), u, CubeFamily::All);
    EXPECT_LE(rs.normalized_max_ratio, 4.0);
    EXPECT_EQ(rs.regime, "s<=2^-n");
}

TEST(Embedding, MeanDominatesMedianOscillation) {
    const SampledFunction f = corpus::piecewise(1, 64, 5, 2);
    const double s = 0.25;
    const SizeProfile p = size_profile(f, f.whole(), s, CubeFamily::All);
    for (std::size_t i = 0; i < p.lengths.size(); ++i) EXPECT_LE(p.omega[i], p.mean_osc[i] / s + 1e-12);
}
