#include <gtest/gtest.h>

#include "medianosc/corpus.hpp"
#include "medianosc/median.hpp"
#include "medianosc/testing/oracles.hpp"

using namespace medianosc;
namespace mt = medianosc::testing;

namespace {
std::vector<double> abs_of(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x = std::fabs(x);
    return out;
}
}  // namespace

TEST(Median, SignedStepQuarter) {
    const SampledFunction f = corpus::signed_step(1, 64);
    EXPECT_EQ(maximal_median(f.values(), 0.25), -2.0);
    EXPECT_EQ(maximal_median(abs_of(f.values()), 0.25), 1.0);
}

TEST(Median, ConstantIsItsOwnMedian) {
    const std::vector<double> c(17, 3.5);
    for (double s : {0.01, 0.3, 0.5, 0.99}) EXPECT_EQ(maximal_median(c, s), 3.5);
}

TEST(Median, SmallSamples) {
    EXPECT_EQ(maximal_median(std::vector<double>{1, 2, 3, 4, 5}, 0.5), 3.0);
    EXPECT_EQ(maximal_median(std::vector<double>{1, 2, 3, 4}, 0.5), 3.0);
    EXPECT_EQ(mt::median_by_threshold_scan(std::vector<double>{1, 2, 3, 4, 5}, 0.5), 3.0);
    EXPECT_EQ(mt::median_by_threshold_scan(std::vector<double>{1, 2, 3, 4}, 0.5), 3.0);
}

TEST(Median, ParameterOutsideOpenIntervalThrows) {
    const std::vector<double> v{1, 2};
    EXPECT_THROW(maximal_median(v, 0.0), Error);
    EXPECT_THROW(maximal_median(v, 1.0), Error);
}

TEST(Median, SelectAndSortAgree) {
    mt::Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto v = mt::random_values(rng, 9000, 4000);
        for (double s : {0.1, 0.5, 0.9}) {
            const auto k = median_rank(s, v.size());
            EXPECT_EQ(order_statistic(v, k, Selection::Sort), order_statistic(v, k, Selection::Select));
        }
    }
}

TEST(Median, DefiningCounts) {
    const std::vector<double> v{1, 2, 2, 3, 7};
    const MedianCounts c = defining_counts(v, 2.0);
    EXPECT_EQ(c.less, 1u);
    EXPECT_EQ(c.less_equal, 3u);
    EXPECT_EQ(c.greater, 2u);
    EXPECT_EQ(c.greater_equal, 4u);
}

TEST(Rearrangement, Examples) {
    EXPECT_EQ(rearrangement_value(WeightedSamples({3, 1, 2}, 1.0 / 3.0), 1.0 / 3.0), 2.0);
    EXPECT_EQ(rearrangement_value(WeightedSamples({3, -1, 2}, 1.0 / 3.0), 1.0), 0.0);
    EXPECT_EQ(rearrangement_value(WeightedSamples({3, -1, 2}, 1.0 / 3.0), 5.0), 0.0);
    EXPECT_EQ(rearrangement_value(WeightedSamples(std::vector<double>(6, -5.0), 0.25), 1.0), 5.0);
    EXPECT_THROW(rearrangement_value(WeightedSamples({1}, 1.0), 0.0), Error);
}

TEST(Rearrangement, MatchesScanOracle) {
    mt::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto v = mt::random_values(rng, 40);
        const double vol = 1.0 / 64.0;
        const double lambda = mt::dyadic_uniform(rng, 1.0 / 1024.0, 1.0, 10);
        EXPECT_EQ(rearrangement_value(WeightedSamples(v, vol), lambda),
                  mt::rearrangement_by_scan(v, vol, mt::exact(lambda)));
    }
}

TEST(Rearrangement, IdentityExamples) {
    auto both = [](std::vector<double> v, double s) { return median_rearrangement_identity(WeightedSamples(v, 0.25), s); };
    EXPECT_EQ(both({1, 2, 3, 4}, 0.3), std::make_pair(3.0, 3.0));
    EXPECT_EQ(both({0, 0, 0, 9}, 0.3), std::make_pair(0.0, 0.0));
    EXPECT_EQ(both({-4, 4, 4, -4}, 0.3), std::make_pair(4.0, 4.0));
    EXPECT_FALSE(on_rearrangement_boundary(0.3, 4));
    EXPECT_TRUE(on_rearrangement_boundary(0.5, 4));
}

TEST(Oscillation, WindowExamples) {
    const auto a = best_constant_oscillation(std::vector<double>{0, 0, 0, 10}, 0.5);
    EXPECT_EQ(a.omega, 0.0);
    EXPECT_EQ(a.best_c, 0.0);
    const auto c = best_constant_oscillation(std::vector<double>(5, 2.25), 0.3);
    EXPECT_EQ(c.omega, 0.0);
    EXPECT_EQ(c.best_c, 2.25);
    // window of floor(M/2) + 1 = 3 values: {0,1,2}, centre 1
    const auto b = best_constant_oscillation(std::vector<double>{0, 1, 2, 3}, 0.5);
    EXPECT_EQ(b.omega, 1.0);
    EXPECT_EQ(b.best_c, 1.0);
    const auto ob = mt::oscillation_by_candidates(std::vector<double>{0, 1, 2, 3}, 0.5);
    EXPECT_EQ(ob.omega, b.omega);
    EXPECT_EQ(ob.best_c, b.best_c);
}

TEST(Oscillation, AboutMedianExamples) {
    EXPECT_EQ(oscillation_about_median(std::vector<double>(6, 4.0), 0.25), 0.0);
    EXPECT_EQ(oscillation_about_median(std::vector<double>{0, 0, 0, 10}, 0.5), 0.0);
    const double v = oscillation_about_median(std::vector<double>{0, 1, 2, 3}, 0.5);
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 1.0);
}

TEST(Oscillation, ParameterRange) {
    const std::vector<double> v{1, 2, 3};
    EXPECT_THROW(best_constant_oscillation(v, 0.0), Error);
    EXPECT_THROW(best_constant_oscillation(v, 0.6), Error);
    EXPECT_NO_THROW(best_constant_oscillation(v, 0.5));
}

TEST(Convergence, TowerEndsAtCell) {
    const SampledFunction f = corpus::piecewise(1, 64, 5, 3);
    for (std::size_t cell : {0u, 17u, 63u}) {
        const auto prof = median_convergence_profile(f, cell, 0.4);
        EXPECT_EQ(prof.back().cells_per_side, 1u);
        EXPECT_EQ(prof.back().error, 0.0);
    }
}

TEST(Convergence, LinearWithinCubeSide) {
    const SampledFunction f = corpus::linear(1, 1024);
    const auto prof = median_convergence_profile(f, 512, 0.5);
    for (const auto& p : prof) EXPECT_LE(p.error, p.diameter);
}

TEST(Convergence, StepBecomesExactAwayFromJump) {
    const SampledFunction f = corpus::step(1, 256);
    const auto prof = median_convergence_profile(f, 100, 0.5);
    for (const auto& p : prof)
        if (p.cells_per_side <= 128) {
            EXPECT_EQ(p.error, 0.0) << "side " << p.cells_per_side;
        }
}

TEST(Counterexample, PairMediansAtBoundary) {
    const auto pc = corpus::pair_counterexample(0.75, 0.625, 64, true);
    EXPECT_EQ(maximal_median(pc.f.values(), pc.s), 0.0);
    EXPECT_EQ(maximal_median(pc.g.values(), pc.s1), 0.0);
    const SampledFunction sum = corpus::sum(pc.f, pc.g);
    EXPECT_EQ(maximal_median(sum.values(), pc.t), 1.0);
    // the smallest such t: one cell less and the sum-median drops back
    EXPECT_LT(maximal_median(sum.values(), pc.t - 1.0 / 64.0), 1.0);
}

TEST(Counterexample, LiteralSupportsGiveMedianOne) {
    // closed supports put exactly (1-s) of the mass at 1, so the maximal median is already 1
    const auto pc = corpus::pair_counterexample(0.75, 0.625, 64, false);
    EXPECT_EQ(maximal_median(pc.f.values(), pc.s), 1.0);
}
