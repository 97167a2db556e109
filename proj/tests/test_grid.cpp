#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "medianosc/grid.hpp"

using namespace medianosc;

TEST(Grid, MeasureOfSubcubes) {
    const GridFrame line = unit_frame(1, 8);
    EXPECT_DOUBLE_EQ(measure(line, CubeRegion{1, {0}, 8}), 1.0);
    EXPECT_DOUBLE_EQ(measure(line, CubeRegion{1, {2}, 2}), 0.25);
    const GridFrame square = unit_frame(2, 8);
    EXPECT_DOUBLE_EQ(measure(square, CubeRegion{2, {4, 2}, 2}), 0.0625);
}

TEST(Grid, FrameInvariants) {
    const GridFrame f = unit_frame(2, 16);
    EXPECT_EQ(f.cell_count(), 256u);
    EXPECT_DOUBLE_EQ(f.cell_volume(), 1.0 / 256.0);
    for (std::size_t c = 0; c < f.cell_count(); ++c) EXPECT_EQ(f.linear(f.unravel(c)), c);
}

TEST(Grid, RejectsNonFiniteValues) {
    std::vector<double> v(4, 0.0);
    v[2] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(SampledFunction(unit_frame(1, 4), v), Error);
    EXPECT_THROW(SampledFunction(unit_frame(1, 4), std::vector<double>(3, 0.0)), Error);
}

TEST(Grid, SubdivideHalvesAndPartitions) {
    const auto kids1 = subdivide(CubeRegion{1, {0}, 8});
    ASSERT_EQ(kids1.size(), 2u);
    EXPECT_EQ(kids1[0].len, 4u);
    EXPECT_EQ(kids1[1].lo[0], 4u);

    const CubeRegion parent{2, {4, 0}, 4};
    const auto kids2 = subdivide(parent);
    ASSERT_EQ(kids2.size(), 4u);
    const GridFrame frame = unit_frame(2, 8);
    std::multiset<std::size_t> cells;
    for (const auto& k : kids2) {
        EXPECT_EQ(k.len, 2u);
        EXPECT_DOUBLE_EQ(measure(frame, k), measure(frame, parent) / 4.0);
        for (auto c : cell_indices(frame, k)) cells.insert(c);
    }
    const auto all = cell_indices(frame, parent);
    EXPECT_EQ(cells, std::multiset<std::size_t>(all.begin(), all.end()));
}

TEST(Grid, SubdivideSingleCellThrows) {
    try {
        subdivide(CubeRegion{1, {3}, 1});
        FAIL() << "expected IndivisibleCube";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndivisibleCube);
    }
}

TEST(Grid, FamilyCounts) {
    const SampledFunction f4(unit_frame(1, 4), std::vector<double>(4, 0.0));
    EXPECT_EQ(enumerate_cubes(f4, CubeFamily::All).size(), 10u);
    EXPECT_EQ(enumerate_cubes(f4, CubeFamily::Dyadic).size(), 7u);
    const SampledFunction f2(unit_frame(2, 2), std::vector<double>(4, 0.0));
    EXPECT_EQ(enumerate_cubes(f2, CubeFamily::All).size(), 5u);
}

TEST(Grid, FamilyNesting) {
    const CubeRegion r{2, {}, 8};
    auto as_set = [&](CubeFamily fam) {
        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> out;
        for (const auto& q : enumerate_cubes(r, fam)) out.insert({q.len, q.lo[0], q.lo[1]});
        return out;
    };
    const auto d = as_set(CubeFamily::Dyadic), ds = as_set(CubeFamily::DyadicShifted), a = as_set(CubeFamily::All);
    EXPECT_TRUE(std::includes(ds.begin(), ds.end(), d.begin(), d.end()));
    EXPECT_TRUE(std::includes(a.begin(), a.end(), ds.begin(), ds.end()));
    EXPECT_EQ(family_size(r, CubeFamily::All), a.size());
}

TEST(Grid, EnumerationCap) {
    const CubeRegion r{2, {}, 64};
    EXPECT_THROW(enumerate_cubes(r, CubeFamily::All, EnumerationLimits{1000}), Error);
}

TEST(Grid, RefinePreservesValues) {
    std::vector<double> v{1, 2, 3, 4};
    const SampledFunction f(unit_frame(1, 4), v);
    const SampledFunction g = refine(f, CubeRegion{1, {1}, 2}, 3);
    ASSERT_EQ(g.size(), 6u);
    EXPECT_EQ(std::vector<double>(g.values().begin(), g.values().end()), (std::vector<double>{2, 2, 2, 3, 3, 3}));
    EXPECT_DOUBLE_EQ(g.frame().origin[0], 0.25);
    EXPECT_DOUBLE_EQ(g.frame().side, 0.5);
}
