#include "fixtures.hpp"

#include "swipt/intervals.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace swipt;

namespace {

std::vector<int> ends(const std::vector<Segment>& s) {
    std::vector<int> v;
    for (const auto& x : s) v.push_back(x.end);
    return v;
}

std::vector<double> levels(const std::vector<Segment>& s) {
    std::vector<double> v;
    for (const auto& x : s) v.push_back(x.level);
    return v;
}

} // namespace

TEST(ChangingSlots, RisingThenFalling) {
    auto s = changing_slots({1, 5, 3});
    EXPECT_EQ(ends(s), (std::vector<int>{1, 3}));
    EXPECT_EQ(levels(s), (std::vector<double>{1, 4}));
}

TEST(ChangingSlots, FallingProfileIsOneSegment) {
    auto s = changing_slots({5, 1});
    EXPECT_EQ(ends(s), (std::vector<int>{2}));
    EXPECT_EQ(levels(s), (std::vector<double>{3}));
}

TEST(ChangingSlots, ConstantProfileTiesToLargestIndex) {
    auto s = changing_slots({3, 3, 3});
    EXPECT_EQ(ends(s), (std::vector<int>{3}));
    EXPECT_EQ(levels(s), (std::vector<double>{3}));
}

TEST(ChangingSlots, LeadingZerosGiveZeroLevel) {
    auto s = changing_slots({0, 0, 2, 4});
    EXPECT_EQ(ends(s), (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(levels(s), (std::vector<double>{0, 2, 4}));
}

TEST(ChangingSlots, RejectsEmptyAndNegative) {
    EXPECT_THROW(changing_slots({}), std::invalid_argument);
    EXPECT_THROW(changing_slots({1, -1}), std::invalid_argument);
}

TEST(ChangingSlots, LevelsRiseAndStayCausal) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const int N = 1 + k % 12;
        RMat E = fx::rand_profile(1, N, rng, 0.25);
        std::vector<double> e(E.data(), E.data() + N);
        auto s = changing_slots(e);
        ASSERT_EQ(s.back().end, N);
        for (size_t i = 1; i < s.size(); ++i) {
            EXPECT_GT(s[i].end, s[i - 1].end);
            EXPECT_GT(s[i].level, s[i - 1].level);
        }
        double used = 0, got = 0;
        int seg = 0;
        for (int n = 0; n < N; ++n) {
            if (n + 1 > s[seg].end) ++seg;
            used += s[seg].level;
            got += e[n];
            EXPECT_LE(used, got + 1e-9);
        }
        EXPECT_NEAR(used, got, 1e-9);
    }
}

TEST(Merge, UnionOfBoundaries) {
    IntervalPartition p = merge({{2, 5}, {3, 5}}, 5);
    EXPECT_EQ(p.boundaries, (std::vector<int>{2, 3, 5}));
    EXPECT_EQ(p.lengths, (std::vector<int>{2, 1, 2}));
    EXPECT_EQ(p.start(1), 2);
}

TEST(Merge, IdenticalListsUnchanged) {
    IntervalPartition p = merge({{1, 4}, {1, 4}}, 4);
    EXPECT_EQ(p.boundaries, (std::vector<int>{1, 4}));
    EXPECT_EQ(p.lengths, (std::vector<int>{1, 3}));
}

TEST(Merge, OutOfRangeThrows) {
    EXPECT_THROW(merge({{0, 3}}, 3), std::invalid_argument);
    EXPECT_THROW(merge({{4}}, 3), std::invalid_argument);
}

TEST(Merge, ContainsEveryPerBsBoundary) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 50; ++k) {
        RMat E = fx::rand_profile(3, 10, rng);
        IntervalPartition p = partition_of(E);
        EXPECT_EQ(p.boundaries.back(), 10);
        int total = 0;
        for (int I : p.lengths) total += I;
        EXPECT_EQ(total, 10);
        for (const auto& v : p.per_bs_changing_slots)
            for (int n : v) EXPECT_TRUE(std::count(p.boundaries.begin(), p.boundaries.end(), n));
    }
}

TEST(CumulativeCaps, SumsUpToEachBoundary) {
    RMat E(2, 4);
    E << 1, 2, 3, 4, 0, 1, 0, 1;
    IntervalPartition p = partition_from_boundaries({1, 3}, 4);
    RMat C = cumulative_caps(E, p);
    ASSERT_EQ(C.cols(), 3);
    EXPECT_EQ(C(0, 0), 1);
    EXPECT_EQ(C(0, 1), 6);
    EXPECT_EQ(C(0, 2), 10);
    EXPECT_EQ(C(1, 1), 1);
    EXPECT_EQ(C(1, 2), 2);
}
