#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "staircase/analysis.hpp"

using namespace staircase;

namespace {

const LandscapeParams kDefault{1.0, 0.5, 1.0, 9};

// Trajectory visiting chain orders in the given run-length pattern.
Trajectory synthetic(const LandscapeParams& p, const std::vector<std::pair<int, int>>& runs) {
    Trajectory t;
    t.params = p;
    long i = 0;
    for (const auto& [order, count] : runs) {
        for (int k = 0; k < count; ++k) {
            Iterate it;
            it.t = i++;
            it.region = order < 0 ? kOutside : region_at(p, order);
            t.iterates.push_back(it);
        }
    }
    t.total_iters = i - 1;
    return t;
}

std::vector<EscapeRecord> records_with_times(const std::vector<long>& times) {
    std::vector<EscapeRecord> out;
    long T = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        T += times[k] + 6;
        out.push_back({static_cast<int>(k + 1), times[k], 6, T, true});
    }
    return out;
}

}  // namespace

TEST(Segment, SingleBlock) {
    const auto r = segment(synthetic(kDefault, {{0, 12}}), kDefault);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].t, 12);
    EXPECT_EQ(r[0].t_prime, 0);
    EXPECT_FALSE(r[0].complete);
}

TEST(Segment, CountsLabelsByRegion) {
    const auto r = segment(synthetic(kDefault, {{0, 5}, {1, 3}, {2, 7}}), kDefault);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].t, 5);
    EXPECT_EQ(r[0].t_prime, 3);
    EXPECT_EQ(r[0].T, 8);
    EXPECT_TRUE(r[0].complete);
    EXPECT_EQ(r[1].t, 7);
    EXPECT_EQ(r[1].T, 15);
    EXPECT_FALSE(r[1].complete);
}

TEST(Segment, StrictModeRejectsRevisits) {
    const Trajectory t = synthetic(kDefault, {{0, 5}, {1, 3}, {0, 1}, {1, 2}});
    try {
        segment(t, kDefault);
        FAIL() << "expected SegmentationError";
    } catch (const SegmentationError& e) {
        EXPECT_EQ(e.offending_t(), 8);
    }
}

TEST(Segment, FirstPassageChargesTheFurthestRegion) {
    const Trajectory t = synthetic(kDefault, {{0, 5}, {1, 3}, {0, 1}, {1, 2}, {2, 4}});
    const auto r = segment(t, kDefault, SegmentMode::FirstPassage);
    EXPECT_EQ(r[0].t, 5);
    EXPECT_EQ(r[0].t_prime, 6);
    EXPECT_EQ(r[1].t, 4);
}

TEST(Segment, RejectsThinnedTrajectories) {
    Trajectory t = synthetic(kDefault, {{0, 5}});
    t.iterates.erase(t.iterates.begin() + 2);
    EXPECT_THROW(segment(t, kDefault), std::invalid_argument);
}

TEST(Segment, ConservesLengthAndTelescopesOnRealRuns) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(seed);
        const Trajectory traj = run(kDefault, GdConfig{}, std::nullopt, init_sample(kDefault, rng));
        const auto recs = segment(traj, kDefault);
        long sum = 0, T = 0;
        for (const EscapeRecord& r : recs) {
            sum += r.t + r.t_prime;
            T += r.t + r.t_prime;
            EXPECT_EQ(r.T, T);
        }
        EXPECT_EQ(sum, traj.total_iters + 1);
    }
}

TEST(Lemma1, BoundAndExamples) {
    TheoryCheck c = check_lemma1({}, kDefault, 0.25);
    EXPECT_TRUE(c.passed);
    EXPECT_TRUE(c.comparisons.empty());
    EXPECT_NE(c.note.find("8"), std::string::npos);

    c = check_lemma1({{1, 10, 8, 18, true}, {2, 20, 9, 47, true}}, kDefault, 0.25);
    EXPECT_FALSE(c.passed);
    ASSERT_NE(c.first_failure(), nullptr);
    EXPECT_EQ(c.first_failure()->index, 2);
    EXPECT_EQ(c.first_failure()->lhs, 9);
    EXPECT_EQ(c.first_failure()->rhs, 8);
}

TEST(Lemma2, FlagsOutsideIterates) {
    const TheoryCheck ok = check_lemma2(synthetic(kDefault, {{0, 5}, {1, 3}}));
    EXPECT_TRUE(ok.passed);
    const TheoryCheck bad = check_lemma2(synthetic(kDefault, {{0, 5}, {-1, 1}, {1, 3}}));
    EXPECT_FALSE(bad.passed);
    ASSERT_NE(bad.first_failure(), nullptr);
    EXPECT_EQ(bad.first_failure()->index, 5);
}

TEST(Lemma2, SkippedForNoisyRuns) {
    Trajectory t = synthetic(kDefault, {{0, 5}});
    t.noise = NoiseConfig{};
    const TheoryCheck c = check_lemma2(t);
    EXPECT_TRUE(c.skipped);
}

TEST(Theorem3, RequiresTwiceGamma) {
    EXPECT_THROW(check_theorem3({}, {1.0, 0.6, 1.0, 9}, 0.25), ParameterError);
}

TEST(Theorem3, RecurrenceOnSyntheticTimes) {
    // bound: t[k+1] > 2 t[k] - 8 and t[k+1] - 8 > 2 (t[k] - 8); t1 > 8.
    EXPECT_TRUE(check_theorem3(records_with_times({10, 13, 19, 31}), kDefault, 0.25).passed);
    const TheoryCheck bad = check_theorem3(records_with_times({10, 12, 19}), kDefault, 0.25);
    EXPECT_FALSE(bad.passed);
    EXPECT_EQ(bad.first_failure()->index, 1);
    EXPECT_FALSE(check_theorem3(records_with_times({8, 100, 300}), kDefault, 0.25).passed);
}

TEST(Theorem3, HoldsOnMeasuredRuns) {
    for (double L : {1.0, 1.5})
        for (int n : {3, 5, 7, 9})
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const LandscapeParams p{L, L / 2, 1.0, n};
                std::mt19937_64 rng(seed);
                const Trajectory traj = run(p, GdConfig{}, std::nullopt, init_sample(p, rng));
                const auto recs = segment(traj, p);
                const TheoryReport rep = theory_report(recs, traj, p, 1.0 / (4 * L));
                EXPECT_TRUE(rep.passed()) << "L " << L << " n " << n << " seed " << seed;
                EXPECT_FALSE(rep.theorem3.comparisons.empty());
            }
}

TEST(Growth, ConstantTimesGiveRatioOne) {
    const GrowthSummary g = growth_summary(records_with_times({7, 7, 7, 7}), kDefault);
    EXPECT_NEAR(g.growth_ratio, 1.0, 1e-12);
}

TEST(Growth, GeometricTimesGiveTheirRatio) {
    const GrowthSummary g = growth_summary(records_with_times({10, 30, 90, 270}), kDefault);
    EXPECT_NEAR(g.growth_ratio, 3.0, 1e-9);
    EXPECT_EQ(g.saddle_times, (std::vector<long>{10, 30, 90, 270}));
}

TEST(Growth, FloorUnrollsTheShiftedRecurrence) {
    const GrowthSummary g = growth_summary(records_with_times({10, 30, 90}), kDefault);
    // c = 8, floor_k = 8 + 2^(k-1) (10 - 8)
    ASSERT_EQ(g.floor_per_block.size(), 9u);
    EXPECT_EQ(g.floor_per_block[0], 10);
    EXPECT_EQ(g.floor_per_block[3], 24);
    EXPECT_EQ(g.floor_completed, 10 + 12 + 16);
    EXPECT_EQ(g.measured_completed, 130 + 18);
    EXPECT_TRUE(g.completed_exceeds_floor);
    EXPECT_FALSE(g.hitting_time.has_value());
    EXPECT_TRUE(g.exceeds_floor);
}

TEST(Growth, PermutationStable) {
    auto recs = records_with_times({10, 31, 97, 260});
    const double a = growth_summary(recs, kDefault).growth_ratio;
    std::reverse(recs.begin(), recs.end());
    EXPECT_EQ(growth_summary(recs, kDefault).growth_ratio, a);
}

TEST(Growth, NeedsThreeCompletedBlocks) {
    EXPECT_THROW(growth_summary(records_with_times({10, 30}), kDefault), InsufficientData);
    EXPECT_THROW(growth_summary({}, kDefault), InsufficientData);
}

TEST(DetectStall, SaddleCenterStart) {
    const Trajectory t = run(kDefault, GdConfig{}, std::nullopt, Point{0.5, 0.5});
    const auto s = detect_stall(t, kDefault);
    ASSERT_TRUE(s.has_value());
    EXPECT_EQ(s->t, 0);
}

TEST(DetectStall, NoneOnASuccessfulShortRun) {
    const LandscapeParams p{1.0, 0.5, 1.0, 1};
    std::mt19937_64 rng(0);
    const Trajectory t = run(p, GdConfig{}, std::nullopt, init_sample(p, rng));
    EXPECT_EQ(t.outcome, Outcome::ReachedMinimum);
    EXPECT_FALSE(detect_stall(t, p).has_value());
}

TEST(DetectStall, LongChainSticksBeforeTheFinalBlock) {
    const LandscapeParams p{1.0, 0.5, 1.0, 12};
    std::mt19937_64 rng(0);
    const Trajectory t = run(p, GdConfig{}, std::nullopt, init_sample(p, rng));
    const auto s = detect_stall(t, p);
    ASSERT_TRUE(s.has_value());
    EXPECT_FALSE(t.final_block_entry.has_value());
    EXPECT_TRUE(is_saddle_block(s->region.kind) || is_buffer(s->region.kind));
}

TEST(TheoryReport, NoisyRunsSkipTheDescentClaims) {
    std::mt19937_64 rng(1);
    const Point start = init_sample(kDefault, rng);
    ResidenceTally tally(kDefault, SegmentMode::FirstPassage);
    const Trajectory t = run(kDefault, GdConfig{}, NoiseConfig{0.1, 1, false}, start, tally);
    const TheoryReport rep = theory_report(tally.records(), t, kDefault, 0.25);
    EXPECT_TRUE(rep.lemma1.skipped);
    EXPECT_TRUE(rep.lemma2.skipped);
    EXPECT_TRUE(rep.theorem3.skipped);
    EXPECT_TRUE(rep.passed());
}
