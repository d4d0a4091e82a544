#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "staircase/verification.hpp"

using namespace staircase;

namespace {

// Landscape whose gradient has the wrong sign inside even blocks.
struct NegatedEvenBlocks {
    Landscape land;

    const LandscapeParams& params() const { return land.params(); }
    Evaluation fix(RegionId r, Evaluation e) const {
        if (r.kind == RegionKind::EvenBlock) e.gradient = -1.0 * e.gradient;
        return e;
    }
    Evaluation evaluate(Point p) const { return fix(land.classify(p), land.evaluate(p)); }
    Evaluation evaluate_in(RegionId r, Point p) const { return fix(r, land.evaluate_in(r, p)); }
    double value(Point p) const { return land.value(p); }
    Point gradient(Point p) const { return evaluate(p).gradient; }
};

const LandscapeParams kDefault{1.0, 0.5, 1.0, 8};

}  // namespace

TEST(FdGradient, CentersAreStationaryUpToTheBranchKink) {
    const Landscape land(kDefault);
    const double h = 1e-5;
    for (const RegionId& r : all_regions(kDefault)) {
        if (is_buffer(r.kind)) continue;
        const Point g = fd_gradient(land, land.center(r), h);
        if (r.kind == RegionKind::FinalBlock) {
            EXPECT_NEAR(g.x1, 0.0, 1e-8);
            EXPECT_NEAR(g.x2, 0.0, 1e-8);
            continue;
        }
        // The escape axis bends with -gamma on one side and L2 on the other,
        // so the central difference is -(gamma + L2) h / 2 there.
        const int escape = travel_axis(r, kDefault.n_blocks());
        const double kink = -(kDefault.gamma + 4.0 * kDefault.L) * h / 2;
        EXPECT_NEAR(escape == 0 ? g.x1 : g.x2, kink, 1e-10);
        EXPECT_NEAR(escape == 0 ? g.x2 : g.x1, 0.0, 1e-8);
    }
}

TEST(FdGradient, MatchesAnalyticExample) {
    const Point g = fd_gradient(kDefault, {0.75, 0.5}, 1e-5);
    EXPECT_NEAR(g.x1, -0.25, 1e-9);
    EXPECT_NEAR(g.x2, 0.0, 1e-9);
}

TEST(FdGradient, RejectsBadStepAndOutsideNeighbours) {
    EXPECT_THROW(fd_gradient(kDefault, {0.5, 0.5}, 0.0), std::invalid_argument);
    EXPECT_THROW(fd_gradient(kDefault, {0.0, 0.5}, 1e-5), DomainError);
}

TEST(GradientCheck, PassesOnDefaultLandscape) {
    const CheckReport r = gradient_check(Landscape(kDefault));
    EXPECT_TRUE(r.passed) << r.worst_error;
    EXPECT_EQ(r.samples, 10000);
    EXPECT_LE(r.worst_error, 1e-6);
}

TEST(GradientCheck, ZeroSamplesIsVacuous) {
    const CheckReport r = gradient_check(Landscape(kDefault), {.n_samples = 0});
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.samples, 0);
    EXPECT_TRUE(r.witnesses.empty());
}

TEST(GradientCheck, CatchesCorruptedBranch) {
    const CheckReport r = gradient_check(NegatedEvenBlocks{Landscape(kDefault)}, {.n_samples = 2000});
    EXPECT_FALSE(r.passed);
    ASSERT_FALSE(r.witnesses.empty());
    EXPECT_EQ(classify(kDefault, r.witnesses.front().point).kind, RegionKind::EvenBlock);
    EXPECT_NE(r.witnesses.front().where.find("EvenBlock"), std::string::npos);
}

TEST(SeamScan, PassesOnDefaultLandscape) {
    const CheckReport r = seam_scan(Landscape(kDefault));
    EXPECT_TRUE(r.passed);
    ASSERT_EQ(r.parts.size(), 2u);
    EXPECT_LE(r.parts[0].worst_error, 1e-9);
    EXPECT_LE(r.parts[1].worst_error, 1e-5);
}

TEST(SeamScan, ZeroSamplesIsVacuous) {
    const CheckReport r = seam_scan(Landscape(kDefault), {.samples_per_seam = 0});
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.samples, 0);
}

TEST(SeamScan, MissingLevelOffsetBreaksExitSeams) {
    DerivedConstants c = derive_constants(kDefault);
    c.nu = 0.0;
    const CheckReport r = seam_scan(Landscape::with_constants(kDefault, c), {.samples_per_seam = 50});
    EXPECT_FALSE(r.passed);
    ASSERT_FALSE(r.witnesses.empty());
    for (const Witness& w : r.witnesses) EXPECT_NE(w.where.find("exit"), std::string::npos) << w.where;
}

TEST(SeamScan, CatchesCorruptedBranch) {
    const CheckReport r = seam_scan(NegatedEvenBlocks{Landscape(kDefault)}, {.samples_per_seam = 50});
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.parts[1].passed);
}

TEST(SeamScan, CoversEveryEdgeAndBranchLine) {
    // 2 edges per buffer, one branch line per saddle block, one per buffer
    // except the last.
    const int n = kDefault.n_blocks();
    const auto seams = interior_seams(kDefault);
    EXPECT_EQ(static_cast<int>(seams.size()), 2 * (n - 1) + kDefault.n_saddles + (n - 2));
}

TEST(StationaryCheck, CountsSaddlesAndMinimum) {
    for (int n : {8, 1}) {
        const LandscapeParams p{1.0, 0.5, 1.0, n};
        const CheckReport r = stationary_check(Landscape(p));
        EXPECT_TRUE(r.passed);
        EXPECT_EQ(r.stat("saddles_confirmed"), n);
        EXPECT_EQ(r.stat("minima_confirmed"), 1);
    }
}

TEST(GlobalMinProbe, FinalCenterIsLowest) {
    const CheckReport r = global_min_probe(Landscape(kDefault), 100'000, 1);
    EXPECT_TRUE(r.passed);
    EXPECT_DOUBLE_EQ(r.stat("f_min"), -9 * 1.125);
}

TEST(LipschitzProbe, OddBlockPairsStayBelowSteepCurvature) {
    const LipschitzEstimate e =
        lipschitz_probe(Landscape(kDefault), 20'000, 2, RegionKind::OddBlock);
    EXPECT_LE(e.estimate, 2 * 4.0 + 1e-9);
    EXPECT_GT(e.estimate, 1.0);
}

TEST(LipschitzProbe, BufferPairsAreFiniteAndBounded) {
    const LipschitzEstimate e =
        lipschitz_probe(Landscape(kDefault), 20'000, 3, RegionKind::OddToEvenBuffer);
    EXPECT_TRUE(std::isfinite(e.estimate));
    EXPECT_LE(e.estimate, e.analytic_bound);
    EXPECT_TRUE(to_report(e).passed);
    EXPECT_THROW(lipschitz_probe(Landscape(kDefault), 0, 0), std::invalid_argument);
}

TEST(Checks, DeterministicGivenSeed) {
    const Landscape land(kDefault);
    const CheckReport a = gradient_check(land, {.n_samples = 500, .seed = 9});
    const CheckReport b = gradient_check(land, {.n_samples = 500, .seed = 9});
    EXPECT_EQ(a.worst_error, b.worst_error);
    ASSERT_EQ(a.witnesses.size(), b.witnesses.size());
    for (std::size_t i = 0; i < a.witnesses.size(); ++i)
        EXPECT_EQ(a.witnesses[i].point, b.witnesses[i].point);
}

class SmoothnessGrid : public ::testing::TestWithParam<std::tuple<double, double, double, int>> {};

TEST_P(SmoothnessGrid, GradientAndSeamsPass) {
    const auto [L, gamma_div, tau, n] = GetParam();
    const LandscapeParams p{L, L / gamma_div, tau, n};
    const Landscape land(p);
    const CheckReport g = gradient_check(land, {.n_samples = 2000});
    EXPECT_TRUE(g.passed) << g.worst_error;
    const CheckReport s = seam_scan(land, {.samples_per_seam = 100});
    EXPECT_TRUE(s.passed) << s.stat("worst_value_jump") << " " << s.stat("worst_gradient_jump");
}

INSTANTIATE_TEST_SUITE_P(Parameters, SmoothnessGrid,
                         ::testing::Combine(::testing::Values(1.0, 1.5), ::testing::Values(2.0, 3.0),
                                            ::testing::Values(0.5, 1.0, 2.0),
                                            ::testing::Values(1, 5, 9)));
