#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ceapsk/optimizer.hpp"
#include "ceapsk/rng.hpp"
#include "oracles.hpp"

using namespace ceapsk;

namespace {
constexpr double kPi = std::numbers::pi;

double spacing(int n) { return 1.0 - std::cos(2.0 * kPi / n); }
}  // namespace

TEST(PhaseOffset, Examples) {
    const auto a = solve_p21(16, 5);
    EXPECT_NEAR(a.omega_over_pi(), 0.0182, 5e-5);
    EXPECT_EQ(a.omega_num, 1);
    EXPECT_EQ(a.omega_den, 55);

    const auto b = solve_p21(16, 8);
    EXPECT_NEAR(b.omega_over_pi(), 0.125, 1e-15);
    EXPECT_NEAR(b.c12, std::cos(kPi / 8), 1e-15);

    const auto c = solve_p21(2, 1);
    EXPECT_NEAR(c.omega2, kPi, 1e-15);
    EXPECT_NEAR(c.c12, -1.0, 1e-15);
}

TEST(PhaseOffset, BreakpointInvariants) {
    for (const int n : {8, 16, 32}) {
        for (int n2 = 1; n2 <= n / 2; ++n2) {
            const auto s = solve_p21(n, n2);
            const int n1 = n - n2;
            const double unit = 2.0 * kPi / (static_cast<double>(n1) * n2);
            ASSERT_GE(s.breakpoints.size(), 2u);
            EXPECT_EQ(s.breakpoints.front(), 0);
            EXPECT_EQ(s.breakpoints.back(), -static_cast<std::int64_t>(n2));
            for (std::size_t k = 1; k < s.breakpoints.size(); ++k)
                EXPECT_GT(s.breakpoints[k - 1], s.breakpoints[k]);
            const double xk = unit * static_cast<double>(s.breakpoints[s.k_star]);
            const double xk1 = unit * static_cast<double>(s.breakpoints[s.k_star + 1]);
            EXPECT_NEAR(s.c12, std::cos((xk - xk1) / 2.0), 1e-12);
            EXPECT_NEAR(s.omega2, -(xk + xk1) / 2.0, 1e-12);
            EXPECT_GE(s.omega2, 0.0);
            EXPECT_LE(s.omega2, 2.0 * kPi / n1 + 1e-15);
            EXPECT_GE(s.c12, std::cos(kPi / n1) - 1e-15);
            EXPECT_LT(s.c12, 1.0);
        }
    }
}

TEST(PhaseOffset, MatchesDenseSearch) {
    for (const int n : {8, 16}) {
        for (int n2 = 1; n2 < n; ++n2) {
            const auto s = solve_p21(n, n2);
            const auto o = oracle::min_worst_cosine(n - n2, n2, 20000);
            EXPECT_NEAR(s.c12, o.c, 1e-6) << n << "/" << n2;
            EXPECT_NEAR(oracle::worst_cosine(n - n2, n2, s.omega2), s.c12, 1e-12);
        }
    }
}

TEST(PhaseOffset, RejectsOutOfRange) {
    EXPECT_THROW(solve_p21(16, 0), std::invalid_argument);
    EXPECT_THROW(solve_p21(16, 16), std::invalid_argument);
}

TEST(RadiusRegionOne, FigureCases) {
    const auto b1 = ring_spacing_term(10), b2 = ring_spacing_term(6);
    const auto i = find_rho2_region1(b1, b2, solve_p21(16, 6).c12, 0.25);
    EXPECT_EQ(i.case_tag, RadiusCase::I_i);

    const auto p4 = solve_p21(16, 4);
    const auto iii = find_rho2_region1(ring_spacing_term(12), ring_spacing_term(4), p4.c12, 0.55);
    EXPECT_EQ(iii.case_tag, RadiusCase::I_iii);
    EXPECT_DOUBLE_EQ(iii.rho2, 0.55);
    EXPECT_NEAR(iii.d_min, std::sqrt(0.55 * 0.55 + 1.0 - 2.0 * 0.55 * p4.c12), 1e-12);

    const auto iv = find_rho2_region1(ring_spacing_term(12), ring_spacing_term(4), p4.c12, 0.45);
    EXPECT_EQ(iv.case_tag, RadiusCase::I_iv);
    EXPECT_NEAR(iv.d_min, std::sqrt(2.0 * spacing(12)), 1e-12);
}

TEST(RadiusRegionOne, OptimumAgainstRhoScan) {
    StreamRng rng(4, 0, Substream::General);
    for (int t = 0; t < 200; ++t) {
        const int n = 16;
        const int n2 = 1 + static_cast<int>(rng.below(8));
        const auto p = solve_p21(n, n2);
        const double ratio = rng.uniform() * p.c12;
        const auto s = find_rho2_region1(ring_spacing_term(n - n2), ring_spacing_term(n2), p.c12, ratio);
        EXPECT_GE(s.rho2, ratio - 1e-15);
        EXPECT_LE(s.rho2, p.c12 + 1e-15);
        EXPECT_NEAR(s.d_min, oracle::two_ring_med(n - n2, n2, s.rho2, p.c12), 1e-12);
        double scan = 0.0;
        for (int i = 0; i <= 20000; ++i) {
            const double rho = ratio + (p.c12 - ratio) * i / 20000.0;
            scan = std::max(scan, oracle::two_ring_med(n - n2, n2, rho, p.c12));
        }
        EXPECT_GE(s.d_min, scan - 1e-9) << n2 << " " << ratio;
    }
}

TEST(RadiusRegionOne, RejectsCaseOneInputs) {
    EXPECT_THROW(find_rho2_region1(ring_spacing_term(8), ring_spacing_term(8), 0.5, 0.6),
                 std::invalid_argument);
    EXPECT_THROW(find_rho2_region1(std::nullopt, ring_spacing_term(8), 0.9, 0.2),
                 std::invalid_argument);
}

TEST(SolveP2, TableExamples) {
    const auto r1 = solve_p2(16, 0.4);
    EXPECT_EQ(r1.inner_count, 5);
    EXPECT_NEAR(r1.rho2(), 0.4603, 5e-5);
    EXPECT_NEAR(r1.phase.omega_over_pi(), 0.0182, 5e-5);
    EXPECT_NEAR(r1.d_min, 0.5411, 5e-5);

    const auto r3 = solve_p2(16, 0.5);
    EXPECT_EQ(r3.inner_count, 4);
    EXPECT_NEAR(r3.rho2(), 0.5176, 5e-5);
    EXPECT_NEAR(r3.phase.omega_over_pi(), 0.0833, 5e-5);
    EXPECT_NEAR(r3.d_min, 0.5176, 5e-5);

    const auto r7 = solve_p2(16, 0.9);
    EXPECT_EQ(r7.inner_count, 8);
    EXPECT_DOUBLE_EQ(r7.rho2(), 1.0);
    EXPECT_NEAR(r7.d_min, 2.0 * std::sin(kPi / 16), 1e-12);
}

TEST(SolveP2, DegenerateSizes) {
    for (const double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        EXPECT_NEAR(solve_p2(2, x).d_min, 2.0, 1e-12);
        EXPECT_NEAR(solve_p2(4, x).d_min, std::sqrt(2.0), 1e-12);
    }
    EXPECT_THROW(P2Solver(1), std::invalid_argument);
    EXPECT_THROW(P2Solver(7), std::invalid_argument);
    EXPECT_THROW(solve_p2(16, 1.5), std::invalid_argument);
    EXPECT_THROW(solve_p2(16, -0.1), std::invalid_argument);
}

TEST(SolveP2, FeasibleAndMonotone) {
    for (const int n : {8, 16, 32}) {
        const P2Solver solver(n);
        double prev = 1e9;
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            const auto s = solver.solve(x);
            EXPECT_GE(s.constellation.points().modulus_ratio(), x - 1e-12);
            EXPECT_NEAR(oracle::med(s.constellation.points().points), s.d_min, 1e-9);
            EXPECT_LE(s.d_min, prev + 1e-12);
            prev = s.d_min;
        }
    }
}

TEST(SolveP2, NoBetterGridPoint) {
    StreamRng rng(8, 0, Substream::General);
    for (int t = 0; t < 10; ++t) {
        const double x = rng.uniform();
        EXPECT_GE(solve_p2(8, x).d_min, oracle::grid_best_med(8, x, 400, 400) - 1e-3) << x;
    }
}

TEST(RegionTable, SixteenMatchesPublishedLayout) {
    const RegionTable t = build_region_table(16, 1e-4);
    ASSERT_EQ(t.regions.size(), 7u);
    const double bounds[] = {0.4603, 0.4839, 0.5176, 0.5588, 0.6302, 0.8477};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(t.regions[i].ratio_hi, bounds[i], 1e-4);
    const int n2[] = {5, 5, 4, 4, 8, 8, 8};
    for (int i = 0; i < 7; ++i) {
        EXPECT_EQ(t.regions[i].inner_count, n2[i]);
        EXPECT_EQ(t.regions[i].rho_rule, i % 2 == 0 ? RadiusRule::Constant : RadiusRule::TracksRatio);
    }
    EXPECT_EQ(t.regions.front().ratio_lo, 0.0);
    EXPECT_EQ(t.regions.back().ratio_hi, 1.0);
}

TEST(RegionTable, PartitionAndConsistency) {
    for (const int n : {2, 4, 6, 8, 16, 32}) {
        const RegionTable t = build_region_table(n, 1e-3);
        for (std::size_t i = 1; i < t.regions.size(); ++i)
            EXPECT_EQ(t.regions[i].ratio_lo, t.regions[i - 1].ratio_hi);
        const P2Solver solver(n);
        for (int i = 0; i <= 2000; ++i) {
            const double x = i / 2000.0;
            const double expect = solver.solve(x).d_min;
            EXPECT_NEAR(t.d_min_at(x), expect, 1e-9) << n << " " << x;
            const auto c = t.lookup(x).constellation_at(x);
            EXPECT_NEAR(oracle::med(c.points().points), expect, 1e-9) << n << " " << x;
            EXPECT_GE(c.points().modulus_ratio(), x - 1e-12);
        }
    }
}

TEST(RegionTable, SmallSizesAreSingleRegion) {
    EXPECT_EQ(build_region_table(2, 1e-3).regions.size(), 1u);
    EXPECT_EQ(build_region_table(4, 1e-3).regions.size(), 1u);
    EXPECT_NEAR(build_region_table(2, 1e-3).regions[0].d_min, 2.0, 1e-12);
    EXPECT_THROW(build_region_table(16, 0.0), std::invalid_argument);
}

TEST(SuboptimalTable, TwoRegions) {
    const RegionTable opt = build_region_table(16, 1e-4);
    const RegionTable sub = build_suboptimal_table(opt);
    ASSERT_EQ(sub.regions.size(), 2u);
    EXPECT_TRUE(sub.suboptimal);
    EXPECT_EQ(sub.regions[0].ratio_hi, opt.regions[0].ratio_hi);
    EXPECT_EQ(sub.regions[1].ratio_hi, 1.0);
    EXPECT_NEAR(sub.regions[1].d_min, 2.0 * std::sin(kPi / 16), 1e-12);

    const RegionTable four = build_region_table(4, 1e-3);
    EXPECT_EQ(build_suboptimal_table(four).regions.size(), 1u);

    // N = 8: the second region is two interleaved 4-point rings, i.e. 8-PSK.
    const RegionTable s8 = build_suboptimal_table(build_region_table(8, 1e-4));
    ASSERT_EQ(s8.regions.size(), 2u);
    const auto pts = s8.regions[1].constellation_at(0.9).points().points;
    const auto psk = psk_points(8).points;
    for (const auto p : psk) {
        double best = 1e9;
        for (const auto q : pts) best = std::min(best, std::abs(p - q));
        EXPECT_LT(best, 1e-12);
    }
}

TEST(RegionProbabilities, SumToOne) {
    const RegionTable t = build_region_table(16, 1e-3);
    const auto p = region_probabilities(t, 2, 20000, 1);
    double s = 0.0;
    for (const double v : p) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NEAR(p[0], 0.7596, 0.015);
    EXPECT_THROW(region_probabilities(t, 2, 0, 1), std::invalid_argument);
}
