#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ceapsk/channel.hpp"
#include "ceapsk/constellation.hpp"
#include "ceapsk/precoder.hpp"
#include "ceapsk/rng.hpp"

using namespace ceapsk;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

cdouble random_target(const Annulus& a, StreamRng& rng) {
    const double u = rng.uniform();
    const double mod = std::sqrt(a.inner * a.inner + u * (a.outer * a.outer - a.inner * a.inner));
    return std::polar(mod, kTwoPi * rng.uniform());
}
}  // namespace

TEST(Precoder, ReconstructsRandomTargets) {
    for (const std::size_t m : {1u, 2u, 3u, 4u, 8u}) {
        for (int c = 0; c < 300; ++c) {
            StreamRng rng(21, static_cast<std::uint64_t>(c), Substream::General);
            const auto h = sample_rayleigh(m, 1.0, rng);
            const double power = 0.5 + rng.uniform();
            const Annulus a = compute_annulus(h, power);
            for (int k = 0; k < 20; ++k) {
                const cdouble target = random_target(a, rng);
                const PhaseSolution s = map_point_to_phases(h, power, target);
                ASSERT_EQ(s.phases.size(), m);
                for (const double p : s.phases) {
                    EXPECT_GE(p, 0.0);
                    EXPECT_LT(p, kTwoPi);
                }
                EXPECT_LT(s.residual_error, 1e-9 * a.outer) << "M=" << m;
                EXPECT_NEAR(std::abs(synthesize(h, power, s.phases) - target), s.residual_error, 1e-15);
            }
        }
    }
}

TEST(Precoder, AnnulusBoundaries) {
    const ChannelRealization h{{cdouble(1.0, 0.0), cdouble(0.0, 0.6), cdouble(-0.3, 0.1)}};
    const Annulus a = compute_annulus(h, 3.0);
    for (const double mod : {a.inner, a.outer, 0.5 * (a.inner + a.outer)}) {
        for (int k = 0; k < 16; ++k) {
            const auto s = map_point_to_phases(h, 3.0, std::polar(mod, kTwoPi * k / 16));
            EXPECT_LT(s.residual_error, 1e-12 * a.outer) << mod;
        }
    }
}

TEST(Precoder, RotatingTargetRotatesPhases) {
    StreamRng rng(5, 0, Substream::General);
    const auto h = sample_rayleigh(4, 1.0, rng);
    const Annulus a = compute_annulus(h, 1.0);
    const cdouble t = std::polar(0.5 * (a.inner + a.outer), 0.3);
    const auto s0 = map_point_to_phases(h, 1.0, t);
    const auto s1 = map_point_to_phases(h, 1.0, t * std::polar(1.0, 1.1));
    for (std::size_t i = 0; i < 4; ++i) {
        const double d = std::remainder(s1.phases[i] - s0.phases[i] - 1.1, kTwoPi);
        EXPECT_NEAR(d, 0.0, 1e-9);
    }
}

TEST(Precoder, InfeasibleTargetsThrow) {
    const ChannelRealization h{{cdouble(1.0, 0.0), cdouble(0.5, 0.0)}};
    const Annulus a = compute_annulus(h, 2.0);
    EXPECT_THROW(map_point_to_phases(h, 2.0, a.outer * 1.01), InfeasibleTarget);
    EXPECT_THROW(map_point_to_phases(h, 2.0, a.inner * 0.99), InfeasibleTarget);
    try {
        map_point_to_phases(h, 2.0, 0.0);
        FAIL();
    } catch (const InfeasibleTarget& e) {
        EXPECT_DOUBLE_EQ(e.modulus(), 0.0);
        EXPECT_DOUBLE_EQ(e.annulus().inner, a.inner);
    }
    EXPECT_THROW(map_point_to_phases(ChannelRealization{{0.0, 0.0}}, 1.0, 0.0), InfeasibleTarget);
}

TEST(Precoder, ClippingProjectsRadially) {
    const Annulus a{0.5, 2.0, 0.25};
    EXPECT_NEAR(std::abs(clip_to_annulus(cdouble(3.0, 4.0), a)), 2.0, 1e-15);
    EXPECT_NEAR(std::arg(clip_to_annulus(cdouble(3.0, 4.0), a)), std::atan2(4.0, 3.0), 1e-15);
    EXPECT_NEAR(std::abs(clip_to_annulus(cdouble(0.1, 0.0), a)), 0.5, 1e-15);
    EXPECT_EQ(clip_to_annulus(cdouble(0.0, 0.0), a), cdouble(0.5, 0.0));
    EXPECT_EQ(clip_to_annulus(cdouble(1.0, 1.0), a), cdouble(1.0, 1.0));
}

TEST(Precoder, RealizeWithClipping) {
    // 16-QAM does not fit a ratio-1/2 annulus; clipping makes it realizable.
    const ChannelRealization h{{cdouble(1.0, 0.0), cdouble(1.0 / 3.0, 0.0)}};
    const Annulus a = compute_annulus(h, 2.0);
    ASSERT_NEAR(a.ratio, 0.5, 1e-15);
    const auto qam = qam_family(16).points;
    for (const auto s : qam) {
        const auto sol = realize_symbol(h, 2.0, s, a.outer, Clipping::Radial);
        EXPECT_LT(sol.residual_error, 1e-9 * a.outer);
        EXPECT_TRUE(a.contains(std::abs(sol.target), 1e-12));
    }
    EXPECT_THROW(realize_symbol(h, 2.0, qam[5], a.outer, Clipping::Off), InfeasibleTarget);
}

TEST(Egt, AlignsPhases) {
    const ChannelRealization h{{cdouble(0.0, 2.0), cdouble(-1.0, 0.0)}};
    const cdouble y = egt_transmit(h, 2.0, cdouble(0.5, 0.5));
    EXPECT_NEAR(std::abs(y - 3.0 * cdouble(0.5, 0.5)), 0.0, 1e-15);
}
