#include <gtest/gtest.h>

#include <cmath>

#include "evgrow/meanset.hpp"

using namespace evgrow;

TEST(MeanSet, SeparationValidatedAtConstruction) {
    EXPECT_THROW(MeanSet::half_space(vec2(1.0, 0.0), 0.0), Degenerate);
    EXPECT_THROW(MeanSet::half_space(vec2(1.0, 0.0), -1.0), Degenerate);
    EXPECT_THROW(MeanSet::interval(-1.0, 1.0), Degenerate);
    EXPECT_THROW(MeanSet::interval(0.0, 2.0), Degenerate);
    EXPECT_THROW(MeanSet::polytope({{vec2(1.0, 0.0), -1.0}, {vec2(0.0, 1.0), 0.0}}),
                 Degenerate);
    EXPECT_THROW(MeanSet::surround_interval(0.5, 1.0), Degenerate);
    EXPECT_THROW(MeanSet::surround_kl_ball(0.0), Degenerate);
}

TEST(MeanSet, HalfSpaceNormalizesItsNormal) {
    const auto set = MeanSet::half_space(vec2(2.0, 0.0), 4.0);
    const auto fam = gaussian_location(2);
    EXPECT_TRUE(set.contains(fam, vec2(2.0, 5.0)));   // boundary counts as inside
    EXPECT_FALSE(set.contains(fam, vec2(1.999999, 0.0)));
}

TEST(MeanSet, ClosedMembership) {
    const auto fam = gaussian_location(1);
    const auto iv = MeanSet::interval(1.0, kInf);
    EXPECT_TRUE(iv.contains(fam, vec1(1.0)));
    EXPECT_FALSE(iv.contains(fam, vec1(0.999999999)));

    const auto sur = MeanSet::surround_interval(-0.5, 1.5);
    EXPECT_TRUE(sur.contains(fam, vec1(-0.5)));
    EXPECT_TRUE(sur.contains(fam, vec1(1.5)));
    EXPECT_FALSE(sur.contains(fam, vec1(0.0)));
    EXPECT_FALSE(sur.contains(fam, vec1(1.49)));
}

TEST(MeanSet, KlBallBoundaryRadiusGaussian) {
    const auto fam = gaussian_location(2);
    const auto ball = MeanSet::surround_kl_ball(0.5);
    // for the unit Gaussian the D1-KL ball is the Euclidean ball of radius
    // sqrt(2 D1)
    const double a = std::sqrt(2.0 * 0.5);
    for (double phi : {0.0, 0.4, 2.0, -1.3}) {
        const Vec u = vec2(std::cos(phi), std::sin(phi));
        EXPECT_NEAR(boundary_radius(fam, ball, u), a, 1e-9);
    }
    EXPECT_TRUE(ball.contains(fam, vec2(1.0, 0.0)));
    EXPECT_FALSE(ball.contains(fam, vec2(0.7, 0.0)));
    EXPECT_FALSE(ball.contains(fam, vec2(0.0, 0.0)));
}

TEST(MeanSet, SurroundEndpoints1d) {
    const auto fam = gaussian_location(1);
    const auto ball = MeanSet::surround_kl_ball(0.5);
    const auto [lo, hi] = surround_endpoints_1d(fam, ball);
    EXPECT_NEAR(lo, -1.0, 1e-9);
    EXPECT_NEAR(hi, 1.0, 1e-9);

    const auto sur = MeanSet::surround_interval(-0.25, 2.0);
    const auto [slo, shi] = surround_endpoints_1d(fam, sur);
    EXPECT_DOUBLE_EQ(slo, -0.25);
    EXPECT_DOUBLE_EQ(shi, 2.0);
}

TEST(MeanSet, NotNiceWhenBoundaryExitsMeanSpace) {
    const auto fam = scaled_bernoulli(0.3);
    // the one-sided KL limit towards the upper corner is -log p ~ 1.204
    const auto ball = MeanSet::surround_kl_ball(2.0);
    EXPECT_THROW(boundary_radius(fam, ball, vec1(1.0)), NotNice);
    const auto wide = MeanSet::surround_interval(-1.0, 4.0);
    EXPECT_THROW(boundary_radius(fam, wide, vec1(1.0)), NotNice);
}

TEST(MeanSet, RadialVariant) {
    const auto fam = gaussian_location(2);
    const auto set = MeanSet::surround_radial([](const Vec& u) {
        return 1.0 + 0.25 * u[0] * u[0];  // mild angular modulation
    });
    EXPECT_NEAR(boundary_radius(fam, set, vec2(1.0, 0.0)), 1.25, 1e-12);
    EXPECT_NEAR(boundary_radius(fam, set, vec2(0.0, 1.0)), 1.0, 1e-12);
    EXPECT_TRUE(set.contains(fam, vec2(2.0, 0.0)));
    EXPECT_FALSE(set.contains(fam, vec2(1.1, 0.0)));
}
