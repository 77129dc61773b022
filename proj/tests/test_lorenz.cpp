#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pullback/attractors.hpp"
#include "pullback/sampling.hpp"
#include "pullback/systems/lorenz.hpp"

using namespace pullback;
using namespace pullback::lorenz;

TEST(LorenzField, ClassicValueAtOneTwoThree) {
    const auto v = lorenz_field({10.0, 8.0 / 3.0, 28.0}, {1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(v[0], 10.0);
    EXPECT_DOUBLE_EQ(v[1], 23.0);
    EXPECT_DOUBLE_EQ(v[2], -6.0);
}

TEST(LorenzField, ConstantForcingReducesToAutonomous) {
    const auto f = ForcingR::constant(28.0);
    const auto a = lorenz_field({10.0, 8.0 / 3.0, 28.0}, {1.5, -2.0, 7.0});
    const auto n = lorenz_nonauto_field(10.0, 8.0 / 3.0, f, 3.7, {1.5, -2.0, 7.0});
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], n[i], 1e-12);
}

TEST(LorenzField, ShiftedCoordinatesConjugateTheFlow) {
    const auto f = ForcingR::from_sinusoids({{28.0, 0.0, std::numbers::pi / 2}, {2.0, 1.5, 0.3}});
    const double sigma = 10.0, b = 8.0 / 3.0, t = 1.1;
    const Vec3 v{1.0, -3.0, 20.0};
    // d/dt (z - sigma - r) = z' - r', so the w-field equals the z-field minus r'.
    const auto dv = lorenz_nonauto_field(sigma, b, f, t, v);
    const auto du = lorenz_w_field(sigma, b, f, t, to_w_coords(sigma, f, t, v));
    EXPECT_NEAR(du[0], dv[0], 1e-12);
    EXPECT_NEAR(du[1], dv[1], 1e-12);
    EXPECT_NEAR(du[2], dv[2] - f.r_prime(t), 1e-12);
    const auto back = from_w_coords(sigma, f, t, to_w_coords(sigma, f, t, v));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(back[i], v[i], 1e-12);
}

TEST(LorenzBoundsTest, ConstantsMatchIndependentEvaluation) {
    // Frozen from a 30-digit evaluation of the same formulas.
    const auto bd = compute_bounds(10.0, 8.0 / 3.0, 10.5, 3.0, 28.0, 5.0);
    EXPECT_NEAR(bd.F0, 129.333333333333333, 1e-12);
    EXPECT_EQ(bd.sigma0, 1.0);
    EXPECT_NEAR(bd.absorbing_radius, 56.0029761113936992, 1e-12);
    EXPECT_NEAR(bd.R1, 137.002976111393699, 1e-11);
    EXPECT_NEAR(bd.R2, 137.127976111393699, 1e-11);
    EXPECT_NEAR(bd.R3, 597.281519077002257, 1e-10);
}

TEST(LorenzBoundsTest, SigmaZeroTakesTheMinimum) {
    EXPECT_EQ(compute_bounds(0.5, 4.0, 0.5, 4.0, 1.0, 0.0).sigma0, 0.5);
    EXPECT_EQ(compute_bounds(3.0, 1.0, 3.0, 1.0, 1.0, 0.0).sigma0, 0.5);
    EXPECT_EQ(compute_bounds(3.0, 4.0, 3.0, 4.0, 1.0, 0.0).sigma0, 1.0);
}

TEST(LorenzBoundsTest, DifferenceBoundZeroBracket) {
    const auto bd = compute_bounds(1.0, 1.0, 1.0, 1.0, 1.0, 0.0);
    EXPECT_EQ(difference_bound(bd, 1e4, 0.0, 0.0), 0.0);
    EXPECT_GT(difference_bound(bd, 0.0, 0.0, 0.1), 0.0);
}

TEST(ForcingRTest, DefaultBoundCoversValueAndDerivative) {
    const auto f = ForcingR::from_sinusoids({{28.0, 0.0, std::numbers::pi / 2}, {1.0, 3.0, 0.0}});
    EXPECT_DOUBLE_EQ(f.R0(), 31.0);
    EXPECT_TRUE(f.check_bound(-50.0, 50.0, 0.01));
    EXPECT_NEAR(f.mean(), 28.0, 1e-12);
    EXPECT_THROW(ForcingR::from_sinusoids({}), ConfigError);
}

TEST(Absorbing, BoundsHoldAtStandardParameters) {
    const auto f = ForcingR::from_sinusoids({{28.0, 0.0, std::numbers::pi / 2}, {1.0, 1.0, 0.0}});
    const auto rep = verify_absorbing_bound(10.0, 8.0 / 3.0, f, {30.0, -20.0, 10.0}, 30.0);
    EXPECT_TRUE(rep.holds());
    EXPECT_GT(rep.r1_u.samples, 2999u);
    EXPECT_LT(rep.max_v, rep.bounds.R1);
}

TEST(Absorbing, DifferenceBoundHoldsForNearbyParameters) {
    const auto f = ForcingR::constant(28.0);
    const auto rep = verify_difference_bound(10.0, 8.0 / 3.0, 10.05, 2.7, f, {1.0, 1.0, 1.0}, 2.0);
    EXPECT_TRUE(rep.holds());
    EXPECT_GT(rep.max_gap, 0.0);
}

TEST(Absorbing, BallContainsLongTrajectory) {
    const auto f = ForcingR::constant(28.0);
    const auto ball = absorbing_ball(10.0, 8.0 / 3.0, f);
    const auto p = autonomous_process();
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 28.0}};
    const auto x = evolve(p, lam, 0.0, 50.0, std::vector<double>{1.0, 1.0, 1.0});
    EXPECT_LE(std::sqrt(squared_distance(x, ball.center)), ball.radius);
}

TEST(LorenzPullback, SubcriticalSectionIsTheOrigin) {
    // For r < 1 every trajectory decays to the origin.
    const auto p = autonomous_process();
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 0.5}};
    const auto ball = absorbing_ball(10.0, 8.0 / 3.0, ForcingR::constant(0.5));
    const auto D = sample_ball(ball.center, ball.radius, 64);
    const auto sched = PullbackSchedule::geometric(0.0, 5.0, 6, 1e-6);
    const auto sec = pullback_section(p, lam, 0.0, D, sched, 2.5e-7);
    ASSERT_TRUE(sec.converged);
    // Oracle: a long forward run from a far point.
    const auto far = evolve(p, lam, -200.0, 0.0, std::vector<double>{30.0, -30.0, 60.0});
    EXPECT_LE(euclidean_norm(far), 1e-9);
    EXPECT_LE(semi_distance(sec.cloud, PointCloud(3, {0.0, 0.0, 0.0})), 1e-6);
}
