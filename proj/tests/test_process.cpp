#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pullback/process.hpp"
#include "pullback/systems/benchmarks.hpp"
#include "pullback/systems/lorenz.hpp"

using namespace pullback;

namespace {

VectorField decay() {
    return [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
}

}  // namespace

TEST(Evolve, ExponentialDecayMatchesClosedForm) {
    const auto x = evolve_field(decay(), 1, 1e6, {}, 0.0, 1.0, std::vector<double>{1.0});
    EXPECT_NEAR(x[0], std::exp(-1.0), 1e-9);
}

TEST(Evolve, ForcedLinearTracksParticularSolution) {
    const std::vector<lorenz::Sinusoid> g{{1.0, 1.0, 0.0}};
    const auto p = benchmarks::linear_process(g);
    const ParameterPoint lam{{"lambda", 2.0}};
    const double x0 = benchmarks::linear_benchmark_particular(2.0, g, -3.0);
    const auto x = evolve(p, lam, -3.0, 4.0, std::vector<double>{x0});
    EXPECT_NEAR(x[0], benchmarks::linear_benchmark_particular(2.0, g, 4.0), 1e-9);
}

TEST(Evolve, IdentityAtEqualTimes) {
    const auto p = lorenz::autonomous_process();
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 28.0}};
    const std::vector<double> x0{1.2345678901234567, -9.87654321, 33.3};
    EXPECT_EQ(evolve(p, lam, 2.5, 2.5, x0), x0);
}

TEST(Evolve, CocycleOnLorenz) {
    const auto p = lorenz::nonautonomous_process(lorenz::ForcingR::from_sinusoids({{28.0, 0.0, M_PI / 2}, {1.0, 1.0, 0.0}}));
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}};
    const IntegratorConfig cfg;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double s = 3.0 * u(rng);
        const double tau = s + 0.5 * (1.0 + u(rng));
        const double t = tau + 0.5 * (1.0 + u(rng));
        const std::vector<double> x0{10 * u(rng), 10 * u(rng), 25 + 10 * u(rng)};
        const auto direct = evolve(p, lam, s, t, x0, cfg);
        const auto two = evolve(p, lam, tau, t, evolve(p, lam, s, tau, x0, cfg), cfg);
        const double scale = 1.0 + euclidean_norm(direct);
        EXPECT_LE(std::sqrt(squared_distance(direct, two)), 10.0 * cfg.rel_tol * scale);
    }
}

TEST(Evolve, BlowUpReportsExitTime) {
    // x' = x^2 from x(0) = 1 explodes at t = 1.
    VectorField f = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; };
    try {
        evolve_field(f, 1, 1e3, {}, 0.0, 2.0, std::vector<double>{1.0});
        FAIL() << "expected blow-up";
    } catch (const BlowUpError& e) {
        EXPECT_NEAR(e.exit_time(), 1.0, 1e-2);
    }
}

TEST(Evolve, RejectsBackwardIntegrationAndBadConfig) {
    EXPECT_THROW(evolve_field(decay(), 1, 1e6, {}, 1.0, 0.0, std::vector<double>{1.0}), Error);
    IntegratorConfig bad;
    bad.rel_tol = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Evolve, StepBudgetExhaustionIsStiffness) {
    IntegratorConfig cfg;
    cfg.max_steps = 5;
    VectorField stiff = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -1e4 * (x[0] - 1.0); };
    EXPECT_THROW(evolve_field(stiff, 1, 1e6, cfg, 0.0, 10.0, std::vector<double>{0.0}), StiffnessError);
}

TEST(SampleTrajectory, VisitsGridAndEndpoint) {
    std::vector<double> times;
    sample_trajectory(decay(), 1, 1e6, {}, 1.0, std::vector<double>{1.0}, 1.05, 0.25,
                      [&](double t, std::span<const double>) { times.push_back(t); });
    ASSERT_EQ(times.size(), 6u);
    EXPECT_EQ(times.front(), 1.0);
    EXPECT_DOUBLE_EQ(times[4], 2.0);
    EXPECT_DOUBLE_EQ(times.back(), 2.05);
}

TEST(EvolveCloud, IndependentOfThreadCount) {
    const auto p = lorenz::autonomous_process();
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 28.0}};
    std::vector<double> c;
    for (int i = 0; i < 40; ++i) c.insert(c.end(), {0.1 * i, 1.0 - 0.05 * i, 20.0 + 0.2 * i});
    const PointCloud a(3, c);
    set_thread_count(1);
    const auto one = evolve_cloud(p, lam, 0.0, 2.0, a, 0.0).cloud;
    set_thread_count(4);
    const auto four = evolve_cloud(p, lam, 0.0, 2.0, a, 0.0).cloud;
    set_thread_count(1);
    EXPECT_EQ(one, four);
}

TEST(EvolveCloud, DropPolicySkipsEscapingPoints) {
    ProcessDef p;
    p.name = "riccati";
    p.dim = 1;
    p.guard_radius = 100.0;
    p.bind = [](const ParameterPoint&) -> VectorField {
        return [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; };
    };
    const PointCloud a(1, {-1.0, 0.1, 2.0});
    EXPECT_THROW(evolve_cloud(p, {}, 0.0, 1.0, a, 0.0), BlowUpError);
    const auto img = evolve_cloud(p, {}, 0.0, 1.0, a, 0.0, {}, BlowUpPolicy::Drop);
    EXPECT_EQ(img.dropped, 1u);
    EXPECT_EQ(img.cloud.size(), 2u);
}

TEST(ParameterPointTest, SetGetAndMissing) {
    ParameterPoint p{{"sigma", 10.0}};
    p.set("b", 2.0);
    p.set("sigma", 9.0);
    EXPECT_EQ(p.get("sigma"), 9.0);
    EXPECT_EQ(p.get_or("r", 28.0), 28.0);
    EXPECT_THROW(p.get("r"), Error);
    EXPECT_THROW(p.set("r", NAN), Error);
}
