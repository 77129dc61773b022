#include <gtest/gtest.h>

#include <random>

#include "pullback/geometry.hpp"
#include "pullback/sampling.hpp"

using namespace pullback;

namespace {

PointCloud random_cloud(std::size_t dim, std::size_t n, std::mt19937_64& rng, double spread = 1.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<double> c(dim * n);
    for (auto& v : c) v = u(rng);
    return PointCloud(dim, std::move(c));
}

}  // namespace

TEST(SemiDistance, SinglePairIsEuclidean) {
    EXPECT_DOUBLE_EQ(semi_distance(PointCloud(2, {0, 0}), PointCloud(2, {3, 4})), 5.0);
}

TEST(SemiDistance, SubsetIsZero) {
    const PointCloud a(2, {1, 2, 3, 4});
    const PointCloud c(2, {5, 6, 1, 2, 3, 4});
    EXPECT_EQ(semi_distance(a, c), 0.0);
}

TEST(SemiDistance, OneDimensionalMax) {
    EXPECT_DOUBLE_EQ(semi_distance(PointCloud(1, {0, 10}), PointCloud(1, {1})), 9.0);
}

TEST(SemiDistance, RejectsDimensionMismatch) {
    EXPECT_THROW(semi_distance(PointCloud(1, {0}), PointCloud(2, {0, 0})), Error);
}

TEST(PointCloud, RejectsEmptyAndRagged) {
    EXPECT_THROW(PointCloud(2, {}), Error);
    EXPECT_THROW(PointCloud(2, {1, 2, 3}), Error);
    EXPECT_THROW(PointCloud(0, {1}), Error);
}

TEST(Hausdorff, DirectedPair) {
    const auto d = hausdorff(PointCloud(1, {0}), PointCloud(1, {1, 2}));
    EXPECT_DOUBLE_EQ(d.forward, 1.0);
    EXPECT_DOUBLE_EQ(d.backward, 2.0);
    EXPECT_DOUBLE_EQ(d.symmetric, 2.0);
}

TEST(Hausdorff, IdentityIsZero) {
    std::mt19937_64 rng(3);
    const auto a = random_cloud(3, 50, rng);
    const auto d = hausdorff(a, a);
    EXPECT_EQ(d.forward, 0.0);
    EXPECT_EQ(d.backward, 0.0);
    EXPECT_EQ(d.symmetric, 0.0);
}

TEST(Hausdorff, AcceleratedMatchesBruteForceBitForBit) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_cloud(3, 200, rng);
        const auto c = random_cloud(3, 200, rng, 1.5);
        const auto fast = hausdorff(a, c);
        const auto slow = hausdorff_brute(a, c);
        EXPECT_EQ(fast.forward, slow.forward);
        EXPECT_EQ(fast.backward, slow.backward);
        EXPECT_EQ(fast.symmetric, slow.symmetric);
    }
}

TEST(Hausdorff, TreePathAgreesOnLargeClouds) {
    std::mt19937_64 rng(5);
    for (std::size_t dim = 1; dim <= 3; ++dim) {
        const auto a = random_cloud(dim, 500, rng);
        const auto c = random_cloud(dim, 450, rng, 0.8);
        EXPECT_EQ(semi_distance(a, c), semi_distance_brute(a, c)) << "dim " << dim;
        EXPECT_EQ(semi_distance(c, a), semi_distance_brute(c, a)) << "dim " << dim;
    }
}

TEST(Hausdorff, MetricAxiomsOnRandomTriples) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t dim = 1 + trial % 3;
        const auto a = merge_dedup(random_cloud(dim, 40, rng), 0.0);
        const auto b = merge_dedup(random_cloud(dim, 30, rng), 0.0);
        const auto c = merge_dedup(random_cloud(dim, 50, rng), 0.0);
        const double ab = hausdorff_distance(a, b);
        EXPECT_EQ(ab, hausdorff_distance(b, a));
        EXPECT_LE(ab, hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-15);
        EXPECT_GT(ab, 0.0);
    }
}

TEST(Hausdorff, MonotoneUnderEnlargingTarget) {
    std::mt19937_64 rng(23);
    const auto a = random_cloud(2, 60, rng);
    const auto c = random_cloud(2, 40, rng);
    const auto extra = random_cloud(2, 40, rng);
    const auto bigger = concatenate({c, extra});
    EXPECT_LE(semi_distance(a, bigger), semi_distance(a, c));
}

TEST(MergeDedup, ZeroRadiusDropsExactDuplicatesOnly) {
    const PointCloud a(1, {3, 1, 1, 2, 3});
    const auto m = merge_dedup(a, 0.0);
    EXPECT_EQ(m, PointCloud(1, {1, 2, 3}));
}

TEST(MergeDedup, GreedyCollinearWalk) {
    const auto m = merge_dedup(PointCloud(1, {0.0, 0.4, 0.9}), 0.5);
    EXPECT_EQ(m, PointCloud(1, {0.0, 0.9}));
    EXPECT_EQ(m.resolution(), 0.5);
}

TEST(MergeDedup, CoversInputWithinRadiusAndSeparates) {
    std::mt19937_64 rng(29);
    for (const double r : {0.01, 0.1, 0.3}) {
        for (std::size_t dim = 1; dim <= 4; ++dim) {
            const auto a = random_cloud(dim, 300, rng);
            const auto m = merge_dedup(a, r);
            EXPECT_LE(semi_distance(a, m), r);
            EXPECT_EQ(semi_distance(m, a), 0.0);
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = i + 1; j < m.size(); ++j)
                    ASSERT_GT(squared_distance(m.point(i), m.point(j)), r * r);
        }
    }
}

TEST(Sampling, BallSamplesStayInside) {
    const std::vector<double> c{1.0, -2.0, 0.5};
    const auto pts = sample_ball(c, 3.0, 500);
    EXPECT_EQ(pts.size(), 500u);
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LE(std::sqrt(squared_distance(pts.point(i), c)), 3.0);
    const auto hi = sample_ball(std::vector<double>(6, 0.0), 2.0, 100, 4);
    for (std::size_t i = 0; i < hi.size(); ++i) EXPECT_LE(euclidean_norm(hi.point(i)), 2.0 + 1e-12);
    EXPECT_EQ(hi, sample_ball(std::vector<double>(6, 0.0), 2.0, 100, 4));
}
