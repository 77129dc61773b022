#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"

namespace pullback {

/// i-th element (i >= 1) of the van der Corput sequence in the given base.
inline double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double v = 0.0;
    while (i > 0) {
        v += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return v;
}

/// count equally spaced points on [lo, hi], endpoints included.
inline PointCloud sample_interval(double lo, double hi, std::size_t count) {
    if (count == 0) throw Error("sample_interval: count must be positive");
    if (count == 1) return PointCloud(1, {0.5 * (lo + hi)});
    std::vector<double> pts(count);
    for (std::size_t i = 0; i < count; ++i)
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return PointCloud(1, std::move(pts));
}

/**
 * count points in the closed ball B(center, radius). Dimension 1 uses an
 * equispaced grid; dimensions 2-3 a Halton lattice with rejection; higher
 * dimensions draw uniformly from the ball with a seeded generator.
 */
inline PointCloud sample_ball(std::span<const double> center, double radius, std::size_t count,
                              std::uint64_t seed = 0) {
    const std::size_t d = center.size();
    if (d == 0) throw Error("sample_ball: empty center");
    if (count == 0) throw Error("sample_ball: count must be positive");
    if (!(radius >= 0.0)) throw Error("sample_ball: negative radius");
    if (d == 1) return sample_interval(center[0] - radius, center[0] + radius, count);

    std::vector<double> pts;
    pts.reserve(count * d);
    if (d <= 3) {
        static constexpr unsigned bases[3] = {2, 3, 5};
        std::vector<double> u(d);
        for (std::uint64_t i = 1; pts.size() < count * d; ++i) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                u[k] = 2.0 * radical_inverse(i, bases[k]) - 1.0;
                r2 += u[k] * u[k];
            }
            if (r2 > 1.0) continue;
            for (std::size_t k = 0; k < d; ++k) pts.push_back(center[k] + radius * u[k]);
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> g(d);
        for (std::size_t i = 0; i < count; ++i) {
            double n2 = 0.0;
            for (auto& v : g) {
                v = gauss(rng);
                n2 += v * v;
            }
            const double scale = radius * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::sqrt(n2);
            for (std::size_t k = 0; k < d; ++k) pts.push_back(center[k] + scale * g[k]);
        }
    }
    return PointCloud(d, std::move(pts));
}

}  // namespace pullback
