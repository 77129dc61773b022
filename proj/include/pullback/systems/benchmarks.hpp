#pragma once

/** \file benchmarks.hpp
 * \brief Scalar test systems with closed-form attractors: the forced linear
 * decay x' = -lambda x + g(t) and the pitchfork x' = lambda x - x^3. */

#include <cmath>
#include <span>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/process.hpp"
#include "pullback/systems/lorenz.hpp"

namespace pullback::benchmarks {

using lorenz::Sinusoid;

/// g(t) = sum a sin(w t + phi).
inline double sinusoid_sum(const std::vector<Sinusoid>& g, double t) {
    double v = 0.0;
    for (const auto& s : g) v += s.amplitude * std::sin(s.frequency * t + s.phase);
    return v;
}

inline double linear_benchmark_field(double lambda, const std::vector<Sinusoid>& g, double t, double x) {
    return -lambda * x + sinusoid_sum(g, t);
}

/**
 * The bounded entire solution of x' = -lambda x + g(t): each term
 * a sin(wt + phi) contributes a (lambda sin(wt + phi) - w cos(wt + phi)) / (lambda^2 + w^2).
 * It is the pullback attractor section at time t.
 */
inline double linear_benchmark_particular(double lambda, const std::vector<Sinusoid>& g, double t) {
    double v = 0.0;
    for (const auto& s : g) {
        const double th = s.frequency * t + s.phase;
        v += s.amplitude * (lambda * std::sin(th) - s.frequency * std::cos(th)) /
             (lambda * lambda + s.frequency * s.frequency);
    }
    return v;
}

/// Decay-rate parameter "lambda"; `default_lambda` is used when the point lacks it.
inline ProcessDef linear_process(std::vector<Sinusoid> g, double default_lambda = 1.0) {
    ProcessDef p;
    p.name = "linear_benchmark";
    p.dim = 1;
    p.bind = [g, default_lambda](const ParameterPoint& lam) -> VectorField {
        const double l = lam.get_or("lambda", default_lambda);
        if (!(l > 0.0)) throw ConfigError("params.lambda", "must be positive");
        return [l, g](double t, std::span<const double> x, std::span<double> dx) {
            dx[0] = linear_benchmark_field(l, g, t, x[0]);
        };
    };
    return p;
}

/// x' = lambda x - x^3 + eps sin(t).
inline ProcessDef pitchfork_process(double eps = 0.0) {
    ProcessDef p;
    p.name = "pitchfork_benchmark";
    p.dim = 1;
    p.bind = [eps](const ParameterPoint& lam) -> VectorField {
        const double l = lam.get("lambda");
        return [l, eps](double t, std::span<const double> x, std::span<double> dx) {
            dx[0] = l * x[0] - x[0] * x[0] * x[0] + eps * std::sin(t);
        };
    };
    return p;
}

}  // namespace pullback::benchmarks
