#pragma once

/** \file process.hpp
 * \brief Two-parameter solution operators S(t, s) of non-autonomous ODEs,
 * realised with an adaptive Dormand--Prince 5(4) pair. */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/parallel.hpp"

namespace pullback {

/** Ordered list of named parameter values, e.g. (sigma, b, r). */
class ParameterPoint {
public:
    ParameterPoint() = default;
    ParameterPoint(std::initializer_list<std::pair<std::string, double>> coords) {
        for (const auto& [n, v] : coords) set(n, v);
    }

    /// Inserts or overwrites a coordinate.
    void set(const std::string& name, double value) {
        if (!std::isfinite(value)) throw Error("ParameterPoint: non-finite value for " + name);
        for (auto& c : coords_)
            if (c.first == name) {
                c.second = value;
                return;
            }
        coords_.emplace_back(name, value);
    }

    double get(const std::string& name) const {
        for (const auto& c : coords_)
            if (c.first == name) return c.second;
        throw Error("ParameterPoint: missing parameter '" + name + "'");
    }

    double get_or(const std::string& name, double fallback) const {
        for (const auto& c : coords_)
            if (c.first == name) return c.second;
        return fallback;
    }

    bool has(const std::string& name) const {
        return std::any_of(coords_.begin(), coords_.end(),
                           [&](const auto& c) { return c.first == name; });
    }

    const std::vector<std::pair<std::string, double>>& coords() const noexcept { return coords_; }
    std::size_t size() const noexcept { return coords_.size(); }

    bool operator==(const ParameterPoint&) const = default;

private:
    std::vector<std::pair<std::string, double>> coords_;
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    std::size_t max_steps = 50'000'000;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("integrator.rel_tol", "must lie in (0, 1)");
        if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw ConfigError("integrator.abs_tol", "must lie in (0, 1)");
        if (!(max_step > 0.0)) throw ConfigError("integrator.max_step", "must be positive");
    }
};

/// dx/dt = field(t, x), written into dxdt.
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

/**
 * A parameterized family of non-autonomous vector fields. `bind` fixes the
 * parameter point and returns the field of that member.
 */
struct ProcessDef {
    std::string name;
    std::size_t dim = 0;
    std::function<VectorField(const ParameterPoint&)> bind;
    double guard_radius = 1e6;
};

/**
 * Stateful adaptive integrator. `advance_to` lands exactly on the requested
 * time and keeps the step-size estimate for the next call, so a sequence of
 * advances samples one continuous trajectory.
 */
class Integrator {
public:
    Integrator(VectorField field, std::size_t dim, IntegratorConfig cfg, double guard_radius)
        : field_(std::move(field)), dim_(dim), cfg_(cfg), guard_(guard_radius),
          x_(dim), k_(7, std::vector<double>(dim)), tmp_(dim), x_new_(dim) {
        cfg_.validate();
    }

    void reset(double t, std::span<const double> x0) {
        if (x0.size() != dim_) throw Error("Integrator: state dimension mismatch");
        t_ = t;
        std::copy(x0.begin(), x0.end(), x_.begin());
        check_guard();
        h_ = 0.0;
        fsal_valid_ = false;
    }

    double time() const noexcept { return t_; }
    std::span<const double> state() const noexcept { return x_; }
    std::size_t steps() const noexcept { return accepted_; }

    void advance_to(double t_end) {
        if (t_end < t_) throw Error("Integrator: cannot integrate backwards");
        if (t_end == t_) return;
        if (!fsal_valid_) {
            field_(t_, x_, k_[0]);
            fsal_valid_ = true;
        }
        if (h_ == 0.0) h_ = initial_step(t_end - t_);
        std::size_t guard_steps = 0;
        while (t_ < t_end) {
            if (++guard_steps > cfg_.max_steps)
                throw StiffnessError("Integrator: step budget exhausted", t_);
            double h = std::min(h_, cfg_.max_step);
            bool last = false;
            if (t_ + h >= t_end || t_ + 1.01 * h >= t_end) {
                h = t_end - t_;
                last = true;
            }
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_)))
                throw StiffnessError("Integrator: step size underflow at t=" + std::to_string(t_), t_);

            const double err = attempt(h);
            if (!std::isfinite(err)) {
                h_ = 0.25 * h;
                continue;
            }
            if (err <= 1.0) {
                t_ = last ? t_end : t_ + h;
                std::swap(x_, x_new_);
                std::swap(k_[0], k_[6]);
                ++accepted_;
                check_guard();
                const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                // A clamped final step says little about the natural step size.
                if (!last) h_ = fac * h;
            } else {
                h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
        }
    }

private:
    // Dormand--Prince 5(4) tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double attempt(double h) {
        auto& k1 = k_[0];
        auto& k2 = k_[1];
        auto& k3 = k_[2];
        auto& k4 = k_[3];
        auto& k5 = k_[4];
        auto& k6 = k_[5];
        auto& k7 = k_[6];
        const std::size_t n = dim_;
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + h * a21 * k1[i];
        field_(t_ + c2 * h, tmp_, k2);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + h * (a31 * k1[i] + a32 * k2[i]);
        field_(t_ + c3 * h, tmp_, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = x_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        field_(t_ + c4 * h, tmp_, k4);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = x_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        field_(t_ + c5 * h, tmp_, k5);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = x_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        field_(t_ + h, tmp_, k6);
        for (std::size_t i = 0; i < n; ++i)
            x_new_[i] = x_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        field_(t_ + h, x_new_, k7);

        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(x_[i]), std::abs(x_new_[i]));
            acc += (e / scale) * (e / scale);
        }
        return std::sqrt(acc / static_cast<double>(n));
    }

    double initial_step(double span) {
        // Hairer--Wanner starting-step heuristic.
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(x_[i]);
            d0 += (x_[i] / sc) * (x_[i] / sc);
            d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
        }
        d0 = std::sqrt(d0 / dim_);
        d1 = std::sqrt(d1 / dim_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min({h0, span, cfg_.max_step});
        for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = x_[i] + h0 * k_[0][i];
        field_(t_ + h0, tmp_, k_[1]);
        double d2 = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(x_[i]);
            const double v = (k_[1][i] - k_[0][i]) / sc;
            d2 += v * v;
        }
        d2 = std::sqrt(d2 / dim_) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100.0 * h0, h1, span, cfg_.max_step});
    }

    void check_guard() const {
        const double r = euclidean_norm(x_);
        if (!(r <= guard_))
            throw BlowUpError("trajectory left guard ball (|x|=" + std::to_string(r) +
                                  ") at t=" + std::to_string(t_),
                              t_);
    }

    VectorField field_;
    std::size_t dim_;
    IntegratorConfig cfg_;
    double guard_;
    double t_ = 0.0;
    double h_ = 0.0;
    bool fsal_valid_ = false;
    std::size_t accepted_ = 0;
    std::vector<double> x_;
    std::vector<std::vector<double>> k_;
    std::vector<double> tmp_;
    std::vector<double> x_new_;
};

/// Evolves with an already bound field; S(t, t) returns x0 untouched.
inline std::vector<double> evolve_field(const VectorField& field, std::size_t dim, double guard,
                                        const IntegratorConfig& cfg, double s, double t,
                                        std::span<const double> x0) {
    if (t < s) throw Error("evolve: requires t >= s");
    if (x0.size() != dim) throw Error("evolve: state dimension mismatch");
    if (!(euclidean_norm(x0) <= guard)) throw BlowUpError("evolve: initial state outside guard ball", s);
    if (t == s) return {x0.begin(), x0.end()};
    Integrator integ(field, dim, cfg, guard);
    integ.reset(s, x0);
    integ.advance_to(t);
    return {integ.state().begin(), integ.state().end()};
}

/** S_lambda(t, s) x0. */
inline std::vector<double> evolve(const ProcessDef& proc, const ParameterPoint& lambda, double s,
                                  double t, std::span<const double> x0,
                                  const IntegratorConfig& cfg = {}) {
    return evolve_field(proc.bind(lambda), proc.dim, proc.guard_radius, cfg, s, t, x0);
}

enum class BlowUpPolicy { Abort, Drop };

struct CloudImage {
    PointCloud cloud;
    std::size_t dropped = 0;
};

/**
 * Image of a cloud under S_lambda(t, s), thinned by merge_dedup at
 * merge_radius. Points are integrated independently (in parallel) and the
 * result is sorted, so the output does not depend on the worker count.
 */
inline CloudImage evolve_cloud(const ProcessDef& proc, const ParameterPoint& lambda, double s,
                               double t, const PointCloud& a, double merge_radius,
                               const IntegratorConfig& cfg = {},
                               BlowUpPolicy policy = BlowUpPolicy::Abort) {
    if (a.dim() != proc.dim) throw Error("evolve_cloud: cloud dimension does not match process");
    const VectorField field = proc.bind(lambda);
    const std::size_t n = a.size();
    const std::size_t d = proc.dim;
    std::vector<double> out(n * d);
    std::vector<char> ok(n, 1);
    parallel_for(n, [&](std::size_t i) {
        try {
            const auto x = evolve_field(field, d, proc.guard_radius, cfg, s, t, a.point(i));
            std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d));
        } catch (const BlowUpError&) {
            if (policy == BlowUpPolicy::Abort) throw;
            ok[i] = 0;
        }
    });
    std::size_t dropped = 0;
    std::vector<double> kept;
    kept.reserve(out.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!ok[i]) {
            ++dropped;
            continue;
        }
        kept.insert(kept.end(), out.begin() + static_cast<std::ptrdiff_t>(i * d),
                    out.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    }
    if (kept.empty()) throw BlowUpError("evolve_cloud: every point blew up", t);
    return {merge_dedup(PointCloud(d, std::move(kept)), merge_radius), dropped};
}

/**
 * Integrates one trajectory from (s, x0) and calls visit(t, x) at
 * t = s + k * stride for k = 0, 1, ... up to s + horizon (the endpoint is
 * always visited).
 */
template <class Visitor>
void sample_trajectory(const VectorField& field, std::size_t dim, double guard,
                       const IntegratorConfig& cfg, double s, std::span<const double> x0,
                       double horizon, double stride, Visitor&& visit) {
    if (!(stride > 0.0)) throw Error("sample_trajectory: stride must be positive");
    Integrator integ(field, dim, cfg, guard);
    integ.reset(s, x0);
    visit(s, integ.state());
    const auto n = static_cast<std::size_t>(std::floor(horizon / stride + 1e-9));
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = s + static_cast<double>(k) * stride;
        integ.advance_to(t);
        visit(t, integ.state());
    }
    if (s + static_cast<double>(n) * stride < s + horizon) {
        integ.advance_to(s + horizon);
        visit(s + horizon, integ.state());
    }
}

}  // namespace pullback
