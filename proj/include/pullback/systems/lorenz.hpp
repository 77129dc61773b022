#pragma once

/** \file lorenz.hpp
 * \brief Autonomous and forced Lorenz systems together with their explicit
 * dissipative estimates: the absorbing radius in shifted coordinates and the
 * Gronwall bound on the difference of two solutions with different (sigma, b).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/process.hpp"

namespace pullback::lorenz {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

struct LorenzParams {
    double sigma = 10.0;
    double b = 8.0 / 3.0;
    double r = 28.0;

    void validate() const {
        if (!(sigma > 0.0)) throw ConfigError("params.sigma", "must be positive");
        if (!(b > 0.0)) throw ConfigError("params.b", "must be positive");
        if (!(r > 0.0)) throw ConfigError("params.r", "must be positive");
    }
};

/// One term a * sin(w t + phi).
struct Sinusoid {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

/**
 * C^1 forcing r(t) given as a finite sum of sinusoids, with a uniform bound
 * R0 on |r| and |r'|. A zero-frequency term with phase pi/2 is a constant.
 */
class ForcingR {
public:
    ForcingR() = default;

    /// R0 defaults to sum |a| max(1, |w|), which bounds both |r| and |r'|.
    static ForcingR from_sinusoids(std::vector<Sinusoid> terms, std::optional<double> r0_override = {}) {
        ForcingR f;
        f.terms_ = std::move(terms);
        double r0 = 0.0;
        for (const auto& s : f.terms_) {
            if (!std::isfinite(s.amplitude) || !std::isfinite(s.frequency) || !std::isfinite(s.phase))
                throw ConfigError("forcing.terms", "non-finite sinusoid coefficient");
            r0 += std::abs(s.amplitude) * std::max(1.0, std::abs(s.frequency));
        }
        f.r0_ = r0_override ? *r0_override : r0;
        if (!(f.r0_ > 0.0)) throw ConfigError("forcing.R0", "must be positive");
        return f;
    }

    static ForcingR constant(double r) {
        return from_sinusoids({{r, 0.0, std::numbers::pi / 2}});
    }

    double r(double t) const {
        double v = 0.0;
        for (const auto& s : terms_) v += s.amplitude * std::sin(s.frequency * t + s.phase);
        return v;
    }

    double r_prime(double t) const {
        double v = 0.0;
        for (const auto& s : terms_) v += s.amplitude * s.frequency * std::cos(s.frequency * t + s.phase);
        return v;
    }

    double R0() const noexcept { return r0_; }
    const std::vector<Sinusoid>& terms() const noexcept { return terms_; }

    bool is_constant() const {
        for (const auto& s : terms_)
            if (s.frequency != 0.0) return false;
        return true;
    }

    /// Value of the zero-frequency part.
    double mean() const {
        double m = 0.0;
        for (const auto& s : terms_)
            if (s.frequency == 0.0) m += s.amplitude * std::sin(s.phase);
        return m;
    }

    /// Sum of |a| over oscillating terms: sup |r(t) - mean|.
    double oscillation_bound() const {
        double m = 0.0;
        for (const auto& s : terms_)
            if (s.frequency != 0.0) m += std::abs(s.amplitude);
        return m;
    }

    /// Checks |r|, |r'| <= R0 on the grid t0, t0 + step, ..., t1.
    bool check_bound(double t0, double t1, double step) const {
        for (double t = t0; t <= t1; t += step)
            if (std::abs(r(t)) > r0_ || std::abs(r_prime(t)) > r0_) return false;
        return true;
    }

private:
    std::vector<Sinusoid> terms_;
    double r0_ = 0.0;
};

inline Vec3 lorenz_field(const LorenzParams& p, const Vec3& v) {
    const auto [x, y, z] = v;
    return {-p.sigma * x + p.sigma * y, p.r * x - y - x * z, -p.b * z + x * y};
}

inline Vec3 lorenz_nonauto_field(double sigma, double b, const ForcingR& f, double t, const Vec3& v) {
    const auto [x, y, z] = v;
    return {-sigma * x + sigma * y, f.r(t) * x - y - x * z, -b * z + x * y};
}

/// (x, y, z) -> (x, y, w) with w = z - sigma - r(t).
inline Vec3 to_w_coords(double sigma, const ForcingR& f, double t, const Vec3& v) {
    return {v[0], v[1], v[2] - sigma - f.r(t)};
}

inline Vec3 from_w_coords(double sigma, const ForcingR& f, double t, const Vec3& u) {
    return {u[0], u[1], u[2] + sigma + f.r(t)};
}

/// Field of the shifted system: x' = -sx + sy, y' = -y - sx - xw, w' = -bw + xy + F(t).
inline Vec3 lorenz_w_field(double sigma, double b, const ForcingR& f, double t, const Vec3& u) {
    const auto [x, y, w] = u;
    const double F = -b * (sigma + f.r(t)) - f.r_prime(t);
    return {-sigma * x + sigma * y, -y - sigma * x - x * w, -b * w + x * y + F};
}

struct LorenzBounds {
    double F0 = 0.0;
    double sigma0 = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double R3 = 0.0;
    /// F0 / sqrt(2 sigma0 b): asymptotic radius of |u|.
    double absorbing_radius = 0.0;
};

/**
 * Explicit constants for the forced system. sigma, b of the first parameter
 * point enter F0, sigma0 and R1; the norms |lambda_i| = |(sigma_i, b_i)| enter R3.
 */
inline LorenzBounds compute_bounds(double sigma1, double b1, double sigma2, double b2, double R0,
                                   double v0_norm) {
    if (!(sigma1 > 0 && b1 > 0 && sigma2 > 0 && b2 > 0)) throw Error("compute_bounds: parameters must be positive");
    LorenzBounds out;
    out.F0 = b1 * (sigma1 + R0) + R0;
    out.sigma0 = std::min({1.0, sigma1, b1 / 2.0});
    out.absorbing_radius = out.F0 / std::sqrt(2.0 * out.sigma0 * b1);
    out.R1 = v0_norm + 2.0 * (sigma1 + R0) + out.absorbing_radius;
    out.R2 = out.R1 + 1.0 / 8.0;
    out.R3 = R0 + 4.0 * out.R1 + std::hypot(sigma1, b1) + std::hypot(sigma2, b2);
    return out;
}

/** Ball in original coordinates containing every shifted absorbing ball of radius absorbing_radius + 1. */
struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

inline Ball absorbing_ball(double sigma, double b, const ForcingR& f) {
    const auto bounds = compute_bounds(sigma, b, sigma, b, f.R0(), 0.0);
    return {{0.0, 0.0, sigma + f.mean()}, bounds.absorbing_radius + 1.0 + f.oscillation_bound()};
}

/// Autonomous family with parameters (sigma, b, r).
inline ProcessDef autonomous_process() {
    ProcessDef p;
    p.name = "lorenz_auto";
    p.dim = 3;
    p.bind = [](const ParameterPoint& lam) -> VectorField {
        LorenzParams q{lam.get("sigma"), lam.get("b"), lam.get("r")};
        q.validate();
        return [q](double, std::span<const double> x, std::span<double> dx) {
            const auto v = lorenz_field(q, {x[0], x[1], x[2]});
            dx[0] = v[0];
            dx[1] = v[1];
            dx[2] = v[2];
        };
    };
    return p;
}

/// Forced family with parameters (sigma, b) and fixed r(t).
inline ProcessDef nonautonomous_process(ForcingR forcing) {
    ProcessDef p;
    p.name = "lorenz_nonauto";
    p.dim = 3;
    p.bind = [forcing](const ParameterPoint& lam) -> VectorField {
        const double sigma = lam.get("sigma");
        const double b = lam.get("b");
        if (!(sigma > 0.0)) throw ConfigError("params.sigma", "must be positive");
        if (!(b > 0.0)) throw ConfigError("params.b", "must be positive");
        return [sigma, b, forcing](double t, std::span<const double> x, std::span<double> dx) {
            const auto v = lorenz_nonauto_field(sigma, b, forcing, t, {x[0], x[1], x[2]});
            dx[0] = v[0];
            dx[1] = v[1];
            dx[2] = v[2];
        };
    };
    return p;
}

/// The forced family written in (x, y, w) coordinates.
inline ProcessDef shifted_process(ForcingR forcing) {
    ProcessDef p;
    p.name = "lorenz_shifted";
    p.dim = 3;
    p.bind = [forcing](const ParameterPoint& lam) -> VectorField {
        const double sigma = lam.get("sigma");
        const double b = lam.get("b");
        return [sigma, b, forcing](double t, std::span<const double> x, std::span<double> dx) {
            const auto v = lorenz_w_field(sigma, b, forcing, t, {x[0], x[1], x[2]});
            dx[0] = v[0];
            dx[1] = v[1];
            dx[2] = v[2];
        };
    };
    return p;
}

/** Sampled comparison of a trajectory against an inequality. */
struct InequalityTally {
    std::size_t samples = 0;
    std::size_t violations = 0;   ///< exceeded the bound by more than the tolerance margin
    std::size_t near_misses = 0;  ///< exceeded the bound, but within the margin
    double min_slack = std::numeric_limits<double>::infinity();  ///< min(bound - value)
    double worst_time = 0.0;

    void record(double t, double value, double bound, double margin) {
        ++samples;
        const double slack = bound - value;
        if (slack < min_slack) {
            min_slack = slack;
            worst_time = t;
        }
        if (slack < 0.0) {
            if (-slack > margin) ++violations;
            else ++near_misses;
        }
    }

    bool holds() const { return violations == 0; }
};

/// Margin separating real violations from integrator noise.
inline double tolerance_margin(const IntegratorConfig& cfg, double scale) {
    return 10.0 * (cfg.rel_tol * std::abs(scale) + cfg.abs_tol);
}

struct AbsorbingReport {
    LorenzBounds bounds;
    double max_u = 0.0;
    double max_v = 0.0;
    InequalityTally r1_u;       ///< |u(t)| <= R1
    InequalityTally r1_v;       ///< |v(t)| <= R1
    InequalityTally envelope;   ///< |u(t)| <= |u(0)| e^{-sigma0 t} + F0 / sqrt(2 sigma0 b)
    bool holds() const { return r1_u.holds() && r1_v.holds() && envelope.holds(); }
};

/**
 * Integrates the forced system from v(0) = v0 over [0, horizon] and checks the
 * absorbing estimates at every sample (stride 0.01 by default).
 */
inline AbsorbingReport verify_absorbing_bound(double sigma, double b, const ForcingR& f, const Vec3& v0,
                                              double horizon, const IntegratorConfig& cfg = {},
                                              double stride = 0.01) {
    AbsorbingReport rep;
    rep.bounds = compute_bounds(sigma, b, sigma, b, f.R0(), norm3(v0));
    const double u0 = norm3(to_w_coords(sigma, f, 0.0, v0));
    const auto proc = nonautonomous_process(f);
    const auto field = proc.bind(ParameterPoint{{"sigma", sigma}, {"b", b}});
    sample_trajectory(field, 3, proc.guard_radius, cfg, 0.0, std::span<const double>(v0), horizon, stride,
                      [&](double t, std::span<const double> x) {
                          const Vec3 v{x[0], x[1], x[2]};
                          const double nv = norm3(v);
                          const double nu = norm3(to_w_coords(sigma, f, t, v));
                          rep.max_u = std::max(rep.max_u, nu);
                          rep.max_v = std::max(rep.max_v, nv);
                          const double margin = tolerance_margin(cfg, rep.bounds.R1);
                          rep.r1_u.record(t, nu, rep.bounds.R1, margin);
                          rep.r1_v.record(t, nv, rep.bounds.R1, margin);
                          const double env = u0 * std::exp(-rep.bounds.sigma0 * t) + rep.bounds.absorbing_radius;
                          rep.envelope.record(t, nu, env, tolerance_margin(cfg, env));
                      });
    return rep;
}

struct DifferenceReport {
    LorenzBounds bounds;
    double lambda_gap = 0.0;  ///< |lambda_1 - lambda_2|
    double max_gap = 0.0;     ///< sup_t |v1(t) - v2(t)|
    InequalityTally gronwall; ///< |vbar(t)| <= e^{R2 t} (|vbar(0)| + (2 + R3 sqrt t) |lambda_bar|)
    bool holds() const { return gronwall.holds(); }
};

/// e^{R2 t}(|vbar(0)| + (2 + R3 sqrt t)|lambda_bar|), with 0 * inf read as 0.
inline double difference_bound(const LorenzBounds& bd, double t, double v0_gap, double lambda_gap) {
    const double bracket = v0_gap + (2.0 + bd.R3 * std::sqrt(t)) * lambda_gap;
    if (bracket == 0.0) return 0.0;
    return std::exp(bd.R2 * t) * bracket;
}

/**
 * Integrates the forced system at (sigma1, b1) and (sigma2, b2) from the same
 * v0 and checks the Gronwall estimate on their difference at every sample.
 */
inline DifferenceReport verify_difference_bound(double sigma1, double b1, double sigma2, double b2,
                                                const ForcingR& f, const Vec3& v0, double horizon,
                                                const IntegratorConfig& cfg = {}, double stride = 0.01) {
    DifferenceReport rep;
    rep.bounds = compute_bounds(sigma1, b1, sigma2, b2, f.R0(), norm3(v0));
    rep.lambda_gap = std::hypot(sigma1 - sigma2, b1 - b2);
    const auto proc = nonautonomous_process(f);
    const auto f1 = proc.bind(ParameterPoint{{"sigma", sigma1}, {"b", b1}});
    const auto f2 = proc.bind(ParameterPoint{{"sigma", sigma2}, {"b", b2}});
    // Both trajectories advance in lock step inside one 6-dimensional system so
    // they share sample times.
    VectorField pair = [f1, f2](double t, std::span<const double> x, std::span<double> dx) {
        f1(t, x.subspan(0, 3), dx.subspan(0, 3));
        f2(t, x.subspan(3, 3), dx.subspan(3, 3));
    };
    const std::array<double, 6> x0{v0[0], v0[1], v0[2], v0[0], v0[1], v0[2]};
    sample_trajectory(pair, 6, 2.0 * proc.guard_radius, cfg, 0.0, std::span<const double>(x0), horizon, stride,
                      [&](double t, std::span<const double> x) {
                          const Vec3 d{x[0] - x[3], x[1] - x[4], x[2] - x[5]};
                          const double gap = norm3(d);
                          rep.max_gap = std::max(rep.max_gap, gap);
                          const double bound = difference_bound(rep.bounds, t, 0.0, rep.lambda_gap);
                          const double scale = std::isfinite(bound) ? bound : 0.0;
                          rep.gronwall.record(t, gap, bound, tolerance_margin(cfg, std::max(scale, gap)));
                      });
    return rep;
}

}  // namespace pullback::lorenz
