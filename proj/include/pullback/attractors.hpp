#pragma once

/** \file attractors.hpp
 * \brief Point-cloud approximations of pullback attractor sections A(t), as
 * the limit of S(t, s)D for s -> -infinity, and of the uniform attractor as
 * the union over start times s of S(s + T, s)K for growing windows T. */

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/process.hpp"

namespace pullback {

/** Strictly decreasing start times for the pullback limit at a target time. */
struct PullbackSchedule {
    std::vector<double> s_list;
    double tol = 1e-6;
    std::size_t consecutive_required = 2;

    /// s_k = t - T0 2^k for k = 0 .. levels-1.
    static PullbackSchedule geometric(double t, double T0, std::size_t levels, double tol,
                                      std::size_t consecutive = 2) {
        PullbackSchedule s;
        s.tol = tol;
        s.consecutive_required = consecutive;
        for (std::size_t k = 0; k < levels; ++k) s.s_list.push_back(t - T0 * std::ldexp(1.0, static_cast<int>(k)));
        return s;
    }

    void validate(double t) const {
        if (s_list.empty()) throw ConfigError("pullback.s_list", "must not be empty");
        for (std::size_t i = 0; i < s_list.size(); ++i) {
            if (s_list[i] > t) throw ConfigError("pullback.s_list", "start times must not exceed the target time");
            if (i > 0 && !(s_list[i] < s_list[i - 1]))
                throw ConfigError("pullback.s_list", "must be strictly decreasing");
        }
        if (!(tol > 0.0)) throw ConfigError("pullback.tol", "must be positive");
        if (consecutive_required == 0) throw ConfigError("pullback.consecutive", "must be positive");
    }
};

/// One refinement step: start time (or window) and distance to the previous iterate.
struct HistoryEntry {
    double s = 0.0;
    double delta = 0.0;
};

struct AttractorSection {
    double t = 0.0;
    ParameterPoint lambda;
    PointCloud cloud;
    double s_converged = 0.0;  ///< deepest start time used
    std::vector<HistoryEntry> history;
    bool converged = false;
    double tol = 0.0;
    double merge_radius = 0.0;
    std::vector<PointCloud> iterates;  ///< every S(t, s_k)D, only when requested
};

struct UniformAttractorApprox {
    ParameterPoint lambda;
    PointCloud cloud;
    double t_window = 0.0;  ///< final window length
    std::vector<double> s_grid;
    std::vector<HistoryEntry> history;  ///< (window, distance to previous window)
    bool converged = false;
    double tol = 0.0;
    double merge_radius = 0.0;
};

inline std::string describe(const ParameterPoint& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.coords().size(); ++i) {
        if (i) out += ", ";
        out += p.coords()[i].first + "=" + std::to_string(p.coords()[i].second);
    }
    return out + ")";
}

/**
 * Evolves D from every s in the schedule to t and stops once the symmetric
 * distance between consecutive iterates stays <= tol for the required number
 * of steps in a row. Non-convergence is reported in the result, not thrown.
 */
inline AttractorSection pullback_section(const ProcessDef& proc, const ParameterPoint& lambda, double t,
                                         const PointCloud& D, const PullbackSchedule& sched,
                                         double merge_radius, const IntegratorConfig& cfg = {},
                                         bool keep_iterates = false) {
    sched.validate(t);
    std::optional<PointCloud> prev;
    std::vector<HistoryEntry> history;
    std::vector<PointCloud> iterates;
    std::size_t streak = 0;
    for (const double s : sched.s_list) {
        PointCloud cur = [&] {
            try {
                return evolve_cloud(proc, lambda, s, t, D, merge_radius, cfg).cloud;
            } catch (const BlowUpError& e) {
                throw BlowUpError("pullback at lambda=" + describe(lambda) + ", s=" + std::to_string(s) +
                                      ": " + e.what(),
                                  e.exit_time());
            }
        }();
        if (keep_iterates) iterates.push_back(cur);
        if (prev) {
            const double d = hausdorff_distance(cur, *prev);
            history.push_back({s, d});
            streak = d <= sched.tol ? streak + 1 : 0;
            if (streak >= sched.consecutive_required)
                return {t, lambda, std::move(cur), s, std::move(history), true, sched.tol, merge_radius,
                        std::move(iterates)};
        }
        prev = std::move(cur);
    }
    return {t, lambda, std::move(*prev), sched.s_list.back(), std::move(history), false, sched.tol,
            merge_radius, std::move(iterates)};
}

/// A(t) = S(t, n) A(n) for t >= n.
inline AttractorSection interpolate_section(const ProcessDef& proc, const AttractorSection& sec, double t,
                                            const IntegratorConfig& cfg = {}) {
    if (!sec.converged) throw Error("interpolate_section: section is not converged");
    if (t < sec.t) throw Error("interpolate_section: target time precedes the section");
    AttractorSection out = sec;
    out.iterates.clear();
    out.t = t;
    out.cloud = evolve_cloud(proc, sec.lambda, sec.t, t, sec.cloud, sec.merge_radius, cfg).cloud;
    return out;
}

/// Delta(S(t2, t1) A(t1), A(t2)); zero for an exactly invariant family.
inline double invariance_residual(const ProcessDef& proc, const AttractorSection& a1, const AttractorSection& a2,
                                  const IntegratorConfig& cfg = {}) {
    if (!a1.converged || !a2.converged) throw Error("invariance_residual: both sections must be converged");
    if (!(a1.lambda == a2.lambda)) throw Error("invariance_residual: sections belong to different parameters");
    if (a2.t < a1.t) throw Error("invariance_residual: requires t1 <= t2");
    const auto image = evolve_cloud(proc, a1.lambda, a1.t, a2.t, a1.cloud, a1.merge_radius, cfg).cloud;
    return hausdorff_distance(image, a2.cloud);
}

/**
 * Union over s in s_grid of S(s + T, s)K, merged, with T doubling from
 * t_window until consecutive approximations are within tol (or the doubling
 * budget runs out, which leaves converged = false).
 */
inline UniformAttractorApprox uniform_attractor(const ProcessDef& proc, const ParameterPoint& lambda,
                                                const PointCloud& K, double t_window,
                                                const std::vector<double>& s_grid, double merge_radius,
                                                double tol, std::size_t max_doublings = 8,
                                                const IntegratorConfig& cfg = {}) {
    if (s_grid.empty()) throw ConfigError("uniform.s_grid", "must not be empty");
    if (!(t_window > 0.0)) throw ConfigError("uniform.t_window", "must be positive");
    if (!(tol > 0.0)) throw ConfigError("uniform.tol", "must be positive");

    // Raw images of K, advanced window by window; merging happens only in the union.
    std::vector<PointCloud> images;
    images.reserve(s_grid.size());
    for (const double s : s_grid)
        images.push_back(evolve_cloud(proc, lambda, s, s + t_window, K, 0.0, cfg).cloud);

    double w = t_window;
    std::optional<PointCloud> prev;
    std::vector<HistoryEntry> history;
    for (std::size_t level = 0;; ++level) {
        PointCloud approx = merge_dedup(concatenate(images), merge_radius);
        if (prev) {
            const double d = hausdorff_distance(approx, *prev);
            history.push_back({w, d});
            if (d <= tol) return {lambda, std::move(approx), w, s_grid, std::move(history), true, tol, merge_radius};
        }
        if (level >= max_doublings)
            return {lambda, std::move(approx), w, s_grid, std::move(history), false, tol, merge_radius};
        prev = std::move(approx);
        for (std::size_t i = 0; i < s_grid.size(); ++i)
            images[i] = evolve_cloud(proc, lambda, s_grid[i] + w, s_grid[i] + 2.0 * w, images[i], 0.0, cfg).cloud;
        w *= 2.0;
    }
}

struct ContainmentEntry {
    double t = 0.0;
    double semi_distance = 0.0;  ///< rho(A(t), uniform approximation)
};

/// rho(A(t), uniform attractor) for each section.
inline std::vector<ContainmentEntry> containment_check(const UniformAttractorApprox& u,
                                                       const std::vector<AttractorSection>& sections) {
    std::vector<ContainmentEntry> out;
    out.reserve(sections.size());
    for (const auto& sec : sections) {
        if (!(sec.lambda == u.lambda)) throw Error("containment_check: parameter mismatch");
        out.push_back({sec.t, semi_distance(sec.cloud, u.cloud)});
    }
    return out;
}

}  // namespace pullback
