#pragma once

/** \file continuity.hpp
 * \brief Parameter sweeps of attractor sections, continuity moduli,
 * semicontinuity splits, equi-attraction rates and monotone-convergence checks.
 *
 * Every sup over parameters is taken over the finite grid only.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pullback/attractors.hpp"
#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/process.hpp"

namespace pullback {

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

/** Cartesian product of named axes, enumerated row-major (last axis fastest). */
class ParameterGrid {
public:
    ParameterGrid() = default;

    explicit ParameterGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
        for (const auto& ax : axes_) {
            if (ax.name.empty()) throw ConfigError("grid.axes", "axis name must not be empty");
            if (ax.values.empty()) throw ConfigError("grid." + ax.name, "axis has no values");
            for (std::size_t i = 1; i < ax.values.size(); ++i)
                if (!(ax.values[i] > ax.values[i - 1]))
                    throw ConfigError("grid." + ax.name, "values must be strictly increasing");
        }
        for (std::size_t a = 0; a < axes_.size(); ++a)
            for (std::size_t b = a + 1; b < axes_.size(); ++b)
                if (axes_[a].name == axes_[b].name) throw ConfigError("grid." + axes_[a].name, "duplicate axis");
    }

    const std::vector<GridAxis>& axes() const noexcept { return axes_; }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& ax : axes_) n *= ax.values.size();
        return n;
    }

    std::vector<std::size_t> multi_index(std::size_t flat) const {
        std::vector<std::size_t> idx(axes_.size());
        for (std::size_t a = axes_.size(); a-- > 0;) {
            idx[a] = flat % axes_[a].values.size();
            flat /= axes_[a].values.size();
        }
        return idx;
    }

    ParameterPoint point(std::size_t flat, const ParameterPoint& base = {}) const {
        ParameterPoint p = base;
        const auto idx = multi_index(flat);
        for (std::size_t a = 0; a < axes_.size(); ++a) p.set(axes_[a].name, axes_[a].values[idx[a]]);
        return p;
    }

    std::vector<double> coords(std::size_t flat) const {
        std::vector<double> c(axes_.size());
        const auto idx = multi_index(flat);
        for (std::size_t a = 0; a < axes_.size(); ++a) c[a] = axes_[a].values[idx[a]];
        return c;
    }

    /// Euclidean distance between two grid points in parameter coordinates.
    double distance(std::size_t i, std::size_t j) const {
        const auto a = coords(i);
        const auto b = coords(j);
        return std::sqrt(squared_distance(a, b));
    }

    /// Pairs (i, j), i < j, differing by one step along exactly one axis.
    std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto idx = multi_index(i);
            std::size_t stride = 1;
            for (std::size_t a = axes_.size(); a-- > 0;) {
                if (idx[a] + 1 < axes_[a].values.size()) out.emplace_back(i, i + stride);
                stride *= axes_[a].values.size();
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<std::size_t> find(const ParameterPoint& p) const {
        for (std::size_t i = 0; i < size(); ++i) {
            const auto c = coords(i);
            bool match = true;
            for (std::size_t a = 0; a < axes_.size() && match; ++a)
                match = p.has(axes_[a].name) && p.get(axes_[a].name) == c[a];
            if (match) return i;
        }
        return std::nullopt;
    }

private:
    std::vector<GridAxis> axes_;
};

struct PairDistance {
    std::size_t i = 0;
    std::size_t j = 0;
    DistancePair d;  ///< forward = rho(A_i, A_j)
};

struct SweepResult {
    ParameterGrid grid;
    double t = 0.0;
    std::vector<std::optional<AttractorSection>> sections;
    std::vector<std::string> failures;  ///< empty string where the point succeeded
    std::vector<PairDistance> pairwise;
    bool full_matrix = false;

    std::size_t succeeded() const {
        return static_cast<std::size_t>(std::count_if(sections.begin(), sections.end(),
                                                      [](const auto& s) { return s.has_value(); }));
    }
};

/**
 * Sections at every grid point with a shared D and schedule. Points that
 * fail are recorded and skipped; the sweep throws only when all fail.
 */
inline SweepResult sweep_pullback(const ProcessDef& proc, const ParameterGrid& grid, double t, const PointCloud& D,
                                  const PullbackSchedule& sched, double merge_radius,
                                  const IntegratorConfig& cfg = {}, const ParameterPoint& base = {},
                                  bool full_matrix = false) {
    SweepResult res;
    res.grid = grid;
    res.t = t;
    res.full_matrix = full_matrix;
    const std::size_t n = grid.size();
    res.sections.resize(n);
    res.failures.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            res.sections[i] = pullback_section(proc, grid.point(i, base), t, D, sched, merge_radius, cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            res.failures[i] = e.what();
        }
    }
    if (res.succeeded() == 0)
        throw Error("sweep_pullback: every grid point failed; first: " + res.failures.front());

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (full_matrix) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    } else {
        pairs = grid.adjacent_pairs();
    }
    for (const auto& [i, j] : pairs) {
        if (!res.sections[i] || !res.sections[j]) continue;
        res.pairwise.push_back({i, j, hausdorff(res.sections[i]->cloud, res.sections[j]->cloud)});
    }
    return res;
}

struct ModulusEntry {
    double delta = 0.0;
    double sup_distance = 0.0;
    std::size_t points = 0;  ///< grid points within delta, lambda0 included
};

/**
 * For each delta, sup of Delta(A_lambda, A_lambda0) over successful grid
 * points within delta of lambda0. Without explicit deltas, the distinct
 * distances from lambda0 to the other grid points are used.
 */
inline std::vector<ModulusEntry> continuity_modulus(const SweepResult& sw, std::size_t i0,
                                                    std::vector<double> deltas = {}) {
    if (i0 >= sw.sections.size() || !sw.sections[i0]) throw Error("continuity_modulus: lambda0 has no section");
    const std::size_t n = sw.sections.size();
    std::vector<double> dist(n), haus(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        dist[j] = sw.grid.distance(i0, j);
        if (sw.sections[j]) haus[j] = hausdorff_distance(sw.sections[j]->cloud, sw.sections[i0]->cloud);
    }
    if (deltas.empty()) {
        for (std::size_t j = 0; j < n; ++j)
            if (sw.sections[j]) deltas.push_back(dist[j]);
    }
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
    std::vector<ModulusEntry> out;
    for (const double d : deltas) {
        ModulusEntry e{d, 0.0, 0};
        for (std::size_t j = 0; j < n; ++j) {
            if (!sw.sections[j] || dist[j] > d * (1.0 + 1e-12)) continue;
            e.sup_distance = std::max(e.sup_distance, haus[j]);
            ++e.points;
        }
        out.push_back(e);
    }
    return out;
}

struct SemicontinuityEntry {
    std::size_t index = 0;
    double upper = 0.0;  ///< rho(A_lambda, A_lambda0): explosion
    double lower = 0.0;  ///< rho(A_lambda0, A_lambda): implosion
    double symmetric() const { return std::max(upper, lower); }
};

inline std::vector<SemicontinuityEntry> semicontinuity_split(const SweepResult& sw, std::size_t i0) {
    if (i0 >= sw.sections.size() || !sw.sections[i0]) throw Error("semicontinuity_split: lambda0 has no section");
    std::vector<SemicontinuityEntry> out;
    for (std::size_t j = 0; j < sw.sections.size(); ++j) {
        if (!sw.sections[j]) continue;
        const auto d = hausdorff(sw.sections[j]->cloud, sw.sections[i0]->cloud);
        out.push_back({j, d.forward, d.backward});
    }
    return out;
}

struct EquiAttractionReport {
    double t = 0.0;
    std::vector<double> s_values;
    std::vector<double> rates;               ///< sup over the grid, per s
    std::vector<std::size_t> argmax;         ///< grid index attaining the sup
    std::vector<std::vector<double>> per_lambda;  ///< [s][grid index]
};

/// For each s: rho(S_lambda(t, s) D, A_lambda(t)) per grid point and its sup.
inline EquiAttractionReport equi_attraction_rate(const ProcessDef& proc, const ParameterGrid& grid, double t,
                                                 const PointCloud& D, const std::vector<double>& s_values,
                                                 const std::vector<AttractorSection>& sections,
                                                 const IntegratorConfig& cfg = {}, const ParameterPoint& base = {}) {
    if (sections.size() != grid.size()) throw Error("equi_attraction_rate: need one section per grid point");
    for (std::size_t i = 0; i < sections.size(); ++i)
        if (!sections[i].converged)
            throw Error("equi_attraction_rate: section at " + describe(grid.point(i, base)) + " is not converged");
    EquiAttractionReport rep;
    rep.t = t;
    rep.s_values = s_values;
    for (const double s : s_values) {
        if (s > t) throw ConfigError("equi.s_values", "start times must not exceed t");
        std::vector<double> row(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto img = evolve_cloud(proc, grid.point(i, base), s, t, D, sections[i].merge_radius, cfg).cloud;
            row[i] = semi_distance(img, sections[i].cloud);
        }
        const auto it = std::max_element(row.begin(), row.end());
        rep.rates.push_back(*it);
        rep.argmax.push_back(static_cast<std::size_t>(it - row.begin()));
        rep.per_lambda.push_back(std::move(row));
    }
    return rep;
}

struct UniformEquiReport {
    std::vector<double> t_values;
    std::vector<double> rates;  ///< sup over grid and s_grid, per window
    std::vector<std::size_t> argmax_lambda;
    std::vector<double> argmax_s;
};

/// For each window t: sup over lambda and s in s_grid of rho(S_lambda(s + t, s) K, uniform attractor).
inline UniformEquiReport uniform_equi_attraction_rate(const ProcessDef& proc, const ParameterGrid& grid,
                                                      const PointCloud& K, const std::vector<double>& t_values,
                                                      const std::vector<double>& s_grid,
                                                      const std::vector<UniformAttractorApprox>& uniforms,
                                                      const IntegratorConfig& cfg = {},
                                                      const ParameterPoint& base = {}) {
    if (uniforms.size() != grid.size()) throw Error("uniform_equi_attraction_rate: need one approximation per grid point");
    if (s_grid.empty()) throw ConfigError("uniform.s_grid", "must not be empty");
    UniformEquiReport rep;
    rep.t_values = t_values;
    for (const double w : t_values) {
        if (!(w >= 0.0)) throw ConfigError("equi.t_values", "windows must be nonnegative");
        double best = -1.0;
        std::size_t bl = 0;
        double bs = s_grid.front();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto lam = grid.point(i, base);
            for (const double s : s_grid) {
                const auto img = evolve_cloud(proc, lam, s, s + w, K, uniforms[i].merge_radius, cfg).cloud;
                const double r = semi_distance(img, uniforms[i].cloud);
                if (r > best) {
                    best = r;
                    bl = i;
                    bs = s;
                }
            }
        }
        rep.rates.push_back(best);
        rep.argmax_lambda.push_back(bl);
        rep.argmax_s.push_back(bs);
    }
    return rep;
}

struct MonotoneCheck {
    bool monotone = true;
    std::optional<std::size_t> first_violation;  ///< index i with values[i] > values[i-1] + slack
};

inline MonotoneCheck check_monotone_convergence(const std::vector<double>& values, double slack) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1] + slack) return {false, i};
    return {};
}

/// Delta(iterate_k, final iterate) along a section computed with keep_iterates.
inline std::vector<double> distances_to_final(const AttractorSection& sec) {
    if (sec.iterates.empty()) throw Error("distances_to_final: section was computed without iterates");
    std::vector<double> out;
    out.reserve(sec.iterates.size());
    for (const auto& it : sec.iterates) out.push_back(hausdorff_distance(it, sec.iterates.back()));
    return out;
}

}  // namespace pullback
