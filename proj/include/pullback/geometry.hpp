#pragma once

/** \file geometry.hpp
 * \brief Finite point clouds standing in for compact sets, and exact Hausdorff
 * semi-distances between them. */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/parallel.hpp"

namespace pullback {

/**
 * Non-empty finite set of points in R^dim, stored row-major in one flat
 * buffer. `resolution` records the merge radius used to build the cloud: when
 * positive, no two points are within that distance of each other.
 */
class PointCloud {
public:
    PointCloud(std::size_t dim, std::vector<double> coords, double resolution = 0.0)
        : dim_(dim), coords_(std::move(coords)), resolution_(resolution) {
        if (dim_ == 0) throw Error("PointCloud: dimension must be positive");
        if (coords_.empty()) throw Error("PointCloud: empty cloud");
        if (coords_.size() % dim_ != 0)
            throw Error("PointCloud: coordinate count is not a multiple of dim");
        if (!(resolution_ >= 0.0)) throw Error("PointCloud: negative resolution");
    }

    static PointCloud from_points(const std::vector<std::vector<double>>& pts,
                                  double resolution = 0.0) {
        if (pts.empty()) throw Error("PointCloud: empty cloud");
        const std::size_t d = pts.front().size();
        std::vector<double> flat;
        flat.reserve(d * pts.size());
        for (const auto& p : pts) {
            if (p.size() != d) throw Error("PointCloud: ragged point list");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return PointCloud(d, std::move(flat), resolution);
    }

    static PointCloud singleton(std::span<const double> p) {
        return PointCloud(p.size(), std::vector<double>(p.begin(), p.end()));
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }
    double resolution() const noexcept { return resolution_; }
    void set_resolution(double r) { resolution_ = r; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<const double> coords() const noexcept { return coords_; }

    /// Reorders points lexicographically by coordinates (x0 first).
    void sort_lexicographic() {
        std::vector<std::size_t> order(size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
            const auto pa = point(a);
            const auto pb = point(b);
            return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
        });
        std::vector<double> out;
        out.reserve(coords_.size());
        for (auto i : order) {
            const auto p = point(i);
            out.insert(out.end(), p.begin(), p.end());
        }
        coords_ = std::move(out);
    }

    bool operator==(const PointCloud& o) const {
        return dim_ == o.dim_ && coords_ == o.coords_;
    }

private:
    std::size_t dim_;
    std::vector<double> coords_;
    double resolution_;
};

/** Directed and symmetric Hausdorff distances between two clouds. */
struct DistancePair {
    double forward = 0.0;   ///< rho(A, C)
    double backward = 0.0;  ///< rho(C, A)
    double symmetric = 0.0; ///< max(forward, backward)
};

/// Squared Euclidean distance; the single kernel shared by every search path.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

namespace detail {

inline void check_compatible(const PointCloud& a, const PointCloud& c) {
    if (a.dim() != c.dim())
        throw Error("Hausdorff: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                    std::to_string(c.dim()) + ")");
}

/**
 * Static k-d tree over a cloud. Nearest-neighbour queries return exactly the
 * same squared distance as a linear scan: candidates are compared with
 * squared_distance, and a subtree is skipped only when the squared split-plane
 * gap already exceeds the best value (floating subtraction and summation are
 * monotone, so no skipped point can be closer).
 */
class KdTree {
public:
    explicit KdTree(const PointCloud& cloud) : cloud_(cloud), index_(cloud.size()),
                                               split_(cloud.size(), 0) {
        std::iota(index_.begin(), index_.end(), std::size_t{0});
        build(0, index_.size());
    }

    /**
     * Smallest squared distance from q to the cloud. The search may stop early
     * once a candidate at or below `good_enough` is found; the return value is
     * then only guaranteed to be <= good_enough.
     */
    double nearest_sq(std::span<const double> q, double good_enough = -1.0) const {
        double best = std::numeric_limits<double>::infinity();
        search(0, index_.size(), q, best, good_enough);
        return best;
    }

private:
    static constexpr std::size_t kLeaf = 8;

    void build(std::size_t lo, std::size_t hi) {
        if (hi - lo <= kLeaf) return;
        const std::size_t d = cloud_.dim();
        std::size_t axis = 0;
        double widest = -1.0;
        for (std::size_t k = 0; k < d; ++k) {
            double mn = std::numeric_limits<double>::infinity();
            double mx = -mn;
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = cloud_.point(index_[i])[k];
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            if (mx - mn > widest) {
                widest = mx - mn;
                axis = k;
            }
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](std::size_t a, std::size_t b) {
                             return cloud_.point(a)[axis] < cloud_.point(b)[axis];
                         });
        split_[mid] = axis;
        build(lo, mid);
        build(mid + 1, hi);
    }

    void search(std::size_t lo, std::size_t hi, std::span<const double> q, double& best,
                double good_enough) const {
        if (best <= good_enough) return;
        if (hi - lo <= kLeaf) {
            for (std::size_t i = lo; i < hi; ++i)
                best = std::min(best, squared_distance(cloud_.point(index_[i]), q));
            return;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto p = cloud_.point(index_[mid]);
        best = std::min(best, squared_distance(p, q));
        const std::size_t axis = split_[mid];
        const double gap = q[axis] - p[axis];
        const bool left_first = gap < 0.0;
        if (left_first) search(lo, mid, q, best, good_enough);
        else search(mid + 1, hi, q, best, good_enough);
        if (!(gap * gap > best)) {
            if (left_first) search(mid + 1, hi, q, best, good_enough);
            else search(lo, mid, q, best, good_enough);
        }
    }

    const PointCloud& cloud_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> split_;
};

inline double nearest_sq_brute(const PointCloud& c, std::span<const double> q) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.size(); ++j) best = std::min(best, squared_distance(c.point(j), q));
    return best;
}

}  // namespace detail

/// O(|A||C|) reference for rho(A, C) = sup_a inf_c |a - c|.
inline double semi_distance_brute(const PointCloud& a, const PointCloud& c) {
    detail::check_compatible(a, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, detail::nearest_sq_brute(c, a.point(i)));
    return std::sqrt(worst);
}

/**
 * Hausdorff semi-distance rho(A, C), exact for finite clouds. Uses a k-d tree
 * over C once it is large enough to pay off; the value is bit-identical to
 * semi_distance_brute.
 */
inline double semi_distance(const PointCloud& a, const PointCloud& c) {
    detail::check_compatible(a, c);
    if (c.size() * a.size() <= 4096) return semi_distance_brute(a, c);

    const detail::KdTree tree(c);
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), a.size()));
    const std::size_t block = (a.size() + workers - 1) / workers;
    std::vector<double> partial(workers, 0.0);
    parallel_for(workers, [&](std::size_t w) {
        double worst = 0.0;
        const std::size_t hi = std::min(a.size(), (w + 1) * block);
        for (std::size_t i = w * block; i < hi; ++i)
            worst = std::max(worst, tree.nearest_sq(a.point(i), worst));
        partial[w] = worst;
    });
    return std::sqrt(*std::max_element(partial.begin(), partial.end()));
}

inline DistancePair hausdorff(const PointCloud& a, const PointCloud& c) {
    DistancePair d;
    d.forward = semi_distance(a, c);
    d.backward = semi_distance(c, a);
    d.symmetric = std::max(d.forward, d.backward);
    return d;
}

inline DistancePair hausdorff_brute(const PointCloud& a, const PointCloud& c) {
    DistancePair d;
    d.forward = semi_distance_brute(a, c);
    d.backward = semi_distance_brute(c, a);
    d.symmetric = std::max(d.forward, d.backward);
    return d;
}

/// Symmetric distance only.
inline double hausdorff_distance(const PointCloud& a, const PointCloud& c) {
    return hausdorff(a, c).symmetric;
}

/**
 * Greedy first-wins thinning in lexicographic order: a point is kept only if
 * no previously kept point lies within `radius`. The output is sorted, is a
 * subset of the input, and satisfies rho(input, output) <= radius.
 */
inline PointCloud merge_dedup(PointCloud cloud, double radius) {
    if (!(radius >= 0.0)) throw Error("merge_dedup: negative radius");
    cloud.sort_lexicographic();
    const std::size_t d = cloud.dim();
    std::vector<double> kept;
    kept.reserve(cloud.coords().size());

    if (radius == 0.0) {
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto p = cloud.point(i);
            if (i > 0) {
                const auto prev = cloud.point(i - 1);
                if (std::equal(p.begin(), p.end(), prev.begin())) continue;
            }
            kept.insert(kept.end(), p.begin(), p.end());
        }
        return PointCloud(d, std::move(kept), 0.0);
    }

    const double r2 = radius * radius;
    auto kept_point = [&](std::size_t j) { return std::span<const double>(kept.data() + j * d, d); };

    if (d <= 3) {
        // Cells slightly wider than radius so any neighbour within radius sits in
        // an adjacent cell despite rounding in the division.
        const double cell = radius * (1.0 + 1e-9);
        struct KeyHash {
            std::size_t operator()(const std::array<std::int64_t, 3>& k) const noexcept {
                std::uint64_t h = 1469598103934665603ull;
                for (auto v : k) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
                return static_cast<std::size_t>(h);
            }
        };
        std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::size_t>, KeyHash> grid;
        auto key_of = [&](std::span<const double> p) {
            std::array<std::int64_t, 3> k{0, 0, 0};
            for (std::size_t a = 0; a < d; ++a) k[a] = static_cast<std::int64_t>(std::floor(p[a] / cell));
            return k;
        };
        std::size_t n_kept = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto p = cloud.point(i);
            const auto k = key_of(p);
            bool close = false;
            const int span_y = d > 1 ? 1 : 0;
            const int span_z = d > 2 ? 1 : 0;
            for (int dx = -1; dx <= 1 && !close; ++dx)
                for (int dy = -span_y; dy <= span_y && !close; ++dy)
                    for (int dz = -span_z; dz <= span_z && !close; ++dz) {
                        auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
                        if (it == grid.end()) continue;
                        for (auto j : it->second)
                            if (squared_distance(kept_point(j), p) <= r2) {
                                close = true;
                                break;
                            }
                    }
            if (close) continue;
            kept.insert(kept.end(), p.begin(), p.end());
            grid[k].push_back(n_kept++);
        }
    } else {
        std::size_t n_kept = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto p = cloud.point(i);
            bool close = false;
            for (std::size_t j = 0; j < n_kept && !close; ++j)
                close = squared_distance(kept_point(j), p) <= r2;
            if (close) continue;
            kept.insert(kept.end(), p.begin(), p.end());
            ++n_kept;
        }
    }
    return PointCloud(d, std::move(kept), radius);
}

/// Union of clouds of equal dimension (no deduplication).
inline PointCloud concatenate(const std::vector<PointCloud>& parts) {
    if (parts.empty()) throw Error("concatenate: no clouds");
    const std::size_t d = parts.front().dim();
    std::vector<double> flat;
    double res = 0.0;
    for (const auto& p : parts) {
        if (p.dim() != d) throw Error("concatenate: dimension mismatch");
        flat.insert(flat.end(), p.coords().begin(), p.coords().end());
        res = std::max(res, p.resolution());
    }
    return PointCloud(d, std::move(flat), res);
}

/// Largest pairwise distance inside a cloud (brute force).
inline double diameter(const PointCloud& c) {
    double best = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            best = std::max(best, squared_distance(c.point(i), c.point(j)));
    return std::sqrt(best);
}

}  // namespace pullback
