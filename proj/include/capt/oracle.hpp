#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include <capt/morton.hpp>
#include <capt/point_cloud.hpp>

// Ground-truth referees and the classical k-d tree baseline. Everything here
// computes distances in double precision and shares no code path with the
// tree or the filter beyond the geometric types.
namespace capt::oracle
{
    template <std::size_t K>
    [[nodiscard]] bool brute_collides(const PointCloud<K> &cloud, const Sphere<K> &s) noexcept
    {
        const double limit = static_cast<double>(s.radius) * s.radius;
        for (const auto &p : cloud)
        {
            if (dist_sq<double>(p, s.center) <= limit)
            {
                return true;
            }
        }
        return false;
    }

    template <std::size_t K>
    struct Nearest
    {
        Point<K> point;
        std::size_t index = 0;
        double distance = std::numeric_limits<double>::infinity();
    };

    template <std::size_t K>
    [[nodiscard]] Nearest<K> brute_nearest(const PointCloud<K> &cloud, const Point<K> &x)
    {
        if (cloud.empty())
        {
            throw Error(ErrorCode::empty_input, "nearest neighbour in an empty cloud");
        }

        Nearest<K> best;
        double best_sq = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cloud.size(); ++i)
        {
            const double d = dist_sq<double>(cloud[i], x);
            if (d < best_sq)
            {
                best_sq = d;
                best.point = cloud[i];
                best.index = i;
            }
        }
        best.distance = std::sqrt(best_sq);
        return best;
    }

    /// Median-split k-d tree with explicit nodes and one point per leaf,
    /// searched by recursive branch-and-bound with backtracking.
    template <std::size_t K>
    class KdTree
    {
    public:
        explicit KdTree(const PointCloud<K> &cloud) : points_(cloud.points().begin(), cloud.points().end())
        {
            if (points_.empty())
            {
                throw Error(ErrorCode::empty_input, "cannot build a k-d tree over an empty cloud");
            }

            std::vector<std::uint32_t> order(points_.size());
            std::iota(order.begin(), order.end(), 0U);
            nodes_.reserve(2 * points_.size());
            build(order, 0, order.size(), 0);
        }

        [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }

        /// Exact nearest neighbour; `skip` excludes one input index.
        [[nodiscard]] Nearest<K> nearest(
            const Point<K> &x, std::size_t skip = std::numeric_limits<std::size_t>::max()) const noexcept
        {
            Best best;
            best.skip = skip;
            search(0, x, best);

            Nearest<K> out;
            if (best.index != none)
            {
                out.index = best.index;
                out.point = points_[best.index];
                out.distance = std::sqrt(best.dist_sq);
            }
            return out;
        }

        /// Leaf points in in-order traversal.
        [[nodiscard]] std::vector<std::size_t> in_order() const
        {
            std::vector<std::size_t> out;
            collect(0, out);
            return out;
        }

    private:
        static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

        struct Node
        {
            float left_max = 0.0F;   // largest split coordinate on the left
            float right_min = 0.0F;  // smallest split coordinate on the right
            std::uint32_t axis = 0;
            std::uint32_t left = none;
            std::uint32_t right = none;
            std::uint32_t point = none;
        };

        struct Best
        {
            double dist_sq = std::numeric_limits<double>::infinity();
            std::size_t index = none;
            std::size_t skip = 0;
        };

        std::uint32_t build(std::vector<std::uint32_t> &order, std::size_t begin, std::size_t end, std::size_t axis)
        {
            const auto id = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();

            if (end - begin == 1)
            {
                nodes_[id].point = order[begin];
                return id;
            }

            const std::size_t half = (end - begin) / 2;
            const auto first = order.begin() + static_cast<std::ptrdiff_t>(begin);
            const auto middle = first + static_cast<std::ptrdiff_t>(half);
            const auto last = order.begin() + static_cast<std::ptrdiff_t>(end);
            std::nth_element(
                first, middle, last, [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });

            const float left_max = points_[*std::max_element(
                first, middle, [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; })][axis];
            const float right_min = points_[*middle][axis];

            const std::size_t next = (axis + 1) % K;
            const auto left = build(order, begin, begin + half, next);
            const auto right = build(order, begin + half, end, next);

            auto &node = nodes_[id];
            node.axis = static_cast<std::uint32_t>(axis);
            node.left_max = left_max;
            node.right_min = right_min;
            node.left = left;
            node.right = right;
            return id;
        }

        void search(std::uint32_t id, const Point<K> &x, Best &best) const noexcept
        {
            const Node &node = nodes_[id];
            if (node.point != none)
            {
                if (node.point != best.skip)
                {
                    const double d = dist_sq<double>(points_[node.point], x);
                    if (d < best.dist_sq)
                    {
                        best.dist_sq = d;
                        best.index = node.point;
                    }
                }
                return;
            }

            const double coord = x[node.axis];
            const double to_left = std::max(0.0, coord - static_cast<double>(node.left_max));
            const double to_right = std::max(0.0, static_cast<double>(node.right_min) - coord);

            const bool left_first = to_left <= to_right;
            const std::uint32_t near = left_first ? node.left : node.right;
            const std::uint32_t far = left_first ? node.right : node.left;
            const double far_gap = left_first ? to_right : to_left;

            search(near, x, best);
            if (far_gap * far_gap < best.dist_sq)
            {
                search(far, x, best);
            }
        }

        void collect(std::uint32_t id, std::vector<std::size_t> &out) const
        {
            const Node &node = nodes_[id];
            if (node.point != none)
            {
                out.push_back(node.point);
                return;
            }
            collect(node.left, out);
            collect(node.right, out);
        }

        std::vector<Point<K>> points_;
        std::vector<Node> nodes_;
    };

    template <std::size_t K>
    [[nodiscard]] Nearest<K> kd_nearest(const KdTree<K> &tree, const Point<K> &x)
    {
        return tree.nearest(x);
    }

    /// Baseline collision check: nearest neighbour, then compare with the radius.
    template <std::size_t K>
    [[nodiscard]] bool kd_collides(const KdTree<K> &tree, const Sphere<K> &s) noexcept
    {
        // Compared squared, like brute_collides; a rounded square root could
        // land on the radius and flip a near-tangent verdict.
        const auto nearest = tree.nearest(s.center);
        return dist_sq<double>(nearest.point, s.center) <= static_cast<double>(s.radius) * s.radius;
    }

    struct DispersionStats
    {
        double mean = 0.0;
        double median = 0.0;
        double p95 = 0.0;
        std::size_t count = 0;
    };

    /// Summary of per-point nearest-neighbour distances (nearest other index,
    /// so exact duplicates contribute 0). p95 uses the nearest-rank rule.
    [[nodiscard]] inline DispersionStats summarize(std::vector<double> values)
    {
        if (values.empty())
        {
            throw Error(ErrorCode::empty_input, "no nearest-neighbour distances to summarize");
        }

        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();

        DispersionStats s;
        s.count = n;
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
        s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
        const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
        s.p95 = values[std::max<std::size_t>(rank, 1) - 1];
        return s;
    }

    template <std::size_t K>
    [[nodiscard]] std::vector<double> nearest_neighbour_distances(const PointCloud<K> &cloud)
    {
        if (cloud.size() < 2)
        {
            throw Error(ErrorCode::empty_input, "dispersion needs at least two points");
        }

        const KdTree<K> tree(cloud);
        std::vector<double> out(cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i)
        {
            out[i] = tree.nearest(cloud[i], i).distance;
        }
        return out;
    }

    template <std::size_t K>
    [[nodiscard]] DispersionStats dispersion_stats(const PointCloud<K> &cloud)
    {
        return summarize(nearest_neighbour_distances(cloud));
    }

    /// Per-point values from every cloud are pooled before summarizing.
    template <std::size_t K>
    [[nodiscard]] DispersionStats dispersion_stats(std::span<const PointCloud<K>> clouds)
    {
        std::vector<double> pooled;
        for (const auto &cloud : clouds)
        {
            const auto values = nearest_neighbour_distances(cloud);
            pooled.insert(pooled.end(), values.begin(), values.end());
        }
        return summarize(std::move(pooled));
    }

    namespace detail
    {
        // Same affine quantization as the fast path, restated.
        template <std::size_t K>
        std::array<std::uint64_t, K> lattice_coords(const Point<K> &p, const Aabb<K> &box)
        {
            const double top = std::ldexp(1.0, static_cast<int>(morton_bits<K>)) - 1.0;
            std::array<std::uint64_t, K> out{};
            for (std::size_t d = 0; d < K; ++d)
            {
                const double extent = static_cast<double>(box.hi[d]) - static_cast<double>(box.lo[d]);
                if (extent > 0.0)
                {
                    const double scaled = (static_cast<double>(p[d]) - static_cast<double>(box.lo[d])) / extent * top;
                    out[d] = static_cast<std::uint64_t>(std::min(top, std::floor(scaled + 0.5)));
                }
            }
            return out;
        }

        inline bool msb_less(std::uint64_t a, std::uint64_t b) noexcept { return a < b && a < (a ^ b); }

        // Z-order comparison without building keys: the axis holding the most
        // significant differing bit decides; at equal bit positions the axis
        // earlier in the permutation wins.
        template <std::size_t K>
        bool z_less(
            const std::array<std::uint64_t, K> &a, const std::array<std::uint64_t, K> &b, const AxisPermutation<K> &perm)
        {
            std::size_t axis = perm[0];
            std::uint64_t diff = a[axis] ^ b[axis];
            for (std::size_t j = 1; j < K; ++j)
            {
                const std::uint64_t candidate = a[perm[j]] ^ b[perm[j]];
                if (msb_less(diff, candidate))
                {
                    axis = perm[j];
                    diff = candidate;
                }
            }
            return a[axis] < b[axis];
        }
    }  // namespace detail

    /// Independent replay of the curve filter: same passes, different sort
    /// and comparison machinery. Must match capt::filter exactly.
    template <std::size_t K>
    [[nodiscard]] PointCloud<K> filter_oracle(const PointCloud<K> &cloud, const FilterConfig<K> &cfg)
    {
        cfg.validate();

        std::vector<Point<K>> points;
        for (const auto &p : cloud)
        {
            if (!cfg.reach ||
                dist_sq<double>(p, cfg.reach->base) <=
                    static_cast<double>(cfg.reach->max_reach) * static_cast<double>(cfg.reach->max_reach))
            {
                points.push_back(p);
            }
        }
        if (points.empty())
        {
            return PointCloud<K>{};
        }

        const PointCloud<K> kept_by_reach(points);
        const Aabb<K> box = kept_by_reach.bounds();
        std::vector<std::array<std::uint64_t, K>> lattice;
        lattice.reserve(points.size());
        for (const auto &p : points)
        {
            lattice.push_back(detail::lattice_coords(p, box));
        }

        const double r_sq = static_cast<double>(cfg.r_filter) * static_cast<double>(cfg.r_filter);

        std::vector<std::size_t> current(points.size());
        std::iota(current.begin(), current.end(), std::size_t{0});

        AxisPermutation<K> perm;
        std::iota(perm.begin(), perm.end(), std::uint8_t{0});
        do
        {
            std::stable_sort(
                current.begin(),
                current.end(),
                [&](std::size_t a, std::size_t b)
                {
                    if (detail::z_less(lattice[a], lattice[b], perm))
                    {
                        return true;
                    }
                    if (detail::z_less(lattice[b], lattice[a], perm))
                    {
                        return false;
                    }
                    if (points[a].coords != points[b].coords)
                    {
                        return points[a].coords < points[b].coords;
                    }
                    return a < b;
                });

            std::vector<std::size_t> next{current.front()};
            for (std::size_t j = 1; j < current.size(); ++j)
            {
                const auto &anchor = points[next.back()];
                const auto &candidate = points[current[j]];
                double sum = 0.0;
                for (std::size_t d = 0; d < K; ++d)
                {
                    const double delta = static_cast<double>(anchor[d]) - static_cast<double>(candidate[d]);
                    sum += delta * delta;
                }
                if (sum > r_sq)
                {
                    next.push_back(current[j]);
                }
            }
            current = std::move(next);
        } while (std::next_permutation(perm.begin(), perm.end()));

        // Gap repair by exhaustive search, in input order.
        if (cfg.repair_gaps && cfg.r_filter > 0.0F)
        {
            std::vector<bool> kept(points.size(), false);
            for (const auto index : current)
            {
                kept[index] = true;
            }
            for (std::size_t i = 0; i < points.size(); ++i)
            {
                if (kept[i])
                {
                    continue;
                }
                const bool covered = std::any_of(
                    current.begin(), current.end(),
                    [&](std::size_t k) { return dist_sq<double>(points[k], points[i]) <= r_sq; });
                if (!covered)
                {
                    kept[i] = true;
                    current.push_back(i);
                }
            }
        }

        std::vector<Point<K>> out;
        out.reserve(current.size());
        for (const auto index : current)
        {
            out.push_back(points[index]);
        }
        return PointCloud<K>(std::move(out));
    }
}  // namespace capt::oracle
