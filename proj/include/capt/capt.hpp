#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <capt/point_cloud.hpp>

namespace capt
{
    struct BuildParams
    {
        float r_min = 0.01F;
        float r_max = 0.08F;

        /// Collapse a leaf's affordance set to its representative when the
        /// whole cell lies within r_min of it. Disabling it only enlarges sets.
        bool rmin_shortcut = true;

        void validate() const
        {
            if (!(std::isfinite(r_min) && std::isfinite(r_max) && r_min > 0.0F && r_min <= r_max))
            {
                throw Error(ErrorCode::invalid_argument, "radii must satisfy 0 < r_min <= r_max, both finite");
            }
            // Queries compare squared radii in float; padding leaves rely on it staying finite.
            if (!std::isfinite(r_max * r_max))
            {
                throw Error(ErrorCode::invalid_argument, "r_max is too large to square in single precision");
            }
        }
    };

    struct BuildStats
    {
        std::size_t n = 0;                ///< leaves, padding included
        std::size_t represented = 0;      ///< leaves holding a real point
        std::size_t max_affordance = 0;
        double mean_affordance = 0.0;     ///< over represented leaves
        std::size_t total_stored = 0;     ///< sum of |P| over every leaf
        std::size_t memory_bytes = 0;
    };

    /// Collision-affording point tree.
    ///
    /// An implicit, perfectly balanced k-d tree over the cloud padded to n = 2^h
    /// points. `tests` holds the n - 1 split values in Eytzinger order (node i
    /// splits on axis depth(i) mod K, children at 2i+1 and 2i+2). Each leaf owns
    /// an affordance set: its representative point plus every point within
    /// r_max of the leaf's cell, so a sphere centred in that cell with a radius
    /// in [r_min, r_max] collides with the cloud iff it collides with the set.
    /// Sets live back to back in one buffer, coordinates grouped by axis.
    ///
    /// Immutable once built; share freely across threads.
    template <std::size_t K>
    class Capt
    {
    public:
        Capt(
            float r_min,
            float r_max,
            std::vector<float> tests,
            std::vector<Aabb<K>> boxes,
            std::vector<std::uint64_t> offsets,
            std::vector<float> values)
          : r_min_(r_min)
          , r_max_(r_max)
          , tests_(std::move(tests))
          , boxes_(std::move(boxes))
          , offsets_(std::move(offsets))
          , values_(std::move(values))
        {
            check_layout();
            depth_ = static_cast<std::size_t>(std::countr_zero(boxes_.size()));
        }

        [[nodiscard]] static constexpr std::size_t dimension() noexcept { return K; }
        [[nodiscard]] std::size_t size() const noexcept { return boxes_.size(); }
        [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
        [[nodiscard]] float r_min() const noexcept { return r_min_; }
        [[nodiscard]] float r_max() const noexcept { return r_max_; }

        [[nodiscard]] std::span<const float> tests() const noexcept { return tests_; }
        [[nodiscard]] std::span<const Aabb<K>> boxes() const noexcept { return boxes_; }
        [[nodiscard]] std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
        [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

        [[nodiscard]] std::size_t affordance_size(std::size_t leaf) const noexcept
        {
            return static_cast<std::size_t>(offsets_[leaf + 1] - offsets_[leaf]);
        }

        /// Coordinates of axis `d` for every point of the leaf's set.
        [[nodiscard]] std::span<const float> affordance_axis(std::size_t leaf, std::size_t d) const noexcept
        {
            const std::size_t count = affordance_size(leaf);
            return {values_.data() + K * offsets_[leaf] + d * count, count};
        }

        [[nodiscard]] Point<K> affordance_point(std::size_t leaf, std::size_t j) const noexcept
        {
            Point<K> p;
            for (std::size_t d = 0; d < K; ++d)
            {
                p[d] = affordance_axis(leaf, d)[j];
            }
            return p;
        }

        [[nodiscard]] Point<K> representative(std::size_t leaf) const noexcept { return affordance_point(leaf, 0); }

        [[nodiscard]] bool is_padding(std::size_t leaf) const noexcept { return boxes_[leaf].is_empty_at_infinity(); }

        /// Branch-free descent: exactly depth() comparisons, x_d > T_i goes right.
        [[nodiscard]] std::size_t leaf_index(const Point<K> &x) const noexcept { return descend<false>(x, nullptr); }

        /// Same descent, counting the comparison steps taken.
        [[nodiscard]] std::size_t leaf_index(const Point<K> &x, std::size_t &steps) const noexcept
        {
            return descend<true>(x, &steps);
        }

        [[nodiscard]] BuildStats stats() const noexcept
        {
            BuildStats s;
            s.n = size();
            s.total_stored = static_cast<std::size_t>(offsets_.back());

            std::size_t represented_points = 0;
            for (std::size_t leaf = 0; leaf < size(); ++leaf)
            {
                const std::size_t count = affordance_size(leaf);
                s.max_affordance = std::max(s.max_affordance, count);
                if (!is_padding(leaf))
                {
                    ++s.represented;
                    represented_points += count;
                }
            }
            s.mean_affordance =
                s.represented == 0 ? 0.0 : static_cast<double>(represented_points) / static_cast<double>(s.represented);
            s.memory_bytes = tests_.size() * sizeof(float) + boxes_.size() * sizeof(Aabb<K>) +
                             offsets_.size() * sizeof(std::uint64_t) + values_.size() * sizeof(float);
            return s;
        }

        friend bool operator==(const Capt &, const Capt &) = default;

    private:
        template <bool Count>
        std::size_t descend(const Point<K> &x, std::size_t *steps) const noexcept
        {
            std::size_t i = 0;
            std::size_t d = 0;
            for (std::size_t level = 0; level < depth_; ++level)
            {
                i = 2 * i + 1 + static_cast<std::size_t>(x[d] > tests_[i]);
                d = d + 1 == K ? 0 : d + 1;
                if constexpr (Count)
                {
                    ++*steps;
                }
            }
            return i - (size() - 1);
        }

        void check_layout() const
        {
            const auto fail = [](const char *what) { throw Error(ErrorCode::format, what); };

            const std::size_t n = boxes_.size();
            if (n == 0 || !std::has_single_bit(n))
            {
                fail("leaf count must be a nonzero power of two");
            }
            if (tests_.size() != n - 1)
            {
                fail("test array must hold n - 1 values");
            }
            if (offsets_.size() != n + 1 || offsets_.front() != 0)
            {
                fail("affordance offsets must hold n + 1 entries starting at 0");
            }
            for (std::size_t j = 0; j < n; ++j)
            {
                if (offsets_[j + 1] <= offsets_[j])
                {
                    fail("every affordance set must be nonempty");
                }
            }
            if (values_.size() != K * offsets_.back())
            {
                fail("affordance value buffer does not match the offsets");
            }
            if (!(std::isfinite(r_min_) && std::isfinite(r_max_) && r_min_ > 0.0F && r_min_ <= r_max_))
            {
                fail("radii must satisfy 0 < r_min <= r_max");
            }
            for (float t : tests_)
            {
                if (std::isnan(t))
                {
                    fail("test value is NaN");
                }
            }
        }

        float r_min_;
        float r_max_;
        std::size_t depth_ = 0;
        std::vector<float> tests_;
        std::vector<Aabb<K>> boxes_;
        std::vector<std::uint64_t> offsets_;
        std::vector<float> values_;
    };

    namespace detail
    {
        template <std::size_t K>
        class CaptBuilder
        {
        public:
            CaptBuilder(std::vector<Point<K>> points, const BuildParams &params)
              : points_(std::move(points))
              , r_max_sq_(static_cast<double>(params.r_max) * params.r_max)
              , r_min_sq_(static_cast<double>(params.r_min) * params.r_min)
              , shortcut_(params.rmin_shortcut)
              , tests_(points_.size() - 1)
              , sets_(points_.size())
              , boxes_(points_.size())
            {
            }

            Capt<K> run(const BuildParams &params) &&
            {
                std::vector<std::uint32_t> order(points_.size());
                std::iota(order.begin(), order.end(), 0U);
                split(order, 0, order.size(), Aabb<K>::unbounded(), {}, 0, 0);

                std::vector<std::uint64_t> offsets(points_.size() + 1, 0);
                for (std::size_t leaf = 0; leaf < sets_.size(); ++leaf)
                {
                    offsets[leaf + 1] = offsets[leaf] + sets_[leaf].size();
                }

                std::vector<float> values(K * offsets.back());
                for (std::size_t leaf = 0; leaf < sets_.size(); ++leaf)
                {
                    const auto &set = sets_[leaf];
                    float *base = values.data() + K * offsets[leaf];
                    for (std::size_t d = 0; d < K; ++d)
                    {
                        for (std::size_t j = 0; j < set.size(); ++j)
                        {
                            base[d * set.size() + j] = points_[set[j]][d];
                        }
                    }
                }

                return Capt<K>(
                    params.r_min,
                    params.r_max,
                    std::move(tests_),
                    std::move(boxes_),
                    std::move(offsets),
                    std::move(values));
            }

        private:
            [[nodiscard]] bool affords(std::uint32_t index, const Aabb<K> &cell) const noexcept
            {
                const auto &p = points_[index];
                return !p.is_infinity() && dist_sq_point_aabb<double>(p, cell) <= r_max_sq_;
            }

            void split(
                std::vector<std::uint32_t> &order,
                std::size_t begin,
                std::size_t end,
                const Aabb<K> &cell,
                std::vector<std::uint32_t> afforded,
                std::size_t node,
                std::size_t axis)
            {
                if (end - begin == 1)
                {
                    make_leaf(order[begin], cell, afforded, node - (points_.size() - 1));
                    return;
                }

                // Rank split: exactly half goes left. Ties on the coordinate are
                // ordered by input index so the result is reproducible.
                const std::size_t half = (end - begin) / 2;
                const auto first = order.begin() + static_cast<std::ptrdiff_t>(begin);
                const auto middle = first + static_cast<std::ptrdiff_t>(half);
                std::nth_element(
                    first,
                    middle - 1,
                    order.begin() + static_cast<std::ptrdiff_t>(end),
                    [&](std::uint32_t a, std::uint32_t b)
                    {
                        const float pa = points_[a][axis];
                        const float pb = points_[b][axis];
                        return pa < pb || (pa == pb && a < b);
                    });

                // The wall sits at the median of the two middle order statistics, so
                // neither half's points lie on it unless they tie. A right half of
                // pure padding has minimum +inf and yields T = +inf.
                const float left_max = points_[*(middle - 1)][axis];
                float right_min = infinity;
                for (auto it = middle; it != order.begin() + static_cast<std::ptrdiff_t>(end); ++it)
                {
                    right_min = std::min(right_min, points_[*it][axis]);
                }
                const float test = right_min == infinity ? infinity : std::midpoint(left_max, right_min);
                tests_[node] = test;

                Aabb<K> left_cell = cell;
                Aabb<K> right_cell = cell;
                left_cell.hi[axis] = std::min(left_cell.hi[axis], test);
                right_cell.lo[axis] = std::max(right_cell.lo[axis], test);

                std::vector<std::uint32_t> left_afforded;
                std::vector<std::uint32_t> right_afforded;
                for (const auto index : afforded)
                {
                    if (affords(index, left_cell))
                    {
                        left_afforded.push_back(index);
                    }
                    if (affords(index, right_cell))
                    {
                        right_afforded.push_back(index);
                    }
                }
                for (std::size_t k = begin + half; k < end; ++k)
                {
                    if (affords(order[k], left_cell))
                    {
                        left_afforded.push_back(order[k]);
                    }
                }
                for (std::size_t k = begin; k < begin + half; ++k)
                {
                    if (affords(order[k], right_cell))
                    {
                        right_afforded.push_back(order[k]);
                    }
                }
                afforded.clear();
                afforded.shrink_to_fit();

                const std::size_t next_axis = axis + 1 == K ? 0 : axis + 1;
                split(order, begin, begin + half, left_cell, std::move(left_afforded), 2 * node + 1, next_axis);
                split(order, begin + half, end, right_cell, std::move(right_afforded), 2 * node + 2, next_axis);
            }

            void make_leaf(
                std::uint32_t rep, const Aabb<K> &cell, const std::vector<std::uint32_t> &afforded, std::size_t leaf)
            {
                auto &set = sets_[leaf];
                set.push_back(rep);

                const auto &p = points_[rep];
                if (p.is_infinity())
                {
                    boxes_[leaf] = Aabb<K>::empty_at_infinity();
                    return;
                }

                const bool whole_cell_hits_rep = shortcut_ && farthest_corner_dist_sq<double>(cell, p) <= r_min_sq_;
                if (!whole_cell_hits_rep)
                {
                    set.insert(set.end(), afforded.begin(), afforded.end());
                }

                Aabb<K> box = Aabb<K>::around(p);
                for (const auto index : set)
                {
                    for (std::size_t d = 0; d < K; ++d)
                    {
                        box.lo[d] = std::min(box.lo[d], points_[index][d]);
                        box.hi[d] = std::max(box.hi[d], points_[index][d]);
                    }
                }
                boxes_[leaf] = box;
            }

            std::vector<Point<K>> points_;
            double r_max_sq_;
            double r_min_sq_;
            bool shortcut_;
            std::vector<float> tests_;
            std::vector<std::vector<std::uint32_t>> sets_;
            std::vector<Aabb<K>> boxes_;
        };
    }  // namespace detail

    /// Builds the tree. The cloud is padded with infinity points up to the next
    /// power of two; padding leaves hold only the infinity point and an
    /// empty-at-infinity box, and every node whose right half is pure padding
    /// gets test value +inf so finite queries never reach them.
    ///
    /// Memory is O(K n a) for maximum affordance set size a, which degrades to
    /// O(K n^2) when the whole cloud lies within r_max of every cell.
    template <std::size_t K>
    [[nodiscard]] Capt<K> construct(const PointCloud<K> &cloud, const BuildParams &params)
    {
        params.validate();
        if (cloud.empty())
        {
            throw Error(ErrorCode::empty_input, "cannot build a tree over an empty cloud");
        }

        std::vector<Point<K>> padded(cloud.points().begin(), cloud.points().end());
        padded.resize(std::bit_ceil(cloud.size()), Point<K>::at_infinity());
        return detail::CaptBuilder<K>(std::move(padded), params).run(params);
    }
}  // namespace capt
