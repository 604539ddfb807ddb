#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>

#include <capt/capt.hpp>

namespace capt
{
    struct QueryOptions
    {
        /// Reject spheres that miss the leaf's affordance bounding box before
        /// scanning the set. Never changes a verdict.
        bool aabb_prefilter = true;

        /// Evaluate every valid lane of a batch instead of stopping at the
        /// first collision, so QueryOutcome::lanes is complete.
        bool per_lane = false;
    };

    /// Filled only by the counted query overloads.
    struct QueryCounters
    {
        std::uint64_t queries = 0;
        std::uint64_t descent_steps = 0;
        std::uint64_t aabb_rejections = 0;
        std::uint64_t sets_scanned = 0;
        std::uint64_t points_scanned = 0;
    };

    struct QueryOutcome
    {
        bool any_collision = false;
        /// Bit i set iff lane i collides. Only complete with per_lane; otherwise
        /// holds at least the lane that ended the search.
        std::uint32_t lanes = 0;
    };

    /// L spheres evaluated in lockstep, coordinates grouped by axis. Lanes
    /// outside `mask` are ignored.
    template <std::size_t K, std::size_t L = 8>
    struct SphereBatch
    {
        static_assert(std::has_single_bit(L) && L <= 32, "lane width must be a power of two <= 32");
        static constexpr std::size_t lanes = L;

        std::array<std::array<float, L>, K> centers{};
        std::array<float, L> radii{};
        std::uint32_t mask = 0;

        void set(std::size_t lane, const Sphere<K> &s) noexcept
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                centers[d][lane] = s.center[d];
            }
            radii[lane] = s.radius;
            mask |= 1U << lane;
        }

        void invalidate(std::size_t lane) noexcept { mask &= ~(1U << lane); }

        [[nodiscard]] bool valid(std::size_t lane) const noexcept { return ((mask >> lane) & 1U) != 0; }

        [[nodiscard]] Sphere<K> sphere(std::size_t lane) const noexcept
        {
            Sphere<K> s;
            for (std::size_t d = 0; d < K; ++d)
            {
                s.center[d] = centers[d][lane];
            }
            s.radius = radii[lane];
            return s;
        }
    };

    /// Exactness only holds for radii in [r_min, r_max].
    template <std::size_t K>
    void check_query(const Capt<K> &tree, const Sphere<K> &s)
    {
        validate(s);
        if (s.radius < tree.r_min() || s.radius > tree.r_max())
        {
            throw Error(
                ErrorCode::radius_out_of_range,
                "query radius " + std::to_string(s.radius) + " outside the tree's [" + std::to_string(tree.r_min()) +
                    ", " + std::to_string(tree.r_max()) + "]");
        }
    }

    namespace detail
    {
        template <std::size_t K>
        [[nodiscard]] inline bool scan_affordance_set(
            const Capt<K> &tree, std::size_t leaf, const std::array<float, K> &center, float radius_sq) noexcept
        {
            constexpr std::size_t chunk = 8;

            const std::size_t count = tree.affordance_size(leaf);
            const float *base = tree.values().data() + K * tree.offsets()[leaf];

            std::size_t j = 0;
            for (; j + chunk <= count; j += chunk)
            {
                bool hit = false;
                for (std::size_t t = 0; t < chunk; ++t)
                {
                    float sum = 0.0F;
                    for (std::size_t d = 0; d < K; ++d)
                    {
                        const float delta = base[d * count + j + t] - center[d];
                        sum += delta * delta;
                    }
                    hit |= sum <= radius_sq;
                }
                if (hit)
                {
                    return true;
                }
            }

            bool hit = false;
            for (; j < count; ++j)
            {
                float sum = 0.0F;
                for (std::size_t d = 0; d < K; ++d)
                {
                    const float delta = base[d * count + j] - center[d];
                    sum += delta * delta;
                }
                hit |= sum <= radius_sq;
            }
            return hit;
        }

        template <std::size_t K>
        [[nodiscard]] inline float box_dist_sq(const std::array<float, K> &center, const Aabb<K> &box) noexcept
        {
            float sum = 0.0F;
            for (std::size_t d = 0; d < K; ++d)
            {
                const float below = box.lo[d] - center[d];
                const float above = center[d] - box.hi[d];
                const float residual = std::max(std::max(below, 0.0F), above);
                sum += residual * residual;
            }
            return sum;
        }

        template <bool Count, std::size_t K>
        bool collides_one(
            const Capt<K> &tree, const Sphere<K> &s, const QueryOptions &opts, QueryCounters *counters) noexcept
        {
            std::size_t steps = 0;
            const std::size_t leaf = Count ? tree.leaf_index(s.center, steps) : tree.leaf_index(s.center);
            const float radius_sq = s.radius * s.radius;

            if constexpr (Count)
            {
                ++counters->queries;
                counters->descent_steps += steps;
            }

            if (opts.aabb_prefilter && !(box_dist_sq(s.center.coords, tree.boxes()[leaf]) <= radius_sq))
            {
                if constexpr (Count)
                {
                    ++counters->aabb_rejections;
                }
                return false;
            }

            if constexpr (Count)
            {
                ++counters->sets_scanned;
                counters->points_scanned += tree.affordance_size(leaf);
            }
            return scan_affordance_set(tree, leaf, s.center.coords, radius_sq);
        }

        template <bool Count, std::size_t K, std::size_t L>
        QueryOutcome collides_lanes(
            const Capt<K> &tree, const SphereBatch<K, L> &batch, const QueryOptions &opts, QueryCounters *counters) noexcept
        {
            if (batch.mask == 0)
            {
                return {};
            }

            // Lockstep descent; every lane walks the same number of levels.
            const auto tests = tree.tests();
            std::array<std::size_t, L> node{};
            std::size_t axis = 0;
            for (std::size_t level = 0; level < tree.depth(); ++level)
            {
                for (std::size_t lane = 0; lane < L; ++lane)
                {
                    node[lane] = 2 * node[lane] + 1 + static_cast<std::size_t>(batch.centers[axis][lane] > tests[node[lane]]);
                }
                axis = axis + 1 == K ? 0 : axis + 1;
            }

            std::array<float, L> radius_sq{};
            for (std::size_t lane = 0; lane < L; ++lane)
            {
                node[lane] -= tree.size() - 1;
                radius_sq[lane] = batch.radii[lane] * batch.radii[lane];
            }

            if constexpr (Count)
            {
                counters->queries += static_cast<std::uint64_t>(std::popcount(batch.mask));
                counters->descent_steps += static_cast<std::uint64_t>(std::popcount(batch.mask)) * tree.depth();
            }

            std::uint32_t active = batch.mask;
            if (opts.aabb_prefilter)
            {
                for (std::size_t lane = 0; lane < L; ++lane)
                {
                    std::array<float, K> center;
                    for (std::size_t d = 0; d < K; ++d)
                    {
                        center[d] = batch.centers[d][lane];
                    }
                    const bool touches = box_dist_sq(center, tree.boxes()[node[lane]]) <= radius_sq[lane];
                    active &= ~(static_cast<std::uint32_t>(!touches) << lane);
                }

                if constexpr (Count)
                {
                    counters->aabb_rejections += static_cast<std::uint64_t>(std::popcount(batch.mask & ~active));
                }
            }

            QueryOutcome outcome;
            for (std::uint32_t pending = active; pending != 0; pending &= pending - 1)
            {
                const auto lane = static_cast<std::size_t>(std::countr_zero(pending));
                std::array<float, K> center;
                for (std::size_t d = 0; d < K; ++d)
                {
                    center[d] = batch.centers[d][lane];
                }

                if constexpr (Count)
                {
                    ++counters->sets_scanned;
                    counters->points_scanned += tree.affordance_size(node[lane]);
                }

                if (scan_affordance_set(tree, node[lane], center, radius_sq[lane]))
                {
                    outcome.any_collision = true;
                    outcome.lanes |= 1U << lane;
                    if (!opts.per_lane)
                    {
                        break;
                    }
                }
            }
            return outcome;
        }

        template <std::size_t K, std::size_t L>
        void check_batch(const Capt<K> &tree, const SphereBatch<K, L> &batch)
        {
            for (std::size_t lane = 0; lane < L; ++lane)
            {
                if (batch.valid(lane))
                {
                    check_query(tree, batch.sphere(lane));
                }
            }
        }
    }  // namespace detail

    /// True iff some cloud point lies within s.radius of s.center (tangency
    /// included). Throws if the radius is outside [r_min, r_max].
    template <std::size_t K>
    [[nodiscard]] bool collides(const Capt<K> &tree, const Sphere<K> &s, const QueryOptions &opts = {})
    {
        check_query(tree, s);
        return detail::collides_one<false>(tree, s, opts, nullptr);
    }

    template <std::size_t K>
    [[nodiscard]] bool collides(const Capt<K> &tree, const Sphere<K> &s, const QueryOptions &opts, QueryCounters &counters)
    {
        check_query(tree, s);
        return detail::collides_one<true>(tree, s, opts, &counters);
    }

    /// No radius check. Outside [r_min, r_max] the answer may be wrong; meant
    /// for benchmarking loops that validated their input up front.
    template <std::size_t K>
    [[nodiscard]] bool collides_unchecked(const Capt<K> &tree, const Sphere<K> &s, const QueryOptions &opts = {}) noexcept
    {
        return detail::collides_one<false>(tree, s, opts, nullptr);
    }

    template <std::size_t K, std::size_t L>
    [[nodiscard]] QueryOutcome collides_batch(
        const Capt<K> &tree, const SphereBatch<K, L> &batch, const QueryOptions &opts = {})
    {
        detail::check_batch(tree, batch);
        return detail::collides_lanes<false>(tree, batch, opts, nullptr);
    }

    template <std::size_t K, std::size_t L>
    [[nodiscard]] QueryOutcome collides_batch(
        const Capt<K> &tree, const SphereBatch<K, L> &batch, const QueryOptions &opts, QueryCounters &counters)
    {
        detail::check_batch(tree, batch);
        return detail::collides_lanes<true>(tree, batch, opts, &counters);
    }

    template <std::size_t K, std::size_t L>
    [[nodiscard]] QueryOutcome collides_batch_unchecked(
        const Capt<K> &tree, const SphereBatch<K, L> &batch, const QueryOptions &opts = {}) noexcept
    {
        return detail::collides_lanes<false>(tree, batch, opts, nullptr);
    }

    /// Configuration-level check: true iff any sphere collides. Spheres go
    /// through in batches of L and the search stops at the first colliding
    /// batch. Unused lanes of the last batch repeat the first sphere with their
    /// validity bit cleared.
    template <std::size_t L = 8, std::size_t K>
    [[nodiscard]] bool collides_any_unchecked(
        const Capt<K> &tree, std::span<const Sphere<K>> spheres, const QueryOptions &opts = {}) noexcept
    {
        SphereBatch<K, L> batch;
        for (std::size_t begin = 0; begin < spheres.size(); begin += L)
        {
            const std::size_t count = std::min(L, spheres.size() - begin);
            batch.mask = 0;
            for (std::size_t lane = 0; lane < L; ++lane)
            {
                batch.set(lane, lane < count ? spheres[begin + lane] : spheres[0]);
            }
            batch.mask = count == L ? ~0U >> (32 - L) : (1U << count) - 1;

            if (detail::collides_lanes<false>(tree, batch, opts, nullptr).any_collision)
            {
                return true;
            }
        }
        return false;
    }

    template <std::size_t L = 8, std::size_t K>
    [[nodiscard]] bool collides_any(const Capt<K> &tree, std::span<const Sphere<K>> spheres, const QueryOptions &opts = {})
    {
        for (const auto &s : spheres)
        {
            check_query(tree, s);
        }
        return collides_any_unchecked<L>(tree, spheres, opts);
    }
}  // namespace capt
