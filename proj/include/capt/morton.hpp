#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include <capt/point_cloud.hpp>

namespace capt
{
    /// Quantization depth per axis; 21 bits for K = 3 fills a 63-bit key.
    template <std::size_t K>
    inline constexpr unsigned morton_bits = 63U / K;

    template <std::size_t K>
    using AxisPermutation = std::array<std::uint8_t, K>;

    /// All K! axis orders, lexicographic; the position in this list is the
    /// permutation id.
    template <std::size_t K>
    [[nodiscard]] std::vector<AxisPermutation<K>> axis_permutations()
    {
        AxisPermutation<K> perm;
        std::iota(perm.begin(), perm.end(), std::uint8_t{0});

        std::vector<AxisPermutation<K>> out;
        do
        {
            out.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }

    template <std::size_t K>
    [[nodiscard]] std::uint32_t permutation_id(const AxisPermutation<K> &perm)
    {
        const auto all = axis_permutations<K>();
        const auto it = std::find(all.begin(), all.end(), perm);
        if (it == all.end())
        {
            throw Error(ErrorCode::invalid_argument, "not a permutation of the axes");
        }
        return static_cast<std::uint32_t>(it - all.begin());
    }

    struct MortonKey
    {
        std::uint64_t key = 0;
        std::uint32_t permutation = 0;

        friend constexpr auto operator<=>(const MortonKey &, const MortonKey &) = default;
    };

    /// Affine map of each axis of `bounds` onto [0, 2^bits - 1]. Degenerate
    /// axes quantize to 0.
    template <std::size_t K>
    [[nodiscard]] std::array<std::uint32_t, K> quantize(const Point<K> &p, const Aabb<K> &bounds)
    {
        constexpr double top = static_cast<double>((std::uint64_t{1} << morton_bits<K>) - 1);

        std::array<std::uint32_t, K> q{};
        for (std::size_t d = 0; d < K; ++d)
        {
            if (!(p[d] >= bounds.lo[d] && p[d] <= bounds.hi[d]))
            {
                throw Error(ErrorCode::out_of_bounds, "point lies outside the quantization bounds");
            }

            const double lo = bounds.lo[d];
            const double extent = static_cast<double>(bounds.hi[d]) - lo;
            if (extent <= 0.0)
            {
                continue;
            }

            const double t = (static_cast<double>(p[d]) - lo) / extent;
            q[d] = static_cast<std::uint32_t>(std::min(top, std::floor(t * top + 0.5)));
        }
        return q;
    }

    /// Bit-interleave with perm[0] supplying the most significant bit of each
    /// K-bit group.
    template <std::size_t K>
    [[nodiscard]] std::uint64_t interleave(const std::array<std::uint32_t, K> &q, const AxisPermutation<K> &perm) noexcept
    {
        std::uint64_t key = 0;
        for (int bit = static_cast<int>(morton_bits<K>) - 1; bit >= 0; --bit)
        {
            for (std::size_t j = 0; j < K; ++j)
            {
                key = (key << 1U) | ((q[perm[j]] >> static_cast<unsigned>(bit)) & 1U);
            }
        }
        return key;
    }

    template <std::size_t K>
    [[nodiscard]] MortonKey morton_key(const Point<K> &p, const Aabb<K> &cloud_bounds, const AxisPermutation<K> &perm)
    {
        return {interleave(quantize(p, cloud_bounds), perm), permutation_id(perm)};
    }

    template <std::size_t K>
    struct ReachConstraint
    {
        Point<K> base;
        float max_reach = 0.0F;
    };

    template <std::size_t K>
    struct FilterConfig
    {
        float r_filter = 0.0F;
        std::optional<ReachConstraint<K>> reach;

        /// The passes chain: a point removed for being near X can lose X in a
        /// later pass. Repair re-adds, in input order, every removed point left
        /// without a survivor within r_filter. Without it gaps can exceed r_filter.
        bool repair_gaps = true;

        void validate() const
        {
            if (!(r_filter >= 0.0F) || !std::isfinite(r_filter))
            {
                throw Error(ErrorCode::invalid_argument, "r_filter must be finite and >= 0");
            }
            if (reach && !(reach->max_reach > 0.0F && std::isfinite(reach->max_reach) && reach->base.is_finite()))
            {
                throw Error(ErrorCode::invalid_argument, "reach constraint needs a finite base and max_reach > 0");
            }
        }
    };

    /// Keeps exactly the points within `max_reach` of `base`, in input order.
    template <std::size_t K>
    [[nodiscard]] PointCloud<K> reach_filter(const PointCloud<K> &cloud, const Point<K> &base, float max_reach)
    {
        if (!(max_reach > 0.0F))
        {
            throw Error(ErrorCode::invalid_argument, "max_reach must be > 0");
        }

        const double limit = static_cast<double>(max_reach) * max_reach;
        std::vector<Point<K>> kept;
        for (const auto &p : cloud)
        {
            if (dist_sq<double>(p, base) <= limit)
            {
                kept.push_back(p);
            }
        }
        return PointCloud<K>(std::move(kept));
    }

    namespace detail
    {
        struct SortItem
        {
            std::uint64_t key;
            std::uint32_t index;
        };

        /// Uniform hash grid over survivors. Cells are a hair wider than r so
        /// two points within r never sit more than one cell apart per axis,
        /// despite rounding in the cell computation.
        template <std::size_t K>
        class NeighbourGrid
        {
          public:
            NeighbourGrid(const Aabb<K> &bounds, float r) : r_sq_(static_cast<double>(r) * r), cell_(r * (1.0 + 1e-9))
            {
                for (std::size_t d = 0; d < K; ++d)
                {
                    lo_[d] = bounds.lo[d];
                }
            }

            void insert(const Point<K> &p, std::uint32_t index) { cells_[cell_of(p)].push_back(index); }

            [[nodiscard]] bool any_within(std::span<const Point<K>> points, const Point<K> &p) const
            {
                const auto centre = cell_of(p);
                std::array<std::int64_t, K> c{};
                for (std::size_t code = 0; code < pow3(); ++code)
                {
                    std::size_t rest = code;
                    for (std::size_t d = 0; d < K; ++d)
                    {
                        c[d] = centre[d] + static_cast<std::int64_t>(rest % 3) - 1;
                        rest /= 3;
                    }
                    const auto it = cells_.find(c);
                    if (it == cells_.end())
                    {
                        continue;
                    }
                    for (const auto index : it->second)
                    {
                        if (dist_sq<double>(points[index], p) <= r_sq_)
                        {
                            return true;
                        }
                    }
                }
                return false;
            }

          private:
            using Key = std::array<std::int64_t, K>;

            struct KeyHash
            {
                std::size_t operator()(const Key &k) const noexcept
                {
                    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
                    for (const auto v : k)
                    {
                        h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
                    }
                    return static_cast<std::size_t>(h);
                }
            };

            static constexpr std::size_t pow3()
            {
                std::size_t n = 1;
                for (std::size_t d = 0; d < K; ++d)
                {
                    n *= 3;
                }
                return n;
            }

            [[nodiscard]] Key cell_of(const Point<K> &p) const
            {
                // Clamping merges far-away cells, which only adds candidates.
                constexpr double cap = 4.0e18;
                Key k{};
                for (std::size_t d = 0; d < K; ++d)
                {
                    const double v = std::floor((static_cast<double>(p[d]) - lo_[d]) / cell_);
                    k[d] = static_cast<std::int64_t>(std::clamp(v, -cap, cap));
                }
                return k;
            }

            double r_sq_;
            double cell_;
            std::array<double, K> lo_{};
            std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> cells_;
        };

        template <std::size_t K>
        void repair_gaps(
            std::span<const Point<K>> points, const Aabb<K> &bounds, float r, std::vector<std::uint32_t> &survivors)
        {
            std::vector<std::uint8_t> kept(points.size(), 0);
            NeighbourGrid<K> grid(bounds, r);
            for (const auto index : survivors)
            {
                kept[index] = 1;
                grid.insert(points[index], index);
            }
            for (std::uint32_t i = 0; i < points.size(); ++i)
            {
                if (kept[i] == 0 && !grid.any_within(points, points[i]))
                {
                    kept[i] = 1;
                    grid.insert(points[i], i);
                    survivors.push_back(i);
                }
            }
        }
    }  // namespace detail

    /// Space-filling-curve downsampling. For each axis permutation (in
    /// lexicographic order) the survivors are sorted along that Z-order curve
    /// and a point is kept only when it lies farther than r_filter from the
    /// previously kept one. With repair_gaps every removed point then gets a
    /// survivor within r_filter. Key ties are broken by coordinates, then
    /// input index. Output: last-pass order, then repaired points in input order.
    template <std::size_t K>
    [[nodiscard]] PointCloud<K> filter(const PointCloud<K> &input, const FilterConfig<K> &cfg)
    {
        cfg.validate();

        const PointCloud<K> reached = cfg.reach ? reach_filter(input, cfg.reach->base, cfg.reach->max_reach) : input;
        if (reached.empty())
        {
            return reached;
        }

        const auto &points = reached.points();
        const Aabb<K> bounds = reached.bounds();
        const double limit = static_cast<double>(cfg.r_filter) * cfg.r_filter;

        std::vector<std::array<std::uint32_t, K>> quantized(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            quantized[i] = quantize(points[i], bounds);
        }

        std::vector<std::uint32_t> survivors(points.size());
        std::iota(survivors.begin(), survivors.end(), 0U);

        std::vector<detail::SortItem> items;
        for (const auto &perm : axis_permutations<K>())
        {
            items.clear();
            items.reserve(survivors.size());
            for (const auto index : survivors)
            {
                items.push_back({interleave(quantized[index], perm), index});
            }

            std::sort(
                items.begin(),
                items.end(),
                [&](const detail::SortItem &a, const detail::SortItem &b)
                {
                    if (a.key != b.key)
                    {
                        return a.key < b.key;
                    }
                    if (points[a.index].coords != points[b.index].coords)
                    {
                        return points[a.index].coords < points[b.index].coords;
                    }
                    return a.index < b.index;
                });

            std::size_t last = 0;
            survivors[0] = items[0].index;
            for (std::size_t j = 1; j < items.size(); ++j)
            {
                if (dist_sq<double>(points[survivors[last]], points[items[j].index]) > limit)
                {
                    survivors[++last] = items[j].index;
                }
            }
            survivors.resize(last + 1);
        }

        if (cfg.repair_gaps && cfg.r_filter > 0.0F)
        {
            detail::repair_gaps(points, bounds, cfg.r_filter, survivors);
        }

        std::vector<Point<K>> out;
        out.reserve(survivors.size());
        for (const auto index : survivors)
        {
            out.push_back(points[index]);
        }
        return PointCloud<K>(std::move(out));
    }

    /// Largest r_filter for which filtering provably cannot open a gap a sphere
    /// of radius r_min could slip through, given the cloud's dispersion.
    /// Advisory only; filter() does not enforce it.
    [[nodiscard]] inline double max_safe_filter_radius(double r_min, double dispersion) noexcept
    {
        return std::max(0.0, r_min - dispersion);
    }
}  // namespace capt
