#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include <capt/error.hpp>

namespace capt
{
    inline constexpr float infinity = std::numeric_limits<float>::infinity();

    /// A point in R^K, or the distinguished "infinity point" used to pad a
    /// cloud up to a power of two. Mixed finite/infinite coordinates are not a
    /// valid point.
    template <std::size_t K>
    struct Point
    {
        static_assert(K > 0);
        static constexpr std::size_t dimension = K;

        std::array<float, K> coords{};

        [[nodiscard]] constexpr float operator[](std::size_t d) const { return coords[d]; }
        [[nodiscard]] constexpr float &operator[](std::size_t d) { return coords[d]; }

        [[nodiscard]] static constexpr Point at_infinity() noexcept
        {
            Point p;
            p.coords.fill(infinity);
            return p;
        }

        [[nodiscard]] constexpr bool is_infinity() const noexcept
        {
            return std::all_of(coords.begin(), coords.end(), [](float c) { return c == infinity; });
        }

        [[nodiscard]] bool is_finite() const noexcept
        {
            return std::all_of(coords.begin(), coords.end(), [](float c) { return std::isfinite(c); });
        }

        [[nodiscard]] bool is_valid() const noexcept { return is_finite() || is_infinity(); }

        friend constexpr bool operator==(const Point &, const Point &) = default;
    };

    template <std::size_t K>
    struct Aabb
    {
        std::array<float, K> lo{};
        std::array<float, K> hi{};

        /// All of R^K.
        [[nodiscard]] static constexpr Aabb unbounded() noexcept
        {
            Aabb b;
            b.lo.fill(-infinity);
            b.hi.fill(infinity);
            return b;
        }

        /// lo = hi = +inf on every axis; intersects no finite sphere.
        [[nodiscard]] static constexpr Aabb empty_at_infinity() noexcept
        {
            Aabb b;
            b.lo.fill(infinity);
            b.hi.fill(infinity);
            return b;
        }

        [[nodiscard]] static constexpr Aabb around(const Point<K> &p) noexcept { return {p.coords, p.coords}; }

        [[nodiscard]] constexpr bool is_empty_at_infinity() const noexcept
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                if (lo[d] != infinity || hi[d] != infinity)
                {
                    return false;
                }
            }
            return true;
        }

        [[nodiscard]] constexpr bool is_valid() const noexcept
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                if (!(lo[d] <= hi[d]))
                {
                    return false;
                }
            }
            return true;
        }

        [[nodiscard]] constexpr bool contains(const Point<K> &p) const noexcept
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                if (p[d] < lo[d] || p[d] > hi[d])
                {
                    return false;
                }
            }
            return true;
        }

        friend constexpr bool operator==(const Aabb &, const Aabb &) = default;
    };

    template <std::size_t K>
    struct Sphere
    {
        Point<K> center;
        float radius = 0.0F;

        [[nodiscard]] bool is_valid() const noexcept
        {
            return center.is_finite() && std::isfinite(radius) && radius > 0.0F;
        }
    };

    template <std::size_t K>
    void validate(const Sphere<K> &s)
    {
        if (!s.is_valid())
        {
            throw Error(ErrorCode::invalid_argument, "sphere needs a finite center and a finite radius > 0");
        }
    }

    /// Squared Euclidean distance, accumulated in `Acc`. +inf if either point
    /// is the infinity point.
    template <class Acc = float, std::size_t K>
    [[nodiscard]] Acc dist_sq(const Point<K> &p, const Point<K> &q) noexcept
    {
        if (p.is_infinity() || q.is_infinity())
        {
            return std::numeric_limits<Acc>::infinity();
        }

        Acc sum = 0;
        for (std::size_t d = 0; d < K; ++d)
        {
            const Acc delta = static_cast<Acc>(p[d]) - static_cast<Acc>(q[d]);
            sum += delta * delta;
        }
        return sum;
    }

    /// Runtime-dimension variant used at API boundaries.
    [[nodiscard]] inline double dist_sq(std::span<const float> p, std::span<const float> q)
    {
        if (p.size() != q.size())
        {
            throw Error(ErrorCode::dimension_mismatch, "points have different dimensions");
        }

        const auto is_inf = [](std::span<const float> v)
        { return !v.empty() && std::all_of(v.begin(), v.end(), [](float c) { return c == infinity; }); };
        if (is_inf(p) || is_inf(q))
        {
            return std::numeric_limits<double>::infinity();
        }

        double sum = 0.0;
        for (std::size_t d = 0; d < p.size(); ++d)
        {
            const double delta = static_cast<double>(p[d]) - static_cast<double>(q[d]);
            sum += delta * delta;
        }
        return sum;
    }

    /// Squared distance from a finite point to the closest point of `b`; zero
    /// iff p lies in b.
    template <class Acc = float, std::size_t K>
    [[nodiscard]] Acc dist_sq_point_aabb(const Point<K> &p, const Aabb<K> &b) noexcept
    {
        Acc sum = 0;
        for (std::size_t d = 0; d < K; ++d)
        {
            const Acc x = p[d];
            const Acc below = static_cast<Acc>(b.lo[d]) - x;
            const Acc above = x - static_cast<Acc>(b.hi[d]);
            const Acc residual = std::max({below, Acc(0), above});
            sum += residual * residual;
        }
        return sum;
    }

    /// Tangency counts as intersection.
    template <std::size_t K>
    [[nodiscard]] bool sphere_intersects_aabb(const Sphere<K> &s, const Aabb<K> &b) noexcept
    {
        return dist_sq_point_aabb(s.center, b) <= s.radius * s.radius;
    }

    /// Largest squared distance from p to any corner of b; +inf when b is
    /// unbounded on any side.
    template <class Acc = float, std::size_t K>
    [[nodiscard]] Acc farthest_corner_dist_sq(const Aabb<K> &b, const Point<K> &p) noexcept
    {
        Acc sum = 0;
        for (std::size_t d = 0; d < K; ++d)
        {
            if (!std::isfinite(b.lo[d]) || !std::isfinite(b.hi[d]))
            {
                return std::numeric_limits<Acc>::infinity();
            }

            const Acc x = p[d];
            const Acc reach = std::max(std::abs(x - static_cast<Acc>(b.lo[d])), std::abs(static_cast<Acc>(b.hi[d]) - x));
            sum += reach * reach;
        }
        return sum;
    }

    template <std::size_t K>
    [[nodiscard]] Aabb<K> aabb_of_points(std::span<const Point<K>> points)
    {
        if (points.empty())
        {
            throw Error(ErrorCode::empty_input, "bounding box of an empty point set");
        }

        Aabb<K> box = Aabb<K>::around(points.front());
        for (const auto &p : points.subspan(1))
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                box.lo[d] = std::min(box.lo[d], p[d]);
                box.hi[d] = std::max(box.hi[d], p[d]);
            }
        }
        return box;
    }
}  // namespace capt
