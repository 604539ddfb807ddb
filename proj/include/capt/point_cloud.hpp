#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <capt/geom.hpp>

namespace capt
{
    /// Ordered list of finite points with their cached minimal bounding box.
    template <std::size_t K>
    class PointCloud
    {
    public:
        using point_type = Point<K>;

        PointCloud() = default;

        explicit PointCloud(std::vector<point_type> points) : points_(std::move(points))
        {
            for (std::size_t i = 0; i < points_.size(); ++i)
            {
                if (!points_[i].is_finite())
                {
                    throw Error(
                        ErrorCode::invalid_argument, "point " + std::to_string(i) + " has a non-finite coordinate");
                }
            }
            refresh_bounds();
        }

        /// Packed coordinates, K per point.
        [[nodiscard]] static PointCloud from_flat(std::span<const float> coords)
        {
            if (coords.size() % K != 0)
            {
                throw Error(ErrorCode::dimension_mismatch, "coordinate count is not a multiple of the dimension");
            }

            std::vector<point_type> points(coords.size() / K);
            for (std::size_t i = 0; i < points.size(); ++i)
            {
                for (std::size_t d = 0; d < K; ++d)
                {
                    points[i][d] = coords[i * K + d];
                }
            }
            return PointCloud(std::move(points));
        }

        [[nodiscard]] static constexpr std::size_t dimension() noexcept { return K; }
        [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
        [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

        [[nodiscard]] const point_type &operator[](std::size_t i) const { return points_[i]; }
        [[nodiscard]] std::span<const point_type> points() const noexcept { return points_; }

        [[nodiscard]] auto begin() const noexcept { return points_.begin(); }
        [[nodiscard]] auto end() const noexcept { return points_.end(); }

        /// Empty-at-infinity for an empty cloud.
        [[nodiscard]] const Aabb<K> &bounds() const noexcept { return bounds_; }

        friend bool operator==(const PointCloud &a, const PointCloud &b) { return a.points_ == b.points_; }

    private:
        void refresh_bounds()
        {
            bounds_ = points_.empty() ? Aabb<K>::empty_at_infinity()
                                      : aabb_of_points(std::span<const point_type>(points_));
        }

        std::vector<point_type> points_;
        Aabb<K> bounds_ = Aabb<K>::empty_at_infinity();
    };
}  // namespace capt
