#pragma once

// Independent referees for tree structure: leaf cells rebuilt from the test
// array alone, and affordance sets recomputed by exhaustive distance checks.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <capt/capt.hpp>
#include <capt/oracle.hpp>
#include <capt/point_cloud.hpp>

namespace capt_test
{
    /// Cell of every leaf, replaying the split walls from the root down.
    template <std::size_t K>
    std::vector<capt::Aabb<K>> leaf_cells(const capt::Capt<K> &tree)
    {
        const std::size_t n = tree.size();
        std::vector<capt::Aabb<K>> cells(2 * n - 1, capt::Aabb<K>::unbounded());
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            std::size_t depth = 0;
            for (std::size_t j = i; j > 0; j = (j - 1) / 2)
            {
                ++depth;
            }
            const std::size_t axis = depth % K;
            const float t = tree.tests()[i];
            cells[2 * i + 1] = cells[i];
            cells[2 * i + 1].hi[axis] = std::min(cells[i].hi[axis], t);
            cells[2 * i + 2] = cells[i];
            cells[2 * i + 2].lo[axis] = std::max(cells[i].lo[axis], t);
        }
        return {cells.begin() + static_cast<std::ptrdiff_t>(n - 1), cells.end()};
    }

    /// Squared distance from p to a closed box with possibly infinite bounds, in double.
    template <std::size_t K>
    double box_distance_sq(const capt::Point<K> &p, const capt::Aabb<K> &b)
    {
        double sum = 0.0;
        for (std::size_t d = 0; d < K; ++d)
        {
            double r = 0.0;
            if (p[d] < b.lo[d])
            {
                r = static_cast<double>(b.lo[d]) - p[d];
            }
            else if (p[d] > b.hi[d])
            {
                r = static_cast<double>(p[d]) - b.hi[d];
            }
            sum += r * r;
        }
        return sum;
    }

    /// Indices of the cloud points a cell affords at radius r.
    template <std::size_t K>
    std::vector<std::size_t> afforded(const capt::PointCloud<K> &cloud, const capt::Aabb<K> &cell, float r)
    {
        const double limit = static_cast<double>(r) * r;
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cloud.size(); ++i)
        {
            if (box_distance_sq(cloud[i], cell) <= limit)
            {
                out.push_back(i);
            }
        }
        return out;
    }

    template <std::size_t K>
    std::vector<capt::Point<K>> affordance_points(const capt::Capt<K> &tree, std::size_t leaf)
    {
        std::vector<capt::Point<K>> out;
        for (std::size_t j = 0; j < tree.affordance_size(leaf); ++j)
        {
            out.push_back(tree.affordance_point(leaf, j));
        }
        return out;
    }

    template <std::size_t K>
    bool same_point(const capt::Point<K> &a, const capt::Point<K> &b)
    {
        return a.coords == b.coords;
    }

    template <std::size_t K>
    bool lexicographic_less(const capt::Point<K> &a, const capt::Point<K> &b)
    {
        return a.coords < b.coords;
    }

    // ---- random instances -------------------------------------------------

    template <std::size_t K>
    capt::PointCloud<K> random_cloud(std::mt19937_64 &rng, std::size_t n, float lo, float hi)
    {
        std::uniform_real_distribution<float> u(lo, hi);
        std::vector<capt::Point<K>> pts(n);
        for (auto &p : pts)
        {
            for (std::size_t d = 0; d < K; ++d)
            {
                p[d] = u(rng);
            }
        }
        return capt::PointCloud<K>(std::move(pts));
    }

    /// Axis-aligned lattice with dyadic spacing, so distances are exact.
    inline capt::PointCloud<3> lattice(std::size_t per_axis, float spacing, float offset = 0.0F)
    {
        std::vector<capt::Point<3>> pts;
        for (std::size_t i = 0; i < per_axis; ++i)
        {
            for (std::size_t j = 0; j < per_axis; ++j)
            {
                for (std::size_t k = 0; k < per_axis; ++k)
                {
                    pts.push_back({{offset + spacing * static_cast<float>(i),
                                    offset + spacing * static_cast<float>(j),
                                    offset + spacing * static_cast<float>(k)}});
                }
            }
        }
        return capt::PointCloud<3>(std::move(pts));
    }

    /// Random cloud in which many points are exact duplicates or share coordinates.
    inline capt::PointCloud<3> duplicate_heavy(std::mt19937_64 &rng, std::size_t n)
    {
        std::uniform_int_distribution<int> cell(0, 7);
        std::vector<capt::Point<3>> pts(n);
        for (auto &p : pts)
        {
            for (std::size_t d = 0; d < 3; ++d)
            {
                p[d] = 0.03125F * static_cast<float>(cell(rng));
            }
        }
        return capt::PointCloud<3>(std::move(pts));
    }

    template <std::size_t K>
    capt::Sphere<K> random_sphere(std::mt19937_64 &rng, float lo, float hi, float r_min, float r_max)
    {
        std::uniform_real_distribution<float> u(lo, hi);
        std::uniform_real_distribution<float> r(r_min, r_max);
        capt::Sphere<K> s;
        for (std::size_t d = 0; d < K; ++d)
        {
            s.center[d] = u(rng);
        }
        s.radius = r(rng);
        return s;
    }
}  // namespace capt_test
