#include <capt/synth.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include <capt/oracle.hpp>

namespace capt::synth
{
    namespace
    {
        struct Panel
        {
            std::array<float, 3> corner;
            std::array<float, 3> u;  // first edge
            std::array<float, 3> v;  // second edge
        };

        float area(const Panel &p)
        {
            const std::array<double, 3> cross{
                static_cast<double>(p.u[1]) * p.v[2] - static_cast<double>(p.u[2]) * p.v[1],
                static_cast<double>(p.u[2]) * p.v[0] - static_cast<double>(p.u[0]) * p.v[2],
                static_cast<double>(p.u[0]) * p.v[1] - static_cast<double>(p.u[1]) * p.v[0]};
            return static_cast<float>(std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]));
        }

        PointCloud<3> sample_panels(const std::vector<Panel> &panels, std::size_t n, std::uint64_t seed)
        {
            std::vector<double> weights;
            for (const auto &p : panels)
            {
                weights.push_back(area(p));
            }

            std::mt19937_64 rng(seed);
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            std::uniform_real_distribution<float> unit(0.0F, 1.0F);

            std::vector<Point<3>> points(n);
            for (auto &pt : points)
            {
                const auto &panel = panels[pick(rng)];
                const float a = unit(rng);
                const float b = unit(rng);
                for (std::size_t d = 0; d < 3; ++d)
                {
                    pt[d] = panel.corner[d] + a * panel.u[d] + b * panel.v[d];
                }
            }
            return PointCloud<3>(std::move(points));
        }
    }  // namespace

    std::optional<CloudKind> parse_cloud_kind(std::string_view name)
    {
        if (name == "cube")
        {
            return CloudKind::cube;
        }
        if (name == "grid")
        {
            return CloudKind::grid;
        }
        if (name == "box" || name == "box_surface")
        {
            return CloudKind::box_surface;
        }
        if (name == "shelf")
        {
            return CloudKind::shelf;
        }
        return std::nullopt;
    }

    std::string_view to_string(CloudKind kind)
    {
        switch (kind)
        {
            case CloudKind::cube:
                return "cube";
            case CloudKind::grid:
                return "grid";
            case CloudKind::box_surface:
                return "box";
            case CloudKind::shelf:
                return "shelf";
        }
        return "unknown";
    }

    PointCloud<3> uniform_cube(std::size_t n, float side, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<float> coord(0.0F, side);

        std::vector<Point<3>> points(n);
        for (auto &p : points)
        {
            for (auto &c : p.coords)
            {
                c = coord(rng);
            }
        }
        return PointCloud<3>(std::move(points));
    }

    PointCloud<3> grid(std::size_t per_axis, float spacing)
    {
        std::vector<Point<3>> points;
        points.reserve(per_axis * per_axis * per_axis);
        for (std::size_t i = 0; i < per_axis; ++i)
        {
            for (std::size_t j = 0; j < per_axis; ++j)
            {
                for (std::size_t k = 0; k < per_axis; ++k)
                {
                    points.push_back(Point<3>{{static_cast<float>(i) * spacing,
                                               static_cast<float>(j) * spacing,
                                               static_cast<float>(k) * spacing}});
                }
            }
        }
        return PointCloud<3>(std::move(points));
    }

    PointCloud<3> box_surface(std::size_t n, const std::array<float, 3> &extent, std::uint64_t seed)
    {
        const float x = extent[0];
        const float y = extent[1];
        const float z = extent[2];
        const std::vector<Panel> faces{
            {{0, 0, 0}, {x, 0, 0}, {0, y, 0}},
            {{0, 0, z}, {x, 0, 0}, {0, y, 0}},
            {{0, 0, 0}, {x, 0, 0}, {0, 0, z}},
            {{0, y, 0}, {x, 0, 0}, {0, 0, z}},
            {{0, 0, 0}, {0, y, 0}, {0, 0, z}},
            {{x, 0, 0}, {0, y, 0}, {0, 0, z}},
        };
        return sample_panels(faces, n, seed);
    }

    PointCloud<3> shelf(std::size_t n, std::uint64_t seed, const ShelfSpec &spec)
    {
        const auto [ox, oy, oz] = spec.origin;
        const float w = spec.width;
        const float d = spec.depth;
        const float h = spec.height;

        // Shelf faces -x (open front at x = ox), spans y in [oy, oy + w].
        std::vector<Panel> panels{
            {{ox + d, oy, oz}, {0, w, 0}, {0, 0, h}},  // back
            {{ox, oy, oz}, {d, 0, 0}, {0, 0, h}},      // left side
            {{ox, oy + w, oz}, {d, 0, 0}, {0, 0, h}},  // right side
        };
        const std::size_t boards = spec.shelves + 2;  // bottom and top included
        for (std::size_t i = 0; i < boards; ++i)
        {
            const float level = oz + h * static_cast<float>(i) / static_cast<float>(boards - 1);
            panels.push_back({{ox, oy, level}, {d, 0, 0}, {0, w, 0}});
        }
        return sample_panels(panels, n, seed);
    }

    PointCloud<3> generate(CloudKind kind, std::size_t n, std::uint64_t seed, float scale)
    {
        switch (kind)
        {
            case CloudKind::cube:
                return uniform_cube(n, scale, seed);
            case CloudKind::grid:
            {
                auto side = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
                while ((side + 1) * (side + 1) * (side + 1) <= n)
                {
                    ++side;
                }
                return grid(side, scale);
            }
            case CloudKind::box_surface:
                return box_surface(n, {scale, scale, scale}, seed);
            case CloudKind::shelf:
                return shelf(n, seed);
        }
        throw Error(ErrorCode::invalid_argument, "unknown cloud kind");
    }

    Workload generate_workload(const PointCloud<3> &cloud, const WorkloadSpec &spec)
    {
        if (cloud.empty())
        {
            throw Error(ErrorCode::empty_input, "workload needs a nonempty cloud");
        }
        if (spec.spheres_per_record == 0)
        {
            throw Error(ErrorCode::invalid_argument, "records need at least one sphere");
        }
        if (!(spec.r_min > 0.0F && spec.r_min <= spec.r_max))
        {
            throw Error(ErrorCode::invalid_argument, "workload radii must satisfy 0 < r_min <= r_max");
        }

        std::vector<RecordClass> pattern;
        for (std::size_t c = 0; c < 3; ++c)
        {
            pattern.insert(pattern.end(), spec.mix[c], static_cast<RecordClass>(c));
        }
        if (pattern.empty())
        {
            throw Error(ErrorCode::invalid_argument, "workload mix is all zero");
        }

        const oracle::KdTree<3> kd(cloud);
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<float> radius(spec.r_min, spec.r_max);
        std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);

        Aabb<3> region = cloud.bounds();
        for (std::size_t d = 0; d < 3; ++d)
        {
            region.lo[d] -= 2.0F * spec.r_max;
            region.hi[d] += 2.0F * spec.r_max;
        }
        std::array<std::uniform_real_distribution<float>, 3> coord{
            std::uniform_real_distribution<float>(region.lo[0], region.hi[0]),
            std::uniform_real_distribution<float>(region.lo[1], region.hi[1]),
            std::uniform_real_distribution<float>(region.lo[2], region.hi[2])};

        const auto colliding_sphere = [&]
        { return Sphere<3>{cloud[pick(rng)], radius(rng)}; };

        const auto free_sphere = [&]
        {
            constexpr int attempts = 10000;
            for (int i = 0; i < attempts; ++i)
            {
                Point<3> c{{coord[0](rng), coord[1](rng), coord[2](rng)}};
                if (kd.nearest(c).distance > static_cast<double>(spec.r_max))
                {
                    return Sphere<3>{c, radius(rng)};
                }
            }
            throw Error(ErrorCode::invalid_argument, "could not find collision-free space around the cloud");
        };

        const std::size_t per = spec.spheres_per_record;
        Workload out;
        out.trace.reserve(spec.records);
        out.classes.reserve(spec.records);
        for (std::size_t r = 0; r < spec.records; ++r)
        {
            RecordClass cls = pattern[r % pattern.size()];
            if (cls == RecordClass::partial && per < 2)
            {
                cls = RecordClass::colliding;
            }

            std::size_t hits = per;
            if (cls == RecordClass::free)
            {
                hits = 0;
            }
            else if (cls == RecordClass::partial)
            {
                hits = std::uniform_int_distribution<std::size_t>(1, per - 1)(rng);
            }

            io::TraceRecord record;
            record.batch = static_cast<std::int64_t>(r);
            for (std::size_t s = 0; s < per; ++s)
            {
                record.spheres.push_back(s < hits ? colliding_sphere() : free_sphere());
            }
            std::shuffle(record.spheres.begin(), record.spheres.end(), rng);

            bool any = false;
            std::size_t observed_hits = 0;
            for (const auto &s : record.spheres)
            {
                const bool hit = oracle::kd_collides(kd, s);
                any = any || hit;
                observed_hits += hit ? 1 : 0;
            }
            if (observed_hits != hits)
            {
                throw Error(ErrorCode::invalid_argument, "generated record does not match its class");
            }

            record.expected = any;
            out.trace.push_back(std::move(record));
            out.classes.push_back(cls);
        }
        return out;
    }
}  // namespace capt::synth
