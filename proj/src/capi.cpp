#include <capt/capt.h>

#include <exception>
#include <memory>
#include <new>
#include <string>

#include <capt/capt.hpp>
#include <capt/io.hpp>
#include <capt/morton.hpp>
#include <capt/oracle.hpp>
#include <capt/query.hpp>
#include <capt/serialize.hpp>
#include <capt/synth.hpp>

struct capt_cloud
{
    capt::PointCloud<3> cloud;
};

struct capt_tree
{
    capt::Capt<3> tree;
};

struct capt_kdtree
{
    capt::oracle::KdTree<3> tree;
};

struct capt_trace
{
    explicit capt_trace(capt::io::Trace t) : records(std::move(t))
    {
        offsets.push_back(0);
        for (const auto &record : records)
        {
            spheres.insert(spheres.end(), record.spheres.begin(), record.spheres.end());
            offsets.push_back(spheres.size());
        }
    }

    [[nodiscard]] std::span<const capt::Sphere<3>> record(std::size_t i) const
    {
        return std::span<const capt::Sphere<3>>(spheres).subspan(offsets[i], offsets[i + 1] - offsets[i]);
    }

    capt::io::Trace records;
    std::vector<capt::Sphere<3>> spheres;  // flattened for replay
    std::vector<std::size_t> offsets;
};

namespace
{
    thread_local std::string last_error;

    capt_status to_status(capt::ErrorCode code)
    {
        using capt::ErrorCode;
        switch (code)
        {
            case ErrorCode::invalid_argument:
                return CAPT_ERROR_INVALID_ARGUMENT;
            case ErrorCode::dimension_mismatch:
                return CAPT_ERROR_DIMENSION_MISMATCH;
            case ErrorCode::empty_input:
                return CAPT_ERROR_EMPTY_INPUT;
            case ErrorCode::radius_out_of_range:
                return CAPT_ERROR_RADIUS_OUT_OF_RANGE;
            case ErrorCode::out_of_bounds:
                return CAPT_ERROR_OUT_OF_BOUNDS;
            case ErrorCode::parse:
                return CAPT_ERROR_PARSE;
            case ErrorCode::io:
                return CAPT_ERROR_IO;
            case ErrorCode::format:
                return CAPT_ERROR_FORMAT;
        }
        return CAPT_ERROR_INTERNAL;
    }

    capt_status fail(capt_status status, std::string message)
    {
        last_error = std::move(message);
        return status;
    }

    template <class Fn>
    capt_status guard(Fn &&fn) noexcept
    {
        try
        {
            last_error.clear();
            fn();
            return CAPT_OK;
        }
        catch (const capt::Error &e)
        {
            return fail(to_status(e.code()), e.what());
        }
        catch (const std::bad_alloc &)
        {
            return fail(CAPT_ERROR_INTERNAL, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail(CAPT_ERROR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail(CAPT_ERROR_INTERNAL, "unknown error");
        }
    }

    template <class T>
    void require(const T *ptr, const char *name)
    {
        if (ptr == nullptr)
        {
            throw capt::Error(capt::ErrorCode::invalid_argument, std::string(name) + " is null");
        }
    }

    capt::Sphere<3> to_sphere(const capt_sphere &s) { return {capt::Point<3>{{s.x, s.y, s.z}}, s.r}; }

    capt::Point<3> to_point(const float xyz[3]) { return capt::Point<3>{{xyz[0], xyz[1], xyz[2]}}; }

    void check_range(const capt_trace *trace, std::size_t begin, std::size_t end)
    {
        if (begin > end || end > trace->records.size())
        {
            throw capt::Error(capt::ErrorCode::invalid_argument, "record range outside the trace");
        }
    }

    void check_trace(const capt::Capt<3> &tree, const capt_trace &trace, std::size_t begin, std::size_t end)
    {
        for (std::size_t r = begin; r < end; ++r)
        {
            for (const auto &s : trace.record(r))
            {
                try
                {
                    capt::check_query(tree, s);
                }
                catch (const capt::Error &e)
                {
                    throw capt::Error(
                        e.code(), "batch " + std::to_string(trace.records[r].batch) + ": " + std::string(e.what()));
                }
            }
        }
    }
}  // namespace

extern "C" {

const char *capt_last_error(void) { return last_error.c_str(); }

const char *capt_status_string(capt_status status)
{
    switch (status)
    {
        case CAPT_OK:
            return "ok";
        case CAPT_ERROR_INVALID_ARGUMENT:
            return "invalid argument";
        case CAPT_ERROR_DIMENSION_MISMATCH:
            return "dimension mismatch";
        case CAPT_ERROR_EMPTY_INPUT:
            return "empty input";
        case CAPT_ERROR_RADIUS_OUT_OF_RANGE:
            return "radius out of range";
        case CAPT_ERROR_OUT_OF_BOUNDS:
            return "out of bounds";
        case CAPT_ERROR_PARSE:
            return "parse error";
        case CAPT_ERROR_IO:
            return "i/o error";
        case CAPT_ERROR_FORMAT:
            return "format error";
        case CAPT_ERROR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

uint32_t capt_version(void) { return CAPT_VERSION; }

uint32_t capt_lane_width(void) { return capt::SphereBatch<3>::lanes; }

capt_status capt_cloud_create(const float *xyz, size_t count, capt_cloud **out)
{
    return guard(
        [&]
        {
            require(out, "out");
            if (count > 0)
            {
                require(xyz, "xyz");
            }
            auto cloud = capt::PointCloud<3>::from_flat(std::span<const float>(xyz, 3 * count));
            *out = new capt_cloud{std::move(cloud)};
        });
}

capt_status capt_cloud_read(const char *path, capt_cloud **out)
{
    return guard(
        [&]
        {
            require(path, "path");
            require(out, "out");
            *out = new capt_cloud{capt::io::read_xyz(path)};
        });
}

capt_status capt_cloud_write(const capt_cloud *cloud, const char *path)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(path, "path");
            capt::io::write_xyz(cloud->cloud, path);
        });
}

capt_status capt_cloud_generate(const char *kind, size_t n, uint64_t seed, float scale, capt_cloud **out)
{
    return guard(
        [&]
        {
            require(kind, "kind");
            require(out, "out");
            const auto parsed = capt::synth::parse_cloud_kind(kind);
            if (!parsed)
            {
                throw capt::Error(capt::ErrorCode::invalid_argument, std::string("unknown cloud kind '") + kind + "'");
            }
            *out = new capt_cloud{capt::synth::generate(*parsed, n, seed, scale)};
        });
}

size_t capt_cloud_size(const capt_cloud *cloud) { return cloud == nullptr ? 0 : cloud->cloud.size(); }

size_t capt_cloud_copy(const capt_cloud *cloud, float *xyz, size_t capacity)
{
    if (cloud == nullptr || xyz == nullptr)
    {
        return 0;
    }
    const std::size_t count = std::min(capacity, cloud->cloud.size());
    for (std::size_t i = 0; i < count; ++i)
    {
        for (std::size_t d = 0; d < 3; ++d)
        {
            xyz[3 * i + d] = cloud->cloud[i][d];
        }
    }
    return count;
}

capt_status capt_cloud_bounds(const capt_cloud *cloud, float lo[3], float hi[3])
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(lo, "lo");
            require(hi, "hi");
            if (cloud->cloud.empty())
            {
                throw capt::Error(capt::ErrorCode::empty_input, "empty cloud has no bounds");
            }
            const auto &b = cloud->cloud.bounds();
            for (std::size_t d = 0; d < 3; ++d)
            {
                lo[d] = b.lo[d];
                hi[d] = b.hi[d];
            }
        });
}

void capt_cloud_destroy(capt_cloud *cloud) { delete cloud; }

capt_status capt_filter(const capt_cloud *cloud, const capt_filter_config *config, capt_cloud **out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(config, "config");
            require(out, "out");

            capt::FilterConfig<3> cfg;
            cfg.r_filter = config->r_filter;
            cfg.repair_gaps = config->no_gap_repair == 0;
            if (config->use_reach != 0)
            {
                cfg.reach = capt::ReachConstraint<3>{to_point(config->base), config->max_reach};
            }
            *out = new capt_cloud{capt::filter(cloud->cloud, cfg)};
        });
}

capt_status capt_reach_filter(const capt_cloud *cloud, const float base[3], float max_reach, capt_cloud **out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(base, "base");
            require(out, "out");
            *out = new capt_cloud{capt::reach_filter(cloud->cloud, to_point(base), max_reach)};
        });
}

capt_status capt_dispersion(const capt_cloud *const *clouds, size_t count, capt_dispersion_stats *out)
{
    return guard(
        [&]
        {
            require(out, "out");
            if (count == 0)
            {
                throw capt::Error(capt::ErrorCode::empty_input, "no clouds given");
            }
            require(clouds, "clouds");

            std::vector<double> pooled;
            for (std::size_t i = 0; i < count; ++i)
            {
                require(clouds[i], "cloud");
                const auto values = capt::oracle::nearest_neighbour_distances(clouds[i]->cloud);
                pooled.insert(pooled.end(), values.begin(), values.end());
            }
            const auto stats = capt::oracle::summarize(std::move(pooled));
            *out = {stats.mean, stats.median, stats.p95, stats.count};
        });
}

capt_status capt_tree_build(const capt_cloud *cloud, const capt_build_params *params, capt_tree **out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(params, "params");
            require(out, "out");
            capt::BuildParams p;
            p.r_min = params->r_min;
            p.r_max = params->r_max;
            p.rmin_shortcut = params->rmin_shortcut != 0;
            *out = new capt_tree{capt::construct(cloud->cloud, p)};
        });
}

capt_status capt_tree_save(const capt_tree *tree, const char *path)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(path, "path");
            capt::save(tree->tree, path);
        });
}

capt_status capt_tree_load(const char *path, capt_tree **out)
{
    return guard(
        [&]
        {
            require(path, "path");
            require(out, "out");
            *out = new capt_tree{capt::load_file<3>(path)};
        });
}

capt_status capt_tree_stats(const capt_tree *tree, capt_build_stats *out)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(out, "out");
            const auto s = tree->tree.stats();
            *out = {s.n, s.represented, s.max_affordance, s.mean_affordance, s.total_stored, s.memory_bytes};
        });
}

capt_status capt_tree_radii(const capt_tree *tree, float *r_min, float *r_max)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(r_min, "r_min");
            require(r_max, "r_max");
            *r_min = tree->tree.r_min();
            *r_max = tree->tree.r_max();
        });
}

void capt_tree_destroy(capt_tree *tree) { delete tree; }

capt_status capt_collides(const capt_tree *tree, const capt_sphere *sphere, int *out)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(sphere, "sphere");
            require(out, "out");
            *out = capt::collides(tree->tree, to_sphere(*sphere)) ? 1 : 0;
        });
}

capt_status capt_collides_any(const capt_tree *tree, const capt_sphere *spheres, size_t count, int flags, int *out)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(out, "out");
            if (count > 0)
            {
                require(spheres, "spheres");
            }

            std::vector<capt::Sphere<3>> converted(count);
            for (std::size_t i = 0; i < count; ++i)
            {
                converted[i] = to_sphere(spheres[i]);
            }
            capt::QueryOptions opts;
            opts.aabb_prefilter = (flags & CAPT_QUERY_NO_AABB_PREFILTER) == 0;
            *out = capt::collides_any(tree->tree, std::span<const capt::Sphere<3>>(converted), opts) ? 1 : 0;
        });
}

capt_status capt_trace_read(const char *path, capt_trace **out)
{
    return guard(
        [&]
        {
            require(path, "path");
            require(out, "out");
            *out = new capt_trace(capt::io::read_trace(path));
        });
}

capt_status capt_trace_write(const capt_trace *trace, const char *path)
{
    return guard(
        [&]
        {
            require(trace, "trace");
            require(path, "path");
            capt::io::write_trace(trace->records, path);
        });
}

capt_status capt_trace_generate(const capt_cloud *cloud, const capt_workload_spec *spec, capt_trace **out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(spec, "spec");
            require(out, "out");

            capt::synth::WorkloadSpec ws;
            ws.records = spec->records;
            ws.spheres_per_record = spec->spheres_per_record;
            ws.mix = {spec->mix[0], spec->mix[1], spec->mix[2]};
            ws.r_min = spec->r_min;
            ws.r_max = spec->r_max;
            ws.seed = spec->seed;
            *out = new capt_trace(capt::synth::generate_workload(cloud->cloud, ws).trace);
        });
}

capt_status capt_trace_select(const capt_trace *trace, int expected, capt_trace **out)
{
    return guard(
        [&]
        {
            require(trace, "trace");
            require(out, "out");
            capt::io::Trace subset;
            for (const auto &record : trace->records)
            {
                if (record.expected && *record.expected == (expected != 0))
                {
                    subset.push_back(record);
                }
            }
            *out = new capt_trace(std::move(subset));
        });
}

size_t capt_trace_records(const capt_trace *trace) { return trace == nullptr ? 0 : trace->records.size(); }

size_t capt_trace_spheres(const capt_trace *trace) { return trace == nullptr ? 0 : trace->spheres.size(); }

int64_t capt_trace_batch_id(const capt_trace *trace, size_t record)
{
    if (trace == nullptr || record >= trace->records.size())
    {
        return -1;
    }
    return trace->records[record].batch;
}

int capt_trace_expected(const capt_trace *trace, size_t record)
{
    if (trace == nullptr || record >= trace->records.size() || !trace->records[record].expected)
    {
        return -1;
    }
    return *trace->records[record].expected ? 1 : 0;
}

void capt_trace_destroy(capt_trace *trace) { delete trace; }

capt_status capt_tree_check_trace(const capt_tree *tree, const capt_trace *trace)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(trace, "trace");
            check_trace(tree->tree, *trace, 0, trace->records.size());
        });
}

capt_status capt_tree_replay(
    const capt_tree *tree,
    const capt_trace *trace,
    size_t begin,
    size_t end,
    capt_query_mode mode,
    int flags,
    uint8_t *verdicts)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(trace, "trace");
            check_range(trace, begin, end);
            if (end > begin)
            {
                require(verdicts, "verdicts");
            }
            if ((flags & CAPT_QUERY_PREVALIDATED) == 0)
            {
                check_trace(tree->tree, *trace, begin, end);
            }

            capt::QueryOptions opts;
            opts.aabb_prefilter = (flags & CAPT_QUERY_NO_AABB_PREFILTER) == 0;
            const auto &t = tree->tree;

            if (mode == CAPT_MODE_BATCH)
            {
                for (std::size_t r = begin; r < end; ++r)
                {
                    verdicts[r - begin] = capt::collides_any_unchecked(t, trace->record(r), opts) ? 1 : 0;
                }
                return;
            }
            if (mode != CAPT_MODE_SCALAR)
            {
                throw capt::Error(capt::ErrorCode::invalid_argument, "unknown query mode");
            }

            for (std::size_t r = begin; r < end; ++r)
            {
                std::uint8_t hit = 0;
                for (const auto &s : trace->record(r))
                {
                    if (capt::collides_unchecked(t, s, opts))
                    {
                        hit = 1;
                        break;
                    }
                }
                verdicts[r - begin] = hit;
            }
        });
}

capt_status capt_kdtree_build(const capt_cloud *cloud, capt_kdtree **out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(out, "out");
            *out = new capt_kdtree{capt::oracle::KdTree<3>(cloud->cloud)};
        });
}

capt_status capt_kdtree_nearest(const capt_kdtree *tree, const float x[3], float point[3], double *distance)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(x, "x");
            const auto nearest = capt::oracle::kd_nearest(tree->tree, to_point(x));
            if (point != nullptr)
            {
                for (std::size_t d = 0; d < 3; ++d)
                {
                    point[d] = nearest.point[d];
                }
            }
            if (distance != nullptr)
            {
                *distance = nearest.distance;
            }
        });
}

capt_status capt_kdtree_replay(
    const capt_kdtree *tree, const capt_trace *trace, size_t begin, size_t end, uint8_t *verdicts)
{
    return guard(
        [&]
        {
            require(tree, "tree");
            require(trace, "trace");
            check_range(trace, begin, end);
            if (end > begin)
            {
                require(verdicts, "verdicts");
            }
            for (std::size_t r = begin; r < end; ++r)
            {
                std::uint8_t hit = 0;
                for (const auto &s : trace->record(r))
                {
                    if (capt::oracle::kd_collides(tree->tree, s))
                    {
                        hit = 1;
                        break;
                    }
                }
                verdicts[r - begin] = hit;
            }
        });
}

void capt_kdtree_destroy(capt_kdtree *tree) { delete tree; }

capt_status capt_brute_collides(const capt_cloud *cloud, const capt_sphere *sphere, int *out)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(sphere, "sphere");
            require(out, "out");
            *out = capt::oracle::brute_collides(cloud->cloud, to_sphere(*sphere)) ? 1 : 0;
        });
}

capt_status capt_brute_replay(
    const capt_cloud *cloud, const capt_trace *trace, size_t begin, size_t end, uint8_t *verdicts)
{
    return guard(
        [&]
        {
            require(cloud, "cloud");
            require(trace, "trace");
            check_range(trace, begin, end);
            if (end > begin)
            {
                require(verdicts, "verdicts");
            }
            for (std::size_t r = begin; r < end; ++r)
            {
                std::uint8_t hit = 0;
                for (const auto &s : trace->record(r))
                {
                    if (capt::oracle::brute_collides(cloud->cloud, s))
                    {
                        hit = 1;
                        break;
                    }
                }
                verdicts[r - begin] = hit;
            }
        });
}

}  // extern "C"
