/* C interface to the collision-affording point tree library.
 *
 * All objects are opaque handles created by a *_create / *_build / *_read /
 * *_load call and released with the matching *_destroy. Every fallible call
 * returns a capt_status; on failure capt_last_error() describes the problem
 * for the calling thread. Points are 3-D, coordinates in metres, 32-bit float.
 *
 * Handles are immutable after creation and may be shared read-only across
 * threads.
 */
#ifndef CAPT_CAPT_H
#define CAPT_CAPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CAPT_API __declspec(dllexport)
#else
#  define CAPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CAPT_VERSION 1

typedef enum capt_status
{
    CAPT_OK = 0,
    CAPT_ERROR_INVALID_ARGUMENT = 1,
    CAPT_ERROR_DIMENSION_MISMATCH = 2,
    CAPT_ERROR_EMPTY_INPUT = 3,
    CAPT_ERROR_RADIUS_OUT_OF_RANGE = 4,
    CAPT_ERROR_OUT_OF_BOUNDS = 5,
    CAPT_ERROR_PARSE = 6,
    CAPT_ERROR_IO = 7,
    CAPT_ERROR_FORMAT = 8,
    CAPT_ERROR_INTERNAL = 9
} capt_status;

typedef struct capt_cloud capt_cloud;
typedef struct capt_tree capt_tree;
typedef struct capt_trace capt_trace;
typedef struct capt_kdtree capt_kdtree;

typedef struct capt_sphere
{
    float x, y, z, r;
} capt_sphere;

typedef struct capt_filter_config
{
    float r_filter;
    int use_reach; /* nonzero: drop points farther than max_reach from base */
    float base[3];
    float max_reach;
    int no_gap_repair; /* nonzero: skip the repair pass; removed points may then
                          lie farther than r_filter from every survivor */
} capt_filter_config;

typedef struct capt_build_params
{
    float r_min;
    float r_max;
    int rmin_shortcut; /* nonzero enables the r_min affordance shortcut */
} capt_build_params;

typedef struct capt_build_stats
{
    uint64_t n;
    uint64_t represented;
    uint64_t max_affordance;
    double mean_affordance;
    uint64_t total_stored;
    uint64_t memory_bytes;
} capt_build_stats;

typedef struct capt_workload_spec
{
    uint64_t records;
    uint64_t spheres_per_record;
    uint32_t mix[3]; /* colliding : free : partial */
    float r_min;
    float r_max;
    uint64_t seed;
} capt_workload_spec;

typedef struct capt_dispersion_stats
{
    double mean;
    double median;
    double p95;
    uint64_t count;
} capt_dispersion_stats;

typedef enum capt_query_mode
{
    CAPT_MODE_SCALAR = 0, /* one sphere at a time, stop at the first hit */
    CAPT_MODE_BATCH = 1   /* lane-width batches, stop at the first colliding batch */
} capt_query_mode;

enum
{
    CAPT_QUERY_NO_AABB_PREFILTER = 1,
    /* Skip per-call radius validation; the caller already ran
     * capt_tree_check_trace on this trace. */
    CAPT_QUERY_PREVALIDATED = 2
};

/* ---- library ---------------------------------------------------------- */

CAPT_API const char *capt_last_error(void);
CAPT_API const char *capt_status_string(capt_status status);
CAPT_API uint32_t capt_version(void);
CAPT_API uint32_t capt_lane_width(void);

/* ---- clouds ----------------------------------------------------------- */

/* xyz holds 3 * count packed coordinates. */
CAPT_API capt_status capt_cloud_create(const float *xyz, size_t count, capt_cloud **out);
CAPT_API capt_status capt_cloud_read(const char *path, capt_cloud **out);
CAPT_API capt_status capt_cloud_write(const capt_cloud *cloud, const char *path);
/* kind: "cube", "grid", "box", "shelf". */
CAPT_API capt_status capt_cloud_generate(const char *kind, size_t n, uint64_t seed, float scale, capt_cloud **out);
CAPT_API size_t capt_cloud_size(const capt_cloud *cloud);
/* Copies min(capacity, size) points into xyz (3 floats each). */
CAPT_API size_t capt_cloud_copy(const capt_cloud *cloud, float *xyz, size_t capacity);
CAPT_API capt_status capt_cloud_bounds(const capt_cloud *cloud, float lo[3], float hi[3]);
CAPT_API void capt_cloud_destroy(capt_cloud *cloud);

CAPT_API capt_status capt_filter(const capt_cloud *cloud, const capt_filter_config *config, capt_cloud **out);
CAPT_API capt_status capt_reach_filter(const capt_cloud *cloud, const float base[3], float max_reach, capt_cloud **out);
CAPT_API capt_status capt_dispersion(const capt_cloud *const *clouds, size_t count, capt_dispersion_stats *out);

/* ---- trees ------------------------------------------------------------ */

CAPT_API capt_status capt_tree_build(const capt_cloud *cloud, const capt_build_params *params, capt_tree **out);
CAPT_API capt_status capt_tree_save(const capt_tree *tree, const char *path);
CAPT_API capt_status capt_tree_load(const char *path, capt_tree **out);
CAPT_API capt_status capt_tree_stats(const capt_tree *tree, capt_build_stats *out);
CAPT_API capt_status capt_tree_radii(const capt_tree *tree, float *r_min, float *r_max);
CAPT_API void capt_tree_destroy(capt_tree *tree);

/* *out = 1 on collision. Radius must lie in the tree's [r_min, r_max]. */
CAPT_API capt_status capt_collides(const capt_tree *tree, const capt_sphere *sphere, int *out);
CAPT_API capt_status capt_collides_any(
    const capt_tree *tree, const capt_sphere *spheres, size_t count, int flags, int *out);

/* ---- traces ----------------------------------------------------------- */

CAPT_API capt_status capt_trace_read(const char *path, capt_trace **out);
CAPT_API capt_status capt_trace_write(const capt_trace *trace, const char *path);
CAPT_API capt_status capt_trace_generate(const capt_cloud *cloud, const capt_workload_spec *spec, capt_trace **out);
/* Records whose expected value equals `expected` (0 or 1). */
CAPT_API capt_status capt_trace_select(const capt_trace *trace, int expected, capt_trace **out);
CAPT_API size_t capt_trace_records(const capt_trace *trace);
CAPT_API size_t capt_trace_spheres(const capt_trace *trace);
CAPT_API int64_t capt_trace_batch_id(const capt_trace *trace, size_t record);
/* -1 when the record carries no expected value. */
CAPT_API int capt_trace_expected(const capt_trace *trace, size_t record);
CAPT_API void capt_trace_destroy(capt_trace *trace);

/* Fails with CAPT_ERROR_RADIUS_OUT_OF_RANGE naming the first offending batch. */
CAPT_API capt_status capt_tree_check_trace(const capt_tree *tree, const capt_trace *trace);

/* Evaluates records [begin, end) and writes one verdict byte (0/1) per record
 * into verdicts[0 .. end - begin). Radii are validated before any query runs
 * unless flags include CAPT_QUERY_PREVALIDATED. */
CAPT_API capt_status capt_tree_replay(
    const capt_tree *tree,
    const capt_trace *trace,
    size_t begin,
    size_t end,
    capt_query_mode mode,
    int flags,
    uint8_t *verdicts);

/* ---- baselines and oracles -------------------------------------------- */

CAPT_API capt_status capt_kdtree_build(const capt_cloud *cloud, capt_kdtree **out);
CAPT_API capt_status capt_kdtree_nearest(const capt_kdtree *tree, const float x[3], float point[3], double *distance);
CAPT_API capt_status capt_kdtree_replay(
    const capt_kdtree *tree, const capt_trace *trace, size_t begin, size_t end, uint8_t *verdicts);
CAPT_API void capt_kdtree_destroy(capt_kdtree *tree);

CAPT_API capt_status capt_brute_collides(const capt_cloud *cloud, const capt_sphere *sphere, int *out);
CAPT_API capt_status capt_brute_replay(
    const capt_cloud *cloud, const capt_trace *trace, size_t begin, size_t end, uint8_t *verdicts);

#ifdef __cplusplus
}
#endif

#endif /* CAPT_CAPT_H */
