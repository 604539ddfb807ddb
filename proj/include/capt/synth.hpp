#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <capt/io.hpp>
#include <capt/point_cloud.hpp>

// Synthetic clouds and query workloads for tests and benchmarks.
namespace capt::synth
{
    enum class CloudKind
    {
        cube,         ///< uniform in a cube
        grid,         ///< regular lattice
        box_surface,  ///< uniform on the six faces of a box
        shelf,        ///< uniform on the panels of a bookshelf
    };

    [[nodiscard]] std::optional<CloudKind> parse_cloud_kind(std::string_view name);
    [[nodiscard]] std::string_view to_string(CloudKind kind);

    [[nodiscard]] PointCloud<3> uniform_cube(std::size_t n, float side, std::uint64_t seed);

    /// per_axis^3 points with the given spacing, starting at the origin.
    [[nodiscard]] PointCloud<3> grid(std::size_t per_axis, float spacing);

    [[nodiscard]] PointCloud<3> box_surface(std::size_t n, const std::array<float, 3> &extent, std::uint64_t seed);

    struct ShelfSpec
    {
        float width = 0.9F;
        float depth = 0.35F;
        float height = 1.2F;
        std::size_t shelves = 4;  ///< interior horizontal boards
        std::array<float, 3> origin{0.4F, -0.45F, 0.0F};
    };

    /// Back, sides, top, bottom and interior boards, sampled by area.
    [[nodiscard]] PointCloud<3> shelf(std::size_t n, std::uint64_t seed, const ShelfSpec &spec = {});

    /// Dispatch by kind with default dimensions. For `grid`, n is rounded down
    /// to a cube of side floor(cbrt(n)) at `scale` spacing; for the others
    /// `scale` is the edge length of the bounding cube (ignored by shelf).
    [[nodiscard]] PointCloud<3> generate(CloudKind kind, std::size_t n, std::uint64_t seed, float scale = 1.0F);

    enum class RecordClass
    {
        colliding,  ///< every sphere collides
        free,       ///< no sphere collides
        partial,    ///< at least one of each
    };

    struct WorkloadSpec
    {
        std::size_t records = 1000;
        std::size_t spheres_per_record = 8;
        std::array<unsigned, 3> mix{1, 1, 1};  ///< colliding : free : partial
        float r_min = 0.01F;
        float r_max = 0.08F;
        std::uint64_t seed = 1;
    };

    struct Workload
    {
        io::Trace trace;  ///< expected column filled by the oracle
        std::vector<RecordClass> classes;
    };

    /// Colliding spheres are centred on cloud points; free ones are rejection
    /// sampled around the cloud at distance > r_max from every point. Radii
    /// are uniform in [r_min, r_max]. Every label is checked against an exact
    /// nearest-neighbour oracle; throws if free space cannot be found.
    [[nodiscard]] Workload generate_workload(const PointCloud<3> &cloud, const WorkloadSpec &spec);
}  // namespace capt::synth
