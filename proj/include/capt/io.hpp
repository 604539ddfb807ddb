#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <capt/point_cloud.hpp>

namespace capt::io
{
    /// One recorded configuration check: every sphere sharing a batch id.
    struct TraceRecord
    {
        std::int64_t batch = 0;
        std::vector<Sphere<3>> spheres;
        std::optional<bool> expected;  ///< ground-truth "any sphere collides"

        friend bool operator==(const TraceRecord &a, const TraceRecord &b)
        {
            if (a.batch != b.batch || a.expected != b.expected || a.spheres.size() != b.spheres.size())
            {
                return false;
            }
            for (std::size_t i = 0; i < a.spheres.size(); ++i)
            {
                if (a.spheres[i].center != b.spheres[i].center || a.spheres[i].radius != b.spheres[i].radius)
                {
                    return false;
                }
            }
            return true;
        }
    };

    using Trace = std::vector<TraceRecord>;

    /// Whitespace-separated "x y z" per line; '#' starts a comment.
    [[nodiscard]] PointCloud<3> parse_xyz(std::string_view text);
    [[nodiscard]] PointCloud<3> read_xyz(const std::filesystem::path &path);

    /// Shortest decimal form that reads back to the same float.
    [[nodiscard]] std::string format_xyz(const PointCloud<3> &cloud);
    void write_xyz(const PointCloud<3> &cloud, const std::filesystem::path &path);

    /// CSV with header `batch,x,y,z,r[,expected]`. Rows sharing a batch id form
    /// one record, ordered by first appearance.
    [[nodiscard]] Trace parse_trace(std::string_view text);
    [[nodiscard]] Trace read_trace(const std::filesystem::path &path);

    [[nodiscard]] std::string format_trace(const Trace &trace);
    void write_trace(const Trace &trace, const std::filesystem::path &path);

    [[nodiscard]] std::string read_file(const std::filesystem::path &path);
    void write_file(const std::filesystem::path &path, std::string_view bytes);

    /// Shortest round-trip decimal for a float.
    [[nodiscard]] std::string format_float(float value);
}  // namespace capt::io
