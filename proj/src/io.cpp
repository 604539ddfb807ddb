#include <capt/io.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace capt::io
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r\n\v\f");
            if (first == std::string_view::npos)
            {
                return {};
            }
            const auto last = s.find_last_not_of(" \t\r\n\v\f");
            return s.substr(first, last - first + 1);
        }

        // Calls fn(line_number, line) for each line, stripping '\r'.
        template <class Fn>
        void for_each_line(std::string_view text, Fn &&fn)
        {
            std::size_t line_no = 0;
            while (!text.empty())
            {
                ++line_no;
                const auto eol = text.find('\n');
                std::string_view line = text.substr(0, eol);
                text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
                if (!line.empty() && line.back() == '\r')
                {
                    line.remove_suffix(1);
                }
                fn(line_no, line);
            }
        }

        float parse_float(std::string_view token, std::size_t line, const char *what)
        {
            if (!token.empty() && token.front() == '+')
            {
                token.remove_prefix(1);
            }

            float value = 0.0F;
            const auto *first = token.data();
            const auto *last = token.data() + token.size();
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (token.empty() || ec != std::errc{} || ptr != last)
            {
                throw ParseError(line, std::string("malformed ") + what + " '" + std::string(token) + "'");
            }
            if (!std::isfinite(value))
            {
                throw ParseError(line, std::string("non-finite ") + what + " '" + std::string(token) + "'");
            }
            return value;
        }

        std::vector<std::string_view> split(std::string_view line, char sep)
        {
            std::vector<std::string_view> out;
            while (true)
            {
                const auto pos = line.find(sep);
                out.push_back(trim(line.substr(0, pos)));
                if (pos == std::string_view::npos)
                {
                    return out;
                }
                line.remove_prefix(pos + 1);
            }
        }
    }  // namespace

    std::string format_float(float value)
    {
        std::array<char, 64> buf{};
        const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
        if (ec != std::errc{})
        {
            throw Error(ErrorCode::invalid_argument, "cannot format float");
        }
        return {buf.data(), ptr};
    }

    std::string read_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        if (in.bad())
        {
            throw Error(ErrorCode::io, "failed reading '" + path.string() + "'");
        }
        return std::move(buffer).str();
    }

    void write_file(const std::filesystem::path &path, std::string_view bytes)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
        {
            throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out)
        {
            throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
        }
    }

    PointCloud<3> parse_xyz(std::string_view text)
    {
        std::vector<Point<3>> points;
        for_each_line(
            text,
            [&](std::size_t line_no, std::string_view line)
            {
                line = trim(line.substr(0, line.find('#')));
                if (line.empty())
                {
                    return;
                }

                Point<3> p;
                std::size_t axis = 0;
                while (!line.empty())
                {
                    const auto end = line.find_first_of(" \t\v\f");
                    const auto token = line.substr(0, end);
                    if (axis == 3)
                    {
                        throw ParseError(line_no, "expected 3 coordinates, found more");
                    }
                    p[axis++] = parse_float(token, line_no, "coordinate");
                    line = end == std::string_view::npos ? std::string_view{} : trim(line.substr(end));
                }
                if (axis != 3)
                {
                    throw ParseError(line_no, "expected 3 coordinates, found " + std::to_string(axis));
                }
                points.push_back(p);
            });
        return PointCloud<3>(std::move(points));
    }

    PointCloud<3> read_xyz(const std::filesystem::path &path) { return parse_xyz(read_file(path)); }

    std::string format_xyz(const PointCloud<3> &cloud)
    {
        std::string out;
        out.reserve(cloud.size() * 32);
        for (const auto &p : cloud)
        {
            out += format_float(p[0]);
            out += ' ';
            out += format_float(p[1]);
            out += ' ';
            out += format_float(p[2]);
            out += '\n';
        }
        return out;
    }

    void write_xyz(const PointCloud<3> &cloud, const std::filesystem::path &path)
    {
        write_file(path, format_xyz(cloud));
    }

    Trace parse_trace(std::string_view text)
    {
        Trace trace;
        std::unordered_map<std::int64_t, std::size_t> record_of;
        std::unordered_map<std::int64_t, std::size_t> first_line;
        bool have_header = false;
        bool with_expected = false;

        for_each_line(
            text,
            [&](std::size_t line_no, std::string_view line)
            {
                if (trim(line).empty())
                {
                    return;
                }

                const auto fields = split(line, ',');
                if (!have_header)
                {
                    const bool base = fields.size() >= 5 && fields[0] == "batch" && fields[1] == "x" &&
                                      fields[2] == "y" && fields[3] == "z" && fields[4] == "r";
                    with_expected = fields.size() == 6 && fields[5] == "expected";
                    if (!base || (fields.size() != 5 && !with_expected))
                    {
                        throw ParseError(line_no, "expected header 'batch,x,y,z,r[,expected]'");
                    }
                    have_header = true;
                    return;
                }

                const std::size_t columns = with_expected ? 6 : 5;
                if (fields.size() != columns)
                {
                    throw ParseError(
                        line_no, "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
                }

                std::int64_t batch = 0;
                {
                    const auto token = fields[0];
                    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), batch);
                    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
                    {
                        throw ParseError(line_no, "malformed batch id '" + std::string(token) + "'");
                    }
                }

                Sphere<3> sphere;
                for (std::size_t d = 0; d < 3; ++d)
                {
                    sphere.center[d] = parse_float(fields[1 + d], line_no, "coordinate");
                }
                sphere.radius = parse_float(fields[4], line_no, "radius");
                if (!(sphere.radius > 0.0F))
                {
                    throw ParseError(line_no, "radius must be > 0");
                }

                std::optional<bool> expected;
                if (with_expected)
                {
                    const auto token = fields[5];
                    if (token == "1" || token == "true")
                    {
                        expected = true;
                    }
                    else if (token == "0" || token == "false")
                    {
                        expected = false;
                    }
                    else if (!token.empty())
                    {
                        throw ParseError(line_no, "malformed expected value '" + std::string(token) + "'");
                    }
                }

                const auto [it, inserted] = record_of.try_emplace(batch, trace.size());
                if (inserted)
                {
                    trace.push_back({batch, {}, expected});
                    first_line[batch] = line_no;
                }
                auto &record = trace[it->second];
                if (record.expected != expected)
                {
                    throw ParseError(
                        line_no,
                        "expected value for batch " + std::to_string(batch) + " differs from line " +
                            std::to_string(first_line[batch]));
                }
                record.spheres.push_back(sphere);
            });

        if (!have_header)
        {
            throw ParseError(1, "missing header 'batch,x,y,z,r[,expected]'");
        }
        return trace;
    }

    Trace read_trace(const std::filesystem::path &path) { return parse_trace(read_file(path)); }

    std::string format_trace(const Trace &trace)
    {
        bool with_expected = false;
        for (const auto &record : trace)
        {
            with_expected = with_expected || record.expected.has_value();
        }

        std::string out = with_expected ? "batch,x,y,z,r,expected\n" : "batch,x,y,z,r\n";
        for (const auto &record : trace)
        {
            if (record.spheres.empty())
            {
                throw Error(ErrorCode::invalid_argument, "trace record without spheres");
            }

            for (const auto &s : record.spheres)
            {
                out += std::to_string(record.batch);
                for (std::size_t d = 0; d < 3; ++d)
                {
                    out += ',';
                    out += format_float(s.center[d]);
                }
                out += ',';
                out += format_float(s.radius);
                if (with_expected)
                {
                    out += ',';
                    if (record.expected)
                    {
                        out += *record.expected ? '1' : '0';
                    }
                }
                out += '\n';
            }
        }
        return out;
    }

    void write_trace(const Trace &trace, const std::filesystem::path &path) { write_file(path, format_trace(trace)); }
}  // namespace capt::io
