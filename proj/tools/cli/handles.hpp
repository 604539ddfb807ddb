#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <capt/capt.h>

// Thin RAII layer over the C API for the command-line front end.
namespace capt_cli
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_usage = 1,
        exit_data = 2,
        exit_verification = 3,
    };

    class Failure : public std::runtime_error
    {
    public:
        Failure(int exit_code, const std::string &what) : std::runtime_error(what), exit_code_(exit_code) {}
        [[nodiscard]] int exit_code() const noexcept { return exit_code_; }

    private:
        int exit_code_;
    };

    inline void check(capt_status status, const std::string &context)
    {
        if (status != CAPT_OK)
        {
            throw Failure(exit_data, context + ": " + capt_last_error());
        }
    }

    template <class T, void (*Destroy)(T *)>
    struct Deleter
    {
        void operator()(T *p) const noexcept { Destroy(p); }
    };

    using Cloud = std::unique_ptr<capt_cloud, Deleter<capt_cloud, capt_cloud_destroy>>;
    using Tree = std::unique_ptr<capt_tree, Deleter<capt_tree, capt_tree_destroy>>;
    using Trace = std::unique_ptr<capt_trace, Deleter<capt_trace, capt_trace_destroy>>;
    using KdTree = std::unique_ptr<capt_kdtree, Deleter<capt_kdtree, capt_kdtree_destroy>>;

    inline Cloud read_cloud(const std::string &path)
    {
        capt_cloud *raw = nullptr;
        check(capt_cloud_read(path.c_str(), &raw), "reading " + path);
        return Cloud(raw);
    }

    inline Cloud generate_cloud(const std::string &kind, std::size_t n, std::uint64_t seed, float scale)
    {
        capt_cloud *raw = nullptr;
        check(capt_cloud_generate(kind.c_str(), n, seed, scale, &raw), "generating " + kind + " cloud");
        return Cloud(raw);
    }

    inline Cloud filter_cloud(const capt_cloud *cloud, const capt_filter_config &cfg)
    {
        capt_cloud *raw = nullptr;
        check(capt_filter(cloud, &cfg, &raw), "filtering");
        return Cloud(raw);
    }

    inline Tree build_tree(const capt_cloud *cloud, float r_min, float r_max)
    {
        const capt_build_params params{r_min, r_max, 1};
        capt_tree *raw = nullptr;
        check(capt_tree_build(cloud, &params, &raw), "building tree");
        return Tree(raw);
    }

    inline Tree load_tree(const std::string &path)
    {
        capt_tree *raw = nullptr;
        check(capt_tree_load(path.c_str(), &raw), "loading " + path);
        return Tree(raw);
    }

    inline KdTree build_kdtree(const capt_cloud *cloud)
    {
        capt_kdtree *raw = nullptr;
        check(capt_kdtree_build(cloud, &raw), "building k-d tree");
        return KdTree(raw);
    }

    inline Trace read_trace(const std::string &path)
    {
        capt_trace *raw = nullptr;
        check(capt_trace_read(path.c_str(), &raw), "reading " + path);
        return Trace(raw);
    }

    inline Trace select_records(const capt_trace *trace, int expected)
    {
        capt_trace *raw = nullptr;
        check(capt_trace_select(trace, expected, &raw), "selecting records");
        return Trace(raw);
    }

    inline capt_build_stats tree_stats(const capt_tree *tree)
    {
        capt_build_stats stats{};
        check(capt_tree_stats(tree, &stats), "reading tree statistics");
        return stats;
    }

    inline std::vector<std::uint8_t> replay(const capt_tree *tree, const capt_trace *trace, capt_query_mode mode, int flags)
    {
        std::vector<std::uint8_t> verdicts(capt_trace_records(trace));
        check(capt_tree_replay(tree, trace, 0, verdicts.size(), mode, flags, verdicts.data()), "querying");
        return verdicts;
    }
}  // namespace capt_cli
