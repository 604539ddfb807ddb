#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace capt_cli
{
    struct FilterArgs
    {
        std::string input;
        std::string output;
        double r_filter = 0.02;
        bool no_gap_repair = false;
        std::vector<double> base;  // empty: no reach constraint
        double max_reach = 0.0;
    };

    struct BuildArgs
    {
        std::string input;
        std::string output;
        double r_min = 0.01;
        double r_max = 0.08;
    };

    struct QueryArgs
    {
        std::string tree;
        std::string trace;
        std::string mode = "batch";
        bool no_aabb_prefilter = false;
        unsigned repetitions = 3;
        bool check_only = false;
        std::string json_out;
    };

    struct BenchArgs
    {
        std::string config;
        std::string json_out;
        std::string csv_out;
        bool check_only = false;
        unsigned threads = 1;
    };

    struct DispersionArgs
    {
        std::vector<std::string> inputs;
        std::string json_out;
    };

    struct GenCloudArgs
    {
        std::string kind = "shelf";
        std::size_t points = 126000;
        std::uint64_t seed = 1;
        double scale = 1.0;
        std::string output;
    };

    struct GenTraceArgs
    {
        std::string cloud;
        std::string output;
        std::size_t records = 1000;
        std::size_t spheres = 8;
        std::vector<unsigned> mix{1, 1, 1};
        double r_min = 0.01;
        double r_max = 0.08;
        std::uint64_t seed = 1;
    };

    int cmd_filter(const FilterArgs &args);
    int cmd_build(const BuildArgs &args);
    int cmd_query(const QueryArgs &args);
    int cmd_bench(const BenchArgs &args);
    int cmd_dispersion(const DispersionArgs &args);
    int cmd_gen_cloud(const GenCloudArgs &args);
    int cmd_gen_trace(const GenTraceArgs &args);

    /// Writes to `path`, or stdout when it is empty.
    void emit(const std::string &path, const std::string &text);
}  // namespace capt_cli
