#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "handles.hpp"

int main(int argc, char **argv)
{
    using namespace capt_cli;

    CLI::App app{"capt-cli: collision-affording point trees, filtering and benchmarks"};
    app.require_subcommand(1);

    FilterArgs filter;
    auto *filter_cmd = app.add_subcommand("filter", "Space-filling-curve filter of an .xyz cloud");
    filter_cmd->add_option("input", filter.input, "Input cloud (.xyz)")->required();
    filter_cmd->add_option("output", filter.output, "Output cloud (.xyz)")->required();
    filter_cmd->add_option("--r-filter", filter.r_filter, "Filter radius in metres")->capture_default_str();
    auto *base_opt = filter_cmd->add_option("--base", filter.base, "Robot base x y z for the reach filter")->expected(3);
    filter_cmd->add_option("--reach", filter.max_reach, "Maximum reach from --base")->needs(base_opt);
    filter_cmd->add_flag("--no-gap-repair", filter.no_gap_repair, "Skip the repair pass (removed points may exceed r_filter)");

    BuildArgs build;
    auto *build_cmd = app.add_subcommand("build", "Build a tree and write its binary dump");
    build_cmd->add_option("input", build.input, "Input cloud (.xyz)")->required();
    build_cmd->add_option("output", build.output, "Output tree dump")->required();
    build_cmd->add_option("--r-min", build.r_min, "Smallest query radius")->capture_default_str();
    build_cmd->add_option("--r-max", build.r_max, "Largest query radius")->capture_default_str();

    QueryArgs query;
    auto *query_cmd = app.add_subcommand("query", "Replay a trace against a tree dump");
    query_cmd->add_option("tree", query.tree, "Tree dump")->required();
    query_cmd->add_option("trace", query.trace, "Query trace (.csv)")->required();
    query_cmd->add_option("--mode", query.mode, "scalar or batch")
        ->check(CLI::IsMember({"scalar", "batch"}))
        ->capture_default_str();
    query_cmd->add_flag("--no-aabb-prefilter", query.no_aabb_prefilter, "Disable the bounding-box prefilter");
    query_cmd->add_option("--repetitions", query.repetitions, "Timed repetitions (median reported)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    query_cmd->add_flag("--check-only", query.check_only, "Verify only; omit timings");
    query_cmd->add_option("--json", query.json_out, "Write the report here instead of stdout");

    BenchArgs bench;
    auto *bench_cmd = app.add_subcommand("bench", "Run a filter/build/query suite from a JSON config");
    bench_cmd->add_option("config", bench.config, "Suite config (.json)")->required();
    bench_cmd->add_option("--json", bench.json_out, "Write the JSON report here instead of stdout");
    bench_cmd->add_option("--csv", bench.csv_out, "Also write a CSV summary");
    bench_cmd->add_flag("--check-only", bench.check_only, "Verify only; omit timings");
    bench_cmd->add_option("--threads", bench.threads, "Threads for oracle verification (timing stays single-threaded)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    DispersionArgs dispersion;
    auto *dispersion_cmd = app.add_subcommand("dispersion", "Nearest-neighbour distance statistics, pooled over clouds");
    dispersion_cmd->add_option("inputs", dispersion.inputs, "Input clouds (.xyz)")->required();
    dispersion_cmd->add_option("--json", dispersion.json_out, "Write the report here instead of stdout");

    auto *gen_cmd = app.add_subcommand("gen", "Generate synthetic clouds and traces");
    gen_cmd->require_subcommand(1);

    GenCloudArgs gen_cloud;
    auto *gen_cloud_cmd = gen_cmd->add_subcommand("cloud", "Synthetic point cloud");
    gen_cloud_cmd->add_option("output", gen_cloud.output, "Output cloud (.xyz)")->required();
    gen_cloud_cmd->add_option("--kind", gen_cloud.kind, "cube, grid, box or shelf")
        ->check(CLI::IsMember({"cube", "grid", "box", "box_surface", "shelf"}))
        ->capture_default_str();
    gen_cloud_cmd->add_option("--points", gen_cloud.points, "Point count (grid: points per axis)")->capture_default_str();
    gen_cloud_cmd->add_option("--seed", gen_cloud.seed, "RNG seed")->capture_default_str();
    gen_cloud_cmd->add_option("--scale", gen_cloud.scale, "Size scale (cube side, grid spacing, box extent)")
        ->capture_default_str();

    GenTraceArgs gen_trace;
    auto *gen_trace_cmd = gen_cmd->add_subcommand("trace", "Labelled query trace over a cloud");
    gen_trace_cmd->add_option("cloud", gen_trace.cloud, "Input cloud (.xyz)")->required();
    gen_trace_cmd->add_option("output", gen_trace.output, "Output trace (.csv)")->required();
    gen_trace_cmd->add_option("--records", gen_trace.records, "Number of batches")->capture_default_str();
    gen_trace_cmd->add_option("--spheres", gen_trace.spheres, "Spheres per batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen_trace_cmd->add_option("--mix", gen_trace.mix, "colliding,free,partial ratio")->delimiter(',')->expected(3);
    gen_trace_cmd->add_option("--r-min", gen_trace.r_min, "Smallest radius")->capture_default_str();
    gen_trace_cmd->add_option("--r-max", gen_trace.r_max, "Largest radius")->capture_default_str();
    gen_trace_cmd->add_option("--seed", gen_trace.seed, "RNG seed")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*filter_cmd)
        {
            return cmd_filter(filter);
        }
        if (*build_cmd)
        {
            return cmd_build(build);
        }
        if (*query_cmd)
        {
            return cmd_query(query);
        }
        if (*bench_cmd)
        {
            return cmd_bench(bench);
        }
        if (*dispersion_cmd)
        {
            return cmd_dispersion(dispersion);
        }
        if (*gen_cloud_cmd)
        {
            return cmd_gen_cloud(gen_cloud);
        }
        if (*gen_trace_cmd)
        {
            return cmd_gen_trace(gen_trace);
        }
    }
    catch (const Failure &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
