#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "handles.hpp"
#include "report.hpp"

namespace capt_cli
{
    namespace
    {
        using clock = std::chrono::steady_clock;

        double elapsed_ms(clock::time_point start)
        {
            return std::chrono::duration<double, std::milli>(clock::now() - start).count();
        }
    }  // namespace

    void emit(const std::string &path, const std::string &text)
    {
        if (path.empty())
        {
            std::cout << text;
            return;
        }

        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out)
        {
            throw Failure(exit_data, "cannot write " + path);
        }
    }

    int cmd_filter(const FilterArgs &args)
    {
        const auto cloud = read_cloud(args.input);

        capt_filter_config cfg{};
        cfg.r_filter = static_cast<float>(args.r_filter);
        cfg.no_gap_repair = args.no_gap_repair ? 1 : 0;
        if (!args.base.empty())
        {
            if (args.base.size() != 3 || !(args.max_reach > 0.0))
            {
                throw Failure(exit_usage, "--base needs three coordinates and --reach a positive length");
            }
            cfg.use_reach = 1;
            for (std::size_t d = 0; d < 3; ++d)
            {
                cfg.base[d] = static_cast<float>(args.base[d]);
            }
            cfg.max_reach = static_cast<float>(args.max_reach);
        }

        const auto start = clock::now();
        const auto filtered = filter_cloud(cloud.get(), cfg);
        const double ms = elapsed_ms(start);

        check(capt_cloud_write(filtered.get(), args.output.c_str()), "writing " + args.output);
        std::printf(
            "points_in %zu points_out %zu filter_ms %.3f\n",
            capt_cloud_size(cloud.get()),
            capt_cloud_size(filtered.get()),
            ms);
        return exit_ok;
    }

    int cmd_build(const BuildArgs &args)
    {
        const auto cloud = read_cloud(args.input);

        const auto start = clock::now();
        const auto tree = build_tree(cloud.get(), static_cast<float>(args.r_min), static_cast<float>(args.r_max));
        const double ms = elapsed_ms(start);

        check(capt_tree_save(tree.get(), args.output.c_str()), "writing " + args.output);

        Json report{
            {"points", capt_cloud_size(cloud.get())},
            {"r_min", args.r_min},
            {"r_max", args.r_max},
            {"build_ms", ms},
            {"stats", to_json(tree_stats(tree.get()))},
        };
        std::cout << report.dump(2) << '\n';
        return exit_ok;
    }

    int cmd_query(const QueryArgs &args)
    {
        capt_query_mode mode = CAPT_MODE_BATCH;
        if (args.mode == "scalar")
        {
            mode = CAPT_MODE_SCALAR;
        }
        else if (args.mode != "batch")
        {
            throw Failure(exit_usage, "--mode must be 'scalar' or 'batch'");
        }

        const auto tree = load_tree(args.tree);
        const auto trace = read_trace(args.trace);
        check(capt_tree_check_trace(tree.get(), trace.get()), "checking " + args.trace);

        const int flags = CAPT_QUERY_PREVALIDATED | (args.no_aabb_prefilter ? CAPT_QUERY_NO_AABB_PREFILTER : 0);
        const auto verdicts = replay(tree.get(), trace.get(), mode, flags);

        std::size_t verified = 0;
        std::size_t colliding = 0;
        for (std::size_t r = 0; r < verdicts.size(); ++r)
        {
            colliding += verdicts[r];
            const int expected = capt_trace_expected(trace.get(), r);
            if (expected < 0)
            {
                continue;
            }
            if (expected != verdicts[r])
            {
                std::fprintf(
                    stderr,
                    "verdict mismatch in batch %lld: expected %d, got %d\n",
                    static_cast<long long>(capt_trace_batch_id(trace.get(), r)),
                    expected,
                    static_cast<int>(verdicts[r]));
                return exit_verification;
            }
            ++verified;
        }

        Json report{
            {"environment", environment_json(1)},
            {"mode", args.mode},
            {"aabb_prefilter", !args.no_aabb_prefilter},
            {"records", verdicts.size()},
            {"spheres", capt_trace_spheres(trace.get())},
            {"colliding_records", colliding},
            {"verified_records", verified},
        };
        if (!args.check_only)
        {
            const capt::TimingProtocol protocol{1, args.repetitions};
            report["ns_per_query"] = to_json(time_classes(capt_replay(tree.get(), mode, flags), trace.get(), protocol));
        }
        emit(args.json_out, report.dump(2) + "\n");
        return exit_ok;
    }

    int cmd_dispersion(const DispersionArgs &args)
    {
        if (args.inputs.empty())
        {
            throw Failure(exit_usage, "no input clouds");
        }

        std::vector<Cloud> clouds;
        std::vector<const capt_cloud *> raw;
        for (const auto &path : args.inputs)
        {
            clouds.push_back(read_cloud(path));
            raw.push_back(clouds.back().get());
        }

        capt_dispersion_stats stats{};
        check(capt_dispersion(raw.data(), raw.size(), &stats), "measuring dispersion");

        const Json report{
            {"clouds", args.inputs.size()},
            {"points", stats.count},
            {"mean", stats.mean},
            {"median", stats.median},
            {"p95", stats.p95},
        };
        emit(args.json_out, report.dump(2) + "\n");
        return exit_ok;
    }

    int cmd_gen_cloud(const GenCloudArgs &args)
    {
        const auto cloud = generate_cloud(args.kind, args.points, args.seed, static_cast<float>(args.scale));
        check(capt_cloud_write(cloud.get(), args.output.c_str()), "writing " + args.output);
        std::printf("wrote %zu points to %s\n", capt_cloud_size(cloud.get()), args.output.c_str());
        return exit_ok;
    }

    int cmd_gen_trace(const GenTraceArgs &args)
    {
        if (args.mix.size() != 3)
        {
            throw Failure(exit_usage, "--mix needs three ratios: colliding,free,partial");
        }

        const auto cloud = read_cloud(args.cloud);
        capt_workload_spec spec{};
        spec.records = args.records;
        spec.spheres_per_record = args.spheres;
        spec.mix[0] = args.mix[0];
        spec.mix[1] = args.mix[1];
        spec.mix[2] = args.mix[2];
        spec.r_min = static_cast<float>(args.r_min);
        spec.r_max = static_cast<float>(args.r_max);
        spec.seed = args.seed;

        capt_trace *raw = nullptr;
        check(capt_trace_generate(cloud.get(), &spec, &raw), "generating trace");
        const Trace trace(raw);
        check(capt_trace_write(trace.get(), args.output.c_str()), "writing " + args.output);
        std::printf(
            "wrote %zu records (%zu spheres) to %s\n",
            capt_trace_records(trace.get()),
            capt_trace_spheres(trace.get()),
            args.output.c_str());
        return exit_ok;
    }
}  // namespace capt_cli
