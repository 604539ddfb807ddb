// The `bench` subcommand: filter -> build -> query over a JSON-described suite.
//
// Config schema (every key optional):
//
//   {
//     "r_min": 0.01, "r_max": 0.08, "repetitions": 3,
//     "r_filter": [0.005, 0.01, 0.02], "gap_repair": true,
//     "reach": {"base": [0, 0, 0], "max_reach": 1.2},
//     "workload": {"records": 1000, "spheres_per_record": 8, "mix": [1, 1, 1], "seed": 7},
//     "clouds": [
//       {"name": "shelf", "kind": "shelf", "points": 126000, "seed": 1, "scale": 1.0},
//       {"name": "scan", "path": "scan.xyz"}
//     ]
//   }
//
// One run is produced per (cloud, r_filter) pair. A missing or empty
// "r_filter" list runs each cloud unfiltered.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "handles.hpp"
#include "report.hpp"

namespace capt_cli
{
    namespace
    {
        using clock = std::chrono::steady_clock;

        // Brute force is affordable up to this size; larger clouds are checked
        // against the k-d tree.
        constexpr std::size_t brute_force_limit = 4096;

        struct CloudEntry
        {
            std::string name;
            std::string path;
            std::string kind = "cube";
            std::size_t points = 1000;
            std::uint64_t seed = 1;
            double scale = 1.0;
        };

        struct Suite
        {
            double r_min = 0.01;
            double r_max = 0.08;
            unsigned repetitions = 3;
            std::vector<double> r_filter;
            bool gap_repair = true;
            bool use_reach = false;
            std::array<float, 3> base{};
            double max_reach = 0.0;
            capt_workload_spec workload{1000, 8, {1, 1, 1}, 0.0f, 0.0f, 7};
            std::vector<CloudEntry> clouds;
        };

        template <class T>
        T value_or(const Json &j, const char *key, T fallback)
        {
            return j.contains(key) ? j.at(key).get<T>() : fallback;
        }

        Suite parse_suite(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
            {
                throw Failure(exit_data, "cannot open " + path);
            }

            Json j;
            try
            {
                j = Json::parse(in);
            }
            catch (const Json::exception &e)
            {
                throw Failure(exit_data, path + ": " + e.what());
            }

            Suite s;
            try
            {
                if (!j.is_object())
                {
                    throw Failure(exit_data, path + ": config must be a JSON object");
                }
                s.r_min = value_or(j, "r_min", s.r_min);
                s.r_max = value_or(j, "r_max", s.r_max);
                s.repetitions = value_or(j, "repetitions", s.repetitions);
                s.r_filter = value_or(j, "r_filter", s.r_filter);
                s.gap_repair = value_or(j, "gap_repair", s.gap_repair);

                if (j.contains("reach"))
                {
                    const auto &r = j.at("reach");
                    const auto base = r.at("base").get<std::vector<float>>();
                    if (base.size() != 3)
                    {
                        throw Failure(exit_data, path + ": reach.base needs three coordinates");
                    }
                    std::copy(base.begin(), base.end(), s.base.begin());
                    s.max_reach = r.at("max_reach").get<double>();
                    s.use_reach = true;
                }

                if (j.contains("workload"))
                {
                    const auto &w = j.at("workload");
                    s.workload.records = value_or(w, "records", s.workload.records);
                    s.workload.spheres_per_record = value_or(w, "spheres_per_record", s.workload.spheres_per_record);
                    s.workload.seed = value_or(w, "seed", s.workload.seed);
                    if (w.contains("mix"))
                    {
                        const auto mix = w.at("mix").get<std::vector<std::uint32_t>>();
                        if (mix.size() != 3)
                        {
                            throw Failure(exit_data, path + ": workload.mix needs three ratios");
                        }
                        std::copy(mix.begin(), mix.end(), s.workload.mix);
                    }
                }

                for (const auto &c : value_or(j, "clouds", Json::array()))
                {
                    CloudEntry e;
                    e.path = value_or(c, "path", e.path);
                    e.kind = value_or(c, "kind", e.kind);
                    e.points = value_or(c, "points", e.points);
                    e.seed = value_or(c, "seed", e.seed);
                    e.scale = value_or(c, "scale", e.scale);
                    e.name = value_or(c, "name", e.path.empty() ? e.kind : e.path);
                    s.clouds.push_back(std::move(e));
                }
            }
            catch (const Json::exception &e)
            {
                throw Failure(exit_data, path + ": " + e.what());
            }

            s.workload.r_min = static_cast<float>(s.r_min);
            s.workload.r_max = static_cast<float>(s.r_max);
            return s;
        }

        using ShardFn = std::function<capt_status(std::size_t, std::size_t, std::uint8_t *)>;

        // Splits [0, records) into contiguous shards, one per thread.
        std::vector<std::uint8_t> sharded(std::size_t records, unsigned threads, const ShardFn &fn)
        {
            std::vector<std::uint8_t> verdicts(records);
            threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(records, 1))));
            const std::size_t step = (records + threads - 1) / threads;

            std::vector<capt_status> status(threads, CAPT_OK);
            std::vector<std::string> errors(threads);
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
            {
                const std::size_t begin = std::min(records, t * step);
                const std::size_t end = std::min(records, begin + step);
                pool.emplace_back(
                    [&, t, begin, end]
                    {
                        status[t] = fn(begin, end, verdicts.data() + begin);
                        if (status[t] != CAPT_OK)
                        {
                            errors[t] = capt_last_error();
                        }
                    });
            }
            for (auto &th : pool)
            {
                th.join();
            }
            for (unsigned t = 0; t < threads; ++t)
            {
                if (status[t] != CAPT_OK)
                {
                    throw Failure(exit_data, "verification: " + errors[t]);
                }
            }
            return verdicts;
        }

        double ms_since(clock::time_point start)
        {
            return std::chrono::duration<double, std::milli>(clock::now() - start).count();
        }

        struct Run
        {
            Json json;
            bool verified = true;
        };

        Run run_one(
            const Suite &suite,
            const CloudEntry &entry,
            const capt_cloud *input,
            std::optional<double> r_filter,
            const BenchArgs &args)
        {
            const capt::TimingProtocol protocol{1, suite.repetitions};
            Json timing = Json::object();

            Cloud filtered;
            const capt_cloud *cloud = input;
            if (r_filter || suite.use_reach)
            {
                capt_filter_config cfg{};
                cfg.r_filter = static_cast<float>(r_filter.value_or(0.0));
                cfg.use_reach = suite.use_reach ? 1 : 0;
                cfg.no_gap_repair = suite.gap_repair ? 0 : 1;
                std::copy(suite.base.begin(), suite.base.end(), cfg.base);
                cfg.max_reach = static_cast<float>(suite.max_reach);

                const auto start = clock::now();
                filtered = filter_cloud(input, cfg);
                timing["filter_ms"] = ms_since(start);
                cloud = filtered.get();
            }

            const auto start = clock::now();
            const auto tree = build_tree(cloud, static_cast<float>(suite.r_min), static_cast<float>(suite.r_max));
            timing["build_ms"] = ms_since(start);

            capt_trace *raw_trace = nullptr;
            check(capt_trace_generate(cloud, &suite.workload, &raw_trace), "generating workload");
            const Trace trace(raw_trace);
            const std::size_t records = capt_trace_records(trace.get());

            const auto kd = build_kdtree(cloud);
            const bool brute = capt_cloud_size(cloud) <= brute_force_limit;

            // Verification: oracle, then both CAPT modes, against each other
            // and against the generator's labels.
            const auto oracle = sharded(
                records,
                args.threads,
                [&](std::size_t b, std::size_t e, std::uint8_t *out)
                {
                    return brute ? capt_brute_replay(cloud, trace.get(), b, e, out)
                                 : capt_kdtree_replay(kd.get(), trace.get(), b, e, out);
                });
            const auto batch = replay(tree.get(), trace.get(), CAPT_MODE_BATCH, 0);
            const auto scalar = replay(tree.get(), trace.get(), CAPT_MODE_SCALAR, 0);

            std::size_t mismatches = 0;
            std::size_t colliding = 0;
            for (std::size_t r = 0; r < records; ++r)
            {
                const int expected = capt_trace_expected(trace.get(), r);
                const bool ok = batch[r] == oracle[r] && scalar[r] == oracle[r] && (expected < 0 || expected == oracle[r]);
                mismatches += ok ? 0 : 1;
                colliding += oracle[r];
            }

            Json run{
                {"cloud", entry.name},
                {"r_filter", r_filter ? Json(*r_filter) : Json(nullptr)},
                {"points_before", capt_cloud_size(input)},
                {"points_after", capt_cloud_size(cloud)},
                {"r_min", suite.r_min},
                {"r_max", suite.r_max},
                {"build_stats", to_json(tree_stats(tree.get()))},
                {"records", records},
                {"queries", capt_trace_spheres(trace.get())},
                {"colliding_records", colliding},
                {"oracle", brute ? "brute_force" : "kd_tree"},
                {"mismatches", mismatches},
            };

            if (!args.check_only)
            {
                const int flags = CAPT_QUERY_PREVALIDATED;
                timing["query_ns"] = Json{
                    {"capt_batch", to_json(time_classes(capt_replay(tree.get(), CAPT_MODE_BATCH, flags), trace.get(), protocol))},
                    {"capt_scalar", to_json(time_classes(capt_replay(tree.get(), CAPT_MODE_SCALAR, flags), trace.get(), protocol))},
                    {"kd_tree", to_json(time_classes(kdtree_replay(kd.get()), trace.get(), protocol))},
                };
                run["timing"] = std::move(timing);
            }
            return {std::move(run), mismatches == 0};
        }

        std::string csv_number(const Json &j)
        {
            if (j.is_null())
            {
                return "";
            }
            return j.dump();
        }

        std::string to_csv(const Json &runs, bool with_timing)
        {
            std::ostringstream out;
            out << "cloud,r_filter,points_before,points_after,represented,max_affordance,mean_affordance,"
                   "total_stored,memory_bytes,records,queries,colliding_records,oracle,mismatches";
            if (with_timing)
            {
                out << ",filter_ms,build_ms";
                for (const char *engine : {"capt_batch", "capt_scalar", "kd_tree"})
                {
                    for (const char *cls : {"mixed", "colliding", "free"})
                    {
                        out << ',' << engine << '_' << cls << "_ns";
                    }
                }
            }
            out << '\n';

            for (const auto &r : runs)
            {
                const auto &s = r.at("build_stats");
                out << r.at("cloud").get<std::string>() << ',' << csv_number(r.at("r_filter")) << ','
                    << r.at("points_before") << ',' << r.at("points_after") << ',' << s.at("represented") << ','
                    << s.at("max_affordance") << ',' << s.at("mean_affordance") << ',' << s.at("total_stored") << ','
                    << s.at("memory_bytes") << ',' << r.at("records") << ',' << r.at("queries") << ','
                    << r.at("colliding_records") << ',' << r.at("oracle").get<std::string>() << ','
                    << r.at("mismatches");
                if (with_timing)
                {
                    const auto &t = r.at("timing");
                    out << ',' << (t.contains("filter_ms") ? csv_number(t.at("filter_ms")) : "") << ','
                        << csv_number(t.at("build_ms"));
                    for (const char *engine : {"capt_batch", "capt_scalar", "kd_tree"})
                    {
                        for (const char *cls : {"mixed", "colliding", "free"})
                        {
                            out << ',' << csv_number(t.at("query_ns").at(engine).at(cls));
                        }
                    }
                }
                out << '\n';
            }
            return out.str();
        }
    }  // namespace

    int cmd_bench(const BenchArgs &args)
    {
        const Suite suite = parse_suite(args.config);

        Json runs = Json::array();
        bool verified = true;
        for (const auto &entry : suite.clouds)
        {
            const Cloud input = entry.path.empty()
                ? generate_cloud(entry.kind, entry.points, entry.seed, static_cast<float>(entry.scale))
                : read_cloud(entry.path);

            std::vector<std::optional<double>> sweep(suite.r_filter.begin(), suite.r_filter.end());
            if (sweep.empty())
            {
                sweep.emplace_back(std::nullopt);
            }
            for (const auto &r_filter : sweep)
            {
                auto run = run_one(suite, entry, input.get(), r_filter, args);
                verified = verified && run.verified;
                if (!run.verified)
                {
                    std::cerr << "verification failed: cloud " << entry.name << ", r_filter "
                              << (r_filter ? std::to_string(*r_filter) : "none") << '\n';
                }
                runs.push_back(std::move(run.json));
            }
        }

        const Json report{{"environment", environment_json(args.threads)}, {"runs", runs}};
        emit(args.json_out, report.dump(2) + "\n");
        if (!args.csv_out.empty())
        {
            emit(args.csv_out, to_csv(runs, !args.check_only));
        }
        return verified ? exit_ok : exit_verification;
    }
}  // namespace capt_cli
