// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   capt_acceptance [--cli <path to capt-cli>] [--only N]
//
// Criterion 6 times queries through the CLI's bench command; without --cli it
// fails with an explanation.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include <capt/morton.hpp>
#include <capt/oracle.hpp>
#include <capt/query.hpp>
#include <capt/serialize.hpp>
#include <capt/synth.hpp>
#include <capt/timing.hpp>

#include "../support/reference.hpp"

namespace
{
    using P3 = capt::Point<3>;
    using S3 = capt::Sphere<3>;
    using Cloud = capt::PointCloud<3>;
    using clock_type = std::chrono::steady_clock;

    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string cli_path;

    double seconds_since(clock_type::time_point start)
    {
        return std::chrono::duration<double>(clock_type::now() - start).count();
    }

    std::string fmt(const char *format, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, format, args...);
        return buf;
    }

    // ---- instance generators ----------------------------------------------

    Cloud gaussian_blobs(std::mt19937_64 &rng, std::size_t n, float sigma)
    {
        std::uniform_real_distribution<float> u(0.0F, 1.0F);
        std::normal_distribution<float> g(0.0F, sigma);
        std::vector<P3> centres(1 + rng() % 6);
        for (auto &c : centres)
        {
            c = P3{{u(rng), u(rng), u(rng)}};
        }
        std::vector<P3> pts(n);
        for (auto &p : pts)
        {
            const auto &c = centres[rng() % centres.size()];
            p = P3{{c[0] + g(rng), c[1] + g(rng), c[2] + g(rng)}};
        }
        return Cloud(std::move(pts));
    }

    Cloud planar_patch(std::mt19937_64 &rng, std::size_t n)
    {
        std::uniform_real_distribution<float> u(0.0F, 1.0F);
        const float z = u(rng);
        std::vector<P3> pts(n);
        for (auto &p : pts)
        {
            p = P3{{u(rng), u(rng), z}};
        }
        return Cloud(std::move(pts));
    }

    Cloud collinear(std::mt19937_64 &rng, std::size_t n)
    {
        std::uniform_real_distribution<float> u(0.0F, 1.0F);
        std::vector<P3> pts(n);
        for (auto &p : pts)
        {
            p = P3{{u(rng), 0.5F, 0.5F}};
        }
        return Cloud(std::move(pts));
    }

    // Queries: half centred near cloud points (likely hits or near misses),
    // half anywhere in a padded bounding region.
    S3 mixed_sphere(std::mt19937_64 &rng, const Cloud &cloud, float r_min, float r_max)
    {
        std::uniform_real_distribution<float> radius(r_min, r_max);
        S3 s;
        switch (rng() % 8)
        {
            case 0: s.radius = r_min; break;
            case 1: s.radius = r_max; break;
            default: s.radius = radius(rng); break;
        }
        if (rng() % 2 == 0)
        {
            const auto &p = cloud[rng() % cloud.size()];
            std::uniform_real_distribution<float> jitter(-2.0F * r_max, 2.0F * r_max);
            for (std::size_t d = 0; d < 3; ++d)
            {
                s.center[d] = p[d] + jitter(rng);
            }
        }
        else
        {
            const auto &b = cloud.bounds();
            for (std::size_t d = 0; d < 3; ++d)
            {
                std::uniform_real_distribution<float> u(b.lo[d] - 2.0F * r_max, b.hi[d] + 2.0F * r_max);
                s.center[d] = u(rng);
            }
        }
        return s;
    }

    struct ExactnessTally
    {
        std::size_t instances = 0;
        std::size_t mismatches = 0;
        std::string first;
    };

    void check_exact(const capt::Capt<3> &tree, const Cloud &cloud, const S3 &s, ExactnessTally &tally)
    {
        ++tally.instances;
        const bool expected = capt::oracle::brute_collides(cloud, s);
        if (capt::collides(tree, s) != expected || capt::collides(tree, s, {false, false}) != expected)
        {
            if (tally.mismatches++ == 0)
            {
                tally.first = fmt("center (%.9g, %.9g, %.9g) r %.9g expected %d", s.center[0], s.center[1], s.center[2],
                                  s.radius, expected ? 1 : 0);
            }
        }
    }

    // Every oracle-checked tree must agree with brute force on `queries` mixed
    // queries; shared by criteria 1 and 9.
    void exact_on_random_queries(const Cloud &cloud, const capt::BuildParams &params, std::size_t queries,
                                 std::mt19937_64 &rng, ExactnessTally &tally)
    {
        const auto tree = capt::construct(cloud, params);
        for (std::size_t q = 0; q < queries; ++q)
        {
            check_exact(tree, cloud, mixed_sphere(rng, cloud, params.r_min, params.r_max), tally);
        }
    }

    // ---- 1. exactness ------------------------------------------------------

    Outcome exactness()
    {
        const auto start = clock_type::now();
        std::mt19937_64 rng(20240601);
        ExactnessTally random;
        ExactnessTally adversarial;

        // Randomized suite: 250 clouds x 400 queries.
        std::uniform_int_distribution<std::size_t> size(1, 4096);
        std::uniform_real_distribution<float> log_rmax(std::log(0.004F), std::log(0.2F));
        std::uniform_real_distribution<float> frac(0.05F, 1.0F);
        for (int c = 0; c < 250; ++c)
        {
            const std::size_t n = size(rng);
            Cloud cloud;
            switch (c % 5)
            {
                case 0: cloud = capt_test::random_cloud<3>(rng, n, 0.0F, 1.0F); break;
                case 1: cloud = gaussian_blobs(rng, n, 0.05F); break;
                case 2: cloud = planar_patch(rng, n); break;
                case 3: cloud = capt_test::duplicate_heavy(rng, n); break;
                default: cloud = capt_test::random_cloud<3>(rng, n, -0.05F, 0.05F); break;
            }
            const float r_max = std::exp(log_rmax(rng));
            const capt::BuildParams params{r_max * frac(rng), r_max, true};
            exact_on_random_queries(cloud, params, 400, rng, random);
        }

        // Adversarial: lattices with dyadic spacing and exactly tangent probes.
        for (const float h : {0.0625F, 0.125F, 0.03125F})
        {
            const auto grid = capt_test::lattice(12, h);
            for (const float r_max : {h, 2.0F * h})
            {
                const auto tree = capt::construct(grid, {h * 0.5F, r_max, true});
                for (const auto &p : grid)
                {
                    for (std::size_t d = 0; d < 3; ++d)
                    {
                        // Centred on the midplane between neighbours, where cell
                        // boundaries sit: tangent to two lattice points at once.
                        S3 s{p, h * 0.5F};
                        s.center[d] += h * 0.5F;
                        check_exact(tree, grid, s, adversarial);
                        S3 t{p, r_max};
                        t.center[d] += r_max;
                        check_exact(tree, grid, t, adversarial);
                    }
                }
                // Centres on split planes.
                for (const float v : tree.tests())
                {
                    if (std::isfinite(v))
                    {
                        check_exact(tree, grid, S3{{{v, v, v}}, r_max}, adversarial);
                        check_exact(tree, grid, S3{{{v, 0.5F * h, v}}, tree.r_min()}, adversarial);
                    }
                }
            }
        }

        // Duplicates, collinear points, single points and tiny clouds.
        for (int c = 0; c < 40; ++c)
        {
            Cloud cloud;
            switch (c % 4)
            {
                case 0: cloud = capt_test::duplicate_heavy(rng, 1 + rng() % 3000); break;
                case 1: cloud = collinear(rng, 1 + rng() % 2000); break;
                case 2: cloud = Cloud(std::vector<P3>(1 + rng() % 50, P3{{0.25F, 0.5F, 0.75F}})); break;
                default: cloud = capt_test::random_cloud<3>(rng, 1 + rng() % 4, 0.0F, 0.1F); break;
            }
            exact_on_random_queries(cloud, {0.01F, 0.05F, true}, 500, rng, adversarial);
            exact_on_random_queries(cloud, {0.03125F, 0.0625F, true}, 250, rng, adversarial);
        }

        const double elapsed = seconds_since(start);
        const bool pass = random.mismatches == 0 && adversarial.mismatches == 0 && random.instances >= 100000 && elapsed < 60.0;
        auto detail = fmt("%zu randomized + %zu adversarial instances, %zu mismatches, %.1f s (budget 60 s)",
                          random.instances, adversarial.instances, random.mismatches + adversarial.mismatches, elapsed);
        if (!random.first.empty() || !adversarial.first.empty())
        {
            detail += "; first: " + (random.first.empty() ? adversarial.first : random.first);
        }
        return {pass, detail};
    }

    // ---- 2. batch / scalar equivalence --------------------------------------

    template <std::size_t L>
    std::size_t batch_equivalence(const capt::Capt<3> &tree, const Cloud &cloud, std::size_t batches,
                                  std::mt19937_64 &rng)
    {
        std::size_t mismatches = 0;
        for (std::size_t b = 0; b < batches; ++b)
        {
            capt::SphereBatch<3, L> batch;
            std::uint32_t scalar = 0;
            for (std::size_t lane = 0; lane < L; ++lane)
            {
                batch.set(lane, mixed_sphere(rng, cloud, tree.r_min(), tree.r_max()));
            }
            const std::uint32_t full = L == 32 ? ~0U : (1U << L) - 1;
            batch.mask = static_cast<std::uint32_t>(rng()) & full;
            for (std::size_t lane = 0; lane < L; ++lane)
            {
                if (batch.valid(lane) && capt::collides(tree, batch.sphere(lane)))
                {
                    scalar |= 1U << lane;
                }
            }
            for (const bool prefilter : {true, false})
            {
                const auto every = capt::collides_batch(tree, batch, {prefilter, true});
                const auto first = capt::collides_batch(tree, batch, {prefilter, false});
                const bool ok = every.lanes == scalar && every.any_collision == (scalar != 0) &&
                                first.any_collision == (scalar != 0) && (first.lanes & ~scalar) == 0 &&
                                (scalar == 0) == (first.lanes == 0);
                mismatches += ok ? 0 : 1;
            }
        }
        return mismatches;
    }

    Outcome batch_scalar()
    {
        std::mt19937_64 rng(77);
        std::size_t batches = 0;
        std::size_t mismatches = 0;
        for (int t = 0; t < 10; ++t)
        {
            const auto cloud = t % 2 == 0 ? capt_test::random_cloud<3>(rng, 500 + rng() % 3500, 0.0F, 1.0F)
                                          : gaussian_blobs(rng, 500 + rng() % 3500, 0.05F);
            const auto tree = capt::construct(cloud, {0.01F, 0.02F + 0.01F * static_cast<float>(t), true});
            mismatches += batch_equivalence<8>(tree, cloud, 10000, rng);
            mismatches += batch_equivalence<4>(tree, cloud, 500, rng);
            mismatches += batch_equivalence<16>(tree, cloud, 500, rng);
            batches += 11000;
        }
        return {mismatches == 0 && batches >= 100000,
                fmt("%zu random-mask batches (lane widths 8, 4, 16), prefilter on and off, %zu mismatches", batches,
                    mismatches)};
    }

    // ---- 3. filter gap bound -------------------------------------------------

    // Brute force: every input point has a survivor within r (survivors
    // themselves trivially). Returns the number of violations.
    std::size_t gap_violations(const Cloud &input, const Cloud &kept, float r)
    {
        const double limit = static_cast<double>(r) * static_cast<double>(r);
        std::size_t violations = 0;
        std::size_t hint = 0;
        for (const auto &p : input)
        {
            bool found = false;
            for (std::size_t k = 0; k < kept.size() && !found; ++k)
            {
                const std::size_t j = (hint + k) % kept.size();
                if (capt::dist_sq<double>(p, kept[j]) <= limit)
                {
                    found = true;
                    hint = j;
                }
            }
            violations += found ? 0 : 1;
        }
        return violations;
    }

    bool is_subset(const Cloud &input, const Cloud &kept)
    {
        auto a = std::vector<P3>(input.begin(), input.end());
        auto b = std::vector<P3>(kept.begin(), kept.end());
        const auto less = [](const P3 &x, const P3 &y) { return x.coords < y.coords; };
        std::sort(a.begin(), a.end(), less);
        std::sort(b.begin(), b.end(), less);
        return std::includes(a.begin(), a.end(), b.begin(), b.end(), less);
    }

    Outcome gap_bound()
    {
        std::mt19937_64 rng(5);
        const std::vector<std::pair<std::string, Cloud>> clouds{
            {"shelf", capt::synth::shelf(30000, 1)},
            {"cube", capt::synth::uniform_cube(15000, 0.5F, 2)},
            {"box", capt::synth::box_surface(15000, {0.6F, 0.4F, 0.3F}, 3)},
            {"lattice", capt_test::lattice(24, 0.0078125F)},
            {"duplicates", capt_test::duplicate_heavy(rng, 8000)},
            {"blobs", gaussian_blobs(rng, 15000, 0.03F)},
        };
        const std::vector<float> sweep{0.005F, 0.01F, 0.015F, 0.018F, 0.019F, 0.02F, 0.05F};

        std::size_t configs = 0;
        std::size_t checked = 0;
        std::size_t violations = 0;
        std::string where;
        for (const auto &[name, cloud] : clouds)
        {
            for (const float r : sweep)
            {
                const auto kept = capt::filter(cloud, capt::FilterConfig<3>{r, std::nullopt});
                const std::size_t v = gap_violations(cloud, kept, r) + (is_subset(cloud, kept) ? 0 : 1);
                if (v != 0 && where.empty())
                {
                    where = fmt("; first failure on %s at r_filter %g", name.c_str(), static_cast<double>(r));
                }
                violations += v;
                checked += cloud.size();
                ++configs;
            }
        }
        return {violations == 0,
                fmt("%zu cloud/r_filter configurations, %zu points checked by brute force, %zu violations%s", configs,
                    checked, violations, where.c_str())};
    }

    // ---- 4. filter effectiveness -------------------------------------------

    Outcome filter_effectiveness()
    {
        const auto cloud = capt::synth::shelf(126000, 1);
        const auto kept = capt::filter(cloud, capt::FilterConfig<3>{0.02F, std::nullopt});
        const bool pass = kept.size() >= 4000 && kept.size() <= 20000;
        return {pass, fmt("shelf scene %zu points -> %zu survivors at r_filter 2 cm (window [4000, 20000])", cloud.size(),
                          kept.size())};
    }

    // ---- 5. construction scaling --------------------------------------------

    // Least-squares fit y = a + b f(x); returns R^2.
    double r_squared(const std::vector<double> &f, const std::vector<double> &y)
    {
        const auto n = static_cast<double>(f.size());
        double mf = 0;
        double my = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
        {
            mf += f[i] / n;
            my += y[i] / n;
        }
        double sff = 0;
        double sfy = 0;
        double syy = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
        {
            sff += (f[i] - mf) * (f[i] - mf);
            sfy += (f[i] - mf) * (y[i] - my);
            syy += (y[i] - my) * (y[i] - my);
        }
        const double b = sfy / sff;
        const double a = my - b * mf;
        double ss_res = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
        {
            const double e = y[i] - (a + b * f[i]);
            ss_res += e * e;
        }
        return 1.0 - ss_res / syy;
    }

    Outcome construction_scaling()
    {
        // Dispersed: mean spacing 0.1 m held fixed while n grows, r_max 2 cm.
        std::vector<double> nlogn;
        std::vector<double> nsq;
        std::vector<double> times;
        std::string series;
        for (int e = 10; e <= 16; ++e)
        {
            const std::size_t n = std::size_t{1} << e;
            const float side = 0.1F * std::cbrt(static_cast<float>(n));
            const auto cloud = capt::synth::uniform_cube(n, side, static_cast<std::uint64_t>(e));
            const double t = capt::median_seconds([&] { (void)capt::construct(cloud, {0.01F, 0.02F, true}); }, {1, 5});
            const auto dn = static_cast<double>(n);
            nlogn.push_back(dn * std::log2(dn));
            nsq.push_back(dn * dn);
            times.push_back(t);
            series += fmt(" %zu:%.2fms", n, t * 1e3);
        }
        const double r2_nlogn = r_squared(nlogn, times);
        const double r2_nsq = r_squared(nsq, times);

        // Pathological: every point within r_max of every other.
        std::vector<std::size_t> totals;
        std::string growth;
        bool superlinear = true;
        for (std::size_t n = 128; n <= 2048; n *= 2)
        {
            const auto cloud = capt::synth::uniform_cube(n, 0.04F, n);
            const auto tree = capt::construct(cloud, {0.0001F, 0.08F, true});
            totals.push_back(tree.stats().total_stored);
            growth += fmt(" %zu:%zu", n, totals.back());
            if (totals.size() > 1)
            {
                // Linear growth would double the total; require well beyond.
                superlinear = superlinear && totals.back() >= 3 * totals[totals.size() - 2];
            }
        }

        const bool pass = r2_nlogn > 0.95 && r2_nsq < r2_nlogn && superlinear;
        return {pass, fmt("dispersed build R^2 n log n %.4f vs n^2 %.4f;", r2_nlogn, r2_nsq) + series +
                          "; pathological sum|P|" + growth};
    }

    // ---- 6. relative throughput ----------------------------------------------

    Outcome relative_throughput()
    {
        if (cli_path.empty())
        {
            return {false, "needs --cli <capt-cli> to run the bench protocol"};
        }
        const auto dir = std::filesystem::temp_directory_path() / ("capt_acceptance_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
        const auto config = dir / "throughput.json";
        const auto report = dir / "report.json";
        {
            // 12500 records x 8 spheres = 1e5 queries; 1:1:1 class mix.
            std::ofstream out(config);
            out << R"({
  "r_min": 0.01, "r_max": 0.08, "repetitions": 3, "r_filter": [0.02],
  "workload": {"records": 12500, "spheres_per_record": 8, "mix": [1, 1, 1], "seed": 1},
  "clouds": [{"name": "shelf", "kind": "shelf", "points": 126000, "seed": 1}]
})";
        }

        const auto start = clock_type::now();
        const std::string command =
            "'" + cli_path + "' bench '" + config.string() + "' --json '" + report.string() + "'";
        const int status = std::system(command.c_str());
        const double elapsed = seconds_since(start);
        if (status != 0)
        {
            std::filesystem::remove_all(dir);
            return {false, fmt("bench exited with status %d", status)};
        }

        nlohmann::json j;
        std::ifstream(report) >> j;
        std::filesystem::remove_all(dir);
        const auto &run = j.at("runs").at(0);
        const double capt_ns = run.at("timing").at("query_ns").at("capt_batch").at("mixed").get<double>();
        const double kd_ns = run.at("timing").at("query_ns").at("kd_tree").at("mixed").get<double>();
        const double speedup = kd_ns / capt_ns;
        const auto points = run.at("points_after").get<std::size_t>();
        const auto queries = run.at("queries").get<std::size_t>();
        const auto mismatches = run.at("mismatches").get<std::size_t>();
        const bool pass = speedup >= 3.0 && mismatches == 0 && queries >= 100000 && elapsed < 120.0;
        return {pass, fmt("%zu-point filtered cloud, %zu queries: CAPT batch %.1f ns/query, k-d tree %.1f ns/query, "
                          "speedup %.1fx (floor 3x), %zu mismatches, %.1f s (budget 120 s)",
                          points, queries, capt_ns, kd_ns, speedup, mismatches, elapsed)};
    }

    // ---- 7. traversal shape --------------------------------------------------

    Outcome traversal_shape()
    {
        std::mt19937_64 rng(7);
        std::size_t queries = 0;
        std::size_t bad = 0;
        std::string sizes;
        for (const std::size_t n : {1, 2, 3, 5, 100, 1000, 1024, 4097, 20000})
        {
            const auto cloud = capt_test::random_cloud<3>(rng, n, 0.0F, 1.0F);
            const auto tree = capt::construct(cloud, {0.01F, 0.05F, true});
            const std::size_t padded = std::bit_ceil(n);
            const auto expected = static_cast<std::size_t>(std::countr_zero(padded));
            bad += tree.size() == padded && tree.depth() == expected ? 0 : 1;
            std::uniform_real_distribution<float> u(-0.5F, 1.5F);
            for (int q = 0; q < 20000; ++q)
            {
                P3 x{{u(rng), u(rng), u(rng)}};
                if (q % 4 == 0)
                {
                    x = cloud[rng() % n];  // exactly on data, often on split planes
                }
                std::size_t steps = 0;
                const std::size_t leaf = tree.leaf_index(x, steps);
                bad += steps == expected && leaf < padded ? 0 : 1;
                ++queries;
            }
            sizes += fmt(" %zu->%zu", n, expected);
        }
        return {bad == 0, fmt("%zu instrumented descents, %zu off log2(n); n -> steps:", queries, bad) + sizes};
    }

    // ---- 8. r_min shortcut ------------------------------------------------------

    Outcome rmin_shortcut()
    {
        // Dyadic lattice: interior leaf cells are h-wide cubes, so with r_min = h
        // the farthest corner of every bounded cell is within r_min of its point.
        const float h = 0.0625F;
        const auto grid = capt_test::lattice(16, h);
        const capt::BuildParams on{h, 2.0F * h, true};
        const capt::BuildParams off{h, 2.0F * h, false};
        const auto with = capt::construct(grid, on);
        const auto without = capt::construct(grid, off);

        const auto cells = capt_test::leaf_cells(with);
        std::size_t eligible = 0;
        std::size_t collapsed = 0;
        for (std::size_t leaf = 0; leaf < with.size(); ++leaf)
        {
            if (with.is_padding(leaf))
            {
                continue;
            }
            const double far = capt::farthest_corner_dist_sq<double>(cells[leaf], with.representative(leaf));
            if (far <= static_cast<double>(h) * static_cast<double>(h))
            {
                ++eligible;
                collapsed += with.affordance_size(leaf) == 1 ? 1 : 0;
            }
        }

        std::mt19937_64 rng(8);
        std::size_t queries = 0;
        std::size_t mismatches = 0;
        std::uniform_real_distribution<float> u(-0.1F, 1.05F);
        std::uniform_real_distribution<float> r(h, 2.0F * h);
        std::uniform_real_distribution<float> jitter(-0.5F * h, 0.5F * h);
        for (int q = 0; q < 40000; ++q)
        {
            S3 s;
            if (q % 2 == 0)
            {
                const auto &p = grid[rng() % grid.size()];
                for (std::size_t d = 0; d < 3; ++d)
                {
                    s.center[d] = p[d] + jitter(rng);
                }
            }
            else
            {
                s.center = P3{{u(rng), u(rng), u(rng)}};
            }
            s.radius = q % 7 == 0 ? h : r(rng);
            const bool expected = capt::oracle::brute_collides(grid, s);
            mismatches += capt::collides(with, s) == expected && capt::collides(without, s) == expected ? 0 : 1;
            ++queries;
        }

        const bool pass = eligible > 0 && collapsed == eligible && mismatches == 0;
        return {pass, fmt("%zu leaves fit within r_min, %zu collapsed to |P| = 1; stored %zu vs %zu without shortcut; "
                          "%zu queries, %zu mismatches (shortcut on and off)",
                          eligible, collapsed, with.stats().total_stored, without.stats().total_stored, queries, mismatches)};
    }

    // ---- 9. r_filter sweep ------------------------------------------------------

    Outcome filter_sweep()
    {
        const auto scene = capt::synth::shelf(126000, 1);
        const capt::BuildParams params{0.01F, 0.04F, true};
        const std::vector<float> sweep{0.005F, 0.01F, 0.015F, 0.018F, 0.019F, 0.02F};

        std::vector<Cloud> filtered;
        std::vector<std::size_t> sizes;
        for (const float r : sweep)
        {
            filtered.push_back(capt::filter(scene, capt::FilterConfig<3>{r, std::nullopt}));
            sizes.push_back(filtered.back().size());
        }

        // Build cost is deterministic work, so the minimum over repetitions is
        // its least noisy estimate. Rounds visit every configuration in turn so
        // machine drift hits them all alike.
        std::vector<double> build_ms(sweep.size(), 1e30);
        for (int round = 0; round < 15; ++round)
        {
            for (std::size_t i = 0; i < sweep.size(); ++i)
            {
                const auto start = clock_type::now();
                const auto tree = capt::construct(filtered[i], params);
                build_ms[i] = std::min(build_ms[i], seconds_since(start) * 1e3);
            }
        }

        std::mt19937_64 rng(9);
        ExactnessTally tally;
        std::string table;
        for (std::size_t i = 0; i < sweep.size(); ++i)
        {
            exact_on_random_queries(filtered[i], params, 3000, rng, tally);
            table += fmt(" %gcm:%zu/%.1fms", static_cast<double>(sweep[i]) * 100, sizes[i], build_ms[i]);
        }

        bool sizes_monotone = true;
        bool times_monotone = true;
        for (std::size_t i = 1; i < sweep.size(); ++i)
        {
            sizes_monotone = sizes_monotone && sizes[i] <= sizes[i - 1];
            times_monotone = times_monotone && build_ms[i] <= build_ms[i - 1];
        }
        const bool pass = sizes_monotone && times_monotone && tally.mismatches == 0;
        return {pass, fmt("sizes %s, build times %s, %zu oracle queries with %zu mismatches;",
                          sizes_monotone ? "non-increasing" : "NOT monotone",
                          times_monotone ? "non-increasing" : "NOT monotone", tally.instances, tally.mismatches) +
                          table};
    }

    // ---- 10. serialization --------------------------------------------------------

    Outcome serialization()
    {
        std::mt19937_64 rng(10);
        const auto cloud = capt::synth::shelf(20000, 4);
        const auto tree = capt::construct(cloud, {0.01F, 0.08F, true});
        const auto path = std::filesystem::temp_directory_path() /
                          ("capt_acceptance_" + std::to_string(::getpid()) + ".capt");
        capt::save(tree, path);
        const auto loaded = capt::load_file<3>(path);
        std::filesystem::remove(path);

        std::size_t mismatches = 0;
        std::size_t hits = 0;
        for (int q = 0; q < 10000; ++q)
        {
            const auto s = mixed_sphere(rng, cloud, 0.01F, 0.08F);
            const bool a = capt::collides(tree, s);
            hits += a ? 1 : 0;
            mismatches += a == capt::collides(loaded, s) ? 0 : 1;
        }
        return {mismatches == 0 && loaded == tree,
                fmt("10000 queries (%zu colliding) on a reloaded dump, %zu verdict differences, trees %s", hits,
                    mismatches, loaded == tree ? "identical" : "DIFFER")};
    }
}  // namespace

int main(int argc, char **argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i)
    {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc)
        {
            cli_path = argv[++i];
        }
        else if (arg == "--only" && i + 1 < argc)
        {
            only = std::atoi(argv[++i]);
        }
        else
        {
            std::fprintf(stderr, "usage: %s [--cli <capt-cli>] [--only N]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"exactness against brute force", exactness},
        {"batch/scalar equivalence", batch_scalar},
        {"filter gap bound", gap_bound},
        {"filter effectiveness", filter_effectiveness},
        {"construction scaling", construction_scaling},
        {"relative throughput", relative_throughput},
        {"traversal shape", traversal_shape},
        {"r_min shortcut", rmin_shortcut},
        {"r_filter sweep", filter_sweep},
        {"serialization round trip", serialization},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (only != 0 && static_cast<std::size_t>(only) != i + 1)
        {
            continue;
        }
        Outcome outcome;
        const auto start = clock_type::now();
        try
        {
            outcome = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("criterion %2zu %s: %s (%.1f s): %s\n", i + 1, outcome.pass ? "PASS" : "FAIL", criteria[i].first,
                    seconds_since(start), outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
