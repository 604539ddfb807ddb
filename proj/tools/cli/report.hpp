#pragma once

#include <functional>
#include <optional>

#include <json.hpp>

#include <capt/timing.hpp>

#include "handles.hpp"

namespace capt_cli
{
    using Json = nlohmann::ordered_json;

    /// Average ns per sphere query for the whole trace, the records expected
    /// to collide and the records expected free.
    struct ClassTimings
    {
        std::optional<double> mixed;
        std::optional<double> colliding;
        std::optional<double> free;
    };

    using ReplayFn = std::function<void(const capt_trace *)>;

    inline std::optional<double> ns_per_sphere(const ReplayFn &replay, const capt_trace *trace, const capt::TimingProtocol &protocol)
    {
        const std::size_t spheres = capt_trace_spheres(trace);
        if (spheres == 0)
        {
            return std::nullopt;
        }
        const double seconds = capt::median_seconds([&] { replay(trace); }, protocol);
        return seconds * 1e9 / static_cast<double>(spheres);
    }

    inline ClassTimings time_classes(const ReplayFn &replay, const capt_trace *trace, const capt::TimingProtocol &protocol)
    {
        ClassTimings out;
        out.mixed = ns_per_sphere(replay, trace, protocol);

        const auto colliding = select_records(trace, 1);
        const auto free = select_records(trace, 0);
        out.colliding = ns_per_sphere(replay, colliding.get(), protocol);
        out.free = ns_per_sphere(replay, free.get(), protocol);
        return out;
    }

    inline Json to_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

    inline Json to_json(const ClassTimings &t)
    {
        return Json{{"mixed", to_json(t.mixed)}, {"colliding", to_json(t.colliding)}, {"free", to_json(t.free)}};
    }

    inline Json to_json(const capt_build_stats &s)
    {
        return Json{
            {"n", s.n},
            {"represented", s.represented},
            {"max_affordance", s.max_affordance},
            {"mean_affordance", s.mean_affordance},
            {"total_stored", s.total_stored},
            {"memory_bytes", s.memory_bytes},
        };
    }

    inline Json environment_json(unsigned threads)
    {
        return Json{
            {"library_version", capt_version()},
            {"lane_width", capt_lane_width()},
            {"scalar_bits", 32},
            {"timing_threads", 1},
            {"verification_threads", threads},
        };
    }

    /// Replay functions over the three query engines.
    inline ReplayFn capt_replay(const capt_tree *tree, capt_query_mode mode, int flags)
    {
        return [=](const capt_trace *trace)
        {
            std::vector<std::uint8_t> verdicts(capt_trace_records(trace));
            check(capt_tree_replay(tree, trace, 0, verdicts.size(), mode, flags, verdicts.data()), "querying");
        };
    }

    inline ReplayFn kdtree_replay(const capt_kdtree *tree)
    {
        return [=](const capt_trace *trace)
        {
            std::vector<std::uint8_t> verdicts(capt_trace_records(trace));
            check(capt_kdtree_replay(tree, trace, 0, verdicts.size(), verdicts.data()), "querying k-d tree");
        };
    }
}  // namespace capt_cli
