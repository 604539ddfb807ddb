#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

namespace capt
{
    /// Warm-up runs are discarded; the reported figure is the median of the
    /// timed repetitions.
    struct TimingProtocol
    {
        unsigned warmups = 1;
        unsigned repetitions = 3;
    };

    template <class Fn>
    [[nodiscard]] double median_seconds(Fn &&fn, const TimingProtocol &protocol = {})
    {
        using clock = std::chrono::steady_clock;

        for (unsigned i = 0; i < protocol.warmups; ++i)
        {
            fn();
        }

        std::vector<double> samples;
        const unsigned reps = std::max(1U, protocol.repetitions);
        samples.reserve(reps);
        for (unsigned i = 0; i < reps; ++i)
        {
            const auto start = clock::now();
            fn();
            samples.push_back(std::chrono::duration<double>(clock::now() - start).count());
        }

        std::sort(samples.begin(), samples.end());
        const std::size_t mid = samples.size() / 2;
        return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
    }
}  // namespace capt
