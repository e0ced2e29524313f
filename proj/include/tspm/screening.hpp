/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tspm/core.hpp"
#include "tspm/parallel.hpp"

namespace tspm {

enum class CountMode { occurrences, distinct_patients };

inline CountMode parseCountMode(std::string_view text) {
    if (text == "occurrences") return CountMode::occurrences;
    if (text == "distinct_patients") return CountMode::distinct_patients;
    throw Error(ErrorKind::InvalidArgument, "unknown sparsity mode '" + std::string(text) + "'");
}

struct SparsityConfig {
    std::uint64_t threshold = 1;
    CountMode countMode = CountMode::occurrences;
    bool durationAware = false;
    DurationUnit bucketUnit = DurationUnit::months;
    unsigned bucketBits = kDefaultBucketBits;
    unsigned workerCount = 0;  // 0 = auto
};

namespace detail {

/// Sort-count-mark-truncate over an arbitrary screening key.
template <typename KeyFn>
std::vector<TemporalSequence> screenByKey(std::vector<TemporalSequence> seqs, const SparsityConfig &config, KeyFn key) {
    if (config.threshold == 0) throw Error(ErrorKind::InvalidArgument, "sparsity threshold must be >= 1");
    if (config.threshold == 1 || seqs.empty()) {
        parallel::sort(seqs, CanonicalOrder{}, parallel::resolveWorkers(config.workerCount));
        return seqs;
    }
    const unsigned workers = parallel::resolveWorkers(config.workerCount);

    parallel::sort(
        seqs,
        [&](const TemporalSequence &a, const TemporalSequence &b) {
            const auto ka = key(a), kb = key(b);
            if (ka != kb) return ka < kb;
            if (a.patient != b.patient) return a.patient < b.patient;
            if (a.seq != b.seq) return a.seq < b.seq;
            return a.duration < b.duration;
        },
        workers);

    std::vector<std::size_t> starts;
    starts.push_back(0);
    for (std::size_t i = 1; i < seqs.size(); ++i) {
        if (key(seqs[i]) != key(seqs[i - 1])) starts.push_back(i);
    }
    starts.push_back(seqs.size());
    const std::size_t runs = starts.size() - 1;

    // Chunks hold whole runs, so no key straddles two workers.
    const std::size_t chunks = std::min<std::size_t>(runs, std::size_t{workers} * 4);
    parallel::forEachTask(chunks, workers, [&](std::size_t c) {
        const std::size_t firstRun = runs * c / chunks;
        const std::size_t lastRun = runs * (c + 1) / chunks;
        for (std::size_t r = firstRun; r < lastRun; ++r) {
            const std::size_t begin = starts[r], end = starts[r + 1];
            std::uint64_t count = end - begin;
            if (config.countMode == CountMode::distinct_patients) {
                count = 1;
                for (std::size_t i = begin + 1; i < end; ++i) count += seqs[i].patient != seqs[i - 1].patient;
            }
            if (count < config.threshold) {
                for (std::size_t i = begin; i < end; ++i) seqs[i].patient.value = PatientId::kSentinel;
            }
        }
    });

    parallel::sort(seqs, CanonicalOrder{}, workers);
    const auto firstSentinel = std::partition_point(seqs.begin(), seqs.end(),
                                                    [](const TemporalSequence &s) { return !s.patient.isSentinel(); });
    seqs.erase(firstSentinel, seqs.end());
    seqs.shrink_to_fit();
    return seqs;
}

}  // namespace detail

/// Drops every sequence whose id is seen fewer than `threshold` times (or in fewer distinct
/// patients). Consumes the input; the survivors come back in canonical order.
inline std::vector<TemporalSequence> sparsityScreen(std::vector<TemporalSequence> seqs, const SparsityConfig &config) {
    return detail::screenByKey(std::move(seqs), config, [](const TemporalSequence &s) { return s.seq.value; });
}

/// Same procedure keyed on (sequence id, duration bucket) packed into one integer.
inline std::vector<TemporalSequence> durationSparsityScreen(std::vector<TemporalSequence> seqs,
                                                            const SparsityConfig &config) {
    if (config.bucketBits > kMaxBucketBits) {
        throw Error(ErrorKind::PackOverflow, "bucketBits " + std::to_string(config.bucketBits) + " exceeds 16");
    }
    const unsigned bits = config.bucketBits;
    const DurationUnit unit = config.bucketUnit;
    return detail::screenByKey(std::move(seqs), config, [bits, unit](const TemporalSequence &s) {
        return packDuration(s.seq, durationInUnit(s.duration, unit), bits);
    });
}

/// Dispatches on config.durationAware.
inline std::vector<TemporalSequence> screen(std::vector<TemporalSequence> seqs, const SparsityConfig &config) {
    return config.durationAware ? durationSparsityScreen(std::move(seqs), config)
                                : sparsityScreen(std::move(seqs), config);
}

}  // namespace tspm
