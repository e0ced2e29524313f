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
#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

#include "tspm/core.hpp"

namespace tspm {

// All filters keep input order.

template <typename Pred>
std::vector<TemporalSequence> filterSequences(std::span<const TemporalSequence> seqs, Pred pred) {
    std::vector<TemporalSequence> out;
    std::copy_if(seqs.begin(), seqs.end(), std::back_inserter(out), pred);
    return out;
}

inline std::vector<TemporalSequence> filterByStart(std::span<const TemporalSequence> seqs, PhenxId start) {
    return filterSequences(seqs, [start](const TemporalSequence &s) { return startOf(s.seq) == start; });
}

inline std::vector<TemporalSequence> filterByEnd(std::span<const TemporalSequence> seqs, PhenxId end) {
    return filterSequences(seqs, [end](const TemporalSequence &s) { return endOf(s.seq) == end; });
}

inline std::vector<TemporalSequence> filterByMinDuration(std::span<const TemporalSequence> seqs, std::uint32_t minDays) {
    return filterSequences(seqs, [minDays](const TemporalSequence &s) { return s.duration.days >= minDays; });
}

/// Dense set of end phenX ids reached from `start` by any record.
inline std::vector<bool> endsReachedFrom(std::span<const TemporalSequence> seqs, PhenxId start) {
    std::vector<bool> ends;
    for (const auto &s : seqs) {
        if (startOf(s.seq) != start) continue;
        const auto end = endOf(s.seq).value;
        if (end >= ends.size()) ends.resize(end + 1, false);
        ends[end] = true;
    }
    return ends;
}

/// Every record (any start) whose end is also the end of some record starting with `start`.
inline std::vector<TemporalSequence> transitiveEndSequences(std::span<const TemporalSequence> seqs, PhenxId start) {
    const auto ends = endsReachedFrom(seqs, start);
    return filterSequences(seqs, [&ends](const TemporalSequence &s) {
        const auto end = endOf(s.seq).value;
        return end < ends.size() && ends[end];
    });
}

}  // namespace tspm
