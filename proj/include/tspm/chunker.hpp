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

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "tspm/core.hpp"
#include "tspm/miner.hpp"

namespace tspm {

/// Default element budget: the largest vector a scripting environment can receive.
inline constexpr std::uint64_t kDefaultChunkLimit = 2'147'483'647ULL;
/// Bytes per in-memory record (12-byte record plus 4-byte patient id).
inline constexpr std::uint64_t kBytesPerRecord = 16;

/// Half-open range [first, last) of patient positions in the sorted dbmart.
struct PatientRange {
    std::size_t first = 0;
    std::size_t last = 0;
    friend bool operator==(const PatientRange &, const PatientRange &) = default;
};

struct ChunkPlan {
    std::vector<PatientRange> chunks;
    std::vector<std::uint64_t> predictedCounts;
    std::uint64_t limit = kDefaultChunkLimit;
};

inline std::uint64_t estimateSequenceCount(std::span<const std::uint64_t> entriesPerPatient) {
    std::uint64_t total = 0;
    for (const auto n : entriesPerPatient) {
        if (__builtin_add_overflow(total, pairCount(n), &total)) {
            throw Error(ErrorKind::ArithmeticOverflow, "total predicted sequence count exceeds 2^64-1");
        }
    }
    return total;
}

/// Greedy contiguous packing: a chunk grows until the next patient would push it past `limit`.
inline ChunkPlan planChunks(std::span<const std::uint64_t> entriesPerPatient, std::uint64_t limit = kDefaultChunkLimit) {
    ChunkPlan plan;
    plan.limit = limit;
    std::uint64_t current = 0;
    std::size_t first = 0;
    for (std::size_t p = 0; p < entriesPerPatient.size(); ++p) {
        const std::uint64_t cost = pairCount(entriesPerPatient[p]);
        if (cost > limit) {
            throw Error(ErrorKind::PatientExceedsLimit, "patient " + std::to_string(p) + " alone predicts " +
                                                            std::to_string(cost) + " sequences, above the limit of " +
                                                            std::to_string(limit));
        }
        if (p > first && cost > limit - current) {
            plan.chunks.push_back({first, p});
            plan.predictedCounts.push_back(current);
            first = p;
            current = 0;
        }
        current += cost;
    }
    if (first < entriesPerPatient.size()) {
        plan.chunks.push_back({first, entriesPerPatient.size()});
        plan.predictedCounts.push_back(current);
    }
    return plan;
}

/// The slice of a sorted dbmart covered by one chunk; `blocks` comes from patientBlocks().
inline std::span<const DbMartEntry> chunkEntries(std::span<const DbMartEntry> sorted, std::span<const PatientBlock> blocks,
                                                 PatientRange range) {
    if (range.first >= range.last) return {};
    const std::size_t begin = blocks[range.first].begin;
    return sorted.subspan(begin, blocks[range.last - 1].end - begin);
}

inline void writePlanTsv(std::ostream &out, const ChunkPlan &plan) {
    out << "chunk\tfirst_patient\tlast_patient\tpredicted_sequences\n";
    for (std::size_t i = 0; i < plan.chunks.size(); ++i) {
        out << i << '\t' << plan.chunks[i].first << '\t' << plan.chunks[i].last - 1 << '\t' << plan.predictedCounts[i]
            << '\n';
    }
}

}  // namespace tspm
