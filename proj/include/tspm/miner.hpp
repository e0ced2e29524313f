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
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "tspm/core.hpp"
#include "tspm/parallel.hpp"
#include "tspm/tseq_io.hpp"

namespace tspm {

enum class MinerMode { in_memory, file_based };

struct MinerConfig {
    MinerMode mode = MinerMode::in_memory;
    unsigned workerCount = 0;  // 0 = auto
    std::filesystem::path outputDir;
    bool includeSameDatePairs = true;
    /// Upper bound on records mineAll may allocate; exceeding it raises CapacityExceeded.
    std::uint64_t capacityLimit = std::vector<TemporalSequence>().max_size();
};

/// Stable sort by (patient, date); each patient ends up as one contiguous block.
inline std::vector<DbMartEntry> sortDbmart(std::vector<DbMartEntry> entries) {
    std::stable_sort(entries.begin(), entries.end(), [](const DbMartEntry &a, const DbMartEntry &b) {
        if (a.patient != b.patient) return a.patient < b.patient;
        return a.date < b.date;
    });
    return entries;
}

struct PatientBlock {
    PatientId patient;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

/// Splits a sorted dbmart into its per-patient blocks.
inline std::vector<PatientBlock> patientBlocks(std::span<const DbMartEntry> sorted) {
    std::vector<PatientBlock> blocks;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i].patient != sorted[begin].patient) {
            blocks.push_back({sorted[begin].patient, begin, i});
            begin = i;
        }
    }
    return blocks;
}

inline std::vector<std::uint64_t> entriesPerPatient(std::span<const DbMartEntry> sorted) {
    std::vector<std::uint64_t> counts;
    for (const auto &b : patientBlocks(sorted)) counts.push_back(b.size());
    return counts;
}

/// Exact number of sequences one block will produce.
inline std::uint64_t blockSequenceCount(std::span<const DbMartEntry> block, bool includeSameDatePairs) {
    std::uint64_t count = pairCount(block.size());
    if (!includeSameDatePairs) {
        for (std::size_t i = 0; i < block.size();) {
            std::size_t j = i;
            while (j < block.size() && block[j].date == block[i].date) ++j;
            count -= pairCount(j - i);
            i = j;
        }
    }
    return count;
}

namespace detail {

inline TemporalSequence* emitBlock(std::span<const DbMartEntry> block, bool includeSameDatePairs, TemporalSequence *out) {
    for (std::size_t i = 0; i + 1 < block.size(); ++i) {
        const DbMartEntry &first = block[i];
        for (std::size_t j = i + 1; j < block.size(); ++j) {
            const DbMartEntry &second = block[j];
            if (!includeSameDatePairs && second.date == first.date) continue;
            *out++ = TemporalSequence{encodeSequenceUnchecked(first.phenx, second.phenx),
                                      Duration{static_cast<std::uint32_t>(second.date.days - first.date.days)},
                                      first.patient};
        }
    }
    return out;
}

/// Hints the kernel to back a large buffer with transparent huge pages. Advisory only.
inline void adviseHugePages([[maybe_unused]] void *data, [[maybe_unused]] std::size_t bytes) {
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    constexpr std::uintptr_t kHugePage = std::uintptr_t{1} << 21;
    const auto first = (reinterpret_cast<std::uintptr_t>(data) + kHugePage - 1) & ~(kHugePage - 1);
    const auto last = (reinterpret_cast<std::uintptr_t>(data) + bytes) & ~(kHugePage - 1);
    if (last > first) ::madvise(reinterpret_cast<void *>(first), last - first, MADV_HUGEPAGE);
#endif
}

/// Reusable per-worker buffers for emitSorted.
struct BlockScratch {
    std::vector<PhenxId> distinct;          // the block's phenX, ascending
    std::vector<std::uint32_t> rank;        // position of each entry's phenX in `distinct`
    std::vector<std::uint32_t> groupBegin;  // offsets into positions, one group per distinct phenX
    std::vector<std::uint32_t> positions;   // entry positions grouped by phenX, ascending within a group
    std::vector<std::uint64_t> groupOffset; // output offset of the sequences starting with each phenX
    std::vector<std::uint64_t> later;       // (rank << 32 | position) of entries after the sweep point, ascending
    std::vector<std::uint32_t> durations;
};

/// Emits one block's sequences directly in (seq, duration) order.
///
/// Output is laid out by start phenX with precomputed offsets. A phenX that occurs once
/// starts exactly the entries after it; a backward sweep keeps those entries sorted by
/// (end phenX, position), which is (seq, duration) order, so they are copied out as is.
/// A repeated start phenX is handled per end phenX, merging durations across its entries.
inline TemporalSequence *emitSorted(std::span<const DbMartEntry> block, bool includeSameDatePairs, TemporalSequence *out,
                                    BlockScratch &scratch) {
    const std::size_t n = block.size();
    if (n < 2) return out;
    auto &distinct = scratch.distinct;
    distinct.clear();
    for (const auto &e : block) distinct.push_back(e.phenx);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const std::size_t m = distinct.size();

    auto &rank = scratch.rank;
    rank.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rank[i] = static_cast<std::uint32_t>(std::lower_bound(distinct.begin(), distinct.end(), block[i].phenx) -
                                             distinct.begin());
    }

    // counting sort of positions by rank; stable, so each group is ascending
    auto &begin = scratch.groupBegin;
    auto &positions = scratch.positions;
    begin.assign(m + 1, 0);
    for (const auto r : rank) ++begin[r + 1];
    for (std::size_t r = 0; r < m; ++r) begin[r + 1] += begin[r];
    positions.resize(n);
    {
        auto &cursor = scratch.durations;
        cursor.assign(begin.begin(), begin.end() - 1);
        for (std::size_t i = 0; i < n; ++i) positions[cursor[rank[i]]++] = static_cast<std::uint32_t>(i);
    }

    // sequences started by each entry: everything after it, minus same-date partners if excluded
    auto &offset = scratch.groupOffset;
    offset.assign(m + 1, 0);
    for (std::size_t i = 0; i < n;) {
        std::size_t runEnd = i;
        while (runEnd < n && block[runEnd].date == block[i].date) ++runEnd;
        for (std::size_t k = i; k < runEnd; ++k) offset[rank[k] + 1] += includeSameDatePairs ? n - 1 - k : n - runEnd;
        i = runEnd;
    }
    for (std::size_t r = 0; r < m; ++r) offset[r + 1] += offset[r];

    const PatientId patient = block.front().patient;
    auto &later = scratch.later;
    later.clear();
    for (std::size_t i = n; i-- > 0;) {
        const std::uint32_t r = rank[i];
        if (begin[r + 1] - begin[r] == 1) {
            TemporalSequence *dst = out + offset[r];
            const std::int32_t day = block[i].date.days;
            const std::uint64_t startPart = std::uint64_t{distinct[r].value} * kPhenxRadix;
            for (const auto key : later) {
                const std::int32_t laterDay = block[key & 0xFFFFFFFFu].date.days;
                if (!includeSameDatePairs && laterDay == day) continue;
                *dst++ = TemporalSequence{SequenceId{startPart + distinct[key >> 32].value},
                                          Duration{static_cast<std::uint32_t>(laterDay - day)}, patient};
            }
        }
        const std::uint64_t key = (std::uint64_t{r} << 32) | i;
        later.insert(std::lower_bound(later.begin(), later.end(), key), key);
    }

    auto &durations = scratch.durations;
    for (std::size_t r = 0; r < m; ++r) {
        const std::uint32_t *startFirst = positions.data() + begin[r];
        const std::uint32_t *startLast = positions.data() + begin[r + 1];
        if (startLast - startFirst == 1) continue;
        TemporalSequence *dst = out + offset[r];
        for (std::size_t e = 0; e < m; ++e) {
            const std::uint32_t *endFirst = positions.data() + begin[e];
            const std::uint32_t *endLast = positions.data() + begin[e + 1];
            if (endLast[-1] <= *startFirst) continue;  // every end entry precedes every start entry

            durations.clear();
            const std::uint32_t *j0 = endFirst;
            for (const std::uint32_t *i = startFirst; i != startLast; ++i) {
                while (j0 != endLast && *j0 <= *i) ++j0;
                if (j0 == endLast) break;
                const std::int32_t day = block[*i].date.days;
                for (const std::uint32_t *j = j0; j != endLast; ++j) {
                    const std::int32_t laterDay = block[*j].date.days;
                    if (!includeSameDatePairs && laterDay == day) continue;
                    durations.push_back(static_cast<std::uint32_t>(laterDay - day));
                }
            }
            if (endLast - endFirst == 1) {
                std::reverse(durations.begin(), durations.end());  // earlier starts give longer durations
            } else {
                std::sort(durations.begin(), durations.end());
            }
            const SequenceId seq = encodeSequenceUnchecked(distinct[r], distinct[e]);
            for (const auto d : durations) *dst++ = TemporalSequence{seq, Duration{d}, patient};
        }
    }
    return out + offset[m];
}

}  // namespace detail

/// All i < j pairs of one patient's date-sorted block, in emission order.
inline std::vector<TemporalSequence> mineSequencesForPatient(std::span<const DbMartEntry> block,
                                                             bool includeSameDatePairs = true) {
    std::vector<TemporalSequence> out(blockSequenceCount(block, includeSameDatePairs));
    detail::emitBlock(block, includeSameDatePairs, out.data());
    return out;
}

/// Mines every patient block of a sorted dbmart in parallel. The result is in canonical
/// (patient, seq, duration) order, independent of the worker count.
inline std::vector<TemporalSequence> mineAll(std::span<const DbMartEntry> sorted, const MinerConfig &config = {}) {
    const auto blocks = patientBlocks(sorted);
    std::vector<std::uint64_t> offsets(blocks.size() + 1, 0);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto n = blockSequenceCount(sorted.subspan(blocks[b].begin, blocks[b].size()), config.includeSameDatePairs);
        if (__builtin_add_overflow(offsets[b], n, &offsets[b + 1])) {
            throw Error(ErrorKind::CapacityExceeded, "predicted sequence count overflows 64 bits; split with the chunk planner");
        }
    }
    if (offsets.back() > config.capacityLimit) {
        throw Error(ErrorKind::CapacityExceeded, "predicted " + std::to_string(offsets.back()) +
                                                     " sequences exceed the capacity of " +
                                                     std::to_string(config.capacityLimit) + "; split with the chunk planner");
    }

    std::vector<TemporalSequence> out;
    out.reserve(offsets.back());
    detail::adviseHugePages(out.data(), offsets.back() * sizeof(TemporalSequence));
    out.resize(offsets.back());

    // Largest blocks first so the quadratic tail does not land on one worker.
    std::vector<std::size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return offsets[a + 1] - offsets[a] > offsets[b + 1] - offsets[b]; });

    std::atomic<std::size_t> next{0};
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(parallel::resolveWorkers(config.workerCount), std::max<std::size_t>(order.size(), 1)));
    parallel::runWorkers(workers, [&](unsigned) {
        detail::BlockScratch scratch;
        for (std::size_t t = next.fetch_add(1, std::memory_order_relaxed); t < order.size();
             t = next.fetch_add(1, std::memory_order_relaxed)) {
            const std::size_t b = order[t];
            detail::emitSorted(sorted.subspan(blocks[b].begin, blocks[b].size()), config.includeSameDatePairs,
                               out.data() + offsets[b], scratch);
        }
    });
    return out;
}

/// File-based mode: one <patient>.tseq per patient plus manifest.tsv in config.outputDir.
inline std::vector<ManifestEntry> mineToFiles(std::span<const DbMartEntry> sorted, const MinerConfig &config) {
    namespace fs = std::filesystem;
    const fs::path &dir = config.outputDir;
    if (dir.empty()) throw Error(ErrorKind::InvalidArgument, "file-based mining requires an output directory");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoFailure, dir.string() + ": " + ec.message());

    const auto blocks = patientBlocks(sorted);
    std::vector<ManifestEntry> manifest(blocks.size());
    try {
        parallel::forEachTask(blocks.size(), parallel::resolveWorkers(config.workerCount), [&](std::size_t b) {
            const auto block = sorted.subspan(blocks[b].begin, blocks[b].size());
            std::vector<TemporalSequence> seqs(blockSequenceCount(block, config.includeSameDatePairs));
            detail::BlockScratch scratch;
            detail::emitSorted(block, config.includeSameDatePairs, seqs.data(), scratch);
            const std::string name = std::to_string(blocks[b].patient.value) + std::string(kTseqExtension);
            writeTseqFile(dir / name, seqs);
            manifest[b] = ManifestEntry{blocks[b].patient, name, seqs.size()};
        });
        writeManifest(dir / kManifestFile, manifest);
    } catch (...) {
        for (const auto &b : blocks) fs::remove(dir / (std::to_string(b.patient.value) + std::string(kTseqExtension)), ec);
        fs::remove(dir / kManifestFile, ec);
        throw;
    }
    return manifest;
}

/// Loads a file-based mining result back into canonical in-memory form.
inline std::vector<TemporalSequence> readMinedDirectory(const std::filesystem::path &dir) {
    auto manifest = readManifest(dir / kManifestFile);
    std::sort(manifest.begin(), manifest.end(),
              [](const ManifestEntry &a, const ManifestEntry &b) { return a.patient < b.patient; });
    std::vector<TemporalSequence> out;
    for (const auto &m : manifest) {
        auto records = readTseqFile(dir / m.file);
        if (records.size() != m.records) {
            throw Error(ErrorKind::IoFailure, m.file + ": manifest lists " + std::to_string(m.records) +
                                                  " records, file holds " + std::to_string(records.size()));
        }
        for (const auto &r : records) out.push_back(TemporalSequence{r.seq, r.duration, m.patient});
    }
    return out;
}

}  // namespace tspm
