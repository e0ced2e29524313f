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

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "tspm/chunker.hpp"
#include "tspm/synth.hpp"

namespace tspm {
namespace {

std::vector<std::uint64_t> counts(std::initializer_list<std::uint64_t> v) { return v; }

TEST(EstimateSequenceCount, FiveThousandPatientsOfFourHundred) {
    const std::vector<std::uint64_t> entries(5000, 400);
    EXPECT_EQ(estimateSequenceCount(entries), 399'000'000u);
}

TEST(EstimateSequenceCount, SmallCases) {
    EXPECT_EQ(estimateSequenceCount(counts({})), 0u);
    EXPECT_EQ(estimateSequenceCount(counts({0, 1})), 0u);
    EXPECT_EQ(estimateSequenceCount(counts({3})), 3u);
    EXPECT_EQ(estimateSequenceCount(counts({2, 3, 4})), 1u + 3u + 6u);
}

TEST(EstimateSequenceCount, OverflowIsReported) {
    const std::uint64_t big = std::uint64_t{1} << 32;  // C(2^32, 2) ~ 2^63
    try {
        estimateSequenceCount(counts({big, big, big}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::ArithmeticOverflow);
    }
}

TEST(PlanChunks, SplitsAtLimit) {
    // each patient predicts 4950
    const auto plan = planChunks(counts({100, 100, 100}), 10'000);
    EXPECT_EQ(plan.chunks, (std::vector<PatientRange>{{0, 2}, {2, 3}}));
    EXPECT_EQ(plan.predictedCounts, (std::vector<std::uint64_t>{9900, 4950}));
}

TEST(PlanChunks, SingleChunkWhenEverythingFits) {
    const auto entries = counts({5, 7, 0, 1, 30});
    const auto plan = planChunks(entries, estimateSequenceCount(entries));
    ASSERT_EQ(plan.chunks.size(), 1u);
    EXPECT_EQ(plan.chunks[0], (PatientRange{0, 5}));
    EXPECT_TRUE(planChunks(counts({})).chunks.empty());
}

TEST(PlanChunks, PatientAboveLimitFails) {
    try {
        planChunks(counts({3, 50, 2}), 100);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::PatientExceedsLimit);
        EXPECT_NE(std::string(e.what()).find("patient 1"), std::string::npos) << e.what();
    }
}

TEST(PlanChunks, RandomLimitsAreSound) {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 200; ++round) {
        std::vector<std::uint64_t> entries(1 + rng() % 60);
        for (auto &n : entries) n = rng() % 40;
        std::uint64_t maxCost = 0;
        for (auto n : entries) maxCost = std::max(maxCost, pairCount(n));
        const std::uint64_t limit = std::max<std::uint64_t>(1, maxCost + rng() % 2000);
        const auto plan = planChunks(entries, limit);

        ASSERT_EQ(plan.chunks.size(), plan.predictedCounts.size());
        std::size_t expectedFirst = 0;
        std::uint64_t sum = 0;
        for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
            const auto range = plan.chunks[c];
            EXPECT_EQ(range.first, expectedFirst);
            EXPECT_LT(range.first, range.last);
            std::uint64_t predicted = 0;
            for (std::size_t p = range.first; p < range.last; ++p) predicted += pairCount(entries[p]);
            EXPECT_EQ(predicted, plan.predictedCounts[c]);
            EXPECT_LE(predicted, limit);
            // greedy: the next patient would not have fit
            if (range.last < entries.size()) {
                EXPECT_GT(predicted + pairCount(entries[range.last]), limit);
            }
            expectedFirst = range.last;
            sum += predicted;
        }
        EXPECT_EQ(expectedFirst, entries.size());
        EXPECT_EQ(sum, estimateSequenceCount(entries));
    }
}

TEST(PlanChunks, MiningChunkByChunkEqualsMiningWhole) {
    const auto dbmart = generateDbmart({80, 20, 30, 200, 3});
    const auto sorted = sortDbmart(dbmart.entries);
    const auto blocks = patientBlocks(sorted);
    const auto perPatient = entriesPerPatient(sorted);
    EXPECT_EQ(estimateSequenceCount(perPatient), mineAll(sorted).size());
    const auto plan = planChunks(perPatient, 2000);
    ASSERT_GT(plan.chunks.size(), 1u);
    std::vector<TemporalSequence> concatenated;
    for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
        const auto part = mineAll(chunkEntries(sorted, blocks, plan.chunks[c]));
        EXPECT_EQ(part.size(), plan.predictedCounts[c]);
        concatenated.insert(concatenated.end(), part.begin(), part.end());
    }
    EXPECT_EQ(concatenated, mineAll(sorted));
}

TEST(PlanChunks, TsvReport) {
    std::ostringstream out;
    writePlanTsv(out, planChunks(counts({100, 100, 100}), 10'000));
    EXPECT_EQ(out.str(), "chunk\tfirst_patient\tlast_patient\tpredicted_sequences\n0\t0\t1\t9900\n1\t2\t2\t4950\n");
}

}  // namespace
}  // namespace tspm
