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

#include <map>
#include <random>
#include <optional>
#include <set>

#include "test_support.hpp"
#include "tspm/screening.hpp"

namespace tspm {
namespace {

using test::canonical;

/// Brute-force oracle: count keys in a map, keep records whose key meets the threshold.
std::vector<TemporalSequence> bruteForceScreen(const std::vector<TemporalSequence> &in, std::uint64_t threshold,
                                               CountMode mode, std::optional<DurationUnit> bucketUnit) {
    auto key = [&](const TemporalSequence &s) {
        const std::uint64_t bucket = bucketUnit ? std::min<std::uint64_t>(s.duration.days / unitDivisor(*bucketUnit), 255) : 0;
        return std::make_pair(s.seq.value, bucket);
    };
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> occurrences;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::set<std::uint32_t>> patients;
    for (const auto &s : in) {
        ++occurrences[key(s)];
        patients[key(s)].insert(s.patient.value);
    }
    std::vector<TemporalSequence> out;
    for (const auto &s : in) {
        const std::uint64_t count = mode == CountMode::occurrences ? occurrences[key(s)] : patients[key(s)].size();
        if (count >= threshold) out.push_back(s);
    }
    return canonical(out);
}

TemporalSequence rec(std::uint32_t start, std::uint32_t end, std::uint32_t days, std::uint32_t patient) {
    return {encodeSequence(PhenxId{start}, PhenxId{end}), Duration{days}, PatientId{patient}};
}

TEST(SparsityScreen, ThresholdOneIsIdentity) {
    std::mt19937_64 rng(1);
    const auto in = test::randomSequences(rng, 1000, 20, 30, 500);
    SparsityConfig config;
    config.threshold = 1;
    EXPECT_EQ(sparsityScreen(in, config), canonical(in));
}

TEST(SparsityScreen, ForcedFixture) {
    const std::vector<TemporalSequence> in{rec(1, 2, 0, 0), rec(3, 4, 5, 1), rec(1, 2, 7, 1), rec(1, 2, 1, 2)};
    SparsityConfig config;
    config.threshold = 2;
    const auto out = sparsityScreen(in, config);
    EXPECT_EQ(out, canonical({rec(1, 2, 0, 0), rec(1, 2, 7, 1), rec(1, 2, 1, 2)}));
}

TEST(SparsityScreen, ZeroThresholdRejected) {
    SparsityConfig config;
    config.threshold = 0;
    EXPECT_THROW(sparsityScreen({}, config), Error);
}

TEST(SparsityScreen, MatchesBruteForceInBothModes) {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 24; ++round) {
        const auto in = test::randomSequences(rng, 200 + round * 400, 12, 25, 300);
        for (auto mode : {CountMode::occurrences, CountMode::distinct_patients}) {
            for (std::uint64_t threshold : {2u, 3u, 7u, 20u}) {
                SparsityConfig config;
                config.threshold = threshold;
                config.countMode = mode;
                config.workerCount = 1 + round % 4;
                EXPECT_EQ(sparsityScreen(in, config), bruteForceScreen(in, threshold, mode, std::nullopt));
            }
        }
    }
}

TEST(SparsityScreen, LargeInputAcrossWorkersAndOrders) {
    std::mt19937_64 rng(5);
    auto in = test::randomSequences(rng, 100'000, 300, 500, 1000);
    SparsityConfig config;
    config.threshold = 3;
    const auto expected = bruteForceScreen(in, 3, CountMode::occurrences, std::nullopt);
    for (unsigned workers : {1u, 2u, 5u}) {
        config.workerCount = workers;
        std::shuffle(in.begin(), in.end(), rng);
        EXPECT_EQ(sparsityScreen(in, config), expected) << workers;
    }
}

TEST(SparsityScreen, SentinelNeverLeaks) {
    std::mt19937_64 rng(7);
    const auto in = test::randomSequences(rng, 5000, 40, 60, 100);
    SparsityConfig config;
    config.threshold = 4;
    for (const auto &s : sparsityScreen(in, config)) ASSERT_FALSE(s.patient.isSentinel());
}

TEST(SparsityScreen, ModesCoincideWhenEachPatientContributesOnce) {
    // one record per (patient, sequence): occurrence count == patient count
    std::vector<TemporalSequence> in;
    for (std::uint32_t p = 0; p < 30; ++p) {
        for (std::uint32_t c = 0; c < 10; ++c) {
            if ((p * 7 + c * 3) % 5 < 2) in.push_back(rec(c, c + 1, p, p));
        }
    }
    for (std::uint64_t t : {2u, 6u, 12u}) {
        SparsityConfig occ, pat;
        occ.threshold = pat.threshold = t;
        pat.countMode = CountMode::distinct_patients;
        EXPECT_EQ(sparsityScreen(in, occ), sparsityScreen(in, pat));
    }
}

TEST(DurationSparsityScreen, DifferentBucketsAreDifferentSequences) {
    SparsityConfig config;
    config.threshold = 2;
    config.durationAware = true;
    config.bucketUnit = DurationUnit::months;
    const std::vector<TemporalSequence> apart{rec(1, 2, 5, 0), rec(1, 2, 400, 1)};
    EXPECT_TRUE(durationSparsityScreen(apart, config).empty());
    EXPECT_EQ(bruteForceScreen(apart, 2, CountMode::occurrences, DurationUnit::months).size(), 0u);

    const std::vector<TemporalSequence> together{rec(1, 2, 3, 0), rec(1, 2, 10, 1)};
    EXPECT_EQ(durationSparsityScreen(together, config), canonical(together));
}

TEST(DurationSparsityScreen, MatchesBruteForceAndIdentityAtOne) {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 10; ++round) {
        const auto in = test::randomSequences(rng, 3000, 8, 40, 800);
        for (auto unit : {DurationUnit::weeks, DurationUnit::months, DurationUnit::years}) {
            SparsityConfig config;
            config.durationAware = true;
            config.bucketUnit = unit;
            config.threshold = 1;
            EXPECT_EQ(durationSparsityScreen(in, config), canonical(in));
            config.threshold = 4;
            EXPECT_EQ(durationSparsityScreen(in, config), bruteForceScreen(in, 4, CountMode::occurrences, unit));
        }
    }
}

TEST(DurationSparsityScreen, PackOverflowPropagates) {
    SparsityConfig config;
    config.threshold = 2;
    config.durationAware = true;
    config.bucketBits = 20;
    try {
        durationSparsityScreen({rec(1, 1, 1, 1)}, config);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::PackOverflow);
    }
}

}  // namespace
}  // namespace tspm
