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

#include <random>
#include <set>
#include <unordered_set>

#include "tspm/core.hpp"
#include "tspm/date.hpp"

namespace tspm {
namespace {

TEST(EncodeSequence, PadsEndToSevenDigits) {
    EXPECT_EQ(encodeSequence(PhenxId{5}, PhenxId{1}).value, 50000001ULL);
    EXPECT_EQ(encodeSequence(PhenxId{0}, PhenxId{0}).value, 0ULL);
    EXPECT_EQ(encodeSequence(PhenxId{9999999}, PhenxId{9999999}).value, 99999999999999ULL);
}

TEST(EncodeSequence, RejectsIdsAboveSevenDigits) {
    try {
        encodeSequence(PhenxId{10'000'000}, PhenxId{1});
        FAIL() << "expected EncodingOverflow";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::EncodingOverflow);
    }
    EXPECT_THROW(encodeSequence(PhenxId{1}, PhenxId{10'000'000}), Error);
}

TEST(DecodeSequence, InvertsEncoding) {
    EXPECT_EQ(decodeSequence(SequenceId{50000001}), std::make_pair(PhenxId{5}, PhenxId{1}));
    EXPECT_EQ(decodeSequence(SequenceId{0}), std::make_pair(PhenxId{0}, PhenxId{0}));
}

TEST(DecodeSequence, RejectsOutOfRange) {
    try {
        decodeSequence(SequenceId{kSequenceLimit});
        FAIL() << "expected DecodingOutOfRange";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DecodingOutOfRange);
    }
}

TEST(EncodeSequence, RoundTripAndInjectiveOnRandomPairs) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint32_t> id(0, 9'999'999);
    std::unordered_set<std::uint64_t> seen;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (int i = 0; i < 10'000; ++i) {
        const PhenxId a{id(rng)}, b{id(rng)};
        const auto s = encodeSequence(a, b);
        EXPECT_EQ(decodeSequence(s), std::make_pair(a, b));
        if (pairs.insert({a.value, b.value}).second) {
            EXPECT_TRUE(seen.insert(s.value).second) << "collision at " << a.value << "," << b.value;
        }
    }
}

TEST(PackDuration, ShiftsSequenceAndStoresBucket) {
    EXPECT_EQ(packDuration(SequenceId{1}, 3, 8), 259ULL);
    EXPECT_EQ(packDuration(SequenceId{123456}, 0, 8), 123456ULL * 256);
}

TEST(PackDuration, SaturatesBucket) {
    EXPECT_EQ(packDuration(SequenceId{1}, 1000, 8), 256ULL + 255);
    EXPECT_EQ(unpackDuration(packDuration(SequenceId{7}, 70000, 16), 16).second, 65535ULL);
}

TEST(PackDuration, RoundTripsEveryBucket) {
    const SequenceId s = encodeSequence(PhenxId{1234567}, PhenxId{7654321});
    for (std::uint64_t b = 0; b < 256; ++b) {
        const auto [seq, bucket] = unpackDuration(packDuration(s, b, 8), 8);
        EXPECT_EQ(seq, s);
        EXPECT_EQ(bucket, b);
    }
}

TEST(PackDuration, BoundaryFitsWithSixteenBits) {
    const SequenceId top = encodeSequence(PhenxId{9999999}, PhenxId{9999999});
    const std::uint64_t packed = packDuration(top, 65535, 16);
    EXPECT_LT(packed, std::uint64_t{1} << 63);
    EXPECT_EQ(unpackDuration(packed, 16), std::make_pair(top, std::uint64_t{65535}));
}

TEST(PackDuration, RejectsWideBuckets) {
    try {
        packDuration(SequenceId{1}, 0, 17);
        FAIL() << "expected PackOverflow";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::PackOverflow);
    }
}

TEST(DurationInUnit, FloorsByFixedDivisors) {
    EXPECT_EQ(durationInUnit(Duration{30}, DurationUnit::days), 30u);
    EXPECT_EQ(durationInUnit(Duration{60}, DurationUnit::months), 2u);
    EXPECT_EQ(durationInUnit(Duration{6}, DurationUnit::weeks), 0u);
    EXPECT_EQ(durationInUnit(Duration{729}, DurationUnit::years), 1u);
}

TEST(DurationInUnit, MonotoneInDays) {
    for (auto unit : {DurationUnit::days, DurationUnit::weeks, DurationUnit::months, DurationUnit::years}) {
        std::uint32_t previous = 0;
        for (std::uint32_t d = 0; d < 2000; ++d) {
            const auto v = durationInUnit(Duration{d}, unit);
            ASSERT_GE(v, previous);
            previous = v;
        }
    }
}

TEST(PairCount, MatchesFormulaAndDetectsOverflow) {
    EXPECT_EQ(pairCount(0), 0u);
    EXPECT_EQ(pairCount(1), 0u);
    EXPECT_EQ(pairCount(400), 79'800u);
    EXPECT_THROW(pairCount(std::uint64_t{1} << 40), Error);
}

TEST(IsoDate, ParsesAndRejects) {
    EXPECT_EQ(parseIsoDate("1970-01-01")->days, 0);
    EXPECT_EQ(parseIsoDate("2020-03-01")->days - parseIsoDate("2020-02-28")->days, 2);
    EXPECT_FALSE(parseIsoDate("2021-02-29"));
    EXPECT_FALSE(parseIsoDate("01/02/2020"));
    EXPECT_FALSE(parseIsoDate("2020-1-01"));
    EXPECT_EQ(formatIsoDate(*parseIsoDate("2024-12-31")), "2024-12-31");
}

}  // namespace
}  // namespace tspm
