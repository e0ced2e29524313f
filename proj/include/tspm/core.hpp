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

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "tspm/error.hpp"

namespace tspm {

/// Number of decimal digits reserved for the end phenX inside a sequence id.
inline constexpr std::uint64_t kPhenxRadix = 10'000'000ULL;
inline constexpr std::uint64_t kSequenceLimit = kPhenxRadix * kPhenxRadix;
inline constexpr unsigned kMaxBucketBits = 16;
inline constexpr unsigned kDefaultBucketBits = 8;

struct PhenxId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(PhenxId, PhenxId) = default;
};

struct PatientId {
    std::uint32_t value = 0;

    /// Reserved for marking records condemned by sparsity screening.
    static constexpr std::uint32_t kSentinel = std::numeric_limits<std::uint32_t>::max();

    constexpr bool isSentinel() const { return value == kSentinel; }
    friend constexpr auto operator<=>(PatientId, PatientId) = default;
};

/// Calendar date held as a day count since 1970-01-01 (proleptic Gregorian).
struct EventDate {
    std::int32_t days = 0;
    friend constexpr auto operator<=>(EventDate, EventDate) = default;
};

struct SequenceId {
    std::uint64_t value = 0;
    friend constexpr auto operator<=>(SequenceId, SequenceId) = default;
};

struct Duration {
    std::uint32_t days = 0;
    friend constexpr auto operator<=>(Duration, Duration) = default;
};

struct DbMartEntry {
    PatientId patient;
    EventDate date;
    PhenxId phenx;
    friend constexpr bool operator==(const DbMartEntry &, const DbMartEntry &) = default;
};

/// One mined transitive sequence. Laid out as 16 bytes: id, duration, patient.
struct TemporalSequence {
    SequenceId seq;
    Duration duration;
    PatientId patient;

    friend constexpr bool operator==(const TemporalSequence &, const TemporalSequence &) = default;
};

static_assert(sizeof(TemporalSequence) == 16);
static_assert(sizeof(DbMartEntry) == 12);

/// Canonical order used for every persisted or compared sequence list.
struct CanonicalOrder {
    constexpr bool operator()(const TemporalSequence &a, const TemporalSequence &b) const {
        if (a.patient != b.patient) return a.patient < b.patient;
        if (a.seq != b.seq) return a.seq < b.seq;
        return a.duration < b.duration;
    }
};

enum class DurationUnit { days, weeks, months, years };

constexpr std::uint32_t unitDivisor(DurationUnit unit) {
    switch (unit) {
        case DurationUnit::days: return 1;
        case DurationUnit::weeks: return 7;
        case DurationUnit::months: return 30;
        case DurationUnit::years: return 365;
    }
    return 1;
}

inline std::string_view toString(DurationUnit unit) {
    switch (unit) {
        case DurationUnit::days: return "days";
        case DurationUnit::weeks: return "weeks";
        case DurationUnit::months: return "months";
        case DurationUnit::years: return "years";
    }
    return "days";
}

inline DurationUnit parseDurationUnit(std::string_view text) {
    if (text == "days") return DurationUnit::days;
    if (text == "weeks") return DurationUnit::weeks;
    if (text == "months") return DurationUnit::months;
    if (text == "years") return DurationUnit::years;
    throw Error(ErrorKind::InvalidArgument, "unknown duration unit '" + std::string(text) + "'");
}

constexpr std::uint32_t durationInUnit(Duration d, DurationUnit unit) {
    return d.days / unitDivisor(unit);
}

inline SequenceId encodeSequence(PhenxId start, PhenxId end) {
    if (start.value >= kPhenxRadix || end.value >= kPhenxRadix) {
        throw Error(ErrorKind::EncodingOverflow,
                    "phenX id out of range for sequence encoding: (" + std::to_string(start.value) + ", " +
                        std::to_string(end.value) + ")");
    }
    return SequenceId{start.value * kPhenxRadix + end.value};
}

/// Unchecked variant for the mining hot loop; ids are validated at lookup construction.
constexpr SequenceId encodeSequenceUnchecked(PhenxId start, PhenxId end) {
    return SequenceId{start.value * kPhenxRadix + end.value};
}

constexpr PhenxId startOf(SequenceId seq) { return PhenxId{static_cast<std::uint32_t>(seq.value / kPhenxRadix)}; }
constexpr PhenxId endOf(SequenceId seq) { return PhenxId{static_cast<std::uint32_t>(seq.value % kPhenxRadix)}; }

inline std::pair<PhenxId, PhenxId> decodeSequence(SequenceId seq) {
    if (seq.value >= kSequenceLimit) {
        throw Error(ErrorKind::DecodingOutOfRange, "sequence id " + std::to_string(seq.value) + " exceeds 10^14");
    }
    return {startOf(seq), endOf(seq)};
}

/// Shifts the sequence id left by `bucketBits` and stores the (saturated) bucket in the low bits.
inline std::uint64_t packDuration(SequenceId seq, std::uint64_t bucket, unsigned bucketBits = kDefaultBucketBits) {
    if (bucketBits > kMaxBucketBits) {
        throw Error(ErrorKind::PackOverflow, "bucketBits " + std::to_string(bucketBits) + " exceeds 16");
    }
    const std::uint64_t maxBucket = (std::uint64_t{1} << bucketBits) - 1;
    return (seq.value << bucketBits) | (bucket < maxBucket ? bucket : maxBucket);
}

inline std::pair<SequenceId, std::uint64_t> unpackDuration(std::uint64_t packed, unsigned bucketBits = kDefaultBucketBits) {
    if (bucketBits > kMaxBucketBits) {
        throw Error(ErrorKind::PackOverflow, "bucketBits " + std::to_string(bucketBits) + " exceeds 16");
    }
    const std::uint64_t mask = (std::uint64_t{1} << bucketBits) - 1;
    return {SequenceId{packed >> bucketBits}, packed & mask};
}

/// n(n-1)/2 for one patient, throwing on overflow.
inline std::uint64_t pairCount(std::uint64_t n) {
    if (n < 2) return 0;
    std::uint64_t a = n, b = n - 1;
    if (a % 2 == 0) a /= 2; else b /= 2;
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw Error(ErrorKind::ArithmeticOverflow, "pair count for " + std::to_string(n) + " entries overflows 64 bits");
    }
    return out;
}

}  // namespace tspm
