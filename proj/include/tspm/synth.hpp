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
#include <random>
#include <string>

#include "tspm/core.hpp"
#include "tspm/date.hpp"
#include "tspm/ingest.hpp"

namespace tspm {

struct SynthConfig {
    std::uint32_t patients = 100;
    std::uint32_t avgEntries = 50;
    std::uint32_t distinctPhenx = 500;
    std::uint32_t dateSpanDays = 3650;
    std::uint64_t seed = 42;
};

/// First synthetic date; every generated event falls in [base, base + dateSpanDays).
inline constexpr EventDate kSynthBaseDate{16'436};  // 2015-01-01

/// Deterministic synthetic dbmart. Entry counts per patient are Poisson around the mean
/// (clamped to >= 1), dates and phenX uniform. Ids are assigned exactly as the CSV parser
/// would assign them when reading the rows back in emission order.
inline ParsedDbMart generateDbmart(const SynthConfig &config) {
    if (config.patients == 0 || config.avgEntries == 0 || config.distinctPhenx == 0 || config.dateSpanDays == 0) {
        throw Error(ErrorKind::InvalidArgument, "synthetic dbmart parameters must all be positive");
    }
    if (config.distinctPhenx >= kPhenxRadix) {
        throw Error(ErrorKind::PhenxOverflow, "distinct phenX count must stay below 10^7");
    }
    std::mt19937_64 rng(config.seed);
    std::poisson_distribution<std::uint32_t> entryCount(config.avgEntries);
    std::uniform_int_distribution<std::int32_t> day(0, static_cast<std::int32_t>(config.dateSpanDays) - 1);
    std::uniform_int_distribution<std::uint32_t> code(0, config.distinctPhenx - 1);

    ParsedDbMart out;
    const auto width = std::to_string(config.patients).size();
    const auto codeWidth = std::to_string(config.distinctPhenx).size();
    auto padded = [](std::uint32_t v, std::size_t w) {
        std::string s = std::to_string(v);
        return std::string(w > s.size() ? w - s.size() : 0, '0') + s;
    };
    for (std::uint32_t p = 0; p < config.patients; ++p) {
        const PatientId patient = out.lookups.internPatient("PAT" + padded(p, width));
        const std::uint32_t n = std::max<std::uint32_t>(1, entryCount(rng));
        for (std::uint32_t i = 0; i < n; ++i) {
            const EventDate date{kSynthBaseDate.days + day(rng)};
            const PhenxId phenx = out.lookups.internPhenx("PX" + padded(code(rng), codeWidth));
            out.entries.push_back({patient, date, phenx});
        }
    }
    return out;
}

}  // namespace tspm
