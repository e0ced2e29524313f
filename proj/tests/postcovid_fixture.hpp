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

#include <string>
#include <vector>

#include "tspm/ingest.hpp"

namespace tspm::test {

inline constexpr const char *kCovidCode = "covid";

/// Thirty-patient cohort with day offsets relative to each patient's covid diagnosis.
///   P01-P08: fatigue at +35 and +100 (buckets 1 and 3); P01 also has allergy before covid.
///   P09-P14: smoking before covid, cough at +40 and +110; smoking -> cough holds for exactly these six.
///   P15-P18: headache once.
///   P19-P22: rash at +10 and +40 (buckets 0 and 1).
///   P23:     allergy then fatigue, no covid.
///   P24-P30: unrelated events, no covid.
inline std::vector<RawDbMartRow> postCovidFixture() {
    std::vector<RawDbMartRow> rows;
    const EventDate covidDay = *parseIsoDate("2021-03-01");
    auto add = [&](int patient, int offset, const std::string &code) {
        std::string label = std::to_string(patient);
        label = "P" + std::string(2 - label.size(), '0') + label;
        rows.push_back({label, formatIsoDate(EventDate{covidDay.days + offset}), code, std::nullopt});
    };
    for (int p = 1; p <= 8; ++p) {
        add(p, 0, kCovidCode);
        add(p, 35, "fatigue");
        add(p, 100, "fatigue");
    }
    add(1, -30, "allergy");
    for (int p = 9; p <= 14; ++p) {
        add(p, -100, "smoking");
        add(p, 0, kCovidCode);
        add(p, 40, "cough");
        add(p, 110, "cough");
    }
    for (int p = 15; p <= 18; ++p) {
        add(p, 0, kCovidCode);
        add(p, 20, "headache");
    }
    for (int p = 19; p <= 22; ++p) {
        add(p, 0, kCovidCode);
        add(p, 10, "rash");
        add(p, 40, "rash");
    }
    add(23, 0, "allergy");
    add(23, 50, "fatigue");
    for (int p = 24; p <= 30; ++p) {
        add(p, 0, "checkup");
        add(p, 30 + p, "flu");
    }
    return rows;
}

}  // namespace tspm::test
