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

// Reference implementation of the original string-based miner. It is slow on purpose and
// shares no code with the numeric pipeline beyond the row type.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tspm/ingest.hpp"

namespace tspm::oracle {

struct NaiveSequence {
    std::string patient;
    std::string start;
    std::string end;
    long durationDays = 0;

    friend bool operator==(const NaiveSequence &, const NaiveSequence &) = default;
    friend auto operator<=>(const NaiveSequence &, const NaiveSequence &) = default;
};

namespace detail {

inline long dayNumber(const std::string &iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
        throw Error(ErrorKind::MalformedDate, "'" + iso + "' is not a YYYY-MM-DD date");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw Error(ErrorKind::MalformedDate, "'" + iso + "' is not a calendar date");
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

}  // namespace detail

/// sort(dbmart, by(patient, date)); for every patient, every x, every later-positioned y: add (x, y).
inline std::vector<NaiveSequence> naiveMine(std::span<const RawDbMartRow> dbmart, bool includeSameDatePairs = true) {
    struct Row {
        std::string patient;
        long date;
        std::string phenx;
    };
    std::vector<Row> rows;
    for (const auto &r : dbmart) rows.push_back({r.patient, detail::dayNumber(r.date), r.phenx});
    std::stable_sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) {
        if (a.patient != b.patient) return a.patient < b.patient;
        return a.date < b.date;
    });

    std::vector<NaiveSequence> sparseSequences;
    std::size_t patientStart = 0;
    while (patientStart < rows.size()) {
        std::size_t patientEnd = patientStart;
        while (patientEnd < rows.size() && rows[patientEnd].patient == rows[patientStart].patient) ++patientEnd;
        for (std::size_t x = patientStart; x < patientEnd; ++x) {
            for (std::size_t y = x + 1; y < patientEnd; ++y) {
                if (rows[y].date < rows[x].date) continue;
                if (!includeSameDatePairs && rows[y].date == rows[x].date) continue;
                sparseSequences.push_back(
                    NaiveSequence{rows[x].patient, rows[x].phenx, rows[y].phenx, rows[y].date - rows[x].date});
            }
        }
        patientStart = patientEnd;
    }
    return sparseSequences;
}

/// Keeps rows whose (start, end) pair occurs at least `threshold` times.
inline std::vector<NaiveSequence> naiveSparsityScreen(std::span<const NaiveSequence> rows, std::uint64_t threshold) {
    std::unordered_map<std::string, std::uint64_t> counts;
    auto key = [](const NaiveSequence &s) { return s.start + '\x1f' + s.end; };
    for (const auto &r : rows) ++counts[key(r)];
    std::vector<NaiveSequence> out;
    for (const auto &r : rows) {
        if (counts[key(r)] >= threshold) out.push_back(r);
    }
    return out;
}

}  // namespace tspm::oracle
