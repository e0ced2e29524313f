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

#include <sstream>

#include "test_support.hpp"
#include "tspm/synth.hpp"

namespace tspm {
namespace {

TEST(GenerateDbmart, DeterministicForFixedSeed) {
    const SynthConfig config{50, 30, 100, 365, 123};
    std::ostringstream a, b;
    { const auto d = generateDbmart(config); writeDbmartCsv(a, d.entries, d.lookups); }
    { const auto d = generateDbmart(config); writeDbmartCsv(b, d.entries, d.lookups); }
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream c;
    { const auto d = generateDbmart({50, 30, 100, 365, 124}); writeDbmartCsv(c, d.entries, d.lookups); }
    EXPECT_NE(a.str(), c.str());
}

TEST(GenerateDbmart, MeanEntryCountNearTarget) {
    const auto dbmart = generateDbmart({1000, 400, 2000, 3650, 42});
    EXPECT_EQ(dbmart.lookups.patientCount(), 1000u);
    const double total = static_cast<double>(dbmart.entries.size());
    EXPECT_NEAR(total, 400'000.0, 20'000.0);
}

TEST(GenerateDbmart, DatesAndCodesStayInRange) {
    const SynthConfig config{40, 20, 7, 30, 5};
    const auto dbmart = generateDbmart(config);
    EXPECT_LE(dbmart.lookups.phenxCount(), 7u);
    for (const auto &e : dbmart.entries) {
        ASSERT_GE(e.date.days, kSynthBaseDate.days);
        ASSERT_LT(e.date.days, kSynthBaseDate.days + 30);
    }
    for (const auto n : entriesPerPatient(sortDbmart(dbmart.entries))) EXPECT_GE(n, 1u);
}

TEST(GenerateDbmart, SinglePhenxYieldsOnlySelfPairs) {
    const auto dbmart = generateDbmart({20, 10, 1, 100, 9});
    const auto seqs = mineAll(sortDbmart(dbmart.entries));
    ASSERT_FALSE(seqs.empty());
    for (const auto &s : seqs) ASSERT_EQ(s.seq.value, 0u);
}

TEST(GenerateDbmart, CsvRoundTripReproducesIds) {
    const auto dbmart = generateDbmart({30, 15, 25, 500, 77});
    std::ostringstream out;
    writeDbmartCsv(out, dbmart.entries, dbmart.lookups);
    const auto parsed = parseDbmart(out.str());
    EXPECT_EQ(parsed.entries, dbmart.entries);
    EXPECT_EQ(parsed.lookups.phenxLabels(), dbmart.lookups.phenxLabels());
    EXPECT_EQ(parsed.lookups.patientLabels(), dbmart.lookups.patientLabels());
}

TEST(GenerateDbmart, RejectsInvalidParameters) {
    EXPECT_THROW(generateDbmart({0, 1, 1, 1, 1}), Error);
    EXPECT_THROW(generateDbmart({1, 0, 1, 1, 1}), Error);
    EXPECT_THROW(generateDbmart({1, 1, 0, 1, 1}), Error);
    EXPECT_THROW(generateDbmart({1, 1, 1, 0, 1}), Error);
    EXPECT_THROW(generateDbmart({1, 1, 10'000'000, 1, 1}), Error);
}

}  // namespace
}  // namespace tspm
