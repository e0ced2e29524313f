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

#include <cmath>
#include <cstdint>

namespace tspm::stats {

/// Counts of a 2x2 table of two binary indicators X and Y over a cohort.
struct Table2x2 {
    std::uint64_t both = 0;    // X and Y
    std::uint64_t xOnly = 0;   // X, not Y
    std::uint64_t yOnly = 0;   // Y, not X
    std::uint64_t neither = 0;

    std::uint64_t total() const { return both + xOnly + yOnly + neither; }
};

struct Association {
    double phi = 0.0;
    double chiSquare = 0.0;
    double pValue = 1.0;
};

/// Phi coefficient with a 1-df Pearson chi-square test (no continuity correction).
/// A table with an empty margin has no defined correlation and reports phi 0, p 1.
inline Association associate(const Table2x2 &t) {
    const double a = static_cast<double>(t.both), b = static_cast<double>(t.xOnly);
    const double c = static_cast<double>(t.yOnly), d = static_cast<double>(t.neither);
    const double denom = (a + b) * (c + d) * (a + c) * (b + d);
    if (denom <= 0.0) return {};
    Association out;
    out.phi = (a * d - b * c) / std::sqrt(denom);
    out.chiSquare = static_cast<double>(t.total()) * out.phi * out.phi;
    // Survival function of chi-square with one degree of freedom.
    out.pValue = std::erfc(std::sqrt(out.chiSquare / 2.0));
    return out;
}

}  // namespace tspm::stats
