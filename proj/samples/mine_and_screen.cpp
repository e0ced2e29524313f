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

// Library usage: parse a dbmart, mine, screen, and print the survivors with labels.
// usage: mine_and_screen <dbmart.csv> [threshold]

#include <cstdlib>
#include <iostream>

#include "tspm/tspm.hpp"

int main(int argc, char **argv) {
    if (argc < 2) {
        std::cerr << "usage: " << argv[0] << " <dbmart.csv> [threshold]\n";
        return 1;
    }
    try {
        auto dbmart = tspm::parseDbmartFile(argv[1]);
        const auto sorted = tspm::sortDbmart(std::move(dbmart.entries));
        auto seqs = tspm::mineAll(sorted);

        tspm::SparsityConfig screening;
        screening.threshold = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2;
        seqs = tspm::sparsityScreen(std::move(seqs), screening);

        tspm::writeTranslatedCsv(std::cout, tspm::translateSequences(seqs, dbmart.lookups));
    } catch (const tspm::Error &e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    return 0;
}
