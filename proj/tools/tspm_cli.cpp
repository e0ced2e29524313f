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

// tspm: command line front end for the transitive sequence miner.
// Exit codes: 0 success, 1 usage error, 2 data or I/O error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspm/tspm.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    int threads = 0;
    int verbosity = 0;
};

unsigned resolveThreads(const Globals &g) {
    if (g.threads > 0) return static_cast<unsigned>(g.threads);
    if (const char *env = std::getenv("TSEQ_THREADS")) {
        try {
            const int value = std::stoi(env);
            if (value >= 1) return static_cast<unsigned>(value);
        } catch (const std::exception &) {
        }
        throw UsageError(std::string("TSEQ_THREADS must be a positive integer, got '") + env + "'");
    }
    return 0;
}

void note(const Globals &g, const std::string &message) {
    if (g.verbosity > 0) std::cerr << message << '\n';
}

/// Sequences from a stage directory: sequences.csv if present, else a file-based mining result.
std::vector<tspm::TemporalSequence> loadSequences(const fs::path &dir) {
    if (fs::exists(dir / tspm::kSequencesFile)) return tspm::readSequencesCsv(dir / tspm::kSequencesFile);
    if (fs::exists(dir / tspm::kManifestFile)) return tspm::readMinedDirectory(dir);
    throw tspm::Error(tspm::ErrorKind::IoFailure,
                      dir.string() + " holds neither sequences.csv nor manifest.tsv (run `tspm mine` first)");
}

std::ofstream openOutput(const fs::path &path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw tspm::Error(tspm::ErrorKind::IoFailure, "cannot create " + path.string());
    return out;
}

tspm::MinerMode parseMode(const std::string &text) {
    if (text == "memory" || text == "in_memory") return tspm::MinerMode::in_memory;
    if (text == "files" || text == "file_based") return tspm::MinerMode::file_based;
    throw UsageError("--mode must be memory or files");
}

double millisSince(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct SparsityOptions {
    std::uint64_t threshold = 1;
    std::string mode = "occurrences";
    bool durationAware = false;
    std::string bucketUnit = "months";

    void add(CLI::App &cmd) {
        cmd.add_option("--sparsity-threshold", threshold, "Minimum count for a sequence to survive")
            ->check(CLI::PositiveNumber);
        cmd.add_option("--sparsity-mode", mode, "occurrences | distinct_patients")
            ->check(CLI::IsMember({"occurrences", "distinct_patients"}));
        cmd.add_flag("--duration-sparsity", durationAware, "Count (sequence, duration bucket) pairs instead of sequences");
        cmd.add_option("--bucket-unit", bucketUnit, "days | weeks | months | years")
            ->check(CLI::IsMember({"days", "weeks", "months", "years"}));
    }

    bool requested() const { return threshold > 1 || durationAware; }

    tspm::SparsityConfig config(unsigned workers) const {
        tspm::SparsityConfig c;
        c.threshold = threshold;
        c.countMode = tspm::parseCountMode(mode);
        c.durationAware = durationAware;
        c.bucketUnit = tspm::parseDurationUnit(bucketUnit);
        c.workerCount = workers;
        return c;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Transitive temporal sequence mining for patient event tables"};
    app.require_subcommand(1);
    Globals globals;
    app.add_option("--threads", globals.threads, "Worker threads (default: $TSEQ_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", globals.verbosity, "Progress messages on stderr");

    // synth
    tspm::SynthConfig synth;
    std::string synthOut;
    auto *synthCmd = app.add_subcommand("synth", "Write a deterministic synthetic dbmart CSV");
    synthCmd->add_option("--patients", synth.patients)->check(CLI::PositiveNumber);
    synthCmd->add_option("--avg-entries", synth.avgEntries)->check(CLI::PositiveNumber);
    synthCmd->add_option("--distinct-phenx", synth.distinctPhenx)->check(CLI::Range(1u, 9'999'999u));
    synthCmd->add_option("--date-span-days", synth.dateSpanDays)->check(CLI::PositiveNumber);
    synthCmd->add_option("--seed", synth.seed);
    synthCmd->add_option("--output", synthOut, "Destination CSV")->required();

    // mine
    std::string mineInput, mineOutDir, mineMode = "memory";
    bool firstOccurrence = false, excludeSameDate = false, planOnly = false;
    std::uint64_t maxChunk = tspm::kDefaultChunkLimit;
    SparsityOptions mineSparsity;
    auto *mineCmd = app.add_subcommand("mine", "Mine all transitive sequences from a dbmart CSV");
    mineCmd->add_option("--input", mineInput, "dbmart CSV (patient_num,start_date,phenx)")->required();
    mineCmd->add_option("--output-dir", mineOutDir, "Directory for sequences and lookup tables");
    mineCmd->add_option("--mode", mineMode, "memory (sequences.csv) | files (<patient>.tseq + manifest.tsv)");
    mineCmd->add_flag("--first-occurrence", firstOccurrence, "Keep only the first occurrence of a phenX per patient");
    mineCmd->add_flag("--exclude-same-date", excludeSameDate, "Only pair events with strictly later dates");
    mineCmd->add_option("--max-chunk-sequences", maxChunk,
                        "Records per mining chunk (16 bytes each in memory; default 2147483647)")
        ->check(CLI::PositiveNumber);
    mineCmd->add_flag("--plan-only", planOnly, "Print the chunk plan as TSV and stop");
    mineSparsity.add(*mineCmd);

    // screen
    std::string screenIn, screenOut;
    SparsityOptions screenSparsity;
    auto *screenCmd = app.add_subcommand("screen", "Remove sparse sequences from a mining result");
    screenCmd->add_option("--input-dir", screenIn)->required();
    screenCmd->add_option("--output-dir", screenOut)->required();
    screenSparsity.add(*screenCmd);

    // query
    std::string queryIn, queryOut, startsWith, endsWith, transitiveFrom;
    std::optional<std::uint32_t> minDuration;
    auto *queryCmd = app.add_subcommand("query", "Filter sequences and print them with original labels");
    queryCmd->add_option("--input-dir", queryIn)->required();
    queryCmd->add_option("--starts-with", startsWith, "Start phenX (original code)");
    queryCmd->add_option("--ends-with", endsWith, "End phenX (original code)");
    queryCmd->add_option("--min-duration-days", minDuration);
    queryCmd->add_option("--transitive-from", transitiveFrom,
                         "Sequences ending in any end phenX reached from this start phenX");
    queryCmd->add_option("--output", queryOut, "CSV destination (default stdout)");

    // postcovid
    std::string pcIn, pcOut, covidCode;
    tspm::PostCovidConfig pc;
    auto *pcCmd = app.add_subcommand("postcovid", "Identify Post COVID-19 symptoms per patient");
    pcCmd->add_option("--input-dir", pcIn)->required();
    pcCmd->add_option("--output-dir", pcOut, "Receives confirmed.csv and excluded.csv")->required();
    pcCmd->add_option("--covid-code", covidCode, "Original phenX code of the COVID-19 diagnosis")->required();
    pcCmd->add_option("--min-months", pc.minPersistenceMonths, "Minimum persistence span in month buckets");
    pcCmd->add_option("--corr-threshold", pc.correlationThreshold)->check(CLI::Range(0.0, 1.0));
    pcCmd->add_option("--alpha", pc.significanceAlpha)->check(CLI::Range(0.0, 1.0));

    // translate
    std::string trIn, trOut;
    auto *trCmd = app.add_subcommand("translate", "Write sequences with original labels");
    trCmd->add_option("--input-dir", trIn)->required();
    trCmd->add_option("--output", trOut, "CSV destination (default stdout)");

    // plan
    std::string planInput;
    std::uint64_t planLimit = tspm::kDefaultChunkLimit;
    std::optional<std::uint64_t> planBytes;
    auto *planCmd = app.add_subcommand("plan", "Print an adaptive chunk plan as TSV");
    planCmd->add_option("--input", planInput)->required();
    planCmd->add_option("--max-chunk-sequences", planLimit)->check(CLI::PositiveNumber);
    planCmd->add_option("--max-chunk-bytes", planBytes, "Memory budget; converted at 16 bytes per record")
        ->check(CLI::PositiveNumber);

    // verify
    std::string verifyInput, verifyDir;
    bool verifyExcludeSame = false;
    std::uint64_t verifyThreshold = 1;
    auto *verifyCmd = app.add_subcommand("verify", "Compare a mining result against the reference miner");
    verifyCmd->add_option("--input", verifyInput, "The dbmart CSV that was mined")->required();
    verifyCmd->add_option("--mined-dir", verifyDir, "Output directory of `tspm mine`")->required();
    verifyCmd->add_flag("--exclude-same-date", verifyExcludeSame);
    verifyCmd->add_option("--sparsity-threshold", verifyThreshold, "Occurrence threshold the result was screened with")
        ->check(CLI::PositiveNumber);

    // bench
    tspm::SynthConfig bench{1000, 400, 2000, 3650, 7};
    std::uint64_t benchThreshold = 2;
    bool benchNaive = false;
    auto *benchCmd = app.add_subcommand("bench", "Synthesize, mine and screen; print stage timings as TSV");
    benchCmd->add_option("--patients", bench.patients)->check(CLI::PositiveNumber);
    benchCmd->add_option("--avg-entries", bench.avgEntries)->check(CLI::PositiveNumber);
    benchCmd->add_option("--distinct-phenx", bench.distinctPhenx)->check(CLI::Range(1u, 9'999'999u));
    benchCmd->add_option("--seed", bench.seed);
    benchCmd->add_option("--sparsity-threshold", benchThreshold)->check(CLI::PositiveNumber);
    benchCmd->add_flag("--compare-naive", benchNaive, "Also time the reference miner");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitUsage;
    }

    try {
        const unsigned workers = resolveThreads(globals);

        if (*synthCmd) {
            const auto dbmart = tspm::generateDbmart(synth);
            auto out = openOutput(synthOut);
            tspm::writeDbmartCsv(out, dbmart.entries, dbmart.lookups);
            note(globals, "wrote " + std::to_string(dbmart.entries.size()) + " entries to " + synthOut);
            return 0;
        }

        if (*mineCmd) {
            const auto mode = parseMode(mineMode);
            if (!planOnly && mineOutDir.empty()) throw UsageError("mine: --output-dir is required");
            if (mode == tspm::MinerMode::file_based && mineSparsity.requested()) {
                throw UsageError("mine: sparsity screening applies to memory mode; run `tspm screen` on file output");
            }
            auto parsed = tspm::parseDbmartFile(mineInput);
            auto entries = firstOccurrence ? tspm::firstOccurrenceFilter(parsed.entries) : std::move(parsed.entries);
            const auto sorted = tspm::sortDbmart(std::move(entries));
            const auto blocks = tspm::patientBlocks(sorted);
            const auto plan = tspm::planChunks(tspm::entriesPerPatient(sorted), maxChunk);
            if (planOnly) {
                tspm::writePlanTsv(std::cout, plan);
                return 0;
            }
            tspm::writeLookupTables(mineOutDir, parsed.lookups);

            tspm::MinerConfig config;
            config.mode = mode;
            config.workerCount = workers;
            config.outputDir = mineOutDir;
            config.includeSameDatePairs = !excludeSameDate;
            if (mode == tspm::MinerMode::file_based) {
                fs::remove(fs::path(mineOutDir) / tspm::kSequencesFile);
                const auto manifest = tspm::mineToFiles(sorted, config);
                note(globals, "wrote " + std::to_string(manifest.size()) + " patient files to " + mineOutDir);
                return 0;
            }
            std::vector<tspm::TemporalSequence> all;
            for (const auto &range : plan.chunks) {
                auto part = tspm::mineAll(tspm::chunkEntries(sorted, blocks, range), config);
                if (all.empty()) {
                    all = std::move(part);
                } else {
                    all.insert(all.end(), part.begin(), part.end());
                }
            }
            if (mineSparsity.requested()) all = tspm::screen(std::move(all), mineSparsity.config(workers));
            fs::remove(fs::path(mineOutDir) / tspm::kManifestFile);
            tspm::writeSequencesCsv(fs::path(mineOutDir) / tspm::kSequencesFile, all);
            note(globals, "mined " + std::to_string(all.size()) + " sequences in " + std::to_string(plan.chunks.size()) +
                              " chunk(s)");
            return 0;
        }

        if (*screenCmd) {
            auto seqs = loadSequences(screenIn);
            const auto lookups = tspm::readLookupTables(screenIn);
            const std::size_t before = seqs.size();
            seqs = tspm::screen(std::move(seqs), screenSparsity.config(workers));
            fs::create_directories(screenOut);
            tspm::writeLookupTables(screenOut, lookups);
            tspm::writeSequencesCsv(fs::path(screenOut) / tspm::kSequencesFile, seqs);
            note(globals, "kept " + std::to_string(seqs.size()) + " of " + std::to_string(before) + " sequences");
            return 0;
        }

        if (*queryCmd) {
            auto seqs = loadSequences(queryIn);
            const auto lookups = tspm::readLookupTables(queryIn);
            // A code absent from the lookup table matches nothing.
            auto idOf = [&](const std::string &code) {
                return lookups.findPhenx(code).value_or(tspm::PhenxId{static_cast<std::uint32_t>(tspm::kPhenxRadix)});
            };
            if (!startsWith.empty()) seqs = tspm::filterByStart(seqs, idOf(startsWith));
            if (!endsWith.empty()) seqs = tspm::filterByEnd(seqs, idOf(endsWith));
            if (minDuration) seqs = tspm::filterByMinDuration(seqs, *minDuration);
            if (!transitiveFrom.empty()) seqs = tspm::transitiveEndSequences(seqs, idOf(transitiveFrom));
            const auto rows = tspm::translateSequences(seqs, lookups);
            if (queryOut.empty()) {
                tspm::writeTranslatedCsv(std::cout, rows);
            } else {
                auto out = openOutput(queryOut);
                tspm::writeTranslatedCsv(out, rows);
            }
            return 0;
        }

        if (*pcCmd) {
            const auto seqs = loadSequences(pcIn);
            const auto lookups = tspm::readLookupTables(pcIn);
            const auto covid = lookups.findPhenx(covidCode);
            if (!covid) throw tspm::Error(tspm::ErrorKind::UnknownId, "covid code '" + covidCode + "' not in lookup table");
            pc.covidPhenx = *covid;
            pc.workerCount = workers;
            const auto report = tspm::identifyPostCovid(seqs, pc);
            fs::create_directories(pcOut);
            auto confirmed = openOutput(fs::path(pcOut) / "confirmed.csv");
            tspm::writeConfirmedCsv(confirmed, report.confirmed, lookups);
            auto excluded = openOutput(fs::path(pcOut) / "excluded.csv");
            tspm::writeExcludedCsv(excluded, report.excluded, lookups);
            note(globals, std::to_string(report.confirmed.size()) + " confirmed, " +
                              std::to_string(report.excluded.size()) + " excluded");
            return 0;
        }

        if (*trCmd) {
            const auto rows = tspm::translateSequences(loadSequences(trIn), tspm::readLookupTables(trIn));
            if (trOut.empty()) {
                tspm::writeTranslatedCsv(std::cout, rows);
            } else {
                auto out = openOutput(trOut);
                tspm::writeTranslatedCsv(out, rows);
            }
            return 0;
        }

        if (*planCmd) {
            const auto parsed = tspm::parseDbmartFile(planInput);
            const auto sorted = tspm::sortDbmart(parsed.entries);
            const std::uint64_t limit = planBytes ? *planBytes / tspm::kBytesPerRecord : planLimit;
            tspm::writePlanTsv(std::cout, tspm::planChunks(tspm::entriesPerPatient(sorted), limit));
            return 0;
        }

        if (*verifyCmd) {
            const auto lookups = tspm::readLookupTables(verifyDir);
            auto mined = loadSequences(verifyDir);
            std::sort(mined.begin(), mined.end(), tspm::CanonicalOrder{});
            const auto rows = tspm::readRawDbmart(tspm::readFile(verifyInput));
            auto reference = tspm::oracle::naiveMine(rows, !verifyExcludeSame);
            if (verifyThreshold > 1) reference = tspm::oracle::naiveSparsityScreen(reference, verifyThreshold);
            std::vector<tspm::TemporalSequence> encoded;
            encoded.reserve(reference.size());
            for (const auto &r : reference) {
                const auto patient = lookups.findPatient(r.patient);
                const auto start = lookups.findPhenx(r.start);
                const auto end = lookups.findPhenx(r.end);
                if (!patient || !start || !end) {
                    throw tspm::Error(tspm::ErrorKind::UnknownId, "reference label missing from lookup tables");
                }
                encoded.push_back({tspm::encodeSequence(*start, *end),
                                   tspm::Duration{static_cast<std::uint32_t>(r.durationDays)}, *patient});
            }
            std::sort(encoded.begin(), encoded.end(), tspm::CanonicalOrder{});
            const bool equal = encoded == mined;
            std::cout << "verify\t" << (equal ? "OK" : "MISMATCH") << "\treference=" << encoded.size()
                      << "\tmined=" << mined.size() << '\n';
            return equal ? 0 : kExitData;
        }

        if (*benchCmd) {
            std::cout << "stage\twall_ms\trecords\n";
            auto print = [](const char *stage, double ms, std::uint64_t records) {
                std::cout << stage << '\t' << static_cast<std::uint64_t>(ms) << '\t' << records << '\n' << std::flush;
            };
            const auto total = std::chrono::steady_clock::now();
            auto t = std::chrono::steady_clock::now();
            auto dbmart = tspm::generateDbmart(bench);
            print("synth", millisSince(t), dbmart.entries.size());

            t = std::chrono::steady_clock::now();
            const auto sorted = tspm::sortDbmart(dbmart.entries);
            print("sort", millisSince(t), sorted.size());

            tspm::MinerConfig config;
            config.workerCount = workers;
            t = std::chrono::steady_clock::now();
            auto seqs = tspm::mineAll(sorted, config);
            print("mine", millisSince(t), seqs.size());

            tspm::SparsityConfig sc;
            sc.threshold = benchThreshold;
            sc.workerCount = workers;
            t = std::chrono::steady_clock::now();
            seqs = tspm::sparsityScreen(std::move(seqs), sc);
            print("screen", millisSince(t), seqs.size());
            print("total", millisSince(total), seqs.size());

            if (benchNaive) {
                seqs = {};
                seqs.shrink_to_fit();
                std::vector<tspm::RawDbMartRow> rows;
                rows.reserve(dbmart.entries.size());
                for (const auto &e : dbmart.entries) {
                    rows.push_back({dbmart.lookups.patientLabel(e.patient), tspm::formatIsoDate(e.date),
                                    dbmart.lookups.phenxLabel(e.phenx), std::nullopt});
                }
                t = std::chrono::steady_clock::now();
                const auto naive = tspm::oracle::naiveMine(rows);
                print("naive_mine", millisSince(t), naive.size());
            }
            return 0;
        }
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const tspm::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
