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
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tspm/core.hpp"
#include "tspm/csv.hpp"
#include "tspm/date.hpp"

namespace tspm {

inline constexpr std::string_view kPatientColumn = "patient_num";
inline constexpr std::string_view kDateColumn = "start_date";
inline constexpr std::string_view kPhenxColumn = "phenx";
inline constexpr std::string_view kPhenxLookupFile = "phenx_lookup.tsv";
inline constexpr std::string_view kPatientLookupFile = "patient_lookup.tsv";

struct RawDbMartRow {
    std::string patient;
    std::string date;
    std::string phenx;
    std::optional<std::string> description;
};

namespace detail {

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Dense first-appearance interning of labels.
class Interner {
  public:
    std::uint32_t intern(std::string_view label, std::uint64_t limit, ErrorKind overflow, const char *what) {
        if (auto it = toId_.find(label); it != toId_.end()) return it->second;
        if (toLabel_.size() >= limit) {
            throw Error(overflow, std::string("distinct ") + what + " count reached " + std::to_string(limit));
        }
        const auto id = static_cast<std::uint32_t>(toLabel_.size());
        toLabel_.emplace_back(label);
        toId_.emplace(toLabel_.back(), id);
        return id;
    }

    std::optional<std::uint32_t> find(std::string_view label) const {
        if (auto it = toId_.find(label); it != toId_.end()) return it->second;
        return std::nullopt;
    }

    const std::vector<std::string> &labels() const { return toLabel_; }
    std::size_t size() const { return toLabel_.size(); }

  private:
    std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> toId_;
    std::vector<std::string> toLabel_;
};

}  // namespace detail

/// Reversible maps between original identifiers and dense numeric ids.
class LookupTables {
  public:
    PhenxId internPhenx(std::string_view label) {
        return PhenxId{phenx_.intern(label, kPhenxRadix, ErrorKind::PhenxOverflow, "phenX")};
    }
    PatientId internPatient(std::string_view label) {
        return PatientId{patients_.intern(label, PatientId::kSentinel, ErrorKind::PatientOverflow, "patient")};
    }

    std::optional<PhenxId> findPhenx(std::string_view label) const {
        if (auto id = phenx_.find(label)) return PhenxId{*id};
        return std::nullopt;
    }
    std::optional<PatientId> findPatient(std::string_view label) const {
        if (auto id = patients_.find(label)) return PatientId{*id};
        return std::nullopt;
    }

    const std::string &phenxLabel(PhenxId id) const {
        if (id.value >= phenx_.size()) {
            throw Error(ErrorKind::UnknownId, "phenX id " + std::to_string(id.value) + " not in lookup table");
        }
        return phenx_.labels()[id.value];
    }
    const std::string &patientLabel(PatientId id) const {
        if (id.value >= patients_.size()) {
            throw Error(ErrorKind::UnknownId, "patient id " + std::to_string(id.value) + " not in lookup table");
        }
        return patients_.labels()[id.value];
    }

    const std::vector<std::string> &phenxLabels() const { return phenx_.labels(); }
    const std::vector<std::string> &patientLabels() const { return patients_.labels(); }
    std::size_t phenxCount() const { return phenx_.size(); }
    std::size_t patientCount() const { return patients_.size(); }

  private:
    detail::Interner phenx_;
    detail::Interner patients_;
};

struct ParsedDbMart {
    std::vector<DbMartEntry> entries;
    LookupTables lookups;
};

/// Parses an MLHO-style dbmart CSV (header with patient_num, start_date, phenx).
inline ParsedDbMart parseDbmart(std::string_view text) {
    csv::Reader reader(text);
    std::vector<std::string> fields;
    ParsedDbMart out;
    if (!reader.next(fields)) {
        throw Error(ErrorKind::MissingColumn, "empty input: no header row (expected patient_num)");
    }
    auto column = [&](std::string_view name) {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end()) throw Error(ErrorKind::MissingColumn, "missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - fields.begin());
    };
    const std::size_t patientCol = column(kPatientColumn);
    const std::size_t dateCol = column(kDateColumn);
    const std::size_t phenxCol = column(kPhenxColumn);
    const std::size_t needed = std::max({patientCol, dateCol, phenxCol}) + 1;

    std::size_t row = 0;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        ++row;
        if (fields.size() < needed) {
            throw Error(ErrorKind::MalformedRow, "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                                                     " fields, expected at least " + std::to_string(needed));
        }
        const auto date = parseIsoDate(fields[dateCol]);
        if (!date) {
            throw Error(ErrorKind::MalformedDate,
                        "row " + std::to_string(row) + ": '" + fields[dateCol] + "' is not a YYYY-MM-DD date");
        }
        const PatientId patient = out.lookups.internPatient(fields[patientCol]);
        const PhenxId phenx = out.lookups.internPhenx(fields[phenxCol]);
        out.entries.push_back(DbMartEntry{patient, *date, phenx});
    }
    return out;
}

inline std::string readFile(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline ParsedDbMart parseDbmartFile(const std::filesystem::path &path) { return parseDbmart(readFile(path)); }

/// Reads the raw string rows, for consumers that work on labels (the reference miner).
inline std::vector<RawDbMartRow> readRawDbmart(std::string_view text) {
    csv::Reader reader(text);
    std::vector<std::string> fields;
    std::vector<RawDbMartRow> rows;
    if (!reader.next(fields)) throw Error(ErrorKind::MissingColumn, "empty input: no header row");
    auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end()) return std::nullopt;
        return static_cast<std::size_t>(it - fields.begin());
    };
    auto require = [&](std::string_view name) {
        if (auto c = find(name)) return *c;
        throw Error(ErrorKind::MissingColumn, "missing column '" + std::string(name) + "'");
    };
    const std::size_t p = require(kPatientColumn), d = require(kDateColumn), x = require(kPhenxColumn);
    const auto desc = find("description");
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() <= std::max({p, d, x})) {
            throw Error(ErrorKind::MalformedRow, "record " + std::to_string(reader.record()) + " is too short");
        }
        RawDbMartRow row{fields[p], fields[d], fields[x], std::nullopt};
        if (desc && *desc < fields.size()) row.description = fields[*desc];
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void writeDbmartCsv(std::ostream &out, std::span<const DbMartEntry> entries, const LookupTables &lookups) {
    out << kPatientColumn << ',' << kDateColumn << ',' << kPhenxColumn << '\n';
    for (const auto &e : entries) {
        csv::writeField(out, lookups.patientLabel(e.patient));
        out << ',' << formatIsoDate(e.date) << ',';
        csv::writeField(out, lookups.phenxLabel(e.phenx));
        out << '\n';
    }
}

namespace detail {

inline void writeLookupFile(const std::filesystem::path &path, const std::vector<std::string> &labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].find_first_of("\t\r\n") != std::string::npos) {
            throw Error(ErrorKind::IoFailure, "label '" + labels[i] + "' contains a tab or line break");
        }
        out << labels[i] << '\t' << i << '\n';
    }
    if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

inline std::vector<std::string> readLookupFile(const std::filesystem::path &path) {
    std::istringstream in(readFile(path));
    std::vector<std::pair<std::uint64_t, std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) throw Error(ErrorKind::MalformedRow, path.string() + ": missing tab in '" + line + "'");
        std::uint64_t id = 0;
        const char *first = line.data() + tab + 1;
        const char *last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, id);
        if (ec != std::errc{} || ptr != last) {
            throw Error(ErrorKind::MalformedRow, path.string() + ": bad numeric id in '" + line + "'");
        }
        rows.emplace_back(id, line.substr(0, tab));
    }
    std::sort(rows.begin(), rows.end());
    std::vector<std::string> labels;
    labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != i) throw Error(ErrorKind::MalformedRow, path.string() + ": ids are not dense from 0");
        labels.push_back(std::move(rows[i].second));
    }
    return labels;
}

}  // namespace detail

inline void writeLookupTables(const std::filesystem::path &dir, const LookupTables &lookups) {
    std::filesystem::create_directories(dir);
    detail::writeLookupFile(dir / kPhenxLookupFile, lookups.phenxLabels());
    detail::writeLookupFile(dir / kPatientLookupFile, lookups.patientLabels());
}

inline LookupTables readLookupTables(const std::filesystem::path &dir) {
    LookupTables lookups;
    const auto phenx = detail::readLookupFile(dir / kPhenxLookupFile);
    const auto patients = detail::readLookupFile(dir / kPatientLookupFile);
    for (const auto &label : phenx) lookups.internPhenx(label);
    for (const auto &label : patients) lookups.internPatient(label);
    if (lookups.phenxCount() != phenx.size() || lookups.patientCount() != patients.size()) {
        throw Error(ErrorKind::MalformedRow, "lookup tables in " + dir.string() + " contain duplicate labels");
    }
    return lookups;
}

struct TranslatedSequence {
    std::string patient;
    std::string start;
    std::string end;
    std::uint32_t durationDays = 0;
    friend bool operator==(const TranslatedSequence &, const TranslatedSequence &) = default;
    friend auto operator<=>(const TranslatedSequence &, const TranslatedSequence &) = default;
};

inline std::vector<TranslatedSequence> translateSequences(std::span<const TemporalSequence> seqs,
                                                          const LookupTables &lookups) {
    std::vector<TranslatedSequence> out;
    out.reserve(seqs.size());
    for (const auto &s : seqs) {
        const auto [start, end] = decodeSequence(s.seq);
        out.push_back({lookups.patientLabel(s.patient), lookups.phenxLabel(start), lookups.phenxLabel(end), s.duration.days});
    }
    return out;
}

inline void writeTranslatedCsv(std::ostream &out, std::span<const TranslatedSequence> rows) {
    out << "patient,start_phenx,end_phenx,duration_days\n";
    for (const auto &r : rows) {
        csv::writeField(out, r.patient);
        out << ',';
        csv::writeField(out, r.start);
        out << ',';
        csv::writeField(out, r.end);
        out << ',' << r.durationDays << '\n';
    }
}

/// Keeps, per (patient, phenX), only the earliest entry; ties go to the earlier input position.
inline std::vector<DbMartEntry> firstOccurrenceFilter(std::span<const DbMartEntry> entries) {
    auto key = [](const DbMartEntry &e) { return (std::uint64_t{e.patient.value} << 32) | e.phenx.value; };
    std::unordered_map<std::uint64_t, std::size_t> earliest;
    earliest.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto [it, inserted] = earliest.try_emplace(key(entries[i]), i);
        if (!inserted && entries[i].date < entries[it->second].date) it->second = i;
    }
    std::vector<DbMartEntry> out;
    out.reserve(earliest.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (earliest.at(key(entries[i])) == i) out.push_back(entries[i]);
    }
    return out;
}

}  // namespace tspm
