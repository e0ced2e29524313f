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

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tspm/core.hpp"
#include "tspm/csv.hpp"

namespace tspm {

// .tseq layout: 12-byte records, u64 sequence id then u32 duration in days, both little-endian.
inline constexpr std::size_t kTseqRecordSize = 12;
inline constexpr std::string_view kTseqExtension = ".tseq";
inline constexpr std::string_view kManifestFile = "manifest.tsv";
inline constexpr std::string_view kSequencesFile = "sequences.csv";

struct TseqRecord {
    SequenceId seq;
    Duration duration;
    friend bool operator==(const TseqRecord &, const TseqRecord &) = default;
};

inline std::array<unsigned char, kTseqRecordSize> encodeTseqRecord(SequenceId seq, Duration duration) {
    std::array<unsigned char, kTseqRecordSize> bytes{};
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(seq.value >> (8 * i));
    for (int i = 0; i < 4; ++i) bytes[8 + i] = static_cast<unsigned char>(duration.days >> (8 * i));
    return bytes;
}

inline TseqRecord decodeTseqRecord(std::span<const unsigned char, kTseqRecordSize> bytes) {
    std::uint64_t seq = 0;
    std::uint32_t days = 0;
    for (int i = 0; i < 8; ++i) seq |= std::uint64_t{bytes[i]} << (8 * i);
    for (int i = 0; i < 4; ++i) days |= std::uint32_t{bytes[8 + i]} << (8 * i);
    return {SequenceId{seq}, Duration{days}};
}

/// Writes the records of `seqs` in the given order; the patient id is not stored.
inline void writeTseqFile(const std::filesystem::path &path, std::span<const TemporalSequence> seqs) {
    std::vector<unsigned char> buffer;
    buffer.reserve(seqs.size() * kTseqRecordSize);
    for (const auto &s : seqs) {
        const auto bytes = encodeTseqRecord(s.seq, s.duration);
        buffer.insert(buffer.end(), bytes.begin(), bytes.end());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot create " + path.string());
    out.write(reinterpret_cast<const char *>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

inline std::vector<TseqRecord> readTseqFile(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % kTseqRecordSize != 0) {
        throw Error(ErrorKind::IoFailure, path.string() + ": size " + std::to_string(bytes.size()) +
                                              " is not a multiple of " + std::to_string(kTseqRecordSize));
    }
    std::vector<TseqRecord> records;
    records.reserve(bytes.size() / kTseqRecordSize);
    for (std::size_t at = 0; at < bytes.size(); at += kTseqRecordSize) {
        records.push_back(decodeTseqRecord(std::span<const unsigned char, kTseqRecordSize>(bytes.data() + at, kTseqRecordSize)));
    }
    return records;
}

struct ManifestEntry {
    PatientId patient;
    std::string file;
    std::uint64_t records = 0;
    friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

inline void writeManifest(const std::filesystem::path &path, std::span<const ManifestEntry> manifest) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot create " + path.string());
    for (const auto &m : manifest) out << m.patient.value << '\t' << m.file << '\t' << m.records << '\n';
    if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

namespace detail {

template <typename Int>
Int parseUnsigned(std::string_view text, const std::string &context) {
    Int value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorKind::MalformedRow, context + ": '" + std::string(text) + "' is not an unsigned integer");
    }
    return value;
}

}  // namespace detail

inline std::vector<ManifestEntry> readManifest(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    std::vector<ManifestEntry> manifest;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw Error(ErrorKind::MalformedRow, path.string() + ": expected 3 tab-separated fields in '" + line + "'");
        }
        manifest.push_back(
            {PatientId{detail::parseUnsigned<std::uint32_t>(std::string_view(line).substr(0, t1), path.string())},
             line.substr(t1 + 1, t2 - t1 - 1),
             detail::parseUnsigned<std::uint64_t>(std::string_view(line).substr(t2 + 1), path.string())});
    }
    return manifest;
}

/// Numeric sequence table used between pipeline stages: patient_id,seq_id,duration_days.
inline void writeSequencesCsv(const std::filesystem::path &path, std::span<const TemporalSequence> seqs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot create " + path.string());
    out << "patient_id,seq_id,duration_days\n";
    std::string line;
    for (const auto &s : seqs) {
        line.clear();
        line += std::to_string(s.patient.value);
        line += ',';
        line += std::to_string(s.seq.value);
        line += ',';
        line += std::to_string(s.duration.days);
        line += '\n';
        out << line;
    }
    if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

inline std::vector<TemporalSequence> readSequencesCsv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    csv::Reader reader(text);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 3 || fields[0] != "patient_id" || fields[1] != "seq_id" ||
        fields[2] != "duration_days") {
        throw Error(ErrorKind::MissingColumn, path.string() + ": expected header patient_id,seq_id,duration_days");
    }
    std::vector<TemporalSequence> out;
    while (reader.next(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        const std::string context = path.string() + " record " + std::to_string(reader.record());
        if (fields.size() != 3) throw Error(ErrorKind::MalformedRow, context + ": expected 3 fields");
        const SequenceId seq{detail::parseUnsigned<std::uint64_t>(fields[1], context)};
        if (seq.value >= kSequenceLimit) throw Error(ErrorKind::DecodingOutOfRange, context + ": sequence id too large");
        out.push_back({seq, Duration{detail::parseUnsigned<std::uint32_t>(fields[2], context)},
                       PatientId{detail::parseUnsigned<std::uint32_t>(fields[0], context)}});
    }
    return out;
}

}  // namespace tspm
