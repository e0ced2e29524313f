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
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "tspm/contingency.hpp"
#include "tspm/core.hpp"
#include "tspm/ingest.hpp"
#include "tspm/parallel.hpp"
#include "tspm/query.hpp"

namespace tspm {

struct PostCovidConfig {
    PhenxId covidPhenx;
    std::uint32_t minPersistenceMonths = 2;
    double correlationThreshold = 0.7;
    double significanceAlpha = 0.05;
    DurationUnit bucketUnit = DurationUnit::months;
    unsigned workerCount = 0;
};

/// A symptom seen at least twice after covid for one patient, spread over enough buckets.
struct CandidateSymptom {
    PatientId patient;
    PhenxId symptom;
    std::vector<Duration> observations;  // covid -> symptom durations, ascending
    std::uint32_t minBucket = 0;
    std::uint32_t maxBucket = 0;
};

struct ConfirmedSymptom {
    PatientId patient;
    PhenxId symptom;
    std::uint64_t observationCount = 0;
    std::uint32_t spanBuckets = 0;
};

/// Exclusion is correlation-based evidence, not a causal claim.
struct ExcludedSymptom {
    PatientId patient;
    PhenxId symptom;
    SequenceId excludingSequence;
    std::uint32_t bucket = 0;  // duration bucket of the correlated (symptom, bucket) tuple
    double correlation = 0.0;
    double pValue = 1.0;
};

struct PostCovidReport {
    std::vector<ConfirmedSymptom> confirmed;
    std::vector<ExcludedSymptom> excluded;
};

inline void validate(const PostCovidConfig &config) {
    if (!(config.correlationThreshold >= 0.0 && config.correlationThreshold <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "correlation threshold must lie in [0, 1]");
    }
    if (!(config.significanceAlpha > 0.0 && config.significanceAlpha < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "significance level must lie in (0, 1)");
    }
}

/// Candidates: covid -> symptom pairs per patient that recur and persist across buckets.
inline std::vector<CandidateSymptom> extractCandidates(std::span<const TemporalSequence> seqs,
                                                       const PostCovidConfig &config) {
    validate(config);
    const PhenxId covid = config.covidPhenx;
    auto fromCovid = transitiveEndSequences(seqs, covid);
    std::erase_if(fromCovid, [covid](const TemporalSequence &s) {
        return startOf(s.seq) != covid || endOf(s.seq) == covid;
    });
    std::sort(fromCovid.begin(), fromCovid.end(), CanonicalOrder{});

    std::vector<CandidateSymptom> out;
    for (std::size_t i = 0; i < fromCovid.size();) {
        std::size_t j = i;
        while (j < fromCovid.size() && fromCovid[j].patient == fromCovid[i].patient && fromCovid[j].seq == fromCovid[i].seq) {
            ++j;
        }
        if (j - i >= 2) {
            CandidateSymptom c{fromCovid[i].patient, endOf(fromCovid[i].seq), {}, 0, 0};
            for (std::size_t k = i; k < j; ++k) c.observations.push_back(fromCovid[k].duration);
            c.minBucket = durationInUnit(c.observations.front(), config.bucketUnit);
            c.maxBucket = durationInUnit(c.observations.back(), config.bucketUnit);
            if (c.maxBucket - c.minBucket >= config.minPersistenceMonths) out.push_back(std::move(c));
        }
        i = j;
    }
    return out;
}

namespace detail {

using PatientSet = std::vector<std::uint32_t>;  // sorted cohort indices

inline stats::Table2x2 crossTab(const PatientSet &x, const PatientSet &y, std::uint64_t cohort) {
    std::vector<std::uint32_t> both;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
    stats::Table2x2 t;
    t.both = both.size();
    t.xOnly = x.size() - both.size();
    t.yOnly = y.size() - both.size();
    t.neither = cohort - t.both - t.xOnly - t.yOnly;
    return t;
}

}  // namespace detail

/// Splits candidates into confirmed and excluded. A candidate is excluded for its patient when
/// the patient also has an alternate sequence A -> symptom (A neither covid nor the symptom)
/// whose cohort-level indicator correlates with one of the patient's (symptom, bucket) tuples
/// at phi >= threshold with p <= alpha.
inline PostCovidReport correlationExclusion(std::span<const TemporalSequence> seqs,
                                            std::span<const CandidateSymptom> candidates,
                                            const PostCovidConfig &config) {
    validate(config);
    PostCovidReport report;
    if (candidates.empty()) return report;

    std::vector<std::uint32_t> cohort;
    for (const auto &s : seqs) cohort.push_back(s.patient.value);
    std::sort(cohort.begin(), cohort.end());
    cohort.erase(std::unique(cohort.begin(), cohort.end()), cohort.end());
    if (cohort.size() < 2) {
        throw Error(ErrorKind::DegenerateCohort, "correlation needs at least two patients, cohort has " +
                                                     std::to_string(cohort.size()));
    }
    auto cohortIndex = [&](PatientId p) {
        return static_cast<std::uint32_t>(std::lower_bound(cohort.begin(), cohort.end(), p.value) - cohort.begin());
    };

    std::vector<PhenxId> symptoms;
    for (const auto &c : candidates) symptoms.push_back(c.symptom);
    std::sort(symptoms.begin(), symptoms.end());
    symptoms.erase(std::unique(symptoms.begin(), symptoms.end()), symptoms.end());

    const PhenxId covid = config.covidPhenx;
    std::vector<std::vector<const TemporalSequence *>> endingIn(symptoms.size());
    for (const auto &s : seqs) {
        const auto it = std::lower_bound(symptoms.begin(), symptoms.end(), endOf(s.seq));
        if (it != symptoms.end() && *it == endOf(s.seq)) endingIn[it - symptoms.begin()].push_back(&s);
    }
    std::vector<std::vector<std::pair<std::size_t, ExcludedSymptom>>> exclusions(symptoms.size());

    parallel::forEachTask(symptoms.size(), parallel::resolveWorkers(config.workerCount), [&](std::size_t si) {
        const PhenxId symptom = symptoms[si];
        std::map<std::uint64_t, detail::PatientSet> alternates;   // alternate seq id -> patients
        std::map<std::uint32_t, detail::PatientSet> tuples;       // bucket -> patients with covid -> symptom there
        for (const TemporalSequence *s : endingIn[si]) {
            const PhenxId start = startOf(s->seq);
            if (start == covid) {
                tuples[durationInUnit(s->duration, config.bucketUnit)].push_back(cohortIndex(s->patient));
            } else if (start != symptom) {
                alternates[s->seq.value].push_back(cohortIndex(s->patient));
            }
        }
        auto normalize = [](detail::PatientSet &set) {
            std::sort(set.begin(), set.end());
            set.erase(std::unique(set.begin(), set.end()), set.end());
        };
        for (auto &[_, set] : alternates) normalize(set);
        for (auto &[_, set] : tuples) normalize(set);

        std::map<std::pair<std::uint64_t, std::uint32_t>, stats::Association> cache;
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            const auto &cand = candidates[ci];
            if (cand.symptom != symptom) continue;
            const std::uint32_t me = cohortIndex(cand.patient);
            std::set<std::uint32_t> buckets;
            for (const auto d : cand.observations) buckets.insert(durationInUnit(d, config.bucketUnit));

            std::optional<ExcludedSymptom> best;
            for (const auto &[alt, holders] : alternates) {
                if (!std::binary_search(holders.begin(), holders.end(), me)) continue;
                for (const auto bucket : buckets) {
                    auto key = std::make_pair(alt, bucket);
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        it = cache.emplace(key, stats::associate(detail::crossTab(holders, tuples[bucket], cohort.size())))
                                 .first;
                    }
                    const auto &assoc = it->second;
                    if (assoc.phi < config.correlationThreshold || assoc.pValue > config.significanceAlpha) continue;
                    if (!best || assoc.phi > best->correlation ||
                        (assoc.phi == best->correlation && assoc.pValue < best->pValue)) {
                        best = ExcludedSymptom{cand.patient, symptom, SequenceId{alt}, bucket, assoc.phi, assoc.pValue};
                    }
                }
            }
            if (best) exclusions[si].emplace_back(ci, *best);
        }
    });

    std::vector<std::optional<ExcludedSymptom>> verdict(candidates.size());
    for (auto &list : exclusions) {
        for (auto &[ci, ex] : list) verdict[ci] = ex;
    }
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto &c = candidates[ci];
        if (verdict[ci]) {
            report.excluded.push_back(*verdict[ci]);
        } else {
            report.confirmed.push_back({c.patient, c.symptom, c.observations.size(), c.maxBucket - c.minBucket});
        }
    }
    return report;
}

inline PostCovidReport identifyPostCovid(std::span<const TemporalSequence> seqs, const PostCovidConfig &config) {
    const auto candidates = extractCandidates(seqs, config);
    return correlationExclusion(seqs, candidates, config);
}

inline void writeConfirmedCsv(std::ostream &out, std::span<const ConfirmedSymptom> rows, const LookupTables &lookups) {
    out << "patient,symptom,observations,span_buckets\n";
    for (const auto &r : rows) {
        csv::writeField(out, lookups.patientLabel(r.patient));
        out << ',';
        csv::writeField(out, lookups.phenxLabel(r.symptom));
        out << ',' << r.observationCount << ',' << r.spanBuckets << '\n';
    }
}

inline void writeExcludedCsv(std::ostream &out, std::span<const ExcludedSymptom> rows, const LookupTables &lookups) {
    out << "patient,symptom,excluding_start,excluding_end,bucket,phi,p_value,basis\n";
    const auto precision = out.precision(12);
    for (const auto &r : rows) {
        csv::writeField(out, lookups.patientLabel(r.patient));
        out << ',';
        csv::writeField(out, lookups.phenxLabel(r.symptom));
        out << ',';
        csv::writeField(out, lookups.phenxLabel(startOf(r.excludingSequence)));
        out << ',';
        csv::writeField(out, lookups.phenxLabel(endOf(r.excludingSequence)));
        out << ',' << r.bucket << ',' << r.correlation << ',' << r.pValue << ",correlation\n";
    }
    out.precision(precision);
}

}  // namespace tspm
