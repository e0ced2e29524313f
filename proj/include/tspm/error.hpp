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

#include <stdexcept>
#include <string>
#include <string_view>

namespace tspm {

enum class ErrorKind {
    EncodingOverflow,
    DecodingOutOfRange,
    PackOverflow,
    MissingColumn,
    MalformedDate,
    MalformedRow,
    PhenxOverflow,
    PatientOverflow,
    UnknownId,
    CapacityExceeded,
    IoFailure,
    ArithmeticOverflow,
    PatientExceedsLimit,
    DegenerateCohort,
    InvalidArgument,
};

inline std::string_view toString(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EncodingOverflow: return "EncodingOverflow";
        case ErrorKind::DecodingOutOfRange: return "DecodingOutOfRange";
        case ErrorKind::PackOverflow: return "PackOverflow";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::MalformedDate: return "MalformedDate";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::PhenxOverflow: return "PhenxOverflow";
        case ErrorKind::PatientOverflow: return "PatientOverflow";
        case ErrorKind::UnknownId: return "UnknownId";
        case ErrorKind::CapacityExceeded: return "CapacityExceeded";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
        case ErrorKind::PatientExceedsLimit: return "PatientExceedsLimit";
        case ErrorKind::DegenerateCohort: return "DegenerateCohort";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(toString(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace tspm
