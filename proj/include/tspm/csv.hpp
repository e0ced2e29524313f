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

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tspm/error.hpp"

namespace tspm::csv {

/// Minimal RFC-4180 reader over an in-memory buffer. Accepts LF or CRLF record ends
/// and quoted fields containing commas, doubled quotes and line breaks.
class Reader {
  public:
    explicit Reader(std::string_view text) : text_(text) {
        // UTF-8 byte order mark
        if (text_.size() >= 3 && text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    }

    /// Reads the next record into `fields`; returns false at end of input.
    bool next(std::vector<std::string> &fields) {
        fields.clear();
        if (pos_ >= text_.size()) return false;
        ++record_;
        std::string field;
        bool quoted = false;
        bool wasQuoted = false;
        while (pos_ < text_.size()) {
            const char c = text_[pos_++];
            if (quoted) {
                if (c == '"') {
                    if (pos_ < text_.size() && text_[pos_] == '"') {
                        field.push_back('"');
                        ++pos_;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
                continue;
            }
            if (c == '"' && field.empty() && !wasQuoted) {
                quoted = true;
                wasQuoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                wasQuoted = false;
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(c);
            }
        }
        if (quoted) {
            throw Error(ErrorKind::MalformedRow, "unterminated quoted field in record " + std::to_string(record_));
        }
        fields.push_back(std::move(field));
        return true;
    }

    /// 1-based index of the record most recently returned by next().
    std::size_t record() const { return record_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t record_ = 0;
};

inline void writeField(std::ostream &out, std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        out << field;
        return;
    }
    out << '"';
    for (const char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace tspm::csv
