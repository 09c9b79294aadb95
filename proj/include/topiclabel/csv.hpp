#pragma once

// Minimal RFC 4180 reader/writer: quoted fields may contain the delimiter,
// doubled quotes and line breaks. CRLF and LF record terminators are both
// accepted.

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/text_util.hpp"

namespace topiclabel::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical line where the record starts
};

class Reader {
 public:
  Reader(std::string_view data, char delimiter) : data_(data), delim_(delimiter) {
    // tolerate a UTF-8 byte order mark
    if (data_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  /// Next record, or nullopt at end of input. An unterminated quoted field
  /// runs to end of input.
  std::optional<Record> next() {
    if (pos_ >= data_.size()) return std::nullopt;
    Record rec;
    rec.line = line_;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
          } else {
            in_quotes = false;
            ++pos_;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
          ++pos_;
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        in_quotes = true;
        field_was_quoted = true;
        ++pos_;
      } else if (c == delim_) {
        rec.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        ++pos_;
      } else if (c == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n') {
        pos_ += 2;
        ++line_;
        rec.fields.push_back(std::move(field));
        return rec;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
        rec.fields.push_back(std::move(field));
        return rec;
      } else {
        field.push_back(c);
        ++pos_;
      }
    }
    rec.fields.push_back(std::move(field));
    return rec;
  }

 private:
  std::string_view data_;
  char delim_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline bool is_blank(const Record& r) {
  return r.fields.size() == 1 && r.fields[0].empty();
}

inline std::string quote(std::string_view field, char delimiter = ',') {
  const bool needs = field.find_first_of(std::string{'"', '\n', '\r', delimiter}) !=
                     std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields,
                      char delimiter = ',') {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << delimiter;
    os << quote(fields[i], delimiter);
  }
  os << '\n';
}

}  // namespace topiclabel::csv
