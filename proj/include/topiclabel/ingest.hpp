#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/csv.hpp"
#include "topiclabel/text_util.hpp"

namespace topiclabel {

struct RawTweet {
  std::int64_t id = 0;
  std::string text;
  std::map<std::string, std::string> meta;
};

struct SkippedRow {
  std::size_t line = 0;
  std::size_t fields = 0;
  std::size_t expected = 0;
};

struct Dataset {
  std::vector<RawTweet> tweets;
  std::vector<SkippedRow> skipped;
  std::size_t data_rows = 0;  // tweets.size() + skipped.size()
};

struct GoldEntry {
  std::int64_t tweet_id = 0;
  std::string label;
};

struct GoldLabelSet {
  std::vector<GoldEntry> entries;
};

/// Parse a tweet table held in memory. Rows with the wrong number of fields
/// are skipped and reported; ids are assigned 0..n-1 over kept rows.
inline Dataset parse_dataset(std::string_view content, std::string_view text_column,
                             char delimiter = ',') {
  const std::string clean = text::sanitize_utf8(content);
  csv::Reader reader(clean, delimiter);
  auto header = reader.next();
  if (!header || csv::is_blank(*header)) throw Error("dataset has no header row");
  const auto& cols = header->fields;
  const auto it = std::find(cols.begin(), cols.end(), text_column);
  if (it == cols.end()) {
    throw Error("column '" + std::string(text_column) + "' not found in header");
  }
  const auto text_idx = static_cast<std::size_t>(it - cols.begin());

  Dataset ds;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec)) continue;
    ++ds.data_rows;
    if (rec->fields.size() != cols.size()) {
      ds.skipped.push_back({rec->line, rec->fields.size(), cols.size()});
      continue;
    }
    RawTweet t;
    t.id = static_cast<std::int64_t>(ds.tweets.size());
    t.text = std::move(rec->fields[text_idx]);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c != text_idx) t.meta.emplace(cols[c], std::move(rec->fields[c]));
    }
    ds.tweets.push_back(std::move(t));
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, std::string_view text_column = "OriginalTweet",
                            char delimiter = ',') {
  return parse_dataset(text::read_file(path), text_column, delimiter);
}

/// Pool several files into one dataset, renumbering ids across files.
inline Dataset load_datasets(const std::vector<std::string>& paths,
                             std::string_view text_column = "OriginalTweet",
                             char delimiter = ',') {
  Dataset all;
  for (const auto& p : paths) {
    auto ds = load_dataset(p, text_column, delimiter);
    for (auto& t : ds.tweets) {
      t.id = static_cast<std::int64_t>(all.tweets.size());
      all.tweets.push_back(std::move(t));
    }
    all.skipped.insert(all.skipped.end(), ds.skipped.begin(), ds.skipped.end());
    all.data_rows += ds.data_rows;
  }
  return all;
}

inline void write_dataset(std::ostream& os, const std::vector<RawTweet>& tweets,
                          std::string_view text_column = "OriginalTweet") {
  csv::write_row(os, {"id", std::string(text_column)});
  for (const auto& t : tweets) csv::write_row(os, {std::to_string(t.id), t.text});
}

namespace detail {

inline bool parse_int64(std::string_view s, std::int64_t& out) {
  s = text::trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Two-column `tweet_id,label` table. A first row whose id cell reads
/// `tweet_id` or `id` is treated as a header.
inline GoldLabelSet parse_gold_labels(std::string_view content) {
  const std::string clean = text::sanitize_utf8(content);
  csv::Reader reader(clean, ',');
  GoldLabelSet gold;
  std::set<std::int64_t> seen;
  bool first = true;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec)) continue;
    const auto& f = rec->fields;
    const std::string id_cell = text::to_lower_ascii(text::trim(f[0]));
    if (first && (id_cell == "tweet_id" || id_cell == "id")) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() < 2) {
      throw Error("gold labels line " + std::to_string(rec->line) + ": expected 2 fields");
    }
    std::int64_t id = 0;
    if (!detail::parse_int64(f[0], id)) {
      throw Error("gold labels line " + std::to_string(rec->line) + ": non-integer id '" +
                  f[0] + "'");
    }
    if (!seen.insert(id).second) {
      throw Error("gold labels: duplicate tweet_id " + std::to_string(id));
    }
    std::string label = text::to_lower_ascii(text::trim(f[1]));
    if (label.empty()) {
      throw Error("gold labels line " + std::to_string(rec->line) + ": empty label");
    }
    gold.entries.push_back({id, std::move(label)});
  }
  return gold;
}

inline GoldLabelSet load_gold_labels(const std::string& path) {
  return parse_gold_labels(text::read_file(path));
}

}  // namespace topiclabel
