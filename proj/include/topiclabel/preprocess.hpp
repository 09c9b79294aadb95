#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "topiclabel/bundled_data.hpp"
#include "topiclabel/ingest.hpp"
#include "topiclabel/text_util.hpp"

namespace topiclabel {

enum class NonAsciiPolicy { strip_chars, drop_tweet };

struct ContractionTable {
  std::unordered_map<std::string, std::string> entries;

  static ContractionTable parse(std::string_view content) {
    ContractionTable t;
    for (const auto& line : text::nonempty_lines(content)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw Error("contraction line without TAB: " + line);
      std::string pattern = text::to_lower_ascii(text::trim(std::string_view(line).substr(0, tab)));
      std::string expansion(text::trim(std::string_view(line).substr(tab + 1)));
      if (pattern.empty()) throw Error("empty contraction pattern");
      t.entries[std::move(pattern)] = std::move(expansion);
    }
    return t;
  }
};

struct PipelineConfig {
  std::unordered_set<std::string> stopwords;
  ContractionTable contractions;
  std::size_t min_token_len = 2;
  std::size_t min_tokens_keep = 1;
  NonAsciiPolicy non_ascii_policy = NonAsciiPolicy::strip_chars;

  static std::unordered_set<std::string> parse_stopwords(std::string_view content) {
    std::unordered_set<std::string> out;
    for (auto& w : text::nonempty_lines(content)) out.insert(text::to_lower_ascii(w));
    return out;
  }

  /// Bundled stopword list and contraction table with default thresholds.
  static PipelineConfig defaults() {
    PipelineConfig cfg;
    cfg.stopwords = parse_stopwords(bundled::stopwords);
    cfg.contractions = ContractionTable::parse(bundled::contractions);
    return cfg;
  }

  void validate() const {
    if (min_token_len < 1) throw Error("min_token_len must be >= 1");
  }
};

struct CleanDoc {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
  bool dropped = false;
};

namespace detail {

inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return text::is_ascii_alpha(c) || text::is_ascii_digit(c) || c == '_' || u >= 0x80;
}

// Left quote, right quote and modifier-letter apostrophe, as UTF-8.
inline std::string fold_apostrophes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && s[i] == '\xE2' && s[i + 1] == '\x80' &&
        (s[i + 2] == '\x98' || s[i + 2] == '\x99')) {
      out.push_back('\'');
      i += 2;
    } else if (i + 1 < s.size() && s[i] == '\xCA' && s[i + 1] == '\xBC') {
      out.push_back('\'');
      i += 1;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline bool starts_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.substr(i, prefix.size()) == prefix;
}

inline std::string remove_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary = i == 0 || !is_word_byte(s[i - 1]);
    if (boundary && (starts_at(s, i, "http://") || starts_at(s, i, "https://") ||
                     starts_at(s, i, "www.") || starts_at(s, i, "t.co/"))) {
      while (i < s.size() && !text::is_space(s[i])) ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Drops `marker` together with the word that follows it.
inline std::string remove_marked_words(std::string_view s, char marker) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == marker && i + 1 < s.size() && is_word_byte(s[i + 1])) {
      ++i;
      while (i < s.size() && is_word_byte(s[i])) ++i;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

inline std::string expand_contractions(std::string_view s, const ContractionTable& table) {
  if (table.entries.empty()) return std::string(s);
  std::string out;
  out.reserve(s.size() + 16);
  std::size_t i = 0;
  const auto in_run = [](char c) { return text::is_ascii_lower(c) || c == '\''; };
  while (i < s.size()) {
    if (!in_run(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && in_run(s[j])) ++j;
    std::string_view run = s.substr(i, j - i);
    if (run.find('\'') == std::string_view::npos) {
      out.append(run);
      i = j;
      continue;
    }
    // Longest match first: the whole run, then with surrounding quotes peeled.
    std::size_t lead = 0, tail = 0;
    bool replaced = false;
    while (lead + tail < run.size()) {
      auto core = run.substr(lead, run.size() - lead - tail);
      auto hit = table.entries.find(std::string(core));
      if (hit != table.entries.end()) {
        out.append(run.substr(0, lead));
        out.append(hit->second);
        out.append(run.substr(run.size() - tail));
        replaced = true;
        break;
      }
      if (run[run.size() - 1 - tail] == '\'' ) {
        ++tail;
      } else if (run[lead] == '\'') {
        ++lead;
      } else {
        break;
      }
    }
    if (!replaced) out.append(run);
    i = j;
  }
  return out;
}

inline std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (text::is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

// Typographic punctuation that does not mark a tweet as non-English.
inline bool is_benign_non_ascii(std::uint32_t cp) {
  return cp == 0xA0 || (cp >= 0x2010 && cp <= 0x201F) || cp == 0x2026;
}

}  // namespace detail

/// True when the text has a non-ASCII character other than typographic
/// quotes, dashes or ellipses.
inline bool has_foreign_characters(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
    std::uint32_t cp = len == 4 ? c & 0x07 : len == 3 ? c & 0x0F : c & 0x1F;
    for (std::size_t k = 1; k < len && i + k < s.size(); ++k) {
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    }
    if (len == 1 || !detail::is_benign_non_ascii(cp)) return true;
    i += len;
  }
  return false;
}

/// Lowercase, drop links/mentions/hashtags, expand contractions, turn
/// every other non-letter ASCII character into a space, collapse and trim
/// whitespace, and remove non-ASCII characters. Output matches
/// `([a-z]+( [a-z]+)*)?`.
inline std::string normalize_text(std::string_view input, const PipelineConfig& cfg) {
  std::string s = text::to_lower_ascii(detail::fold_apostrophes(input));
  s = detail::remove_links(s);
  s = detail::remove_marked_words(s, '@');
  s = detail::remove_marked_words(s, '#');
  s = detail::expand_contractions(s, cfg.contractions);
  for (char& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && !text::is_ascii_lower(c) && !text::is_space(c)) c = ' ';
  }
  s = detail::collapse_spaces(s);
  std::string ascii;
  ascii.reserve(s.size());
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x80) ascii.push_back(c);
  }
  return detail::collapse_spaces(ascii);
}

inline std::vector<std::string> tokenize(std::string_view normalized) {
  return text::split_whitespace(normalized);
}

inline std::vector<std::string> filter_tokens(std::vector<std::string> tokens,
                                              const PipelineConfig& cfg) {
  std::erase_if(tokens, [&](const std::string& t) {
    return t.size() < cfg.min_token_len || cfg.stopwords.contains(t);
  });
  return tokens;
}

inline CleanDoc preprocess_tweet(const RawTweet& tweet, const PipelineConfig& cfg) {
  CleanDoc doc;
  doc.id = tweet.id;
  if (cfg.non_ascii_policy == NonAsciiPolicy::drop_tweet && has_foreign_characters(tweet.text)) {
    doc.dropped = true;
    return doc;
  }
  doc.tokens = filter_tokens(tokenize(normalize_text(tweet.text, cfg)), cfg);
  doc.dropped = doc.tokens.size() < cfg.min_tokens_keep;
  return doc;
}

/// One CleanDoc per input tweet, in input order; dropped tweets stay in the
/// output as markers so ids remain aligned.
inline std::vector<CleanDoc> preprocess_corpus(const std::vector<RawTweet>& tweets,
                                               const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<CleanDoc> docs;
  docs.reserve(tweets.size());
  for (const auto& t : tweets) docs.push_back(preprocess_tweet(t, cfg));
  return docs;
}

}  // namespace topiclabel
