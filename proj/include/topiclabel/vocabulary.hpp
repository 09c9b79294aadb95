#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "topiclabel/preprocess.hpp"

namespace topiclabel {

using WordId = std::int32_t;

struct Vocabulary {
  std::unordered_map<std::string, WordId> word_to_id;
  std::vector<std::string> id_to_word;
  std::vector<std::int64_t> doc_freq;

  std::size_t size() const { return id_to_word.size(); }

  /// -1 when the word is out of vocabulary.
  WordId find(const std::string& w) const {
    auto it = word_to_id.find(w);
    return it == word_to_id.end() ? -1 : it->second;
  }

  WordId add(const std::string& w, std::int64_t df = 0) {
    auto [it, inserted] = word_to_id.emplace(w, static_cast<WordId>(id_to_word.size()));
    if (inserted) {
      id_to_word.push_back(w);
      doc_freq.push_back(df);
    }
    return it->second;
  }
};

struct BowDoc {
  std::int64_t doc_id = 0;
  std::vector<std::pair<WordId, std::int32_t>> counts;  // sorted by word id, counts >= 1

  std::int64_t length() const {
    std::int64_t n = 0;
    for (const auto& [w, c] : counts) n += c;
    return n;
  }
};

/// Keeps words whose document frequency over non-dropped docs lies in
/// [min_df, max_df_fraction * D]. Ids follow first occurrence.
inline Vocabulary build_vocabulary(const std::vector<CleanDoc>& docs, std::int64_t min_df = 2,
                                   double max_df_fraction = 0.5) {
  std::unordered_map<std::string, std::int64_t> df;
  std::vector<std::string> order;
  std::int64_t num_docs = 0;
  for (const auto& d : docs) {
    if (d.dropped) continue;
    ++num_docs;
    std::unordered_set<std::string_view> seen;
    for (const auto& t : d.tokens) {
      if (!seen.insert(t).second) continue;
      auto [it, inserted] = df.emplace(t, 0);
      if (inserted) order.push_back(t);
      ++it->second;
    }
  }
  const double max_df = max_df_fraction * static_cast<double>(num_docs);
  Vocabulary vocab;
  for (const auto& w : order) {
    const auto n = df[w];
    if (n >= min_df && static_cast<double>(n) <= max_df) vocab.add(w, n);
  }
  if (vocab.size() == 0) throw Error("empty vocabulary: every word was filtered out");
  return vocab;
}

/// Out-of-vocabulary tokens are dropped.
inline BowDoc doc2bow(const CleanDoc& doc, const Vocabulary& vocab) {
  BowDoc bow;
  bow.doc_id = doc.id;
  std::unordered_map<WordId, std::int32_t> counts;
  for (const auto& t : doc.tokens) {
    const WordId w = vocab.find(t);
    if (w >= 0) ++counts[w];
  }
  bow.counts.assign(counts.begin(), counts.end());
  std::sort(bow.counts.begin(), bow.counts.end());
  return bow;
}

}  // namespace topiclabel
