#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topiclabel/ingest.hpp"

namespace topiclabel {

using Prediction = std::pair<std::int64_t, std::string>;

struct ConfusionMatrix {
  std::vector<std::string> labels;          // sorted union of gold and predicted labels
  std::vector<std::vector<std::int64_t>> counts;  // rows gold, columns predicted

  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& r : counts)
      for (auto c : r) n += c;
    return n;
  }
  std::int64_t trace() const {
    std::int64_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
  }
  std::size_t index_of(const std::string& label) const {
    return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), label) -
                                    labels.begin());
  }
};

struct LabelStats {
  std::string label;
  std::int64_t support = 0;  // gold count
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace detail {

inline std::string canonical_label(std::string_view s) { return text::to_lower_ascii(text::trim(s)); }

// (gold, predicted) per gold entry, in gold order.
inline std::vector<std::pair<std::string, std::string>> align(const std::vector<Prediction>& predicted,
                                                              const GoldLabelSet& gold) {
  if (gold.entries.empty()) throw Error("evaluation: empty gold label set");
  std::unordered_map<std::int64_t, std::string> pred;
  for (const auto& [id, label] : predicted) pred[id] = canonical_label(label);
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::int64_t> missing;
  for (const auto& e : gold.entries) {
    auto it = pred.find(e.tweet_id);
    if (it == pred.end()) {
      missing.push_back(e.tweet_id);
      continue;
    }
    out.emplace_back(canonical_label(e.label), it->second);
  }
  if (!missing.empty()) {
    std::string msg = "evaluation: no prediction for tweet ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + std::to_string(missing[i]);
    if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw Error(msg);
  }
  return out;
}

}  // namespace detail

/// Fraction of gold entries whose prediction matches (case-insensitive,
/// trimmed).
inline double accuracy(const std::vector<Prediction>& predicted, const GoldLabelSet& gold) {
  const auto pairs = detail::align(predicted, gold);
  std::int64_t hits = 0;
  for (const auto& [g, p] : pairs) hits += g == p;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

inline ConfusionMatrix confusion(const std::vector<Prediction>& predicted, const GoldLabelSet& gold) {
  const auto pairs = detail::align(predicted, gold);
  std::set<std::string> names;
  for (const auto& [g, p] : pairs) {
    names.insert(g);
    names.insert(p);
  }
  ConfusionMatrix m;
  m.labels.assign(names.begin(), names.end());
  m.counts.assign(m.labels.size(), std::vector<std::int64_t>(m.labels.size(), 0));
  for (const auto& [g, p] : pairs) ++m.counts[m.index_of(g)][m.index_of(p)];
  return m;
}

/// Per-label precision / recall / F1 derived from a confusion matrix.
inline std::vector<LabelStats> per_label_stats(const ConfusionMatrix& m) {
  std::vector<LabelStats> out;
  const std::size_t L = m.labels.size();
  for (std::size_t i = 0; i < L; ++i) {
    std::int64_t row = 0, col = 0;
    for (std::size_t j = 0; j < L; ++j) {
      row += m.counts[i][j];
      col += m.counts[j][i];
    }
    LabelStats s;
    s.label = m.labels[i];
    s.support = row;
    const double tp = static_cast<double>(m.counts[i][i]);
    s.precision = col ? tp / static_cast<double>(col) : 0.0;
    s.recall = row ? tp / static_cast<double>(row) : 0.0;
    s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace topiclabel
