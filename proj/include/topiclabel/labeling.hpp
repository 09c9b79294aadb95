#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "topiclabel/aspect.hpp"
#include "topiclabel/lda.hpp"

namespace topiclabel {

struct AspectCluster {
  std::int32_t topic = 0;
  std::map<std::string, std::int64_t> unigram_counts;

  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& [w, c] : unigram_counts) n += c;
    return n;
  }
};

struct TopicLabel {
  std::int32_t topic = 0;
  std::string label;
  std::int64_t label_count = 0;
  std::int32_t rank_used = 0;
  bool fallback = false;
};

inline std::string fallback_label(std::int32_t topic) { return "topic-" + std::to_string(topic); }

/// Each aspect unigram increments the count of its tweet's dominant topic.
/// Aspects whose tweet has no dominant assignment are skipped.
inline std::vector<AspectCluster> cluster_aspect_terms(
    const std::vector<DominantAssignment>& assignments, const std::vector<AspectTerm>& aspects,
    std::int32_t num_topics) {
  std::vector<AspectCluster> clusters(static_cast<std::size_t>(num_topics));
  for (std::int32_t k = 0; k < num_topics; ++k) clusters[static_cast<std::size_t>(k)].topic = k;
  std::unordered_map<std::int64_t, std::int32_t> topic_of;
  for (const auto& a : assignments) topic_of[a.doc_id] = a.topic;
  for (const auto& term : aspects) {
    auto it = topic_of.find(term.source_doc);
    if (it == topic_of.end()) continue;
    if (it->second < 0 || it->second >= num_topics) throw Error("cluster_aspect_terms: topic out of range");
    auto& counts = clusters[static_cast<std::size_t>(it->second)].unigram_counts;
    for (const auto& u : term.unigrams) ++counts[u];
  }
  return clusters;
}

/// Count descending, then word ascending.
inline std::vector<std::pair<std::string, std::int64_t>> ranked_unigrams(const AspectCluster& cluster) {
  std::vector<std::pair<std::string, std::int64_t>> out(cluster.unigram_counts.begin(),
                                                        cluster.unigram_counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

/// Top-unigram labels with conflict resolution. Repeatedly the unresolved
/// topic whose current candidate has the highest count (lower topic index on
/// ties) is visited: it takes the candidate if no topic has claimed it yet,
/// otherwise it moves on to its next ranked unigram. Topics that run out of
/// candidates get `topic-<k>`.
inline std::vector<TopicLabel> assign_labels(const std::vector<AspectCluster>& clusters) {
  const std::size_t K = clusters.size();
  std::vector<std::vector<std::pair<std::string, std::int64_t>>> queues(K);
  for (std::size_t k = 0; k < K; ++k) queues[k] = ranked_unigrams(clusters[k]);
  std::vector<std::size_t> cursor(K, 0);
  std::vector<std::optional<TopicLabel>> result(K);
  std::unordered_set<std::string> claimed;

  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < K; ++k) {
      if (result[k] || cursor[k] >= queues[k].size()) continue;
      if (!pick || queues[k][cursor[k]].second > queues[*pick][cursor[*pick]].second) pick = k;
    }
    if (!pick) break;
    const std::size_t k = *pick;
    const auto& [word, count] = queues[k][cursor[k]];
    if (claimed.insert(word).second) {
      result[k] = TopicLabel{clusters[k].topic, word, count, static_cast<std::int32_t>(cursor[k]), false};
    } else {
      ++cursor[k];
    }
  }

  std::vector<TopicLabel> labels;
  labels.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (result[k]) {
      labels.push_back(*result[k]);
    } else {
      labels.push_back({clusters[k].topic, fallback_label(clusters[k].topic), 0,
                        static_cast<std::int32_t>(cursor[k]), true});
    }
  }
  return labels;
}

struct TweetLabel {
  std::int32_t topic = -1;  // -1: unlabelable (nothing left after preprocessing)
  std::string label;

  bool labelable() const { return topic >= 0; }
};

inline const std::string& label_of(const std::vector<TopicLabel>& labels, std::int32_t topic) {
  for (const auto& l : labels) {
    if (l.topic == topic) return l.label;
  }
  throw Error("no label for topic " + std::to_string(topic));
}

/// In-corpus tweet: dominant topic from the trained theta row.
inline TweetLabel label_tweet(const LdaModel& model, const std::vector<TopicLabel>& labels,
                              std::int64_t doc_id) {
  const auto row = model.row_of(doc_id);
  if (row < 0 || model.doc_lengths[static_cast<std::size_t>(row)] == 0) return {};
  const auto a = dominant_topic(model, doc_id);
  return {a.topic, label_of(labels, a.topic)};
}

/// Unseen tweet: topic mixture by fold-in.
inline TweetLabel label_tweet(const LdaModel& model, const std::vector<TopicLabel>& labels,
                              const BowDoc& doc, std::int32_t fold_in_iterations = 100,
                              std::uint64_t seed = 1) {
  if (doc.counts.empty()) return {};
  const auto theta = infer_theta(model, doc, fold_in_iterations, seed);
  const auto k = argmax_topic(theta);
  return {k, label_of(labels, k)};
}

}  // namespace topiclabel
