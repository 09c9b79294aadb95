#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "topiclabel/lda.hpp"
#include "topiclabel/preprocess.hpp"

namespace topiclabel {

enum class CoherenceMetric { umass, cv };

inline std::string_view to_string(CoherenceMetric m) {
  return m == CoherenceMetric::umass ? "umass" : "cv";
}

inline CoherenceMetric parse_metric(std::string_view s) {
  if (s == "umass") return CoherenceMetric::umass;
  if (s == "cv") return CoherenceMetric::cv;
  throw Error("unknown coherence metric '" + std::string(s) + "' (expected cv or umass)");
}

namespace detail {

inline std::size_t intersection_size(const std::vector<std::int64_t>& a,
                                     const std::vector<std::int64_t>& b) {
  std::size_t n = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace detail

/// Sorted ids of the documents (or windows) that contain each word.
class OccurrenceIndex {
 public:
  const std::vector<std::int64_t>& of(const std::string& w) const {
    static const std::vector<std::int64_t> kEmpty;
    auto it = postings_.find(w);
    return it == postings_.end() ? kEmpty : it->second;
  }
  std::int64_t units() const { return units_; }

  /// One unit per non-dropped document.
  static OccurrenceIndex documents(const std::vector<CleanDoc>& docs) {
    OccurrenceIndex idx;
    for (const auto& d : docs) {
      if (d.dropped) continue;
      const auto id = idx.units_++;
      for (const auto& t : d.tokens) {
        auto& p = idx.postings_[t];
        if (p.empty() || p.back() != id) p.push_back(id);
      }
    }
    return idx;
  }

  /// Boolean sliding windows: a document of length L <= window is a single
  /// window, longer documents contribute L - window + 1 windows.
  static OccurrenceIndex windows(const std::vector<CleanDoc>& docs, std::size_t window) {
    if (window < 1) throw Error("window size must be >= 1");
    OccurrenceIndex idx;
    for (const auto& d : docs) {
      if (d.dropped || d.tokens.empty()) continue;
      const std::size_t L = d.tokens.size();
      const std::size_t count = L <= window ? 1 : L - window + 1;
      const std::int64_t base = idx.units_;
      idx.units_ += static_cast<std::int64_t>(count);
      // per word, union of [p - window + 1, p] clipped to the valid windows
      std::unordered_map<std::string_view, std::int64_t> covered_to;
      for (std::size_t p = 0; p < L; ++p) {
        const std::size_t first = p + 1 >= window ? p + 1 - window : 0;
        const std::size_t last = std::min(p, count - 1);
        if (first > last) continue;
        auto& post = idx.postings_[d.tokens[p]];
        auto [it, inserted] = covered_to.emplace(d.tokens[p], -1);
        for (auto wdx = std::max<std::int64_t>(static_cast<std::int64_t>(first), it->second + 1);
             wdx <= static_cast<std::int64_t>(last); ++wdx) {
          post.push_back(base + wdx);
        }
        it->second = std::max(it->second, static_cast<std::int64_t>(last));
      }
    }
    return idx;
  }

 private:
  std::unordered_map<std::string, std::vector<std::int64_t>> postings_;
  std::int64_t units_ = 0;
};

/// Mean over pairs i < j of log((D(w_i, w_j) + 1) / D(w_j)), D counting
/// documents; D(w_j) is floored at epsilon.
inline double umass_coherence(const std::vector<std::string>& top_words, const OccurrenceIndex& docs,
                              double epsilon = 1e-12) {
  const std::size_t n = top_words.size();
  if (n < 2) throw Error("umass_coherence: need at least 2 words");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pi = docs.of(top_words[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& pj = docs.of(top_words[j]);
      const double joint = static_cast<double>(detail::intersection_size(pi, pj));
      const double dj = std::max(static_cast<double>(pj.size()), epsilon);
      sum += std::log((joint + 1.0) / dj);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

inline double umass_coherence(const std::vector<std::string>& top_words,
                              const std::vector<CleanDoc>& corpus, double epsilon = 1e-12) {
  return umass_coherence(top_words, OccurrenceIndex::documents(corpus), epsilon);
}

inline constexpr double kNpmiEpsilon = 1e-12;

/// NPMI from window probabilities; 1 when the pair occurs in every window.
inline double npmi(double p_i, double p_j, double p_ij, double eps = kNpmiEpsilon) {
  const double joint = p_ij + eps;
  if (joint >= 1.0) return 1.0;
  const double pmi = std::log(joint / (p_i * p_j + eps));
  return pmi / -std::log(joint);
}

/// One-set C_v: each top word's NPMI vector against all top words is
/// compared by cosine with the sum of all vectors; the score is the mean.
inline double cv_coherence(const std::vector<std::string>& top_words, const OccurrenceIndex& windows) {
  const std::size_t n = top_words.size();
  if (n < 2) throw Error("cv_coherence: need at least 2 words");
  const double total = static_cast<double>(std::max<std::int64_t>(windows.units(), 1));
  std::vector<const std::vector<std::int64_t>*> post(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    post[i] = &windows.of(top_words[i]);
    p[i] = static_cast<double>(post[i]->size()) / total;
  }
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double pij = static_cast<double>(detail::intersection_size(*post[i], *post[j])) / total;
      m[i * n + j] = m[j * n + i] = npmi(p[i], p[j], pij);
    }
  }
  std::vector<double> sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sum[j] += m[i * n + j];
  }
  double sum_norm = 0.0;
  for (double v : sum) sum_norm += v * v;
  sum_norm = std::sqrt(sum_norm);
  double score = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dot += m[i * n + j] * sum[j];
      norm += m[i * n + j] * m[i * n + j];
    }
    norm = std::sqrt(norm);
    double c = (norm > 0.0 && sum_norm > 0.0) ? dot / (norm * sum_norm) : 0.0;
    score += std::clamp(c, -1.0, 1.0);
  }
  return score / static_cast<double>(n);
}

inline double cv_coherence(const std::vector<std::string>& top_words,
                           const std::vector<CleanDoc>& corpus, std::size_t window = 110) {
  return cv_coherence(top_words, OccurrenceIndex::windows(corpus, window));
}

inline constexpr double kSweepTieTolerance = 1e-12;

struct SweepOptions {
  LdaParams lda;  // num_topics is overridden per candidate
  CoherenceMetric metric = CoherenceMetric::cv;
  std::size_t top_n = 20;
  std::size_t window = 110;
  bool parallel = false;
};

struct CoherenceReport {
  CoherenceMetric metric = CoherenceMetric::cv;
  std::vector<std::pair<std::int32_t, double>> per_k;  // ascending K
  std::int32_t chosen_k = 0;
  std::size_t top_n = 20;
};

/// Mean coherence of a model's topics, each represented by its top_n words.
inline double model_coherence(const LdaModel& model, const OccurrenceIndex& index,
                              CoherenceMetric metric, std::size_t top_n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(model.num_topics); ++k) {
    const auto words = model.top_words(k, top_n);
    sum += metric == CoherenceMetric::cv ? cv_coherence(words, index) : umass_coherence(words, index);
  }
  return sum / model.num_topics;
}

/// Trains one model per K on the same corpus and seed and scores each;
/// chosen_k is the argmax, ties going to the smaller K.
inline CoherenceReport sweep_k(const std::vector<CleanDoc>& docs, const std::vector<BowDoc>& corpus,
                               const Vocabulary& vocab, std::vector<std::int32_t> k_candidates,
                               const SweepOptions& opts) {
  if (k_candidates.empty()) throw Error("sweep_k: no candidate K");
  std::sort(k_candidates.begin(), k_candidates.end());
  k_candidates.erase(std::unique(k_candidates.begin(), k_candidates.end()), k_candidates.end());
  for (auto k : k_candidates) {
    if (k < 2) throw Error("sweep_k: candidate K must be >= 2, got " + std::to_string(k));
  }
  const OccurrenceIndex index = opts.metric == CoherenceMetric::cv
                                    ? OccurrenceIndex::windows(docs, opts.window)
                                    : OccurrenceIndex::documents(docs);
  auto score_one = [&](std::int32_t k) {
    LdaParams p = opts.lda;
    p.num_topics = k;
    try {
      return model_coherence(train_lda(corpus, vocab, p), index, opts.metric, opts.top_n);
    } catch (const std::exception& e) {
      throw Error("sweep_k: K=" + std::to_string(k) + ": " + e.what());
    }
  };

  CoherenceReport report;
  report.metric = opts.metric;
  report.top_n = opts.top_n;
  if (opts.parallel) {
    std::vector<std::future<double>> futures;
    for (auto k : k_candidates) futures.push_back(std::async(std::launch::async, score_one, k));
    for (std::size_t i = 0; i < k_candidates.size(); ++i) {
      report.per_k.emplace_back(k_candidates[i], futures[i].get());
    }
  } else {
    for (auto k : k_candidates) report.per_k.emplace_back(k, score_one(k));
  }
  // scores within kSweepTieTolerance (relative) count as ties; means over
  // different K of identical topic scores can differ in the last bit
  auto best = report.per_k.front();
  for (const auto& e : report.per_k) {
    if (e.second > best.second + kSweepTieTolerance * std::max(1.0, std::abs(best.second))) best = e;
  }
  report.chosen_k = best.first;
  return report;
}

}  // namespace topiclabel
