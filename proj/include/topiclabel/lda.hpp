#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling.
//
// Sampling is a fixed sequential scan (documents in corpus order, tokens in
// word-id order inside each document), driven by a seeded mt19937_64 with
// an in-house uniform draw so results are bit-reproducible for a given
// (corpus, K, priors, iterations, seed).

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "topiclabel/vocabulary.hpp"

namespace topiclabel {

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::int32_t uniform_index(std::mt19937_64& rng, std::int32_t n) {
  return static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(n));
}

// Index of the bucket holding u * total over an unnormalized weight vector.
inline std::int32_t sample_discrete(std::span<const double> weights, double total,
                                    std::mt19937_64& rng) {
  double u = uniform01(rng) * total;
  const auto n = static_cast<std::int32_t>(weights.size());
  for (std::int32_t k = 0; k < n; ++k) {
    u -= weights[static_cast<std::size_t>(k)];
    if (u < 0.0) return k;
  }
  return n - 1;
}

}  // namespace detail

struct LdaParams {
  std::int32_t num_topics = 20;
  double alpha_sum = 5.0;  // symmetric document-topic prior, alpha_k = alpha_sum / K
  double beta = 0.01;
  std::int32_t iterations = 1000;
  std::uint64_t seed = 1;
};

/// Count tables of a sampler, exposed to per-sweep observers.
struct GibbsState {
  std::int32_t num_topics = 0;
  std::int32_t vocab_size = 0;
  std::vector<std::int64_t> doc_offsets;  // D + 1 offsets into words / topics
  std::vector<WordId> words;
  std::vector<std::int32_t> topics;
  std::vector<std::int32_t> nwk;  // V x K, word-major
  std::vector<std::int32_t> nk;   // K
  std::vector<std::int32_t> ndk;  // D x K

  std::size_t num_docs() const { return doc_offsets.size() - 1; }
  std::int64_t total_tokens() const { return static_cast<std::int64_t>(words.size()); }

  /// Sum_k ndk[d][k] = |d|, sum_w nkw[k][w] = nk[k], sum_k nk[k] = N, and
  /// both tables agree with the assignment array.
  bool counts_conserved() const {
    const auto K = static_cast<std::size_t>(num_topics);
    std::int64_t nk_total = 0;
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t col = 0;
      for (std::size_t w = 0; w < static_cast<std::size_t>(vocab_size); ++w) col += nwk[w * K + k];
      if (col != nk[k] || nk[k] < 0) return false;
      nk_total += nk[k];
    }
    if (nk_total != total_tokens()) return false;
    std::int64_t ndk_total = 0;
    for (std::size_t d = 0; d < num_docs(); ++d) {
      std::int64_t row = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (ndk[d * K + k] < 0) return false;
        row += ndk[d * K + k];
      }
      if (row != doc_offsets[d + 1] - doc_offsets[d]) return false;
      ndk_total += row;
    }
    if (ndk_total != total_tokens()) return false;
    // recount from assignments
    std::vector<std::int64_t> recount(K, 0);
    for (auto z : topics) {
      if (z < 0 || z >= num_topics) return false;
      ++recount[static_cast<std::size_t>(z)];
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (recount[k] != nk[k]) return false;
    }
    return true;
  }
};

struct LdaModel {
  std::int32_t num_topics = 0;
  std::vector<double> alpha;  // K
  double beta = 0.0;
  std::int32_t iterations = 0;
  std::uint64_t seed = 0;
  Vocabulary vocab;
  std::vector<double> phi;    // K x V, row-major
  std::vector<double> theta;  // D x K, row-major
  std::vector<std::int64_t> doc_ids;
  std::vector<std::int64_t> doc_lengths;
  // Final Gibbs state; empty for models loaded from disk.
  GibbsState state;

  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t num_docs() const { return doc_ids.size(); }
  double alpha_sum() const { return std::accumulate(alpha.begin(), alpha.end(), 0.0); }

  std::span<const double> phi_row(std::size_t k) const {
    return {phi.data() + k * vocab_size(), vocab_size()};
  }
  std::span<const double> theta_row(std::size_t row) const {
    return {theta.data() + row * static_cast<std::size_t>(num_topics),
            static_cast<std::size_t>(num_topics)};
  }

  /// Row of `doc_id` in theta, or -1.
  std::int64_t row_of(std::int64_t doc_id) const {
    if (row_index_.size() == doc_ids.size()) {
      auto it = row_index_.find(doc_id);
      return it == row_index_.end() ? -1 : it->second;
    }
    auto it = std::find(doc_ids.begin(), doc_ids.end(), doc_id);
    return it == doc_ids.end() ? -1 : static_cast<std::int64_t>(it - doc_ids.begin());
  }

  /// Builds the doc-id lookup; call after doc_ids change.
  void index_rows() {
    row_index_.clear();
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
      row_index_.emplace(doc_ids[i], static_cast<std::int64_t>(i));
    }
  }

  /// The `n` highest-probability word ids of topic k; ties go to the lower id.
  std::vector<WordId> top_word_ids(std::size_t k, std::size_t n) const {
    std::vector<WordId> ids(vocab_size());
    std::iota(ids.begin(), ids.end(), 0);
    const auto row = phi_row(k);
    n = std::min(n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](WordId a, WordId b) {
                        if (row[static_cast<std::size_t>(a)] != row[static_cast<std::size_t>(b)])
                          return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
                        return a < b;
                      });
    ids.resize(n);
    return ids;
  }

  std::vector<std::string> top_words(std::size_t k, std::size_t n) const {
    std::vector<std::string> out;
    for (auto id : top_word_ids(k, n)) out.push_back(vocab.id_to_word[static_cast<std::size_t>(id)]);
    return out;
  }

 private:
  std::unordered_map<std::int64_t, std::int64_t> row_index_;
};

using SweepObserver = std::function<void(std::int32_t sweep, const GibbsState&)>;

inline LdaModel train_lda(const std::vector<BowDoc>& corpus, const Vocabulary& vocab,
                          const LdaParams& params, const SweepObserver& observer = {}) {
  if (params.num_topics < 1) throw Error("train_lda: number of topics must be >= 1");
  if (corpus.empty()) throw Error("train_lda: empty corpus");
  if (params.iterations < 1) throw Error("train_lda: iterations must be >= 1");
  if (!(params.alpha_sum > 0.0) || !(params.beta > 0.0)) {
    throw Error("train_lda: priors must be positive");
  }

  const std::int32_t K = params.num_topics;
  const auto Ku = static_cast<std::size_t>(K);
  const auto V = static_cast<std::int32_t>(vocab.size());
  const double alpha_k = params.alpha_sum / K;
  const double beta = params.beta;
  const double vbeta = beta * V;

  GibbsState st;
  st.num_topics = K;
  st.vocab_size = V;
  st.doc_offsets.reserve(corpus.size() + 1);
  st.doc_offsets.push_back(0);
  for (const auto& doc : corpus) {
    for (const auto& [w, c] : doc.counts) {
      if (w < 0 || w >= V) throw Error("train_lda: word id out of range");
      st.words.insert(st.words.end(), static_cast<std::size_t>(c), w);
    }
    st.doc_offsets.push_back(static_cast<std::int64_t>(st.words.size()));
  }
  const std::size_t D = corpus.size();
  st.topics.resize(st.words.size());
  st.nwk.assign(static_cast<std::size_t>(V) * Ku, 0);
  st.nk.assign(Ku, 0);
  st.ndk.assign(D * Ku, 0);

  std::mt19937_64 rng(params.seed);
  for (std::size_t d = 0; d < D; ++d) {
    for (auto i = st.doc_offsets[d]; i < st.doc_offsets[d + 1]; ++i) {
      const auto z = detail::uniform_index(rng, K);
      const auto w = static_cast<std::size_t>(st.words[static_cast<std::size_t>(i)]);
      st.topics[static_cast<std::size_t>(i)] = z;
      ++st.nwk[w * Ku + static_cast<std::size_t>(z)];
      ++st.nk[static_cast<std::size_t>(z)];
      ++st.ndk[d * Ku + static_cast<std::size_t>(z)];
    }
  }

  std::vector<double> weights(Ku);
  for (std::int32_t sweep = 0; sweep < params.iterations; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      std::int32_t* ndk = st.ndk.data() + d * Ku;
      for (auto i = st.doc_offsets[d]; i < st.doc_offsets[d + 1]; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto w = static_cast<std::size_t>(st.words[ui]);
        std::int32_t* nw = st.nwk.data() + w * Ku;
        const auto old = static_cast<std::size_t>(st.topics[ui]);
        --nw[old];
        --st.nk[old];
        --ndk[old];
        double total = 0.0;
        for (std::size_t k = 0; k < Ku; ++k) {
          const double p = (ndk[k] + alpha_k) * (nw[k] + beta) / (st.nk[k] + vbeta);
          weights[k] = p;
          total += p;
        }
        const auto z = static_cast<std::size_t>(detail::sample_discrete(weights, total, rng));
        st.topics[ui] = static_cast<std::int32_t>(z);
        ++nw[z];
        ++st.nk[z];
        ++ndk[z];
      }
    }
    assert(st.counts_conserved());
    if (observer) observer(sweep, st);
  }

  LdaModel m;
  m.num_topics = K;
  m.alpha.assign(Ku, alpha_k);
  m.beta = beta;
  m.iterations = params.iterations;
  m.seed = params.seed;
  m.vocab = vocab;
  m.phi.resize(Ku * static_cast<std::size_t>(V));
  for (std::size_t k = 0; k < Ku; ++k) {
    const double denom = st.nk[k] + vbeta;
    for (std::size_t w = 0; w < static_cast<std::size_t>(V); ++w) {
      m.phi[k * static_cast<std::size_t>(V) + w] = (st.nwk[w * Ku + k] + beta) / denom;
    }
  }
  m.theta.resize(D * Ku);
  for (std::size_t d = 0; d < D; ++d) {
    const auto len = st.doc_offsets[d + 1] - st.doc_offsets[d];
    const double denom = static_cast<double>(len) + params.alpha_sum;
    for (std::size_t k = 0; k < Ku; ++k) {
      m.theta[d * Ku + k] = (st.ndk[d * Ku + k] + alpha_k) / denom;
    }
    m.doc_ids.push_back(corpus[d].doc_id);
    m.doc_lengths.push_back(len);
  }
  m.index_rows();
  m.state = std::move(st);
  return m;
}

struct DominantAssignment {
  std::int64_t doc_id = 0;
  std::int32_t topic = 0;
  double proportion = 0.0;
};

/// Argmax of a topic distribution; the lowest index wins ties.
inline std::int32_t argmax_topic(std::span<const double> row) {
  std::int32_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[static_cast<std::size_t>(best)]) best = static_cast<std::int32_t>(k);
  }
  return best;
}

inline DominantAssignment dominant_topic(const LdaModel& model, std::int64_t doc_id) {
  const auto row = model.row_of(doc_id);
  if (row < 0) {
    throw Error("dominant_topic: document " + std::to_string(doc_id) +
                " is not in the model (dropped or empty)");
  }
  if (model.doc_lengths[static_cast<std::size_t>(row)] == 0) {
    throw Error("dominant_topic: document " + std::to_string(doc_id) + " is empty");
  }
  const auto theta = model.theta_row(static_cast<std::size_t>(row));
  const auto k = argmax_topic(theta);
  return {doc_id, k, theta[static_cast<std::size_t>(k)]};
}

/// Gibbs fold-in of an unseen document with phi held fixed. An empty
/// document returns the normalized prior.
inline std::vector<double> infer_theta(const LdaModel& model, const BowDoc& doc,
                                       std::int32_t iterations = 100, std::uint64_t seed = 1) {
  const auto Ku = static_cast<std::size_t>(model.num_topics);
  const auto V = model.vocab_size();
  const double alpha_sum = model.alpha_sum();
  std::vector<WordId> words;
  for (const auto& [w, c] : doc.counts) {
    if (w >= 0 && static_cast<std::size_t>(w) < V) words.insert(words.end(), static_cast<std::size_t>(c), w);
  }
  std::vector<double> theta(Ku);
  if (words.empty()) {
    for (std::size_t k = 0; k < Ku; ++k) theta[k] = model.alpha[k] / alpha_sum;
    return theta;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> z(words.size());
  std::vector<std::int32_t> ndk(Ku, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = detail::uniform_index(rng, model.num_topics);
    ++ndk[static_cast<std::size_t>(z[i])];
  }
  std::vector<double> weights(Ku);
  for (std::int32_t it = 0; it < std::max(iterations, 1); ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --ndk[static_cast<std::size_t>(z[i])];
      double total = 0.0;
      const auto w = static_cast<std::size_t>(words[i]);
      for (std::size_t k = 0; k < Ku; ++k) {
        weights[k] = (ndk[k] + model.alpha[k]) * model.phi[k * V + w];
        total += weights[k];
      }
      z[i] = detail::sample_discrete(weights, total, rng);
      ++ndk[static_cast<std::size_t>(z[i])];
    }
  }
  const double denom = static_cast<double>(words.size()) + alpha_sum;
  for (std::size_t k = 0; k < Ku; ++k) theta[k] = (ndk[k] + model.alpha[k]) / denom;
  return theta;
}

}  // namespace topiclabel
