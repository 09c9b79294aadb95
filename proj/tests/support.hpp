#pragma once

// Helpers shared by the unit tests and the acceptance binary: a planted-topic
// corpus generator and a couple of small oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "topiclabel/topiclabel.hpp"

namespace tltest {

namespace tl = topiclabel;

struct PlantedCorpus {
  std::vector<std::vector<double>> phi;    // true topic-word distributions
  std::vector<std::vector<double>> theta;  // true doc-topic mixtures
  std::vector<tl::CleanDoc> docs;
  tl::Vocabulary vocab;
  std::vector<tl::BowDoc> corpus;
};

// Word names are letters only so they survive every filter.
inline std::string planted_word(int w) {
  std::string s = "w";
  do {
    s += static_cast<char>('a' + w % 26);
    w /= 26;
  } while (w > 0);
  return s + "x";
}

// K topics over V words. Each topic puts most of its mass on its own block
// of V/K words and a little everywhere else; each document draws a sparse
// Dirichlet mixture.
inline PlantedCorpus planted_corpus(int K, int V, int D, int len, std::uint64_t seed,
                                    double doc_alpha = 0.1, double leak = 0.02) {
  std::mt19937_64 rng(seed);
  PlantedCorpus pc;
  const int block = V / K;
  pc.phi.assign(K, std::vector<double>(V, 0.0));
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (int w = 0; w < V; ++w) {
      const bool own = w / block == k || (k == K - 1 && w >= K * block);
      pc.phi[k][w] = own ? 1.0 + std::uniform_real_distribution<double>(0, 1)(rng) : leak;
      s += pc.phi[k][w];
    }
    for (auto& x : pc.phi[k]) x /= s;
  }
  std::gamma_distribution<double> gamma(doc_alpha, 1.0);
  for (int d = 0; d < D; ++d) {
    std::vector<double> th(K);
    double s = 0.0;
    for (auto& x : th) s += (x = gamma(rng) + 1e-12);
    for (auto& x : th) x /= s;
    std::discrete_distribution<int> pick_topic(th.begin(), th.end());
    tl::CleanDoc doc;
    doc.id = d;
    for (int i = 0; i < len; ++i) {
      const int k = pick_topic(rng);
      std::discrete_distribution<int> pick_word(pc.phi[k].begin(), pc.phi[k].end());
      doc.tokens.push_back(planted_word(pick_word(rng)));
    }
    pc.theta.push_back(std::move(th));
    pc.docs.push_back(std::move(doc));
  }
  // every planted word must be in the vocabulary with a fixed id, so the
  // vocabulary is built by hand rather than pruned by document frequency
  for (int w = 0; w < V; ++w) pc.vocab.add(planted_word(w));
  for (auto& df : pc.vocab.doc_freq) df = 0;
  for (const auto& d : pc.docs) pc.corpus.push_back(tl::doc2bow(d, pc.vocab));
  return pc;
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// Greedy matching: repeatedly pair the closest (true, recovered) topics.
inline std::vector<double> matched_tv(const std::vector<std::vector<double>>& truth, const tl::LdaModel& m) {
  const std::size_t K = truth.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t t = 0; t < K; ++t)
    for (std::size_t r = 0; r < static_cast<std::size_t>(m.num_topics); ++r)
      cand.emplace_back(total_variation(truth[t], m.phi_row(r)), t, r);
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_t(K), used_r(m.num_topics);
  std::vector<double> out(K, 1.0);
  for (auto [d, t, r] : cand) {
    if (used_t[t] || used_r[r]) continue;
    used_t[t] = used_r[r] = true;
    out[t] = d;
  }
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("topiclabel_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace tltest
