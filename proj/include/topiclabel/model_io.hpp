#pragma once

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "topiclabel/lda.hpp"

namespace topiclabel {

inline constexpr int kModelFormatVersion = 1;

/// Self-describing model document. Gibbs count tables are not stored.
inline nlohmann::json model_to_json(const LdaModel& m) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["num_topics"] = m.num_topics;
  j["vocab_size"] = m.vocab_size();
  j["num_docs"] = m.num_docs();
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  j["iterations"] = m.iterations;
  j["seed"] = m.seed;
  j["vocabulary"] = m.vocab.id_to_word;
  j["doc_freq"] = m.vocab.doc_freq;
  j["phi"] = m.phi;
  j["theta"] = m.theta;
  j["doc_ids"] = m.doc_ids;
  j["doc_lengths"] = m.doc_lengths;
  return j;
}

inline LdaModel model_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kModelFormatVersion) {
    throw Error("unsupported model format_version");
  }
  LdaModel m;
  m.num_topics = j.at("num_topics").get<std::int32_t>();
  m.alpha = j.at("alpha").get<std::vector<double>>();
  m.beta = j.at("beta").get<double>();
  m.iterations = j.at("iterations").get<std::int32_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto words = j.at("vocabulary").get<std::vector<std::string>>();
  const auto df = j.at("doc_freq").get<std::vector<std::int64_t>>();
  if (df.size() != words.size()) throw Error("model: doc_freq/vocabulary size mismatch");
  for (std::size_t i = 0; i < words.size(); ++i) m.vocab.add(words[i], df[i]);
  if (m.vocab.size() != words.size()) throw Error("model: duplicate vocabulary entries");
  m.phi = j.at("phi").get<std::vector<double>>();
  m.theta = j.at("theta").get<std::vector<double>>();
  m.doc_ids = j.at("doc_ids").get<std::vector<std::int64_t>>();
  m.doc_lengths = j.at("doc_lengths").get<std::vector<std::int64_t>>();
  const auto K = static_cast<std::size_t>(m.num_topics);
  if (m.num_topics < 1 || m.alpha.size() != K || m.phi.size() != K * m.vocab_size() ||
      m.theta.size() != m.doc_ids.size() * K || m.doc_lengths.size() != m.doc_ids.size()) {
    throw Error("model: inconsistent dimensions");
  }
  m.index_rows();
  return m;
}

inline void save_model(const LdaModel& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write model: " + path);
  os << model_to_json(m).dump() << '\n';
}

inline LdaModel load_model(const std::string& path) {
  return model_from_json(nlohmann::json::parse(text::read_file(path)));
}

}  // namespace topiclabel
