#pragma once

// End-to-end composition: ingest -> preprocess -> aspects -> (sweep-k) ->
// train -> cluster/label -> assign -> map, plus a reproducibility manifest.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiclabel/aspect.hpp"
#include "topiclabel/coherence.hpp"
#include "topiclabel/geometry.hpp"
#include "topiclabel/ingest.hpp"
#include "topiclabel/io.hpp"
#include "topiclabel/labeling.hpp"
#include "topiclabel/lda.hpp"
#include "topiclabel/model_io.hpp"
#include "topiclabel/preprocess.hpp"
#include "topiclabel/version.hpp"
#include "topiclabel/vocabulary.hpp"

namespace topiclabel {

/// Error raised by a pipeline stage, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output_dir = "out";
  std::string text_column = "OriginalTweet";
  char delimiter = ',';

  std::string stopwords_path;     // empty: bundled list
  std::string contractions_path;  // empty: bundled table
  std::string lexicon_dir;        // empty: bundled lexicons
  std::size_t min_token_len = 2;
  std::size_t min_tokens_keep = 1;
  NonAsciiPolicy non_ascii_policy = NonAsciiPolicy::strip_chars;

  std::int64_t min_df = 2;
  double max_df = 0.5;

  std::int32_t k = 20;  // 0: use the sweep's chosen K
  std::int32_t k_min = 0;  // sweep disabled when 0
  std::int32_t k_max = 0;
  std::int32_t k_step = 1;
  std::int32_t sweep_iterations = 0;  // 0: same as iterations

  double alpha_sum = 5.0;
  double beta = 0.01;
  std::int32_t iterations = 1000;
  std::optional<std::uint64_t> seed;

  CoherenceMetric metric = CoherenceMetric::cv;
  std::size_t top_n = 20;
  std::size_t window = 110;
  std::size_t top_unigrams = 20;
  std::int32_t fold_in_iterations = 100;
  bool svg = false;

  bool sweep_enabled() const { return k_min > 0; }

  std::vector<std::int32_t> k_candidates() const {
    std::vector<std::int32_t> ks;
    for (auto k = k_min; k <= k_max; k += std::max(k_step, 1)) ks.push_back(k);
    return ks;
  }

  /// Throws on anything that would make the run ill-defined; touches no files
  /// other than checking that inputs exist.
  void validate() const {
    if (inputs.empty()) throw Error("config: no input path given");
    for (const auto& p : inputs) {
      if (!std::filesystem::exists(p)) throw Error("config: input not found: " + p);
    }
    if (!seed) throw Error("config: seed is mandatory");
    if (output_dir.empty()) throw Error("config: empty output directory");
    if (min_token_len < 1) throw Error("config: min-token-len must be >= 1");
    if (iterations < 1) throw Error("config: iterations must be >= 1");
    if (!(alpha_sum > 0) || !(beta > 0)) throw Error("config: priors must be positive");
    if (top_n < 2) throw Error("config: top-n must be >= 2");
    if (sweep_enabled()) {
      if (k_min < 2 || k_max < k_min || k_step < 1) throw Error("config: invalid k sweep range");
    }
    if (k < 0 || (k == 0 && !sweep_enabled())) throw Error("config: k must be >= 1 unless a sweep chooses it");
  }

  /// Canonical key=value listing; the config hash is computed over it.
  std::map<std::string, std::string> to_map() const {
    std::map<std::string, std::string> m;
    std::string joined;
    for (const auto& p : inputs) joined += (joined.empty() ? "" : ",") + p;
    m["input"] = joined;
    m["output-dir"] = output_dir;
    m["text-column"] = text_column;
    m["delimiter"] = std::string(1, delimiter);
    m["stopwords"] = stopwords_path;
    m["contractions"] = contractions_path;
    m["lexicon-dir"] = lexicon_dir;
    m["min-token-len"] = std::to_string(min_token_len);
    m["min-tokens-keep"] = std::to_string(min_tokens_keep);
    m["non-ascii"] = non_ascii_policy == NonAsciiPolicy::strip_chars ? "strip_chars" : "drop_tweet";
    m["min-df"] = std::to_string(min_df);
    m["max-df"] = nlohmann::json(max_df).dump();
    m["k"] = std::to_string(k);
    m["k-min"] = std::to_string(k_min);
    m["k-max"] = std::to_string(k_max);
    m["k-step"] = std::to_string(k_step);
    m["sweep-iterations"] = std::to_string(sweep_iterations);
    m["alpha-sum"] = nlohmann::json(alpha_sum).dump();
    m["beta"] = nlohmann::json(beta).dump();
    m["iterations"] = std::to_string(iterations);
    m["seed"] = seed ? std::to_string(*seed) : "";
    m["metric"] = std::string(to_string(metric));
    m["top-n"] = std::to_string(top_n);
    m["window"] = std::to_string(window);
    m["top-unigrams"] = std::to_string(top_unigrams);
    m["fold-in-iterations"] = std::to_string(fold_in_iterations);
    m["svg"] = svg ? "true" : "false";
    return m;
  }

  std::string hash() const {
    std::string canon;
    for (const auto& [k, v] : to_map()) canon += k + "=" + v + "\n";
    return text::hex64(text::fnv1a64(canon));
  }

  /// Apply one `key = value` setting (keys are the CLI long-flag names).
  void set(const std::string& key, const std::string& value) {
    auto to_int = [&](auto& dst) {
      std::int64_t v = 0;
      if (!detail::parse_int64(value, v)) throw Error("config: '" + key + "' expects an integer");
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
    auto to_double = [&](double& dst) {
      try {
        std::size_t used = 0;
        dst = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw Error("config: '" + key + "' expects a number");
      }
    };
    if (key == "input") {
      inputs.clear();
      std::stringstream ss(value);
      std::string part;
      while (std::getline(ss, part, ',')) {
        auto t = text::trim(part);
        if (!t.empty()) inputs.emplace_back(t);
      }
    } else if (key == "output-dir") {
      output_dir = value;
    } else if (key == "text-column") {
      text_column = value;
    } else if (key == "delimiter") {
      if (value.size() != 1) throw Error("config: delimiter must be one character");
      delimiter = value[0];
    } else if (key == "stopwords") {
      stopwords_path = value;
    } else if (key == "contractions") {
      contractions_path = value;
    } else if (key == "lexicon-dir") {
      lexicon_dir = value;
    } else if (key == "min-token-len") {
      to_int(min_token_len);
    } else if (key == "min-tokens-keep") {
      to_int(min_tokens_keep);
    } else if (key == "non-ascii") {
      if (value == "strip_chars") non_ascii_policy = NonAsciiPolicy::strip_chars;
      else if (value == "drop_tweet") non_ascii_policy = NonAsciiPolicy::drop_tweet;
      else throw Error("config: non-ascii must be strip_chars or drop_tweet");
    } else if (key == "min-df") {
      to_int(min_df);
    } else if (key == "max-df") {
      to_double(max_df);
    } else if (key == "k") {
      to_int(k);
    } else if (key == "k-min") {
      to_int(k_min);
    } else if (key == "k-max") {
      to_int(k_max);
    } else if (key == "k-step") {
      to_int(k_step);
    } else if (key == "sweep-iterations") {
      to_int(sweep_iterations);
    } else if (key == "alpha-sum") {
      to_double(alpha_sum);
    } else if (key == "beta") {
      to_double(beta);
    } else if (key == "iterations") {
      to_int(iterations);
    } else if (key == "seed") {
      std::int64_t v = 0;
      if (!detail::parse_int64(value, v) || v < 0) throw Error("config: seed must be a non-negative integer");
      seed = static_cast<std::uint64_t>(v);
    } else if (key == "metric") {
      metric = parse_metric(value);
    } else if (key == "top-n") {
      to_int(top_n);
    } else if (key == "window") {
      to_int(window);
    } else if (key == "top-unigrams") {
      to_int(top_unigrams);
    } else if (key == "fold-in-iterations") {
      to_int(fold_in_iterations);
    } else if (key == "svg") {
      svg = value == "true" || value == "1" || value == "yes";
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }

  /// Flat `key = value` text; '#' starts a comment line.
  void apply_file_text(std::string_view content) {
    for (const auto& line : text::nonempty_lines(content)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error("config: expected key = value, got '" + line + "'");
      set(std::string(text::trim(std::string_view(line).substr(0, eq))),
          std::string(text::trim(std::string_view(line).substr(eq + 1))));
    }
  }

  PipelineConfig pipeline_config() const {
    PipelineConfig cfg = PipelineConfig::defaults();
    if (!stopwords_path.empty()) cfg.stopwords = PipelineConfig::parse_stopwords(text::read_file(stopwords_path));
    if (!contractions_path.empty()) cfg.contractions = ContractionTable::parse(text::read_file(contractions_path));
    cfg.min_token_len = min_token_len;
    cfg.min_tokens_keep = min_tokens_keep;
    cfg.non_ascii_policy = non_ascii_policy;
    return cfg;
  }

  LdaParams lda_params(std::int32_t num_topics) const {
    return {num_topics, alpha_sum, beta, iterations, *seed};
  }
};

struct RunSummary {
  std::size_t tweets = 0;
  std::size_t skipped_rows = 0;
  std::size_t dropped_docs = 0;
  std::size_t trained_docs = 0;
  std::size_t vocab_size = 0;
  std::int64_t tokens = 0;
  std::int32_t num_topics = 0;
  std::optional<CoherenceReport> sweep;
  std::vector<TopicLabel> labels;
  std::vector<std::string> artifacts;
};

using Logger = std::function<void(const std::string&)>;

/// Training corpus: non-dropped documents with at least one in-vocabulary
/// token.
inline std::vector<BowDoc> training_corpus(const std::vector<CleanDoc>& docs, const Vocabulary& vocab) {
  std::vector<BowDoc> out;
  for (const auto& d : docs) {
    if (d.dropped) continue;
    auto bow = doc2bow(d, vocab);
    if (!bow.counts.empty()) out.push_back(std::move(bow));
  }
  return out;
}

inline RunSummary run_pipeline(const RunConfig& cfg, const Logger& log = {}) {
  cfg.validate();
  namespace fs = std::filesystem;
  const auto say = [&](const std::string& m) {
    if (log) log(m);
  };
  const fs::path out = cfg.output_dir;
  const std::string config_hash = cfg.hash();
  RunSummary summary;

  auto stage = [&](const std::string& name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0).count();
    say(name + " done in " + std::to_string(ms) + " ms");
  };
  auto emit = [&](const std::string& file, const std::string& content) {
    io::write_atomic(out / file, content);
    summary.artifacts.push_back(file);
  };

  PipelineConfig pcfg;
  Dataset ds;
  std::vector<CleanDoc> docs;
  std::vector<std::vector<AspectTerm>> aspects;
  Vocabulary vocab;
  std::vector<BowDoc> corpus;
  LdaModel model;
  std::vector<AspectCluster> clusters;
  std::vector<TopicLabel> labels;

  stage("ingest", [&] {
    pcfg = cfg.pipeline_config();
    ds = load_datasets(cfg.inputs, cfg.text_column, cfg.delimiter);
    for (const auto& s : ds.skipped) {
      say("skipped row at line " + std::to_string(s.line) + ": " + std::to_string(s.fields) +
          " fields, expected " + std::to_string(s.expected));
    }
    summary.tweets = ds.tweets.size();
    summary.skipped_rows = ds.skipped.size();
    fs::create_directories(out);
  });

  stage("preprocess", [&] {
    docs = preprocess_corpus(ds.tweets, pcfg);
    for (const auto& d : docs) summary.dropped_docs += d.dropped;
    emit("clean.jsonl", io::clean_docs_jsonl(docs));
  });

  stage("aspects", [&] {
    const RuleTagger tagger(cfg.lexicon_dir.empty() ? Lexicon::bundled()
                                                    : Lexicon::from_directory(cfg.lexicon_dir));
    aspects = extract_corpus_aspects(ds.tweets, pcfg, tagger);
    emit("aspects.jsonl", io::aspects_jsonl(aspects, ds.tweets));
  });

  std::int32_t num_topics = cfg.k;
  stage("dictionary", [&] {
    vocab = build_vocabulary(docs, cfg.min_df, cfg.max_df);
    corpus = training_corpus(docs, vocab);
    if (corpus.empty()) throw Error("no document has an in-vocabulary token");
    summary.vocab_size = vocab.size();
    summary.trained_docs = corpus.size();
    for (const auto& b : corpus) summary.tokens += b.length();
  });

  if (cfg.sweep_enabled()) {
    stage("sweep-k", [&] {
      SweepOptions opts;
      opts.lda = cfg.lda_params(0);
      if (cfg.sweep_iterations > 0) opts.lda.iterations = cfg.sweep_iterations;
      opts.metric = cfg.metric;
      opts.top_n = cfg.top_n;
      opts.window = cfg.window;
      auto report = sweep_k(docs, corpus, vocab, cfg.k_candidates(), opts);
      emit("curve.csv", io::curve_csv(report));
      if (num_topics == 0) num_topics = report.chosen_k;
      summary.sweep = std::move(report);
    });
  }

  stage("train", [&] {
    model = train_lda(corpus, vocab, cfg.lda_params(num_topics));
    auto j = model_to_json(model);
    j["config_hash"] = config_hash;
    emit("model.json", j.dump() + "\n");
    summary.num_topics = num_topics;
  });

  stage("label", [&] {
    std::vector<DominantAssignment> assignments;
    for (const auto& b : corpus) assignments.push_back(dominant_topic(model, b.doc_id));
    std::vector<AspectTerm> flat;
    for (const auto& per : aspects) flat.insert(flat.end(), per.begin(), per.end());
    clusters = cluster_aspect_terms(assignments, flat, model.num_topics);
    labels = assign_labels(clusters);
    emit("labels.json", io::labels_to_json(labels, clusters, cfg.top_unigrams).dump(2) + "\n");
    summary.labels = labels;
  });

  stage("assign", [&] {
    std::vector<io::AssignedRow> rows;
    rows.reserve(ds.tweets.size());
    for (const auto& t : ds.tweets) {
      const auto tl = label_tweet(model, labels, t.id);
      rows.push_back({t.id, tl.topic, tl.label});
    }
    emit("assigned.csv", io::assigned_csv(rows));
  });

  stage("map", [&] {
    const auto map = intertopic_map(model);
    auto j = io::map_to_json(map, labels);
    j["seed"] = *cfg.seed;
    j["config_hash"] = config_hash;
    emit("map.json", j.dump(2) + "\n");
    if (cfg.svg) emit("map.svg", io::map_svg(map, labels));
  });

  stage("manifest", [&] {
    nlohmann::json m;
    m["tool"] = "topiclabel";
    m["version"] = kVersion;
    m["seed"] = *cfg.seed;
    m["config_hash"] = config_hash;
    m["config"] = cfg.to_map();
    m["lda"] = {{"num_topics", num_topics},
                {"alpha_sum", cfg.alpha_sum},
                {"alpha_k", cfg.alpha_sum / num_topics},
                {"beta", cfg.beta},
                {"iterations", cfg.iterations},
                {"prior_optimization", false},
                {"sampler", "collapsed_gibbs_single_final_sample"}};
    m["counts"] = {{"tweets", summary.tweets},       {"skipped_rows", summary.skipped_rows},
                   {"dropped_docs", summary.dropped_docs}, {"trained_docs", summary.trained_docs},
                   {"vocab_size", summary.vocab_size}, {"tokens", summary.tokens}};
    if (summary.sweep) m["chosen_k"] = summary.sweep->chosen_k;
    nlohmann::json files = nlohmann::json::object();
    for (const auto& f : summary.artifacts) {
      files[f] = text::hex64(text::fnv1a64(text::read_file((out / f).string())));
    }
    m["artifacts_fnv1a64"] = files;
    emit("run-manifest.json", m.dump(2) + "\n");
  });
  return summary;
}

}  // namespace topiclabel
