// topiclabel: command-line front end, one subcommand per pipeline stage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topiclabel/topiclabel.hpp"

namespace tl = topiclabel;
namespace fs = std::filesystem;

namespace {

// Settings given on the command line, keyed by long-flag name; applied on top
// of RunConfig defaults (and of the config file, for `run`).
using Settings = std::map<std::string, std::string>;

void add_setting(CLI::App* app, Settings& s, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + key, [&s, key](const std::string& v) { s[key] = v; }, help);
}

void add_preprocess_flags(CLI::App* app, Settings& s) {
  add_setting(app, s, "text-column", "Tweet text column (default OriginalTweet)");
  add_setting(app, s, "delimiter", "CSV delimiter (default ,)");
  add_setting(app, s, "stopwords", "Stopword file, one word per line (default: bundled list)");
  add_setting(app, s, "contractions", "Contraction table, pattern<TAB>expansion (default: bundled)");
  add_setting(app, s, "min-token-len", "Minimum token length (default 2)");
  add_setting(app, s, "min-tokens-keep", "Drop tweets with fewer tokens (default 1)");
  add_setting(app, s, "non-ascii", "strip_chars | drop_tweet (default strip_chars)");
}

void add_trainer_flags(CLI::App* app, Settings& s) {
  add_setting(app, s, "seed", "PRNG seed (required)");
  add_setting(app, s, "iterations", "Gibbs sweeps (default 1000)");
  add_setting(app, s, "alpha-sum", "Sum of the symmetric document-topic prior (default 5.0)");
  add_setting(app, s, "beta", "Topic-word prior (default 0.01)");
  add_setting(app, s, "min-df", "Minimum document frequency (default 2)");
  add_setting(app, s, "max-df", "Maximum document frequency fraction (default 0.5)");
}

tl::RunConfig config_from(const Settings& s) {
  tl::RunConfig cfg;
  for (const auto& [k, v] : s) cfg.set(k, v);
  return cfg;
}

void require_seed(const tl::RunConfig& cfg) {
  if (!cfg.seed) throw tl::Error("--seed is required");
}

tl::Dataset read_inputs(const std::vector<std::string>& inputs, const tl::RunConfig& cfg) {
  auto ds = tl::load_datasets(inputs, cfg.text_column, cfg.delimiter);
  for (const auto& sk : ds.skipped) {
    std::cerr << "warning: skipped row at line " << sk.line << " (" << sk.fields << " fields, expected "
              << sk.expected << ")\n";
  }
  if (!ds.skipped.empty()) std::cerr << "skipped rows: " << ds.skipped.size() << "\n";
  return ds;
}

std::vector<tl::BowDoc> bow_corpus(const std::vector<tl::CleanDoc>& docs, const tl::RunConfig& cfg,
                                   tl::Vocabulary& vocab) {
  vocab = tl::build_vocabulary(docs, cfg.min_df, cfg.max_df);
  return tl::training_corpus(docs, vocab);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic discovery and automatic topic labeling for short texts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tl::kVersion);

  std::vector<std::string> inputs;
  std::string output, model_path, aspects_path, labels_path, assigned_path, gold_path, svg_path;
  std::string config_path, lexicon_dir;
  bool in_corpus = false;

  // preprocess
  Settings pre_s;
  auto* pre = app.add_subcommand("preprocess", "Clean and tokenize tweets into clean.jsonl");
  pre->add_option("--input", inputs, "Tweet CSV file(s)")->required();
  pre->add_option("--output", output, "Output JSONL")->required();
  add_preprocess_flags(pre, pre_s);

  // aspects
  Settings asp_s;
  auto* asp = app.add_subcommand("aspects", "Extract aspect terms (noun chunks) per tweet");
  asp->add_option("--input", inputs, "Tweet CSV file(s)")->required();
  asp->add_option("--output", output, "Output JSONL")->required();
  asp->add_option("--lexicon-dir", lexicon_dir, "Directory with <class>.txt lexicon overrides");
  add_preprocess_flags(asp, asp_s);

  // sweep-k
  Settings sw_s;
  auto* sw = app.add_subcommand("sweep-k", "Train one model per K and write the coherence curve");
  sw->add_option("--input", inputs, "clean.jsonl")->required()->expected(1);
  sw->add_option("--output", output, "Output curve CSV (k,score)")->required();
  add_setting(sw, sw_s, "k-min", "Smallest K");
  add_setting(sw, sw_s, "k-max", "Largest K");
  add_setting(sw, sw_s, "k-step", "K increment (default 1)");
  add_setting(sw, sw_s, "metric", "cv | umass (default cv)");
  add_setting(sw, sw_s, "top-n", "Top words per topic (default 20)");
  add_setting(sw, sw_s, "window", "C_v sliding window (default 110)");
  add_trainer_flags(sw, sw_s);

  // train
  Settings tr_s;
  auto* tr = app.add_subcommand("train", "Train LDA on clean.jsonl and write the model file");
  tr->add_option("--input", inputs, "clean.jsonl")->required()->expected(1);
  tr->add_option("--output", output, "Model file")->required();
  add_setting(tr, tr_s, "k", "Number of topics (default 20)");
  add_trainer_flags(tr, tr_s);

  // label
  Settings lb_s;
  auto* lb = app.add_subcommand("label", "Cluster aspect terms by dominant topic and label topics");
  lb->add_option("--model", model_path, "Model file")->required();
  lb->add_option("--aspects", aspects_path, "aspects.jsonl")->required();
  lb->add_option("--output", output, "labels.json")->required();
  add_setting(lb, lb_s, "top-unigrams", "Unigrams listed per topic (default 20)");

  // assign
  Settings as_s;
  auto* as = app.add_subcommand("assign", "Assign each tweet its topic and label");
  as->add_option("--input", inputs, "Tweet CSV file(s)")->required();
  as->add_option("--model", model_path, "Model file")->required();
  as->add_option("--labels", labels_path, "labels.json")->required();
  as->add_option("--output", output, "assigned.csv")->required();
  as->add_flag("--in-corpus", in_corpus, "Use the trained topic mixture for tweet ids the model has seen");
  add_setting(as, as_s, "fold-in-iterations", "Gibbs fold-in sweeps for unseen tweets (default 100)");
  add_setting(as, as_s, "seed", "Fold-in seed (required)");
  add_preprocess_flags(as, as_s);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Accuracy and confusion matrix against gold labels");
  ev->add_option("--assigned", assigned_path, "assigned.csv")->required();
  ev->add_option("--gold", gold_path, "Gold labels CSV (tweet_id,label)")->required();
  ev->add_option("--output", output, "report.json; the matrix goes to <stem>.confusion.csv")->required();

  // map
  auto* mp = app.add_subcommand("map", "Intertopic distance map (JSD + classical MDS)");
  mp->add_option("--model", model_path, "Model file")->required();
  mp->add_option("--output", output, "map.json")->required();
  mp->add_option("--labels", labels_path, "labels.json for circle captions");
  mp->add_option("--svg", svg_path, "Also render an SVG");

  // run
  Settings run_s;
  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  run->add_option("--config", config_path, "key = value config file; flags override it");
  for (const char* key : {"input", "output-dir", "lexicon-dir", "k", "k-min", "k-max", "k-step",
                          "sweep-iterations", "metric", "top-n", "window", "top-unigrams", "svg"}) {
    add_setting(run, run_s, key, std::string("see README (") + key + ")");
  }
  add_preprocess_flags(run, run_s);
  add_trainer_flags(run, run_s);

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (pre->parsed()) {
      const auto cfg = config_from(pre_s);
      const auto ds = read_inputs(inputs, cfg);
      const auto docs = tl::preprocess_corpus(ds.tweets, cfg.pipeline_config());
      tl::io::write_atomic(output, tl::io::clean_docs_jsonl(docs));
      std::size_t dropped = 0;
      for (const auto& d : docs) dropped += d.dropped;
      std::cerr << docs.size() << " tweets, " << dropped << " dropped\n";
    } else if (asp->parsed()) {
      const auto cfg = config_from(asp_s);
      const auto ds = read_inputs(inputs, cfg);
      const tl::RuleTagger tagger(lexicon_dir.empty() ? tl::Lexicon::bundled()
                                                      : tl::Lexicon::from_directory(lexicon_dir));
      const auto aspects = tl::extract_corpus_aspects(ds.tweets, cfg.pipeline_config(), tagger);
      tl::io::write_atomic(output, tl::io::aspects_jsonl(aspects, ds.tweets));
    } else if (sw->parsed()) {
      auto cfg = config_from(sw_s);
      require_seed(cfg);
      if (cfg.k_min < 2 || cfg.k_max < cfg.k_min) throw tl::Error("--k-min/--k-max must satisfy 2 <= k-min <= k-max");
      const auto docs = tl::io::read_clean_docs(inputs.front());
      tl::Vocabulary vocab;
      const auto corpus = bow_corpus(docs, cfg, vocab);
      tl::SweepOptions opts;
      opts.lda = cfg.lda_params(0);
      opts.metric = cfg.metric;
      opts.top_n = cfg.top_n;
      opts.window = cfg.window;
      const auto report = tl::sweep_k(docs, corpus, vocab, cfg.k_candidates(), opts);
      tl::io::write_atomic(output, tl::io::curve_csv(report));
      std::cerr << "chosen k (argmax " << tl::to_string(report.metric) << "): " << report.chosen_k << "\n";
    } else if (tr->parsed()) {
      const auto cfg = config_from(tr_s);
      require_seed(cfg);
      const auto docs = tl::io::read_clean_docs(inputs.front());
      tl::Vocabulary vocab;
      const auto corpus = bow_corpus(docs, cfg, vocab);
      const auto model = tl::train_lda(corpus, vocab, cfg.lda_params(cfg.k));
      tl::io::write_atomic(output, tl::model_to_json(model).dump() + "\n");
      std::cerr << "trained K=" << model.num_topics << " on " << corpus.size() << " docs, V=" << vocab.size()
                << ", alpha_sum=" << cfg.alpha_sum << ", beta=" << cfg.beta << ", iterations=" << cfg.iterations
                << "\n";
    } else if (lb->parsed()) {
      const auto cfg = config_from(lb_s);
      const auto model = tl::load_model(model_path);
      const auto aspects = tl::io::read_aspects(aspects_path);
      std::vector<tl::DominantAssignment> assignments;
      for (std::size_t r = 0; r < model.num_docs(); ++r) {
        if (model.doc_lengths[r] > 0) assignments.push_back(tl::dominant_topic(model, model.doc_ids[r]));
      }
      const auto clusters = tl::cluster_aspect_terms(assignments, aspects, model.num_topics);
      const auto labels = tl::assign_labels(clusters);
      tl::io::write_atomic(output, tl::io::labels_to_json(labels, clusters, cfg.top_unigrams).dump(2) + "\n");
    } else if (as->parsed()) {
      const auto cfg = config_from(as_s);
      require_seed(cfg);
      const auto model = tl::load_model(model_path);
      const auto labels = tl::io::read_labels(labels_path);
      const auto ds = read_inputs(inputs, cfg);
      const auto pcfg = cfg.pipeline_config();
      std::vector<tl::io::AssignedRow> rows;
      for (const auto& t : ds.tweets) {
        tl::TweetLabel tlab;
        if (in_corpus && model.row_of(t.id) >= 0) {
          tlab = tl::label_tweet(model, labels, t.id);
        } else {
          const auto doc = tl::preprocess_tweet(t, pcfg);
          if (!doc.dropped) {
            tlab = tl::label_tweet(model, labels, tl::doc2bow(doc, model.vocab), cfg.fold_in_iterations,
                                   *cfg.seed + static_cast<std::uint64_t>(t.id));
          }
        }
        rows.push_back({t.id, tlab.topic, tlab.label});
      }
      tl::io::write_atomic(output, tl::io::assigned_csv(rows));
    } else if (ev->parsed()) {
      const auto predicted = tl::io::read_assigned(assigned_path);
      const auto gold = tl::load_gold_labels(gold_path);
      const auto report = tl::io::evaluation_report(predicted, gold);
      tl::io::write_atomic(output, report.dump(2) + "\n");
      fs::path matrix = output;
      matrix.replace_extension(".confusion.csv");
      tl::io::write_atomic(matrix, tl::io::confusion_csv(tl::confusion(predicted, gold)));
      std::cout << "accuracy " << report["accuracy"].get<double>() << " (" << report["correct"] << "/"
                << report["evaluated"] << ")\n";
    } else if (mp->parsed()) {
      const auto model = tl::load_model(model_path);
      const auto labels = labels_path.empty() ? std::vector<tl::TopicLabel>{} : tl::io::read_labels(labels_path);
      const auto map = tl::intertopic_map(model);
      auto j = tl::io::map_to_json(map, labels);
      j["seed"] = model.seed;
      tl::io::write_atomic(output, j.dump(2) + "\n");
      if (!svg_path.empty()) tl::io::write_atomic(svg_path, tl::io::map_svg(map, labels));
    } else if (run->parsed()) {
      tl::RunConfig cfg;
      if (!config_path.empty()) cfg.apply_file_text(tl::text::read_file(config_path));
      for (const auto& [k, v] : run_s) cfg.set(k, v);
      stage = "config";
      cfg.validate();
      stage = "run";
      const auto summary = tl::run_pipeline(cfg, [](const std::string& m) { std::cerr << m << "\n"; });
      std::cerr << summary.tweets << " tweets, " << summary.trained_docs << " modeled, K=" << summary.num_topics
                << ", V=" << summary.vocab_size << "\n";
      for (const auto& l : summary.labels) std::cout << l.topic << "\t" << l.label << "\n";
    }
  } catch (const tl::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: [" << stage << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
