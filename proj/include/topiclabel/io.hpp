#pragma once

// Readers and writers for the pipeline's on-disk artifacts.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topiclabel/aspect.hpp"
#include "topiclabel/coherence.hpp"
#include "topiclabel/csv.hpp"
#include "topiclabel/eval.hpp"
#include "topiclabel/geometry.hpp"
#include "topiclabel/labeling.hpp"
#include "topiclabel/preprocess.hpp"

namespace topiclabel::io {

using nlohmann::json;

/// Writes `<path>.partial` and renames it over `path` once complete.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto partial = path;
  partial += ".partial";
  {
    std::ofstream os(partial, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + partial.string());
    os << content;
    if (!os) throw Error("write failed: " + partial.string());
  }
  std::filesystem::rename(partial, path);
}

template <typename F>
void read_jsonl(const std::string& path, F&& per_line) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      per_line(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

// clean.jsonl: {"id":N,"tokens":[...],"dropped":bool}
inline std::string clean_docs_jsonl(const std::vector<CleanDoc>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += json{{"id", d.id}, {"tokens", d.tokens}, {"dropped", d.dropped}}.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<CleanDoc> read_clean_docs(const std::string& path) {
  std::vector<CleanDoc> docs;
  read_jsonl(path, [&](const json& j) {
    docs.push_back({j.at("id").get<std::int64_t>(), j.at("tokens").get<std::vector<std::string>>(),
                    j.value("dropped", false)});
  });
  return docs;
}

// aspects.jsonl: {"id":N,"aspects":[{"phrase":..,"unigrams":[..]}]}
inline std::string aspects_jsonl(const std::vector<std::vector<AspectTerm>>& per_tweet,
                                 const std::vector<RawTweet>& tweets) {
  std::string out;
  for (std::size_t i = 0; i < per_tweet.size(); ++i) {
    json arr = json::array();
    for (const auto& a : per_tweet[i]) arr.push_back({{"phrase", a.phrase}, {"unigrams", a.unigrams}});
    out += json{{"id", tweets[i].id}, {"aspects", arr}}.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<AspectTerm> read_aspects(const std::string& path) {
  std::vector<AspectTerm> out;
  read_jsonl(path, [&](const json& j) {
    const auto id = j.at("id").get<std::int64_t>();
    for (const auto& a : j.at("aspects")) {
      out.push_back({a.at("phrase").get<std::string>(), a.at("unigrams").get<std::vector<std::string>>(), id});
    }
  });
  return out;
}

// labels.json: [{topic,label,label_count,rank_used,top_unigrams:[{word,count}]}]
inline json labels_to_json(const std::vector<TopicLabel>& labels,
                           const std::vector<AspectCluster>& clusters, std::size_t top = 20) {
  json arr = json::array();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    json tops = json::array();
    const auto ranked = ranked_unigrams(clusters[i]);
    for (std::size_t r = 0; r < ranked.size() && r < top; ++r) {
      tops.push_back({{"word", ranked[r].first}, {"count", ranked[r].second}});
    }
    arr.push_back({{"topic", l.topic},
                   {"label", l.label},
                   {"label_count", l.label_count},
                   {"rank_used", l.rank_used},
                   {"top_unigrams", tops}});
  }
  return arr;
}

inline std::vector<TopicLabel> read_labels(const std::string& path) {
  const auto j = json::parse(text::read_file(path));
  std::vector<TopicLabel> out;
  for (const auto& e : j) {
    TopicLabel l;
    l.topic = e.at("topic").get<std::int32_t>();
    l.label = e.at("label").get<std::string>();
    l.label_count = e.at("label_count").get<std::int64_t>();
    l.rank_used = e.at("rank_used").get<std::int32_t>();
    l.fallback = l.label == fallback_label(l.topic);
    out.push_back(std::move(l));
  }
  return out;
}

inline std::string curve_csv(const CoherenceReport& report) {
  std::string out = "k,score\n";
  char buf[64];
  for (const auto& [k, s] : report.per_k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", k, s);
    out += buf;
  }
  return out;
}

struct AssignedRow {
  std::int64_t tweet_id = 0;
  std::int32_t topic = -1;
  std::string label;
};

inline std::string assigned_csv(const std::vector<AssignedRow>& rows) {
  std::ostringstream os;
  csv::write_row(os, {"tweet_id", "topic", "label"});
  for (const auto& r : rows) csv::write_row(os, {std::to_string(r.tweet_id), std::to_string(r.topic), r.label});
  return os.str();
}

/// Predictions from an assigned.csv; unlabelable rows (topic -1) are kept
/// with an empty label so they count as misses.
inline std::vector<Prediction> read_assigned(const std::string& path) {
  const std::string content = text::sanitize_utf8(text::read_file(path));
  csv::Reader reader(content, ',');
  auto header = reader.next();
  if (!header || header->fields.size() < 3) throw Error(path + ": expected tweet_id,topic,label header");
  std::vector<Prediction> out;
  while (auto rec = reader.next()) {
    if (csv::is_blank(*rec)) continue;
    if (rec->fields.size() < 3) throw Error(path + ":" + std::to_string(rec->line) + ": expected 3 fields");
    std::int64_t id = 0;
    if (!detail::parse_int64(rec->fields[0], id)) {
      throw Error(path + ":" + std::to_string(rec->line) + ": non-integer tweet_id");
    }
    out.emplace_back(id, rec->fields[2]);
  }
  return out;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json map_to_json(const TopicMap& map, const std::vector<TopicLabel>& labels) {
  json j;
  j["num_topics"] = map.prevalence.size();
  j["coords"] = matrix_to_json(map.coords);
  j["prevalence"] = map.prevalence;
  j["distance"] = matrix_to_json(map.distance);
  json names = json::array();
  for (std::size_t k = 0; k < map.prevalence.size(); ++k) {
    names.push_back(labels.empty() ? fallback_label(static_cast<std::int32_t>(k))
                                   : label_of(labels, static_cast<std::int32_t>(k)));
  }
  j["labels"] = names;
  return j;
}

/// Circles at the MDS coordinates with area proportional to prevalence.
inline std::string map_svg(const TopicMap& map, const std::vector<TopicLabel>& labels) {
  const std::size_t K = map.prevalence.size();
  const double size = 600.0, margin = 80.0, max_radius = 60.0;
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  for (std::size_t k = 0; k < K; ++k) {
    lo_x = std::min(lo_x, map.coords(k, 0));
    hi_x = std::max(hi_x, map.coords(k, 0));
    lo_y = std::min(lo_y, map.coords(k, 1));
    hi_y = std::max(hi_y, map.coords(k, 1));
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (size - 2 * margin) / span;
  double max_prev = 0.0;
  for (double p : map.prevalence) max_prev = std::max(max_prev, p);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  os << "<line x1=\"0\" y1=\"" << size / 2 << "\" x2=\"" << size << "\" y2=\"" << size / 2
     << "\" stroke=\"#ccc\"/>\n<line x1=\"" << size / 2 << "\" y1=\"0\" x2=\"" << size / 2 << "\" y2=\""
     << size << "\" stroke=\"#ccc\"/>\n";
  for (std::size_t k = 0; k < K; ++k) {
    const double cx = size / 2 + (map.coords(k, 0) - (lo_x + hi_x) / 2) * scale;
    const double cy = size / 2 - (map.coords(k, 1) - (lo_y + hi_y) / 2) * scale;
    const double r = max_prev > 0 ? max_radius * std::sqrt(map.prevalence[k] / max_prev) : 1.0;
    const std::string name = labels.empty() ? fallback_label(static_cast<std::int32_t>(k))
                                            : label_of(labels, static_cast<std::int32_t>(k));
    os << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
       << "\" fill=\"#4a90d9\" fill-opacity=\"0.35\" stroke=\"#1f4e79\"/>\n";
    os << "<text x=\"" << cx << "\" y=\"" << cy << "\" font-size=\"12\" text-anchor=\"middle\">" << k
       << ": " << name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline json evaluation_report(const std::vector<Prediction>& predicted, const GoldLabelSet& gold) {
  const auto m = confusion(predicted, gold);
  json j;
  j["evaluated"] = m.total();
  j["correct"] = m.trace();
  j["accuracy"] = accuracy(predicted, gold);
  j["labels"] = m.labels;
  j["confusion"] = m.counts;
  json stats = json::array();
  for (const auto& s : per_label_stats(m)) {
    stats.push_back({{"label", s.label}, {"support", s.support}, {"precision", s.precision},
                     {"recall", s.recall}, {"f1", s.f1}});
  }
  // convenience statistics, not part of the accuracy computation
  j["per_label_convenience"] = stats;
  return j;
}

inline std::string confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream os;
  std::vector<std::string> header{"gold\\predicted"};
  header.insert(header.end(), m.labels.begin(), m.labels.end());
  csv::write_row(os, header);
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    std::vector<std::string> row{m.labels[i]};
    for (auto c : m.counts[i]) row.push_back(std::to_string(c));
    csv::write_row(os, row);
  }
  return os.str();
}

}  // namespace topiclabel::io
