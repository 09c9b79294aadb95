#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "topiclabel/bundled_data.hpp"
#include "topiclabel/preprocess.hpp"
#include "topiclabel/text_util.hpp"

namespace topiclabel {

enum class PosTag { NOUN, VERB, ADJ, ADV, DET, PRON, PREP, CONJ, NUM, OTHER };

inline std::string_view to_string(PosTag t) {
  static constexpr std::array<std::string_view, 10> kNames = {
      "NOUN", "VERB", "ADJ", "ADV", "DET", "PRON", "PREP", "CONJ", "NUM", "OTHER"};
  return kNames[static_cast<std::size_t>(t)];
}

struct TaggedToken {
  std::string word;
  PosTag tag = PosTag::OTHER;
};

struct AspectTerm {
  std::string phrase;
  std::vector<std::string> unigrams;
  std::int64_t source_doc = 0;
};

/// Word lists per tag class. `aux` holds auxiliaries and modals, which are
/// tagged VERB but also drive the contextual rules.
struct Lexicon {
  enum Class { kDet, kPron, kPrep, kConj, kAux, kVerb, kAdv, kAdj, kNoun, kOther, kNumClasses };
  static constexpr std::array<std::string_view, kNumClasses> kFileNames = {
      "det", "pron", "prep", "conj", "aux", "verb", "adv", "adj", "noun", "other"};

  std::array<std::unordered_set<std::string>, kNumClasses> words;

  bool has(Class c, const std::string& w) const { return words[c].contains(w); }

  void load(Class c, std::string_view content) {
    words[c].clear();
    for (auto& w : text::nonempty_lines(content)) words[c].insert(text::to_lower_ascii(w));
  }

  static Lexicon bundled() {
    Lexicon lex;
    lex.load(kDet, bundled::lexicon_det);
    lex.load(kPron, bundled::lexicon_pron);
    lex.load(kPrep, bundled::lexicon_prep);
    lex.load(kConj, bundled::lexicon_conj);
    lex.load(kAux, bundled::lexicon_aux);
    lex.load(kVerb, bundled::lexicon_verb);
    lex.load(kAdv, bundled::lexicon_adv);
    lex.load(kAdj, bundled::lexicon_adj);
    lex.load(kNoun, bundled::lexicon_noun);
    lex.load(kOther, bundled::lexicon_other);
    return lex;
  }

  /// Bundled lexicon with any `<class>.txt` present in `dir` replacing the
  /// corresponding list.
  static Lexicon from_directory(const std::string& dir) {
    Lexicon lex = bundled();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const std::string path = dir + "/" + std::string(kFileNames[c]) + ".txt";
      std::ifstream probe(path);
      if (probe) lex.load(static_cast<Class>(c), text::read_file(path));
    }
    return lex;
  }
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<TaggedToken> tag(const std::vector<std::string>& tokens) const = 0;
};

/// Deterministic lexicon + suffix + left-context tagger.
class RuleTagger final : public Tagger {
 public:
  RuleTagger() : lex_(Lexicon::bundled()) {}
  explicit RuleTagger(Lexicon lex) : lex_(std::move(lex)) {}

  std::vector<TaggedToken> tag(const std::vector<std::string>& tokens) const override {
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string* prev_word = i ? &tokens[i - 1] : nullptr;
      const PosTag* prev_tag = i ? &out.back().tag : nullptr;
      out.push_back({tokens[i], tag_one(tokens[i], prev_word, prev_tag)});
    }
    return out;
  }

 private:
  static bool ends_with(const std::string& w, std::string_view suf) {
    return w.size() > suf.size() && std::string_view(w).substr(w.size() - suf.size()) == suf;
  }

  bool verb_context(const std::string* pw) const {
    if (!pw) return false;
    static const std::unordered_set<std::string> kSubjects = {"i", "we", "you", "they",
                                                              "he", "she", "it", "to",
                                                              "not", "never"};
    return lex_.has(Lexicon::kAux, *pw) || kSubjects.contains(*pw);
  }

  bool known_noun(const std::string& w) const {
    if (lex_.has(Lexicon::kNoun, w)) return true;
    if (ends_with(w, "es") && lex_.has(Lexicon::kNoun, w.substr(0, w.size() - 2))) return true;
    return ends_with(w, "s") && lex_.has(Lexicon::kNoun, w.substr(0, w.size() - 1));
  }

  bool known_verb(const std::string& w) const {
    if (lex_.has(Lexicon::kVerb, w)) return true;
    for (std::string_view suf : {"s", "es", "ed", "d"}) {
      if (ends_with(w, suf) && lex_.has(Lexicon::kVerb, w.substr(0, w.size() - suf.size()))) {
        return true;
      }
    }
    return false;
  }

  PosTag tag_one(const std::string& w, const std::string* pw, const PosTag* pt) const {
    if (w == "'s") return PosTag::DET;
    if (!w.empty() && std::all_of(w.begin(), w.end(), text::is_ascii_digit)) return PosTag::NUM;
    if (lex_.has(Lexicon::kDet, w)) return PosTag::DET;
    if (lex_.has(Lexicon::kPron, w)) return PosTag::PRON;
    if (lex_.has(Lexicon::kPrep, w)) return PosTag::PREP;
    if (lex_.has(Lexicon::kConj, w)) return PosTag::CONJ;
    if (lex_.has(Lexicon::kAux, w)) return PosTag::VERB;
    if (lex_.has(Lexicon::kOther, w)) return PosTag::OTHER;
    if (lex_.has(Lexicon::kAdv, w)) return PosTag::ADV;
    if (lex_.has(Lexicon::kAdj, w)) return PosTag::ADJ;

    const bool noun = known_noun(w);
    const bool verb = known_verb(w);
    if (noun && verb) return verb_context(pw) ? PosTag::VERB : PosTag::NOUN;
    if (noun) return PosTag::NOUN;
    if (verb) return PosTag::VERB;

    if (ends_with(w, "ing") && w.size() > 4) {
      if (pw && (*pw == "more" || *pw == "of")) return PosTag::NOUN;
      if (pt && (*pt == PosTag::ADJ || *pt == PosTag::DET || *pt == PosTag::NOUN)) {
        return PosTag::NOUN;
      }
      return PosTag::VERB;
    }
    if (ends_with(w, "ly")) return PosTag::ADV;
    for (std::string_view suf : {"tion", "sion", "ment", "ness", "ity", "ship", "ism"}) {
      if (ends_with(w, suf)) return PosTag::NOUN;
    }
    for (std::string_view suf : {"ous", "ful", "ive", "able", "ible", "al", "ic"}) {
      if (ends_with(w, suf)) return PosTag::ADJ;
    }
    if (ends_with(w, "ed") && w.size() > 3) {
      if (pt && (*pt == PosTag::DET || *pt == PosTag::ADJ)) return PosTag::ADJ;
      return PosTag::VERB;
    }
    if (verb_context(pw)) return PosTag::VERB;
    return PosTag::NOUN;
  }

  Lexicon lex_;
};

inline const Tagger& default_tagger() {
  static const RuleTagger tagger;
  return tagger;
}

inline std::vector<TaggedToken> pos_tag(const std::vector<std::string>& tokens,
                                        const Tagger& tagger = default_tagger()) {
  return tagger.tag(tokens);
}

namespace detail {

inline bool is_clause_break(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case '(': case ')':
    case '[': case ']': case '{': case '}': case '"': case '|':
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// Cleaning path for chunking: function words are kept and the text is
/// split into clauses at sentence punctuation. Words are `[a-z]+`, possessive
/// `'s` becomes its own token, digit runs become number tokens.
inline std::vector<std::vector<std::string>> aspect_segments(std::string_view raw,
                                                             const PipelineConfig& cfg) {
  std::string s = text::to_lower_ascii(detail::fold_apostrophes(raw));
  s = detail::remove_links(s);
  s = detail::remove_marked_words(s, '@');
  s = detail::remove_marked_words(s, '#');
  s = detail::expand_contractions(s, cfg.contractions);

  std::string ascii;
  ascii.reserve(s.size());
  for (char c : s) {
    if (static_cast<unsigned char>(c) < 0x80) ascii.push_back(c);
  }

  std::vector<std::vector<std::string>> segments(1);
  std::size_t i = 0;
  while (i < ascii.size()) {
    const char c = ascii[i];
    if (text::is_ascii_lower(c)) {
      std::size_t j = i;
      while (j < ascii.size() && text::is_ascii_lower(ascii[j])) ++j;
      segments.back().emplace_back(ascii.substr(i, j - i));
      i = j;
    } else if (text::is_ascii_digit(c)) {
      std::size_t j = i;
      while (j < ascii.size() && text::is_ascii_digit(ascii[j])) ++j;
      segments.back().emplace_back(ascii.substr(i, j - i));
      i = j;
    } else if (c == '\'' && i + 1 < ascii.size() && ascii[i + 1] == 's' &&
               i > 0 && text::is_ascii_lower(ascii[i - 1]) &&
               (i + 2 == ascii.size() || !text::is_ascii_lower(ascii[i + 2]))) {
      segments.back().emplace_back("'s");
      i += 2;
    } else {
      if (detail::is_clause_break(c) && !segments.back().empty()) segments.emplace_back();
      ++i;
    }
  }
  if (segments.back().empty()) segments.pop_back();
  return segments;
}

/// Noun chunks `(ADJ|NOUN)* NOUN` over tagged clauses. A chunk's unigrams
/// are its NOUN words that survive the stopword and length filters.
inline std::vector<AspectTerm> chunk_aspect_terms(const std::vector<TaggedToken>& tagged,
                                                  const PipelineConfig& cfg,
                                                  std::int64_t doc_id) {
  std::vector<AspectTerm> out;
  std::size_t i = 0;
  while (i < tagged.size()) {
    if (tagged[i].tag != PosTag::ADJ && tagged[i].tag != PosTag::NOUN) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t last_noun = tagged.size();
    while (j < tagged.size() && (tagged[j].tag == PosTag::ADJ || tagged[j].tag == PosTag::NOUN)) {
      if (tagged[j].tag == PosTag::NOUN) last_noun = j;
      ++j;
    }
    if (last_noun != tagged.size()) {
      AspectTerm term;
      term.source_doc = doc_id;
      for (std::size_t k = i; k <= last_noun; ++k) {
        if (!term.phrase.empty()) term.phrase.push_back(' ');
        term.phrase += tagged[k].word;
        const auto& w = tagged[k].word;
        if (tagged[k].tag == PosTag::NOUN && w.size() >= cfg.min_token_len &&
            !cfg.stopwords.contains(w)) {
          term.unigrams.push_back(w);
        }
      }
      if (!term.unigrams.empty()) out.push_back(std::move(term));
    }
    i = j;
  }
  return out;
}

inline std::vector<AspectTerm> extract_aspect_terms(std::string_view text, const PipelineConfig& cfg,
                                                    std::int64_t doc_id = 0,
                                                    const Tagger& tagger = default_tagger()) {
  std::vector<AspectTerm> out;
  for (const auto& seg : aspect_segments(text, cfg)) {
    auto terms = chunk_aspect_terms(tagger.tag(seg), cfg, doc_id);
    for (auto& t : terms) out.push_back(std::move(t));
  }
  return out;
}

/// Aspect terms for every tweet, grouped per tweet in input order.
inline std::vector<std::vector<AspectTerm>> extract_corpus_aspects(
    const std::vector<RawTweet>& tweets, const PipelineConfig& cfg,
    const Tagger& tagger = default_tagger()) {
  std::vector<std::vector<AspectTerm>> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(extract_aspect_terms(t.text, cfg, t.id, tagger));
  return out;
}

}  // namespace topiclabel
