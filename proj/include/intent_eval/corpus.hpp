#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "intent_eval/error.hpp"
#include "intent_eval/segment.hpp"
#include "intent_eval/text.hpp"

namespace intent_eval {

enum class Category { corruption, land_dispute, murder, robbery };

inline constexpr std::array<Category, 4> all_categories{Category::corruption, Category::land_dispute,
                                                        Category::murder, Category::robbery};

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::corruption: return "corruption";
    case Category::land_dispute: return "land_dispute";
    case Category::murder: return "murder";
    case Category::robbery: return "robbery";
  }
  return "unknown";
}

inline std::optional<Category> parse_category(std::string_view s) {
  for (Category c : all_categories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct Document {
  std::string id;
  Category category = Category::corruption;
  std::string raw_text;
  std::vector<Sentence> sentences;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.tokens.size();
    return n;
  }
  Tokens all_tokens() const {
    Tokens out;
    out.reserve(token_count());
    for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
  }
  friend bool operator==(const Document&, const Document&) = default;
};

struct Phrase {
  std::string text;
  Tokens tokens;
  friend bool operator==(const Phrase&, const Phrase&) = default;
};

/// The annotated intent phrases of one document. An empty list is legal only
/// when `unannotated` is set; such documents are excluded from intent averages.
struct IntentPhraseSet {
  std::string doc_id;
  std::vector<Phrase> phrases;
  bool unannotated = false;
  friend bool operator==(const IntentPhraseSet&, const IntentPhraseSet&) = default;
};

struct SummaryRecord {
  std::string doc_id;
  std::string method;
  double ratio = 1.0;
  std::string text;
  std::vector<Sentence> sentences;

  Tokens all_tokens() const {
    Tokens out;
    for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
  }
  friend bool operator==(const SummaryRecord&, const SummaryRecord&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<IntentPhraseSet> phrase_sets;  // parallel to documents
  std::vector<SummaryRecord> summaries;

  const Document* find_document(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &documents[it->second];
  }
  const IntentPhraseSet* find_phrases(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &phrase_sets[it->second];
  }
  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < documents.size(); ++i) index_.emplace(documents[i].id, i);
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.documents == b.documents && a.phrase_sets == b.phrase_sets && a.summaries == b.summaries;
  }

 private:
  std::map<std::string, std::size_t> index_;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& path, std::size_t line, const std::string& why) {
  fail(errc::malformed_record, path + ":" + std::to_string(line) + ": " + why);
}

inline const std::string& require_string(const nlohmann::json& obj, const char* key, const std::string& path,
                                         std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(path, line, std::string("missing \"") + key + "\" field");
  if (!it->is_string()) malformed(path, line, std::string("\"") + key + "\" must be a string");
  return it->get_ref<const std::string&>();
}

/// Calls fn(json, line_number) for every non-blank line of a JSON Lines file.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(path, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(path, lineno, "record must be a JSON object");
    fn(obj, lineno);
  }
}

}  // namespace detail

inline Document make_document(std::string id, Category category, std::string raw_text,
                              const AbbreviationList& abbreviations = default_abbreviations()) {
  Document d{std::move(id), category, std::move(raw_text), {}};
  d.sentences = segment_sentences(d.raw_text, abbreviations);
  return d;
}

inline SummaryRecord make_summary(std::string doc_id, std::string method, double ratio, std::string text,
                                  const AbbreviationList& abbreviations = default_abbreviations()) {
  SummaryRecord s{std::move(doc_id), std::move(method), ratio, std::move(text), {}};
  s.sentences = segment_sentences(s.text, abbreviations);
  return s;
}

inline Phrase make_phrase(std::string text) {
  Phrase p{std::move(text), {}};
  p.tokens = tokenize(p.text);
  return p;
}

inline std::vector<Document> load_documents(const std::string& path,
                                            const AbbreviationList& abbreviations = default_abbreviations()) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  detail::for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t line) {
    const std::string& id = detail::require_string(obj, "id", path, line);
    const std::string& cat = detail::require_string(obj, "category", path, line);
    const std::string& text = detail::require_string(obj, "text", path, line);
    if (id.empty()) detail::malformed(path, line, "\"id\" must be nonempty");
    auto category = parse_category(cat);
    if (!category) detail::malformed(path, line, "unknown category \"" + cat + "\"");
    if (!seen.insert(id).second) {
      fail(errc::duplicate_document_id, path + ":" + std::to_string(line) + ": duplicate document id \"" + id + "\"");
    }
    Document d = make_document(id, *category, text, abbreviations);
    if (d.sentences.empty()) detail::malformed(path, line, "document \"" + id + "\" has no tokens");
    docs.push_back(std::move(d));
  });
  return docs;
}

/// Loads documents, phrase sets and summaries and resolves every reference.
/// Documents without a phrases record get an empty, unannotated set.
inline Corpus load_corpus(const std::string& documents_path, const std::string& phrases_path,
                          const std::string& summaries_path,
                          const AbbreviationList& abbreviations = default_abbreviations()) {
  Corpus corpus;
  corpus.documents = load_documents(documents_path, abbreviations);
  corpus.reindex();
  corpus.phrase_sets.resize(corpus.documents.size());
  std::vector<bool> have_phrases(corpus.documents.size(), false);
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    corpus.phrase_sets[i].doc_id = corpus.documents[i].id;
    corpus.phrase_sets[i].unannotated = true;
  }

  if (!phrases_path.empty()) {
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < corpus.documents.size(); ++i) position.emplace(corpus.documents[i].id, i);
    detail::for_each_jsonl(phrases_path, [&](const nlohmann::json& obj, std::size_t line) {
      const std::string& doc_id = detail::require_string(obj, "doc_id", phrases_path, line);
      auto it = obj.find("phrases");
      if (it == obj.end()) detail::malformed(phrases_path, line, "missing \"phrases\" field");
      if (!it->is_array()) detail::malformed(phrases_path, line, "\"phrases\" must be an array");
      auto pos = position.find(doc_id);
      if (pos == position.end()) {
        fail(errc::dangling_reference,
             phrases_path + ":" + std::to_string(line) + ": unknown doc_id \"" + doc_id + "\"");
      }
      if (have_phrases[pos->second]) {
        detail::malformed(phrases_path, line, "second phrases record for \"" + doc_id + "\"");
      }
      have_phrases[pos->second] = true;
      IntentPhraseSet& set = corpus.phrase_sets[pos->second];
      for (const auto& p : *it) {
        if (!p.is_string()) detail::malformed(phrases_path, line, "phrase entries must be strings");
        Phrase phrase = make_phrase(p.get<std::string>());
        if (phrase.tokens.empty()) {
          detail::malformed(phrases_path, line, "phrase \"" + phrase.text + "\" has no tokens");
        }
        set.phrases.push_back(std::move(phrase));
      }
      set.unannotated = set.phrases.empty();
    });
  }

  if (!summaries_path.empty()) {
    std::set<std::tuple<std::string, std::string, double>> keys;
    detail::for_each_jsonl(summaries_path, [&](const nlohmann::json& obj, std::size_t line) {
      const std::string& doc_id = detail::require_string(obj, "doc_id", summaries_path, line);
      const std::string& method = detail::require_string(obj, "method", summaries_path, line);
      const std::string& text = detail::require_string(obj, "summary", summaries_path, line);
      auto r = obj.find("ratio");
      if (r == obj.end()) detail::malformed(summaries_path, line, "missing \"ratio\" field");
      if (!r->is_number()) detail::malformed(summaries_path, line, "\"ratio\" must be a number");
      const double ratio = r->get<double>();
      if (!(ratio > 0.0 && ratio <= 1.0)) detail::malformed(summaries_path, line, "\"ratio\" must lie in (0, 1]");
      if (!corpus.find_document(doc_id)) {
        fail(errc::dangling_reference,
             summaries_path + ":" + std::to_string(line) + ": unknown doc_id \"" + doc_id + "\"");
      }
      if (!keys.emplace(doc_id, method, ratio).second) {
        detail::malformed(summaries_path, line, "duplicate summary for (" + doc_id + ", " + method + ")");
      }
      corpus.summaries.push_back(make_summary(doc_id, method, ratio, text, abbreviations));
    });
  }
  return corpus;
}

/// Writes the three JSON Lines files in the load_corpus input formats.
inline void save_corpus(const Corpus& corpus, const std::string& documents_path, const std::string& phrases_path,
                        const std::string& summaries_path) {
  auto open = [](const std::string& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot write " + p);
    return out;
  };
  {
    auto out = open(documents_path);
    for (const auto& d : corpus.documents) {
      nlohmann::json j{{"id", d.id}, {"category", to_string(d.category)}, {"text", d.raw_text}};
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open(phrases_path);
    for (const auto& set : corpus.phrase_sets) {
      nlohmann::json phrases = nlohmann::json::array();
      for (const auto& p : set.phrases) phrases.push_back(p.text);
      out << nlohmann::json{{"doc_id", set.doc_id}, {"phrases", phrases}}.dump() << '\n';
    }
  }
  {
    auto out = open(summaries_path);
    for (const auto& s : corpus.summaries) {
      nlohmann::json j{{"doc_id", s.doc_id}, {"method", s.method}, {"ratio", s.ratio}, {"summary", s.text}};
      out << j.dump() << '\n';
    }
  }
}

struct CategoryStats {
  Category category = Category::corruption;
  std::size_t doc_count = 0;
  double avg_words_per_doc = 0.0;
  double avg_sentences_per_doc = 0.0;
  double avg_words_per_intent_phrase = 0.0;
};

/// One row per category, in enum order; empty categories give zero rows.
/// Phrase length is averaged over all phrases of the category.
inline std::vector<CategoryStats> corpus_stats(const std::vector<Document>& documents,
                                               const std::vector<IntentPhraseSet>& phrase_sets) {
  if (documents.empty()) fail(errc::empty_corpus, "corpus statistics need at least one document");
  std::map<std::string_view, const IntentPhraseSet*> phrases_by_doc;
  for (const auto& set : phrase_sets) phrases_by_doc[set.doc_id] = &set;

  std::vector<CategoryStats> rows;
  for (Category c : all_categories) {
    CategoryStats row;
    row.category = c;
    std::size_t words = 0, sentences = 0, phrase_words = 0, phrase_count = 0;
    for (const auto& d : documents) {
      if (d.category != c) continue;
      ++row.doc_count;
      words += d.token_count();
      sentences += d.sentences.size();
      if (auto it = phrases_by_doc.find(d.id); it != phrases_by_doc.end()) {
        for (const auto& p : it->second->phrases) {
          phrase_words += p.tokens.size();
          ++phrase_count;
        }
      }
    }
    if (row.doc_count > 0) {
      row.avg_words_per_doc = static_cast<double>(words) / static_cast<double>(row.doc_count);
      row.avg_sentences_per_doc = static_cast<double>(sentences) / static_cast<double>(row.doc_count);
    }
    if (phrase_count > 0) {
      row.avg_words_per_intent_phrase = static_cast<double>(phrase_words) / static_cast<double>(phrase_count);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<CategoryStats> corpus_stats(const Corpus& corpus) {
  return corpus_stats(corpus.documents, corpus.phrase_sets);
}

}  // namespace intent_eval
