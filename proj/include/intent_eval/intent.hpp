#pragma once

// Intent Metric: binary containment similarity between intent phrases and
// summary sentences, and the precision / recall / F1 built on it.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "intent_eval/corpus.hpp"
#include "intent_eval/error.hpp"
#include "intent_eval/text.hpp"

namespace intent_eval {

struct IntentScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::set<std::size_t> matched_phrase_indices;
  std::set<std::size_t> matched_sentence_indices;
};

/// True iff `phrase` occurs as a contiguous run of `sentence`.
inline bool phrase_match(std::span<const std::string> phrase, std::span<const std::string> sentence) {
  if (phrase.empty()) fail(errc::empty_phrase, "phrase_match: phrase has no tokens");
  if (phrase.size() > sentence.size()) return false;
  return std::search(sentence.begin(), sentence.end(), phrase.begin(), phrase.end()) != sentence.end();
}

/// s_ij for every phrase i and sentence j, row-major by phrase.
class ContainmentMatrix {
 public:
  ContainmentMatrix(const IntentPhraseSet& phrases, const SummaryRecord& summary)
      : rows_(phrases.phrases.size()), cols_(summary.sentences.size()), cells_(rows_ * cols_, 0) {
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        cells_[i * cols_ + j] = phrase_match(phrases.phrases[i].tokens, summary.sentences[j].tokens) ? 1 : 0;
      }
    }
  }

  bool at(std::size_t phrase, std::size_t sentence) const { return cells_[phrase * cols_ + sentence] != 0; }
  std::size_t phrases() const { return rows_; }
  std::size_t sentences() const { return cols_; }

  bool sentence_matched(std::size_t j) const {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (at(i, j)) return true;
    }
    return false;
  }
  bool phrase_matched(std::size_t i) const {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (at(i, j)) return true;
    }
    return false;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<unsigned char> cells_;
};

namespace detail {

inline void check_nonempty(const IntentPhraseSet& phrases, const SummaryRecord& summary) {
  if (summary.sentences.empty()) {
    fail(errc::empty_summary, "summary of \"" + summary.doc_id + "\" (" + summary.method + ") has no sentences");
  }
  if (phrases.phrases.empty()) fail(errc::no_phrases, "document \"" + phrases.doc_id + "\" has no intent phrases");
}

}  // namespace detail

/// Fraction of summary sentences containing at least one intent phrase.
inline double intent_precision(const IntentPhraseSet& phrases, const SummaryRecord& summary) {
  detail::check_nonempty(phrases, summary);
  const ContainmentMatrix s(phrases, summary);
  std::size_t hits = 0;
  for (std::size_t j = 0; j < s.sentences(); ++j) hits += s.sentence_matched(j) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(s.sentences());
}

/// Fraction of intent phrases contained in at least one summary sentence.
inline double intent_recall(const IntentPhraseSet& phrases, const SummaryRecord& summary) {
  detail::check_nonempty(phrases, summary);
  const ContainmentMatrix s(phrases, summary);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < s.phrases(); ++i) hits += s.phrase_matched(i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(s.phrases());
}

/// Harmonic mean; 0 when p + r = 0.
inline double intent_f1(double p, double r) {
  if (!(p >= 0.0 && p <= 1.0) || !(r >= 0.0 && r <= 1.0)) {
    fail(errc::domain_error, "intent_f1: precision and recall must lie in [0, 1]");
  }
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

inline IntentScore evaluate_intent(const IntentPhraseSet& phrases, const SummaryRecord& summary) {
  detail::check_nonempty(phrases, summary);
  const ContainmentMatrix s(phrases, summary);
  IntentScore score;
  for (std::size_t j = 0; j < s.sentences(); ++j) {
    if (s.sentence_matched(j)) score.matched_sentence_indices.insert(j);
  }
  for (std::size_t i = 0; i < s.phrases(); ++i) {
    if (s.phrase_matched(i)) score.matched_phrase_indices.insert(i);
  }
  score.precision =
      static_cast<double>(score.matched_sentence_indices.size()) / static_cast<double>(s.sentences());
  score.recall = static_cast<double>(score.matched_phrase_indices.size()) / static_cast<double>(s.phrases());
  score.f1 = intent_f1(score.precision, score.recall);
  return score;
}

struct IntentAverage {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;             // mean of per-document F1
  double f1_of_means = 0.0;    // F1 recomputed from the averaged P and R
  std::size_t count = 0;
};

inline IntentAverage corpus_intent_average(std::span<const IntentScore> scores) {
  if (scores.empty()) fail(errc::empty_list, "corpus_intent_average: no scores");
  IntentAverage avg;
  for (const auto& s : scores) {
    avg.precision += s.precision;
    avg.recall += s.recall;
    avg.f1 += s.f1;
  }
  const auto n = static_cast<double>(scores.size());
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  avg.f1_of_means = intent_f1(std::clamp(avg.precision, 0.0, 1.0), std::clamp(avg.recall, 0.0, 1.0));
  avg.count = scores.size();
  return avg;
}

}  // namespace intent_eval
