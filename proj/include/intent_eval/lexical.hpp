#pragma once

// BLEU, METEOR (exact-match stage) and ROUGE-L over token lists.
// Orientation throughout: candidate = summary, reference = source document.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "intent_eval/error.hpp"
#include "intent_eval/text.hpp"

namespace intent_eval {

struct MetricScore {
  double value = 0.0;
  std::map<std::string, double> components;

  double component(const std::string& name) const {
    auto it = components.find(name);
    return it == components.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  }
};

using NGram = std::vector<std::string>;

struct NGramCounts {
  std::size_t n = 1;
  std::map<NGram, std::size_t> counts;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& [_, c] : counts) t += c;
    return t;
  }
  std::size_t count(const NGram& g) const {
    auto it = counts.find(g);
    return it == counts.end() ? 0 : it->second;
  }
};

inline NGramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) fail(errc::domain_error, "ngram_counts: n must be >= 1");
  NGramCounts out{n, {}};
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out.counts[NGram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

/// Single-reference BLEU. Clipped n-gram precisions p_1..p_max_n, geometric
/// mean, brevity penalty min(1, exp(1 - |ref|/|cand|)).
///
/// Smoothing: if p_1 = 0 the score is 0. Otherwise every zero higher-order
/// precision is replaced by 1 / (2 * max(1, candidate n-gram count)), which
/// keeps partial matches of short candidates from collapsing to log(0).
inline MetricScore bleu(std::span<const std::string> candidate, std::span<const std::string> reference,
                        std::size_t max_n = 4) {
  if (reference.empty()) fail(errc::empty_reference, "bleu: reference has no tokens");
  if (max_n == 0) fail(errc::domain_error, "bleu: max_n must be >= 1");
  MetricScore score;
  if (candidate.empty()) {
    score.components["bp"] = 0.0;
    return score;
  }

  std::vector<double> precisions(max_n, 0.0);
  bool smoothed = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const NGramCounts cand = ngram_counts(candidate, n);
    const NGramCounts ref = ngram_counts(reference, n);
    std::size_t clipped = 0;
    for (const auto& [gram, c] : cand.counts) clipped += std::min(c, ref.count(gram));
    const std::size_t denom = cand.total();
    score.components["matches_" + std::to_string(n)] = static_cast<double>(clipped);
    score.components["total_" + std::to_string(n)] = static_cast<double>(denom);
    double p = denom == 0 ? 0.0 : static_cast<double>(clipped) / static_cast<double>(denom);
    if (p == 0.0 && n > 1 && precisions[0] > 0.0) {
      p = 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(1, denom)));
      smoothed = true;
    }
    precisions[n - 1] = p;
    score.components["p_" + std::to_string(n)] = p;
  }

  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = std::min(1.0, std::exp(1.0 - r / c));
  score.components["bp"] = bp;
  score.components["smoothed"] = smoothed ? 1.0 : 0.0;
  if (precisions[0] == 0.0) return score;

  double log_sum = 0.0;
  for (double p : precisions) log_sum += std::log(p);
  score.value = bp * std::exp(log_sum / static_cast<double>(max_n));
  return score;
}

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  /// Search nodes for the exact minimum-chunk alignment before settling for
  /// the best alignment found so far.
  std::size_t search_budget = 200000;
};

/// Exact-match alignment: which reference position each candidate token is
/// aligned to (-1 when unaligned).
struct Alignment {
  std::vector<std::ptrdiff_t> target;
  std::size_t matches = 0;
  std::size_t chunks = 0;
  bool exact = true;  // false when the chunk search hit its budget
};

namespace detail {

inline std::size_t count_chunks(const std::vector<std::ptrdiff_t>& target) {
  std::size_t chunks = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] < 0) continue;
    const bool continues = i > 0 && target[i - 1] >= 0 && target[i - 1] + 1 == target[i];
    if (!continues) ++chunks;
  }
  return chunks;
}

class ChunkSearch {
 public:
  ChunkSearch(std::span<const std::string> cand, std::span<const std::string> ref, std::size_t budget)
      : cand_(cand), ref_(ref), budget_(budget) {
    std::unordered_map<std::string, std::uint32_t> ids;
    auto id_of = [&](const std::string& t) {
      auto [it, inserted] = ids.emplace(t, static_cast<std::uint32_t>(ids.size()));
      return it->second;
    };
    cand_ids_.reserve(cand.size());
    for (const auto& t : cand) cand_ids_.push_back(id_of(t));
    ref_ids_.reserve(ref.size());
    for (const auto& t : ref) ref_ids_.push_back(id_of(t));
    positions_.resize(ids.size());
    for (std::size_t j = 0; j < ref.size(); ++j) positions_[ref_ids_[j]].push_back(j);
    std::vector<std::size_t> cand_count(ids.size(), 0);
    for (auto id : cand_ids_) ++cand_count[id];
    quota_.resize(ids.size());
    for (std::size_t w = 0; w < ids.size(); ++w) quota_[w] = std::min(cand_count[w], positions_[w].size());
    for (auto q : quota_) max_matches_ += q;
    // Remaining candidate occurrences of each word from position i onward.
    suffix_left_ = cand_count;
  }

  Alignment run() {
    Alignment best = greedy();
    best_chunks_ = best.chunks;
    best_target_ = best.target;
    if (max_matches_ == 0 || best_chunks_ <= 1) return finish(true);

    used_.assign(ref_.size(), 0);
    current_.assign(cand_.size(), -1);
    remaining_quota_ = quota_;
    left_ = suffix_left_;
    nodes_ = 0;
    aborted_ = false;
    dfs(0, 0);
    return finish(!aborted_);
  }

  std::size_t max_matches() const { return max_matches_; }

 private:
  Alignment finish(bool exact) const {
    Alignment a;
    a.target = best_target_;
    a.matches = max_matches_;
    a.chunks = count_chunks(best_target_);
    a.exact = exact;
    return a;
  }

  // Left to right: extend the running chunk when possible, otherwise take the
  // free occurrence that starts the longest run of agreeing tokens.
  Alignment greedy() const {
    std::vector<char> used(ref_.size(), 0);
    std::vector<std::size_t> quota = quota_;
    Alignment a;
    a.target.assign(cand_.size(), -1);
    for (std::size_t i = 0; i < cand_.size(); ++i) {
      const auto w = cand_ids_[i];
      if (quota[w] == 0) continue;
      std::ptrdiff_t pick = -1;
      if (i > 0 && a.target[i - 1] >= 0) {
        const auto next = static_cast<std::size_t>(a.target[i - 1] + 1);
        if (next < ref_.size() && !used[next] && ref_ids_[next] == w) pick = static_cast<std::ptrdiff_t>(next);
      }
      if (pick < 0) {
        std::size_t best_run = 0;
        for (std::size_t j : positions_[w]) {
          if (used[j]) continue;
          std::size_t run = 0;
          while (i + run < cand_.size() && j + run < ref_.size() && !used[j + run] &&
                 cand_ids_[i + run] == ref_ids_[j + run]) {
            ++run;
          }
          if (run > best_run) {
            best_run = run;
            pick = static_cast<std::ptrdiff_t>(j);
          }
        }
      }
      if (pick >= 0) {
        used[static_cast<std::size_t>(pick)] = 1;
        --quota[w];
        a.target[i] = pick;
      }
    }
    a.matches = max_matches_;
    a.chunks = count_chunks(a.target);
    return a;
  }

  // Branch and bound over candidate positions. Every maximum matching aligns
  // exactly quota[w] occurrences of each word w, so a position may stay
  // unaligned only while enough later occurrences remain to fill the quota.
  void dfs(std::size_t i, std::size_t chunks) {
    if (aborted_ || chunks >= best_chunks_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    if (i == cand_.size()) {
      best_chunks_ = chunks;
      best_target_ = current_;
      return;
    }
    const auto w = cand_ids_[i];
    const std::ptrdiff_t prev = i > 0 ? current_[i - 1] : -1;
    --left_[w];
    if (remaining_quota_[w] > 0) {
      // Try the continuation of the running chunk first; it is free.
      auto try_pos = [&](std::size_t j) {
        const bool continues = prev >= 0 && static_cast<std::size_t>(prev) + 1 == j;
        used_[j] = 1;
        --remaining_quota_[w];
        current_[i] = static_cast<std::ptrdiff_t>(j);
        dfs(i + 1, chunks + (continues ? 0 : 1));
        current_[i] = -1;
        ++remaining_quota_[w];
        used_[j] = 0;
      };
      if (prev >= 0) {
        const auto next = static_cast<std::size_t>(prev + 1);
        if (next < ref_.size() && !used_[next] && ref_ids_[next] == w) try_pos(next);
      }
      for (std::size_t j : positions_[w]) {
        if (used_[j] || (prev >= 0 && static_cast<std::size_t>(prev) + 1 == j)) continue;
        try_pos(j);
        if (aborted_) break;
      }
    }
    if (!aborted_ && left_[w] >= remaining_quota_[w]) {
      current_[i] = -1;
      dfs(i + 1, chunks);
    }
    ++left_[w];
  }

  std::span<const std::string> cand_;
  std::span<const std::string> ref_;
  std::size_t budget_;
  std::vector<std::uint32_t> cand_ids_;
  std::vector<std::uint32_t> ref_ids_;
  std::vector<std::vector<std::size_t>> positions_;
  std::vector<std::size_t> quota_;
  std::vector<std::size_t> suffix_left_;
  std::size_t max_matches_ = 0;

  std::vector<char> used_;
  std::vector<std::ptrdiff_t> current_;
  std::vector<std::size_t> remaining_quota_;
  std::vector<std::size_t> left_;
  std::vector<std::ptrdiff_t> best_target_;
  std::size_t best_chunks_ = 0;
  std::size_t nodes_ = 0;
  bool aborted_ = false;
};

}  // namespace detail

/// Maximum-cardinality exact-match alignment with the fewest chunks.
inline Alignment meteor_align(std::span<const std::string> candidate, std::span<const std::string> reference,
                              std::size_t search_budget = MeteorParams{}.search_budget) {
  return detail::ChunkSearch(candidate, reference, search_budget).run();
}

inline MetricScore meteor(std::span<const std::string> candidate, std::span<const std::string> reference,
                          const MeteorParams& params = {}) {
  if (candidate.empty() || reference.empty()) fail(errc::empty_input, "meteor: empty candidate or reference");
  const Alignment a = meteor_align(candidate, reference, params.search_budget);
  MetricScore score;
  const auto m = static_cast<double>(a.matches);
  score.components["matches"] = m;
  score.components["chunks"] = static_cast<double>(a.chunks);
  score.components["alignment_exact"] = a.exact ? 1.0 : 0.0;
  if (a.matches == 0) return score;
  const double p = m / static_cast<double>(candidate.size());
  const double r = m / static_cast<double>(reference.size());
  const double f_mean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.beta);
  score.components["precision"] = p;
  score.components["recall"] = r;
  score.components["f_mean"] = f_mean;
  score.components["penalty"] = penalty;
  score.value = f_mean * (1.0 - penalty);
  return score;
}

/// Length of the longest common subsequence, two-row DP.
inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

/// ROUGE-L F1 at document level (both sides as single token sequences).
inline MetricScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) fail(errc::empty_input, "rouge_l: empty candidate or reference");
  const std::size_t l = lcs_length(candidate, reference);
  MetricScore score;
  score.components["lcs"] = static_cast<double>(l);
  if (l == 0) return score;
  const double p = static_cast<double>(l) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(l) / static_cast<double>(reference.size());
  score.components["precision"] = p;
  score.components["recall"] = r;
  score.value = 2.0 * p * r / (p + r);
  return score;
}

/// Type-membership unigram overlap: precision is the share of candidate
/// tokens whose type occurs in the reference, recall the converse. This is
/// what greedy embedding matching reduces to under one-hot embeddings.
inline MetricScore unigram_match(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) fail(errc::empty_input, "unigram_match: empty candidate or reference");
  std::unordered_map<std::string_view, int> in_ref, in_cand;
  for (const auto& t : reference) in_ref[t] = 1;
  for (const auto& t : candidate) in_cand[t] = 1;
  std::size_t p_hits = 0, r_hits = 0;
  for (const auto& t : candidate) p_hits += in_ref.count(t);
  for (const auto& t : reference) r_hits += in_cand.count(t);
  MetricScore score;
  const double p = static_cast<double>(p_hits) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(r_hits) / static_cast<double>(reference.size());
  score.components["precision"] = p;
  score.components["recall"] = r;
  score.value = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  return score;
}

}  // namespace intent_eval
