#pragma once

// Embedding-based metrics: IDF-weighted greedy matching (BERTScore style)
// and sentence/word mover's similarity over the exact transport solver.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "intent_eval/corpus.hpp"
#include "intent_eval/embeddings.hpp"
#include "intent_eval/error.hpp"
#include "intent_eval/lexical.hpp"
#include "intent_eval/transport.hpp"

namespace intent_eval {

struct IdfTable {
  std::unordered_map<std::string, double> weights;
  double default_weight = 1.0;

  double operator()(const std::string& token) const {
    auto it = weights.find(token);
    return it == weights.end() ? default_weight : it->second;
  }

  /// Every token weighs 1.
  static IdfTable uniform() { return IdfTable{{}, 1.0}; }
};

/// idf(t) = ln((1 + D) / (1 + df(t))) with document-level df over normalized
/// tokens; unseen tokens get ln(1 + D).
inline IdfTable idf_weights(std::span<const Document> corpus) {
  if (corpus.empty()) fail(errc::empty_corpus, "idf_weights: no documents");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> seen;
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) seen.insert(t);
    for (auto t : seen) ++df[std::string(t)];
  }
  const auto d = static_cast<double>(corpus.size());
  IdfTable table;
  table.default_weight = std::log(1.0 + d);
  for (const auto& [token, count] : df) table.weights.emplace(token, std::log((1.0 + d) / (1.0 + static_cast<double>(count))));
  return table;
}

enum class MissingTokenPolicy { error, skip, unknown_vector };

/// Key of the vector used under MissingTokenPolicy::unknown_vector.
inline constexpr std::string_view unknown_token_key = "<unk>";

namespace detail {

/// Resolves tokens to table rows under the given policy. Returns the kept
/// tokens and their vectors.
struct Resolved {
  std::vector<std::string> tokens;
  std::vector<const double*> vectors;
};

inline Resolved resolve_tokens(std::span<const std::string> tokens, const EmbeddingTable& table,
                               MissingTokenPolicy policy) {
  Resolved out;
  const double* unk = nullptr;
  if (policy == MissingTokenPolicy::unknown_vector) unk = table.find(unknown_token_key);
  for (const auto& t : tokens) {
    const double* v = table.find(t);
    if (!v) {
      if (policy == MissingTokenPolicy::skip) continue;
      if (policy == MissingTokenPolicy::unknown_vector && unk) {
        v = unk;
      } else {
        fail(errc::missing_embedding, "no embedding for token \"" + t + "\"");
      }
    }
    out.tokens.push_back(t);
    out.vectors.push_back(v);
  }
  return out;
}

inline std::vector<double> unit(const double* v, std::size_t dim) {
  double n = 0.0;
  for (std::size_t k = 0; k < dim; ++k) n += v[k] * v[k];
  std::vector<double> out(v, v + dim);
  if (n > 0.0) {
    const double inv = 1.0 / std::sqrt(n);
    for (double& x : out) x *= inv;
  }
  return out;
}

}  // namespace detail

/// Greedy matching score. Each reference token takes its best cosine
/// against the candidate (recall), and vice versa (precision), weighted by
/// IDF. Identical tokens always score 1 even when their vector is zero.
/// No baseline rescaling; values lie in [-1, 1].
inline MetricScore bert_score(std::span<const std::string> cand_tokens, std::span<const std::string> ref_tokens,
                              const EmbeddingTable& table, const IdfTable& idf,
                              MissingTokenPolicy policy = MissingTokenPolicy::error) {
  if (cand_tokens.empty() || ref_tokens.empty()) fail(errc::empty_input, "bert_score: empty candidate or reference");
  const detail::Resolved cand = detail::resolve_tokens(cand_tokens, table, policy);
  const detail::Resolved ref = detail::resolve_tokens(ref_tokens, table, policy);
  if (cand.tokens.empty() || ref.tokens.empty()) {
    fail(errc::empty_input, "bert_score: no embeddable tokens left after skipping");
  }

  // Embeddings are per type, so similarities are computed between types.
  struct Type {
    std::string token;
    std::vector<double> unit;
    std::size_t count = 0;
  };
  auto collect = [&](const detail::Resolved& r) {
    std::vector<Type> types;
    std::map<std::string, std::size_t> pos;
    for (std::size_t k = 0; k < r.tokens.size(); ++k) {
      auto [it, inserted] = pos.emplace(r.tokens[k], types.size());
      if (inserted) types.push_back({r.tokens[k], detail::unit(r.vectors[k], table.dim()), 0});
      ++types[it->second].count;
    }
    return types;
  };
  const std::vector<Type> ct = collect(cand), rt = collect(ref);

  std::vector<double> best_for_ref(rt.size(), -1.0), best_for_cand(ct.size(), -1.0);
  for (std::size_t a = 0; a < rt.size(); ++a) {
    for (std::size_t b = 0; b < ct.size(); ++b) {
      double sim;
      if (rt[a].token == ct[b].token) {
        sim = 1.0;
      } else {
        sim = 0.0;
        for (std::size_t k = 0; k < table.dim(); ++k) sim += rt[a].unit[k] * ct[b].unit[k];
        sim = std::clamp(sim, -1.0, 1.0);
      }
      best_for_ref[a] = std::max(best_for_ref[a], sim);
      best_for_cand[b] = std::max(best_for_cand[b], sim);
    }
  }

  auto weighted = [&](const std::vector<Type>& types, const std::vector<double>& best) {
    double num = 0.0, den = 0.0, plain = 0.0, count = 0.0;
    for (std::size_t a = 0; a < types.size(); ++a) {
      const double w = idf(types[a].token) * static_cast<double>(types[a].count);
      num += w * best[a];
      den += w;
      plain += static_cast<double>(types[a].count) * best[a];
      count += static_cast<double>(types[a].count);
    }
    // All weights zero (every token occurs in every document): fall back to
    // uniform weighting instead of 0/0.
    return den > 0.0 ? num / den : plain / count;
  };

  MetricScore score;
  const double r = weighted(rt, best_for_ref);
  const double p = weighted(ct, best_for_cand);
  score.components["precision"] = p;
  score.components["recall"] = r;
  score.value = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  return score;
}

enum class MoverKind { wms, sms, swms };

inline std::string_view to_string(MoverKind k) {
  switch (k) {
    case MoverKind::wms: return "WMS";
    case MoverKind::sms: return "SMS";
    case MoverKind::swms: return "S+WMS";
  }
  return "?";
}

enum class SolverChoice { exact, sinkhorn, automatic };

struct MoverOptions {
  MoverKind kind = MoverKind::swms;
  SolverChoice solver = SolverChoice::exact;
  /// Clouds larger than this use Sinkhorn under SolverChoice::automatic.
  std::size_t exact_point_limit = 300;
  MissingTokenPolicy policy = MissingTokenPolicy::error;
  SinkhornParams sinkhorn{};
};

/// Weighted point cloud: rows of `points` are vectors, masses sum to 1.
struct PointCloud {
  std::vector<std::vector<double>> points;
  std::vector<double> mass;
};

/// Words weighted by frequency, sentences (mean of their word vectors)
/// weighted by token count; S+WMS is the union of both, renormalized.
inline PointCloud build_cloud(std::span<const Sentence> sentences, const EmbeddingTable& table, MoverKind kind,
                              MissingTokenPolicy policy) {
  PointCloud cloud;
  std::map<std::string, std::size_t> word_pos;
  std::vector<std::vector<double>> words;
  std::vector<double> word_mass;
  std::vector<std::vector<double>> sents;
  std::vector<double> sent_mass;
  for (const auto& s : sentences) {
    const detail::Resolved r = detail::resolve_tokens(s.tokens, table, policy);
    if (r.tokens.empty()) continue;
    std::vector<double> mean(table.dim(), 0.0);
    for (std::size_t k = 0; k < r.tokens.size(); ++k) {
      for (std::size_t d = 0; d < table.dim(); ++d) mean[d] += r.vectors[k][d];
      auto [it, inserted] = word_pos.emplace(r.tokens[k], words.size());
      if (inserted) {
        words.emplace_back(r.vectors[k], r.vectors[k] + table.dim());
        word_mass.push_back(0.0);
      }
      word_mass[it->second] += 1.0;
    }
    for (double& x : mean) x /= static_cast<double>(r.tokens.size());
    sents.push_back(std::move(mean));
    sent_mass.push_back(static_cast<double>(r.tokens.size()));
  }
  if (kind != MoverKind::sms) {
    cloud.points.insert(cloud.points.end(), words.begin(), words.end());
    cloud.mass.insert(cloud.mass.end(), word_mass.begin(), word_mass.end());
  }
  if (kind != MoverKind::wms) {
    cloud.points.insert(cloud.points.end(), sents.begin(), sents.end());
    cloud.mass.insert(cloud.mass.end(), sent_mass.begin(), sent_mass.end());
  }
  double total = 0.0;
  for (double m : cloud.mass) total += m;
  if (total > 0.0)
    for (double& m : cloud.mass) m /= total;
  return cloud;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

/// Mover's similarity exp(-d), where d is the optimal transport cost between
/// the two clouds under the Euclidean ground metric.
inline MetricScore smd_similarity(std::span<const Sentence> cand, std::span<const Sentence> ref,
                                  const EmbeddingTable& word_table, const MoverOptions& options = {}) {
  if (cand.empty() || ref.empty()) fail(errc::empty_input, "smd_similarity: empty candidate or reference");
  const PointCloud a = build_cloud(cand, word_table, options.kind, options.policy);
  const PointCloud b = build_cloud(ref, word_table, options.kind, options.policy);
  if (a.points.empty() || b.points.empty()) {
    fail(errc::empty_input, "smd_similarity: no embeddable tokens left after skipping");
  }
  Matrix cost(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i)
    for (std::size_t j = 0; j < b.points.size(); ++j) cost(i, j) = euclidean(a.points[i], b.points[j]);

  TransportSolver used = TransportSolver::exact;
  if (options.solver == SolverChoice::sinkhorn ||
      (options.solver == SolverChoice::automatic &&
       std::max(a.points.size(), b.points.size()) > options.exact_point_limit)) {
    used = TransportSolver::sinkhorn;
  }
  const TransportPlan plan = used == TransportSolver::exact ? transport_solve(cost, a.mass, b.mass)
                                                            : sinkhorn_solve(cost, a.mass, b.mass, options.sinkhorn);
  MetricScore score;
  score.value = std::exp(-plan.cost);
  score.components["distance"] = plan.cost;
  score.components["sinkhorn"] = used == TransportSolver::sinkhorn ? 1.0 : 0.0;
  score.components["cand_points"] = static_cast<double>(a.points.size());
  score.components["ref_points"] = static_cast<double>(b.points.size());
  return score;
}

}  // namespace intent_eval
