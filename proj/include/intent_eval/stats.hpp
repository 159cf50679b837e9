#pragma once

// Correlation, agreement and classification scoring.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string_view>
#include <utility>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "intent_eval/error.hpp"

namespace intent_eval::stats {

/// 1-based ranks; tied values share the mean of the ranks they occupy.
inline std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) hold ranks i+1..j+1
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(errc::length_mismatch, "pearson: series lengths differ");
  if (x.size() < 2) fail(errc::length_mismatch, "pearson: need at least two observations");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(errc::degenerate_series, "pearson: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Pearson correlation of average ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(errc::length_mismatch, "spearman: series lengths differ");
  if (x.size() < 2) fail(errc::length_mismatch, "spearman: need at least two observations");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

enum class CorrelationKind { pearson, spearman };

struct NamedSeries {
  std::string name;
  std::vector<double> values;
};

/// Symmetric matrix with exact unit diagonal, in input order.
inline std::vector<std::vector<double>> correlation_matrix(std::span<const NamedSeries> series,
                                                           CorrelationKind kind = CorrelationKind::pearson) {
  for (const auto& s : series) {
    if (s.values.size() != series.front().values.size()) {
      fail(errc::length_mismatch, "correlation_matrix: series \"" + s.name + "\" has a different length");
    }
  }
  const std::size_t k = series.size();
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 1.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double r = kind == CorrelationKind::pearson ? pearson(series[a].values, series[b].values)
                                                        : spearman(series[a].values, series[b].values);
      m[a][b] = m[b][a] = r;
    }
  }
  return m;
}

struct ConfusionMatrix {
  std::vector<std::string> labels;             // sorted
  std::vector<std::vector<std::size_t>> counts;  // counts[gold][pred]

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts) t += std::accumulate(row.begin(), row.end(), std::size_t{0});
    return t;
  }
  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
};

inline ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred) {
  if (gold.size() != pred.size()) fail(errc::length_mismatch, "confusion_matrix: label lists differ in length");
  std::map<std::string, std::size_t> index;
  for (const auto& l : gold) index.emplace(l, 0);
  for (const auto& l : pred) index.emplace(l, 0);
  ConfusionMatrix cm;
  for (auto& [label, i] : index) {
    i = cm.labels.size();
    cm.labels.push_back(label);
  }
  cm.counts.assign(cm.labels.size(), std::vector<std::size_t>(cm.labels.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[index[gold[i]]][index[pred[i]]];
  return cm;
}

/// Cohen's kappa between two annotators' label sequences.
inline double cohen_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) fail(errc::length_mismatch, "cohen_kappa: label lists differ in length");
  if (a.empty()) fail(errc::length_mismatch, "cohen_kappa: need at least one item");
  const ConfusionMatrix cm = confusion_matrix(a, b);
  const auto n = static_cast<long double>(a.size());
  long double agree = static_cast<long double>(cm.trace());
  long double chance = 0.0L;  // n^2 * p_e
  for (std::size_t k = 0; k < cm.labels.size(); ++k) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < cm.labels.size(); ++j) {
      row += cm.counts[k][j];
      col += cm.counts[j][k];
    }
    chance += static_cast<long double>(row) * static_cast<long double>(col);
  }
  const long double denom = n * n - chance;
  if (denom == 0.0L) {
    if (agree == n) return 1.0;
    fail(errc::degenerate_marginals, "cohen_kappa: chance agreement is 1 but observed agreement is not");
  }
  return static_cast<double>((n * agree - chance) / denom);
}

/// Mean of Relevance and Readability, both on the 1-5 scale.
inline double human_score(double relevance, double readability) {
  if (!(relevance >= 1.0 && relevance <= 5.0) || !(readability >= 1.0 && readability <= 5.0)) {
    fail(errc::domain_error, "human_score: ratings must lie in [1, 5]");
  }
  return (relevance + readability) / 2.0;
}

namespace detail {

using boost::multiprecision::cpp_int;

/// x as M * 10^E from its shortest round-trip decimal form.
inline std::pair<cpp_int, int> shortest_decimal(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  std::string_view s(buf, static_cast<std::size_t>(end - buf));
  const auto e_pos = s.find('e');
  std::string digits;
  int frac = 0;
  bool after_point = false;
  for (char c : s.substr(0, e_pos)) {
    if (c == '.') {
      after_point = true;
    } else if (c == '-') {
      digits.push_back(c);
    } else {
      digits.push_back(c);
      if (after_point) ++frac;
    }
  }
  int exponent = 0;
  std::from_chars(s.data() + e_pos + 1 + (s[e_pos + 1] == '+' ? 1 : 0), s.data() + s.size(), exponent);
  return {cpp_int(digits), exponent - frac};
}

}  // namespace detail

/// Mean of per-dataset correlations, taken exactly over the decimal values
/// the inputs print as and rounded once to the nearest double. Correlations
/// arrive as short decimals (0.34, -0.04), whose binary sum would otherwise
/// drift by an ulp (0.15000000000000002 instead of 0.15).
inline double cross_dataset_average(std::span<const double> per_dataset) {
  using detail::cpp_int;
  if (per_dataset.empty()) fail(errc::empty_list, "cross_dataset_average: no datasets");
  std::vector<std::pair<cpp_int, int>> terms;
  int min_exp = 0;
  for (double v : per_dataset) {
    if (!std::isfinite(v)) fail(errc::domain_error, "cross_dataset_average: non-finite input");
    terms.push_back(detail::shortest_decimal(v));
    min_exp = std::min(min_exp, terms.back().second);
  }
  cpp_int sum = 0;
  for (const auto& [m, e] : terms) sum += m * boost::multiprecision::pow(cpp_int(10), e - min_exp);
  if (sum == 0) return 0.0;

  // Scale so the quotient carries 40+ significant digits; a trailing sticky
  // digit keeps strtod's single rounding correct.
  const int extra = 40 + static_cast<int>(std::to_string(per_dataset.size()).size());
  const cpp_int scaled = sum * boost::multiprecision::pow(cpp_int(10), extra);
  const cpp_int k = static_cast<unsigned long long>(per_dataset.size());
  cpp_int q = scaled / k;
  const bool inexact = q * k != scaled;
  std::string text = q.str();
  int exponent = min_exp - extra;
  if (inexact) {
    text += "1";
    --exponent;
  }
  text += "e" + std::to_string(exponent);
  return std::strtod(text.c_str(), nullptr);
}

struct ClassScore {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct ClassificationScores {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassScore> per_class;
  ConfusionMatrix confusion;
};

/// Accuracy, per-class P/R/F1 and their unweighted macro mean. Classes are
/// those seen in pred or gold; zero denominators give 0.
inline ClassificationScores classification_scores(std::span<const std::string> pred,
                                                  std::span<const std::string> gold) {
  if (pred.size() != gold.size()) fail(errc::length_mismatch, "classification_scores: label lists differ in length");
  if (pred.empty()) fail(errc::length_mismatch, "classification_scores: need at least one item");
  ClassificationScores out;
  out.confusion = confusion_matrix(gold, pred);
  const auto& cm = out.confusion;
  out.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  double f1_sum = 0.0;
  for (std::size_t k = 0; k < cm.labels.size(); ++k) {
    std::size_t tp = cm.counts[k][k], gold_k = 0, pred_k = 0;
    for (std::size_t j = 0; j < cm.labels.size(); ++j) {
      gold_k += cm.counts[k][j];
      pred_k += cm.counts[j][k];
    }
    ClassScore cs;
    cs.label = cm.labels[k];
    cs.support = gold_k;
    cs.precision = pred_k ? static_cast<double>(tp) / static_cast<double>(pred_k) : 0.0;
    cs.recall = gold_k ? static_cast<double>(tp) / static_cast<double>(gold_k) : 0.0;
    cs.f1 = cs.precision + cs.recall > 0.0 ? 2.0 * cs.precision * cs.recall / (cs.precision + cs.recall) : 0.0;
    f1_sum += cs.f1;
    out.per_class.push_back(cs);
  }
  out.macro_f1 = f1_sum / static_cast<double>(cm.labels.size());
  return out;
}

}  // namespace intent_eval::stats
