#pragma once

// Corpus-level runs behind the intent-eval subcommands: evaluate, correlate,
// matrix, stats, classify.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "intent_eval/config.hpp"
#include "intent_eval/corpus.hpp"
#include "intent_eval/embeddings.hpp"
#include "intent_eval/error.hpp"
#include "intent_eval/intent.hpp"
#include "intent_eval/judgments.hpp"
#include "intent_eval/lexical.hpp"
#include "intent_eval/report.hpp"
#include "intent_eval/semantic.hpp"
#include "intent_eval/stats.hpp"

namespace intent_eval {

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// INTENT_EVAL_THREADS environment variable when set.
inline std::size_t worker_count(std::size_t requested = 0) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("INTENT_EVAL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
/// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

struct EvalOptions {
  std::set<std::string> metrics{"intent", "bleu", "meteor", "rouge_l"};
  MoverOptions mover{};
  std::string dataset;
  std::size_t threads = 0;
};

namespace detail {

inline bool ratio_selected(double r, const std::vector<double>& ratios) {
  if (ratios.empty()) return true;
  return std::any_of(ratios.begin(), ratios.end(), [&](double x) { return std::abs(x - r) <= 1e-9; });
}

inline nlohmann::json metric_conventions() {
  return {
      {"orientation", "candidate = summary, reference = source document"},
      {"intent", "token-level contiguous containment over normalized tokens; averages exclude unannotated "
                 "documents; corpus F1 is the mean of per-document F1 (intent_f1_of_means also reported)"},
      {"bleu", "single reference, clipped n-gram precision n=1..4, geometric mean, brevity penalty "
               "min(1, exp(1 - r/c)); zero higher-order precision smoothed to 1/(2*max(1, count)) when p_1 > 0"},
      {"meteor", "exact-match stage only; alpha=0.9 beta=3 gamma=0.5; maximum matches then minimum chunks"},
      {"rouge_l", "document-level LCS F1"},
      {"bert_score", "type-level embeddings, greedy cosine matching, IDF ln((1+D)/(1+df)) over source "
                     "documents, F1 of IDF-weighted precision and recall, no baseline rescaling"},
      {"s_wms", "sentence + word mover's similarity exp(-d), Euclidean ground metric, words weighted by "
                "frequency, sentences by token count"},
      {"empty_summary", "intent metric and lexical metrics scored 0 with a warning"},
      {"csv_units", "percent"},
  };
}

inline std::string warn(const std::string& metric, const Error& e) {
  return metric + ": " + e.code() + ": " + e.what();
}

}  // namespace detail

/// Scores every summary of `corpus` against its source document. Rows come
/// out sorted by (doc_id, method, ratio); per-row failures become warnings.
inline EvalReport evaluate_corpus(const Corpus& corpus, const EvalOptions& options,
                                  const EmbeddingTable* embeddings = nullptr) {
  const bool want_intent = options.metrics.count("intent") > 0;
  const bool want_bert = options.metrics.count("bert_score") > 0;
  const bool want_swms = options.metrics.count("s_wms") > 0;
  if ((want_bert || want_swms) && !embeddings) {
    fail(errc::config_error, "semantic metrics need an embedding table");
  }

  EvalReport report;
  report.dataset = options.dataset;
  for (const auto& col : score_columns()) {
    const bool on = col.rfind("intent_", 0) == 0 ? want_intent : options.metrics.count(col) > 0;
    if (on) report.metrics.push_back(col);
  }

  std::vector<const SummaryRecord*> order;
  for (const auto& s : corpus.summaries) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const SummaryRecord* a, const SummaryRecord* b) {
    return std::tie(a->doc_id, a->method, a->ratio) < std::tie(b->doc_id, b->method, b->ratio);
  });

  IdfTable idf;
  if (want_bert) idf = idf_weights(corpus.documents);

  std::vector<Tokens> doc_tokens(corpus.documents.size());
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) doc_tokens[i] = corpus.documents[i].all_tokens();

  std::vector<std::atomic<int>> solver_used(2);
  report.rows.resize(order.size());
  parallel_for(order.size(), worker_count(options.threads), [&](std::size_t k) {
    const SummaryRecord& summary = *order[k];
    const Document& doc = *corpus.find_document(summary.doc_id);
    const IntentPhraseSet& phrases = *corpus.find_phrases(summary.doc_id);
    const std::size_t doc_index = static_cast<std::size_t>(&doc - corpus.documents.data());
    const Tokens& ref = doc_tokens[doc_index];
    const Tokens cand = summary.all_tokens();
    const bool empty = summary.sentences.empty();

    ScoreRow row;
    row.doc_id = summary.doc_id;
    row.method = summary.method;
    row.ratio = summary.ratio;
    row.category = std::string(to_string(doc.category));
    row.annotated = !phrases.unannotated;
    if (empty) row.warnings.push_back("empty summary; scored 0");

    if (want_intent) {
      if (phrases.unannotated) {
        row.scores["intent_precision"] = row.scores["intent_recall"] = row.scores["intent_f1"] = std::nullopt;
        row.warnings.push_back("unannotated document; intent metric excluded");
      } else if (empty) {
        row.scores["intent_precision"] = row.scores["intent_recall"] = row.scores["intent_f1"] = 0.0;
      } else {
        const IntentScore s = evaluate_intent(phrases, summary);
        row.scores["intent_precision"] = s.precision;
        row.scores["intent_recall"] = s.recall;
        row.scores["intent_f1"] = s.f1;
      }
    }
    auto guarded = [&](const std::string& name, auto&& compute) {
      if (empty) {
        row.scores[name] = 0.0;
        return;
      }
      try {
        row.scores[name] = compute();
      } catch (const Error& e) {
        row.scores[name] = std::nullopt;
        row.warnings.push_back(detail::warn(name, e));
      }
    };
    if (options.metrics.count("bleu")) guarded("bleu", [&] { return bleu(cand, ref).value; });
    if (options.metrics.count("meteor")) {
      guarded("meteor", [&] {
        const MetricScore m = meteor(cand, ref);
        if (m.component("alignment_exact") == 0.0) {
          row.warnings.push_back("meteor: chunk search budget exhausted; chunk count is an upper bound");
        }
        return m.value;
      });
    }
    if (options.metrics.count("rouge_l")) guarded("rouge_l", [&] { return rouge_l(cand, ref).value; });
    if (want_bert) {
      guarded("bert_score", [&] { return bert_score(cand, ref, *embeddings, idf, options.mover.policy).value; });
    }
    if (want_swms) {
      guarded("s_wms", [&] {
        const MetricScore m = smd_similarity(summary.sentences, doc.sentences, *embeddings, options.mover);
        ++solver_used[m.component("sinkhorn") == 1.0 ? 1 : 0];
        return m.value;
      });
    }
    report.rows[k] = std::move(row);
  });

  // Averages per (method, ratio).
  std::map<std::pair<std::string, double>, std::vector<const ScoreRow*>> groups;
  for (const auto& row : report.rows) groups[{row.method, row.ratio}].push_back(&row);
  for (const auto& [key, rows] : groups) {
    AverageRow avg;
    avg.method = key.first;
    avg.ratio = key.second;
    avg.count = rows.size();
    for (const auto* r : rows) avg.unannotated_excluded += r->annotated ? 0 : 1;
    for (const auto& m : report.metrics) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto* r : rows) {
        auto it = r->scores.find(m);
        if (it != r->scores.end() && it->second) {
          sum += *it->second;
          ++n;
        }
      }
      avg.scores[m] = n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
    if (want_intent) {
      std::vector<IntentScore> scores;
      for (const auto* r : rows) {
        if (!r->annotated) continue;
        IntentScore s;
        s.precision = *r->scores.at("intent_precision");
        s.recall = *r->scores.at("intent_recall");
        s.f1 = *r->scores.at("intent_f1");
        scores.push_back(std::move(s));
      }
      if (!scores.empty()) avg.intent_f1_of_means = corpus_intent_average(scores).f1_of_means;
    }
    report.averages.push_back(std::move(avg));
  }

  report.metadata["conventions"] = detail::metric_conventions();
  std::string solver = "none";
  if (solver_used[0] && solver_used[1]) solver = "exact+sinkhorn";
  else if (solver_used[0]) solver = "exact";
  else if (solver_used[1]) solver = "sinkhorn";
  report.metadata["transport_solver_used"] = solver;
  return report;
}

inline nlohmann::json config_echo(const RunConfig& c) {
  nlohmann::json j{{"documents", c.documents},
                   {"phrases", c.phrases},
                   {"summaries", c.summaries},
                   {"metrics", c.metrics},
                   {"ratios", c.ratios},
                   {"solver", to_string(c.solver)},
                   {"missing_tokens", to_string(c.missing_tokens)},
                   {"output_dir", c.output_dir},
                   {"seed", c.seed},
                   {"dataset", c.dataset}};
  j["embeddings"] = c.embeddings ? nlohmann::json(*c.embeddings) : nlohmann::json();
  j["abbreviations"] = c.abbreviations ? nlohmann::json(*c.abbreviations) : nlohmann::json();
  return j;
}

struct EvaluateOutputs {
  EvalReport report;
  std::filesystem::path json_path;
  std::filesystem::path rows_csv_path;
  std::filesystem::path averages_csv_path;
  std::size_t skipped_summaries = 0;
};

/// Loads everything named by `config`, evaluates, and writes report.json,
/// report.csv and averages.csv into the output directory.
inline EvaluateOutputs cmd_evaluate(const RunConfig& config, std::size_t threads = 0) {
  config.validate();
  AbbreviationList abbreviations = default_abbreviations();
  if (config.abbreviations) abbreviations.merge(AbbreviationList::load(*config.abbreviations));

  Corpus corpus = load_corpus(config.documents, config.phrases, config.summaries, abbreviations);
  EvaluateOutputs out;
  const std::size_t before = corpus.summaries.size();
  std::erase_if(corpus.summaries, [&](const SummaryRecord& s) { return !detail::ratio_selected(s.ratio, config.ratios); });
  out.skipped_summaries = before - corpus.summaries.size();

  std::optional<EmbeddingTable> table;
  if (config.embeddings) table = load_embeddings(*config.embeddings);

  EvalOptions options;
  options.metrics = config.metrics;
  options.mover.solver = config.solver;
  options.mover.policy = config.missing_tokens;
  options.dataset = config.dataset;
  options.threads = threads;
  out.report = evaluate_corpus(corpus, options, table ? &*table : nullptr);
  out.report.metadata["config"] = config_echo(config);
  out.report.metadata["skipped_summaries"] = out.skipped_summaries;
  out.report.metadata["schema"] = report_schema_version;

  const std::filesystem::path dir(config.output_dir);
  out.json_path = dir / "report.json";
  out.rows_csv_path = dir / "report.csv";
  out.averages_csv_path = dir / "averages.csv";
  write_file_atomic(out.json_path, to_json(out.report).dump(2) + "\n");
  write_file_atomic(out.rows_csv_path, rows_csv(out.report));
  write_file_atomic(out.averages_csv_path, averages_csv(out.report));
  return out;
}

// ---------------------------------------------------------------------------
// correlate

struct DatasetJudgments {
  EvalReport report;
  std::vector<HumanJudgment> judgments;
};

inline const std::vector<std::string>& correlation_measures() {
  static const std::vector<std::string> m{"relevance", "human_score"};
  return m;
}

struct AgreementRow {
  std::string dataset;
  std::size_t items = 0;
  std::optional<double> relevance_kappa;
  std::optional<double> readability_kappa;
};

/// cells[measure][metric][dataset] plus per-(measure, metric) cross-dataset
/// averages. Supplementary measures "<measure>_annotator_<k>" correlate
/// against the k-th annotator (by sorted annotator id) alone.
struct CorrelationTable {
  std::vector<std::string> datasets;
  std::vector<std::string> metrics;
  std::vector<std::string> measures;
  std::map<std::string, std::map<std::string, std::map<std::string, std::optional<double>>>> cells;
  std::map<std::string, std::map<std::string, std::optional<double>>> averages;
  std::vector<AgreementRow> agreement;
  std::vector<std::string> warnings;
};

/// Fills `averages` from `cells` with stats::cross_dataset_average over the
/// datasets that have a value.
inline void finalize_averages(CorrelationTable& table) {
  table.averages.clear();
  for (const auto& measure : table.measures) {
    for (const auto& metric : table.metrics) {
      std::vector<double> vals;
      for (const auto& ds : table.datasets) {
        const auto& v = table.cells[measure][metric][ds];
        if (v) vals.push_back(*v);
      }
      table.averages[measure][metric] =
          vals.empty() ? std::nullopt : std::optional<double>(stats::cross_dataset_average(vals));
    }
  }
}

inline CorrelationTable cmd_correlate(const std::vector<DatasetJudgments>& inputs,
                                      std::optional<double> ratio = std::nullopt) {
  if (inputs.empty()) fail(errc::config_error, "correlate: no datasets given");
  CorrelationTable table;
  table.measures = correlation_measures();
  for (const auto& m : {"relevance_annotator_1", "relevance_annotator_2", "human_score_annotator_1",
                        "human_score_annotator_2"}) {
    table.measures.push_back(m);
  }
  for (const auto& m : headline_metrics()) {
    const bool present = std::any_of(inputs.begin(), inputs.end(), [&](const DatasetJudgments& d) {
      return std::find(d.report.metrics.begin(), d.report.metrics.end(), m) != d.report.metrics.end();
    });
    if (present) table.metrics.push_back(m);
  }

  std::set<std::string> seen_datasets;
  for (std::size_t di = 0; di < inputs.size(); ++di) {
    const auto& input = inputs[di];
    std::string ds = input.report.dataset.empty() ? "dataset" + std::to_string(di + 1) : input.report.dataset;
    if (!seen_datasets.insert(ds).second) ds += "#" + std::to_string(di + 1);
    table.datasets.push_back(ds);

    // Group judgments by judged summary, annotators in sorted order.
    std::map<std::pair<std::string, std::string>, std::vector<const HumanJudgment*>> items;
    for (const auto& j : input.judgments) items[{j.doc_id, j.method}].push_back(&j);
    for (auto& [_, js] : items) {
      std::sort(js.begin(), js.end(),
                [](const HumanJudgment* a, const HumanJudgment* b) { return a->annotator_id < b->annotator_id; });
    }

    struct Item {
      const ScoreRow* row;
      double relevance;
      double human;
      std::vector<const HumanJudgment*> judges;
    };
    std::vector<Item> rows;
    for (const auto& [key, js] : items) {
      const ScoreRow* row = input.report.find(key.first, key.second, ratio);
      if (!row) {
        fail(errc::missing_score, "dataset " + ds + ": no report row for judged (" + key.first + ", " + key.second + ")");
      }
      double rel = 0.0, read = 0.0;
      for (const auto* j : js) {
        rel += j->relevance;
        read += j->readability;
      }
      rel /= static_cast<double>(js.size());
      read /= static_cast<double>(js.size());
      rows.push_back({row, rel, stats::human_score(rel, read), js});
    }

    auto correlate = [&](const std::string& measure, const std::string& metric, auto&& value_of) {
      std::vector<double> xs, ys;
      for (const auto& item : rows) {
        auto it = item.row->scores.find(metric);
        if (it == item.row->scores.end() || !it->second) continue;
        auto y = value_of(item);
        if (!y) continue;
        xs.push_back(*it->second);
        ys.push_back(*y);
      }
      std::optional<double> cell;
      try {
        cell = stats::spearman(xs, ys);
      } catch (const Error& e) {
        table.warnings.push_back(ds + " " + metric + " vs " + measure + ": " + e.code() + ": " + e.what());
      }
      table.cells[measure][metric][ds] = cell;
    };
    for (const auto& metric : table.metrics) {
      correlate("relevance", metric, [](const Item& i) { return std::optional<double>(i.relevance); });
      correlate("human_score", metric, [](const Item& i) { return std::optional<double>(i.human); });
      for (std::size_t slot = 0; slot < 2; ++slot) {
        const std::string suffix = "_annotator_" + std::to_string(slot + 1);
        correlate("relevance" + suffix, metric, [&](const Item& i) -> std::optional<double> {
          if (i.judges.size() <= slot) return std::nullopt;
          return i.judges[slot]->relevance;
        });
        correlate("human_score" + suffix, metric, [&](const Item& i) -> std::optional<double> {
          if (i.judges.size() <= slot) return std::nullopt;
          return stats::human_score(i.judges[slot]->relevance, i.judges[slot]->readability);
        });
      }
    }

    AgreementRow agreement;
    agreement.dataset = ds;
    std::vector<std::string> rel_a, rel_b, read_a, read_b;
    for (const auto& item : rows) {
      if (item.judges.size() < 2) continue;
      rel_a.push_back(std::to_string(item.judges[0]->relevance));
      rel_b.push_back(std::to_string(item.judges[1]->relevance));
      read_a.push_back(std::to_string(item.judges[0]->readability));
      read_b.push_back(std::to_string(item.judges[1]->readability));
    }
    agreement.items = rel_a.size();
    auto kappa = [&](const std::vector<std::string>& a, const std::vector<std::string>& b,
                     const char* what) -> std::optional<double> {
      if (a.empty()) return std::nullopt;
      try {
        return stats::cohen_kappa(a, b);
      } catch (const Error& e) {
        table.warnings.push_back(ds + " " + what + " kappa: " + e.code() + ": " + e.what());
        return std::nullopt;
      }
    };
    agreement.relevance_kappa = kappa(rel_a, rel_b, "relevance");
    agreement.readability_kappa = kappa(read_a, read_b, "readability");
    table.agreement.push_back(agreement);
  }
  finalize_averages(table);
  return table;
}

namespace detail {

inline std::string fixed_cell(const std::optional<double>& v, int digits = 4) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace detail

inline nlohmann::json to_json(const CorrelationTable& t) {
  nlohmann::json j;
  j["datasets"] = t.datasets;
  j["metrics"] = t.metrics;
  j["measures"] = t.measures;
  j["cells"] = nlohmann::json::object();
  for (const auto& measure : t.measures) {
    for (const auto& metric : t.metrics) {
      nlohmann::json row = nlohmann::json::object();
      for (const auto& ds : t.datasets) row[ds] = detail::opt_json(t.cells.at(measure).at(metric).at(ds));
      row["average"] = detail::opt_json(t.averages.at(measure).at(metric));
      j["cells"][measure][metric] = row;
    }
  }
  j["agreement"] = nlohmann::json::array();
  for (const auto& a : t.agreement) {
    j["agreement"].push_back({{"dataset", a.dataset},
                              {"items", a.items},
                              {"relevance_kappa", detail::opt_json(a.relevance_kappa)},
                              {"readability_kappa", detail::opt_json(a.readability_kappa)}});
  }
  j["warnings"] = t.warnings;
  return j;
}

/// measure,metric,<dataset...>,average
inline std::string correlation_csv(const CorrelationTable& t) {
  std::ostringstream out;
  out << "measure,metric";
  for (const auto& ds : t.datasets) out << ',' << detail::csv_escape(ds);
  out << ",average\n";
  for (const auto& measure : t.measures) {
    for (const auto& metric : t.metrics) {
      out << measure << ',' << metric;
      for (const auto& ds : t.datasets) out << ',' << detail::fixed_cell(t.cells.at(measure).at(metric).at(ds));
      out << ',' << detail::fixed_cell(t.averages.at(measure).at(metric)) << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// matrix

struct MetricMatrix {
  std::vector<std::string> metrics;
  std::vector<std::vector<double>> values;
  std::size_t observations = 0;
  std::vector<std::string> warnings;
};

/// Correlations between headline metrics over report rows where every one
/// of them has a value. Constant metrics are dropped with a warning.
inline MetricMatrix metric_matrix(const EvalReport& report,
                                  stats::CorrelationKind kind = stats::CorrelationKind::pearson) {
  MetricMatrix out;
  std::vector<std::string> candidates;
  for (const auto& m : headline_metrics()) {
    if (std::find(report.metrics.begin(), report.metrics.end(), m) != report.metrics.end()) candidates.push_back(m);
  }
  std::vector<stats::NamedSeries> series;
  for (const auto& m : candidates) series.push_back({m, {}});
  for (const auto& row : report.rows) {
    bool complete = true;
    for (const auto& m : candidates) {
      auto it = row.scores.find(m);
      if (it == row.scores.end() || !it->second) complete = false;
    }
    if (!complete) continue;
    for (std::size_t k = 0; k < candidates.size(); ++k) series[k].values.push_back(*row.scores.at(candidates[k]));
  }
  const std::size_t n = series.empty() ? 0 : series.front().values.size();
  std::erase_if(series, [&](const stats::NamedSeries& s) {
    const bool constant = std::all_of(s.values.begin(), s.values.end(), [&](double v) { return v == s.values.front(); });
    if (constant && !s.values.empty()) out.warnings.push_back(s.name + " is constant over all rows; dropped");
    return constant;
  });
  if (series.size() < 2 || n < 3) {
    fail(errc::insufficient_data, "matrix needs at least 2 non-constant metrics over at least 3 complete rows (have " +
                                      std::to_string(series.size()) + " metrics, " + std::to_string(n) + " rows)");
  }
  out.values = stats::correlation_matrix(series, kind);
  for (const auto& s : series) out.metrics.push_back(s.name);
  out.observations = n;
  return out;
}

inline std::string matrix_csv(const MetricMatrix& m) {
  std::ostringstream out;
  out << "metric";
  for (const auto& name : m.metrics) out << ',' << name;
  out << '\n';
  for (std::size_t a = 0; a < m.metrics.size(); ++a) {
    out << m.metrics[a];
    for (std::size_t b = 0; b < m.metrics.size(); ++b) out << ',' << detail::fixed_cell(m.values[a][b], 6);
    out << '\n';
  }
  return out.str();
}

/// Long format for external plotting: row, column, value.
inline std::string matrix_long_tsv(const MetricMatrix& m) {
  std::ostringstream out;
  out << "row\tcolumn\tvalue\n";
  for (std::size_t a = 0; a < m.metrics.size(); ++a)
    for (std::size_t b = 0; b < m.metrics.size(); ++b)
      out << m.metrics[a] << '\t' << m.metrics[b] << '\t' << detail::fixed_cell(m.values[a][b], 6) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// stats

/// category,docs,avg_words,avg_sentences,avg_words_per_phrase with averages
/// rounded to integers.
inline std::string stats_csv(const std::vector<CategoryStats>& rows) {
  std::ostringstream out;
  out << "category,docs,avg_words,avg_sentences,avg_words_per_phrase\n";
  for (const auto& r : rows) {
    out << to_string(r.category) << ',' << r.doc_count << ',' << std::llround(r.avg_words_per_doc) << ','
        << std::llround(r.avg_sentences_per_doc) << ',' << std::llround(r.avg_words_per_intent_phrase) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// classify

inline stats::ClassificationScores score_predictions(const std::vector<Prediction>& predictions) {
  std::vector<std::string> pred, gold;
  for (const auto& p : predictions) {
    pred.push_back(p.pred);
    gold.push_back(p.gold);
  }
  return stats::classification_scores(pred, gold);
}

inline std::string classification_csv(const stats::ClassificationScores& s) {
  std::ostringstream out;
  out << "label,precision,recall,f1,support\n";
  for (const auto& c : s.per_class) {
    out << detail::csv_escape(c.label) << ',' << detail::percent_cell(c.precision) << ','
        << detail::percent_cell(c.recall) << ',' << detail::percent_cell(c.f1) << ',' << c.support << '\n';
  }
  out << "accuracy,,,"  << detail::percent_cell(s.accuracy) << ',' << s.confusion.total() << '\n';
  out << "macro_f1,,," << detail::percent_cell(s.macro_f1) << ',' << s.confusion.total() << '\n';
  return out.str();
}

}  // namespace intent_eval
