#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "intent_eval/intent_eval.hpp"
#include "oracles/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace intent_eval;
using test_support::read_file;
using test_support::TempDir;

namespace {

const std::string fixtures = FIXTURE_DIR;

template <typename Fn>
std::string error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

/// Copies the JSONL lines of `name` whose doc_id is in `keep` (and, for
/// summaries, whose ratio is 0.3) into `dir`.
std::string subset(const TempDir& dir, const std::string& name, const std::set<std::string>& keep) {
  std::ifstream in(fixtures + "/" + name);
  std::string line, out;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const auto& id = j.contains("doc_id") ? j.at("doc_id") : j.at("id");
    if (!keep.count(id.get<std::string>())) continue;
    if (j.contains("ratio") && std::abs(j.at("ratio").get<double>() - 0.3) > 1e-9) continue;
    out += line + "\n";
  }
  return dir.write(name, out);
}

RunConfig subset_config(const TempDir& dir) {
  const std::set<std::string> keep{"d1", "d2", "d3"};
  subset(dir, "documents.jsonl", keep);
  subset(dir, "phrases.jsonl", keep);
  subset(dir, "summaries.jsonl", keep);
  const std::string toml = "dataset = \"subset\"\n"
                           "documents = \"documents.jsonl\"\n"
                           "phrases = \"phrases.jsonl\"\n"
                           "summaries = \"summaries.jsonl\"\n"
                           "embeddings = \"" + fixtures + "/embeddings.tsv\"\n"
                           "metrics = [\"intent\", \"bleu\", \"meteor\", \"rouge_l\", \"bert_score\", \"s_wms\"]\n";
  return load_run_config(dir.write("run.toml", toml));
}

ScoreRow row(const std::string& doc, const std::string& method, ScoreMap scores) {
  ScoreRow r;
  r.doc_id = doc;
  r.method = method;
  r.ratio = 0.3;
  r.scores = std::move(scores);
  return r;
}

/// One dataset: `n` documents under one method, with bleu taken from
/// `metric` and two annotators rating each summary.
DatasetJudgments dataset(const std::string& name, const std::vector<double>& metric,
                         const std::vector<std::pair<int, int>>& ratings) {
  DatasetJudgments d;
  d.report.dataset = name;
  d.report.metrics = {"bleu"};
  for (std::size_t i = 0; i < metric.size(); ++i) {
    const std::string doc = "doc" + std::to_string(i);
    d.report.rows.push_back(row(doc, "m", {{"bleu", metric[i]}}));
    d.judgments.push_back({doc, "m", "a", ratings[i].first, ratings[i].second});
    d.judgments.push_back({doc, "m", "b", ratings[i].first, ratings[i].second});
  }
  return d;
}

int run_cli(const std::string& args, const std::filesystem::path& stderr_file) {
  const std::string cmd = std::string(INTENT_EVAL_BIN) + " " + args + " >/dev/null 2>" + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Evaluate, SubsetShapeAndAverages) {
  TempDir dir;
  const auto out = cmd_evaluate(subset_config(dir), 2);
  const auto& r = out.report;
  ASSERT_EQ(r.rows.size(), 6u);
  ASSERT_EQ(r.averages.size(), 2u);
  EXPECT_EQ(r.metrics, score_columns());
  EXPECT_EQ(r.dataset, "subset");
  EXPECT_EQ(r.averages[0].method, "abstractive");
  EXPECT_EQ(r.averages[1].method, "lead");
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_LE(std::tie(r.rows[i - 1].doc_id, r.rows[i - 1].method), std::tie(r.rows[i].doc_id, r.rows[i].method));
  }

  for (const auto& avg : r.averages) {
    EXPECT_EQ(avg.count, 3u);
    for (const auto& m : r.metrics) {
      double sum = 0;
      for (const auto& row : r.rows)
        if (row.method == avg.method) sum += *row.scores.at(m);
      EXPECT_NEAR(*avg.scores.at(m), sum / 3.0, 1e-9) << avg.method << " " << m;
    }
  }
  for (const auto& row : r.rows) {
    for (const auto& [m, v] : row.scores) {
      ASSERT_TRUE(v) << row.doc_id << " " << m;
      EXPECT_GE(*v, 0.0);
      EXPECT_LE(*v, 1.0 + 1e-12);
    }
  }

  EXPECT_EQ(r.metadata.at("transport_solver_used"), "exact");
  EXPECT_EQ(r.metadata.at("skipped_summaries"), 0);
  EXPECT_EQ(read_file(out.rows_csv_path).substr(0, 22), "doc_id,method,ratio,ca");
  const auto reloaded = load_report(out.json_path.string());
  EXPECT_EQ(to_json(reloaded).dump(), to_json(r).dump());
}

TEST(Evaluate, RerunsAreByteIdenticalAcrossThreadCounts) {
  TempDir dir;
  const RunConfig config = subset_config(dir);
  const auto first = cmd_evaluate(config, 1);
  const std::string json = read_file(first.json_path), rows = read_file(first.rows_csv_path),
                    avgs = read_file(first.averages_csv_path);
  const auto second = cmd_evaluate(config, 4);
  EXPECT_EQ(read_file(second.json_path), json);
  EXPECT_EQ(read_file(second.rows_csv_path), rows);
  EXPECT_EQ(read_file(second.averages_csv_path), avgs);
}

TEST(Evaluate, RatioFilterCountsSkipped) {
  TempDir dir;
  for (const char* f : {"documents.jsonl", "phrases.jsonl", "summaries.jsonl"})
    dir.write(f, read_file(fixtures + "/" + f));
  const std::string paths =
      "documents = \"documents.jsonl\"\nphrases = \"phrases.jsonl\"\nsummaries = \"summaries.jsonl\"\n";
  const auto out = cmd_evaluate(load_run_config(dir.write("run.toml", paths + "ratios = [0.5]\n")), 1);
  EXPECT_EQ(out.report.rows.size(), 12u);
  EXPECT_EQ(out.skipped_summaries, 12u);
  EXPECT_EQ(out.report.metadata.at("skipped_summaries"), 12);
  for (const auto& row : out.report.rows) EXPECT_EQ(row.ratio, 0.5);

  // A summary whose document is absent from the corpus is rejected.
  subset(dir, "documents.jsonl", {"d1", "d2"});
  EXPECT_EQ(error_code([&] { cmd_evaluate(load_run_config((dir.path() / "run.toml").string()), 1); }),
            "DanglingReference");
}

TEST(Evaluate, SemanticMetricWithoutEmbeddingsIsConfigError) {
  RunConfig c;
  c.documents = fixtures + "/documents.jsonl";
  c.summaries = fixtures + "/summaries.jsonl";
  c.metrics = {"bleu", "bert_score"};
  EXPECT_EQ(error_code([&] { cmd_evaluate(c); }), "ConfigError");

  Corpus empty;
  EvalOptions options;
  options.metrics = {"s_wms"};
  EXPECT_EQ(error_code([&] { evaluate_corpus(empty, options, nullptr); }), "ConfigError");
}

TEST(Evaluate, FixtureWarningsAndExclusions) {
  const auto abbreviations = default_abbreviations();
  const Corpus corpus = load_corpus(fixtures + "/documents.jsonl", fixtures + "/phrases.jsonl",
                                    fixtures + "/summaries.jsonl", abbreviations);
  EvalOptions options;
  options.metrics = {"intent", "bleu", "meteor", "rouge_l"};
  const auto report = evaluate_corpus(corpus, options);
  ASSERT_EQ(report.rows.size(), 24u);
  for (const auto& row : report.rows) {
    if (row.doc_id == "d6") {
      EXPECT_FALSE(row.annotated);
      EXPECT_FALSE(row.scores.at("intent_f1"));
      EXPECT_TRUE(row.scores.at("bleu"));
    }
    if (row.doc_id == "d4" && row.method == "abstractive" && row.ratio == 0.5) {
      for (const auto& [m, v] : row.scores) EXPECT_EQ(v, 0.0) << m;
      ASSERT_FALSE(row.warnings.empty());
    }
  }
  for (const auto& avg : report.averages) {
    EXPECT_EQ(avg.count, 6u);
    EXPECT_EQ(avg.unannotated_excluded, 1u);
    ASSERT_TRUE(avg.intent_f1_of_means);
  }
  // Without embeddings no transport problem is solved.
  EXPECT_EQ(report.metadata.at("transport_solver_used"), "none");
}

TEST(Correlate, RankAlignedGivesOne) {
  const std::vector<std::pair<int, int>> ratings{{1, 2}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
  const auto t = cmd_correlate({dataset("x", {0.1, 0.2, 0.3, 0.4, 0.5}, ratings)});
  EXPECT_EQ(t.cells.at("relevance").at("bleu").at("x"), 1.0);
  EXPECT_EQ(t.cells.at("human_score").at("bleu").at("x"), 1.0);
  EXPECT_EQ(t.cells.at("relevance_annotator_2").at("bleu").at("x"), 1.0);
  EXPECT_EQ(t.averages.at("relevance").at("bleu"), 1.0);
  ASSERT_EQ(t.agreement.size(), 1u);
  EXPECT_EQ(t.agreement[0].items, 5u);
  EXPECT_EQ(t.agreement[0].relevance_kappa, 1.0);
}

TEST(Correlate, AverageOfInjectedCells) {
  CorrelationTable t;
  t.datasets = {"a", "b"};
  t.metrics = {"intent_f1", "bleu"};
  t.measures = {"human_score"};
  t.cells["human_score"]["intent_f1"] = {{"a", 0.42}, {"b", -0.05}};
  t.cells["human_score"]["bleu"] = {{"a", 0.34}, {"b", -0.04}};
  finalize_averages(t);
  EXPECT_EQ(t.averages["human_score"]["intent_f1"], 0.185);
  EXPECT_EQ(t.averages["human_score"]["bleu"], 0.15);
  const std::string csv = correlation_csv(t);
  EXPECT_NE(csv.find("human_score,intent_f1,0.4200,-0.0500,0.1850"), std::string::npos) << csv;
}

TEST(Correlate, MissingScoreAndAmbiguousRatio) {
  auto d = dataset("x", {0.1, 0.2, 0.3}, {{1, 1}, {2, 2}, {3, 3}});
  d.judgments.push_back({"ghost", "m", "a", 3, 3});
  EXPECT_EQ(error_code([&] { cmd_correlate({d}); }), "MissingScore");

  auto two = dataset("y", {0.1, 0.2, 0.3}, {{1, 1}, {2, 2}, {3, 3}});
  auto extra = two.report.rows[0];
  extra.ratio = 0.5;
  two.report.rows.push_back(extra);
  EXPECT_EQ(error_code([&] { cmd_correlate({two}); }), "ConfigError");
  EXPECT_EQ(cmd_correlate({two}, 0.3).cells.at("relevance").at("bleu").at("y"), 1.0);
}

TEST(Correlate, ConstantMetricBecomesNullWithWarning) {
  const auto t = cmd_correlate({dataset("x", {0.5, 0.5, 0.5}, {{1, 1}, {2, 2}, {3, 3}})});
  EXPECT_FALSE(t.cells.at("relevance").at("bleu").at("x"));
  EXPECT_FALSE(t.averages.at("relevance").at("bleu"));
  EXPECT_FALSE(t.warnings.empty());
  EXPECT_TRUE(to_json(t).dump().find("null") != std::string::npos);
}

TEST(Correlate, RandomDatasetsMatchOracle) {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DatasetJudgments> inputs;
    std::vector<double> want;
    for (int ds = 0; ds < 3; ++ds) {
      const std::size_t n = 5 + rng() % 20;
      std::vector<double> metric(n);
      std::vector<std::pair<int, int>> ratings(n);
      std::vector<double> human(n);
      for (std::size_t i = 0; i < n; ++i) {
        metric[i] = std::round(u(rng) * 10) / 10;
        ratings[i] = {1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5)};
        human[i] = (ratings[i].first + ratings[i].second) / 2.0;
      }
      inputs.push_back(dataset("ds" + std::to_string(ds), metric, ratings));
      // Item order inside the correlator is by doc id; Spearman is order-free.
      want.push_back(oracle::spearman(metric, human));
    }
    const auto t = cmd_correlate(inputs);
    double sum = 0;
    for (int ds = 0; ds < 3; ++ds) {
      const auto cell = t.cells.at("human_score").at("bleu").at("ds" + std::to_string(ds));
      ASSERT_TRUE(cell);
      EXPECT_NEAR(*cell, want[ds], 1e-12);
      sum += want[ds];
    }
    EXPECT_NEAR(*t.averages.at("human_score").at("bleu"), sum / 3, 1e-12);
  }
}

TEST(Correlate, FixtureEndToEnd) {
  TempDir dir;
  dir.write("run.toml", read_file(fixtures + "/config.toml"));
  for (const char* f : {"documents.jsonl", "phrases.jsonl", "summaries.jsonl", "embeddings.tsv"})
    dir.write(f, read_file(fixtures + "/" + f));
  const auto out = cmd_evaluate(load_run_config((dir.path() / "run.toml").string()));
  const auto t = cmd_correlate({{out.report, load_judgments(fixtures + "/judgments.jsonl")}}, 0.3);
  EXPECT_EQ(t.metrics, headline_metrics());
  EXPECT_EQ(t.datasets, std::vector<std::string>{"fixture"});
  for (const auto& measure : t.measures)
    for (const auto& metric : t.metrics) {
      const auto& v = t.cells.at(measure).at(metric).at("fixture");
      if (v) EXPECT_LE(std::abs(*v), 1.0);
    }
  EXPECT_EQ(t.agreement[0].items, 12u);
}

TEST(Judgments, LoaderErrors) {
  TempDir dir;
  const auto bad_range = dir.write("a.jsonl", R"({"doc_id":"d","method":"m","annotator_id":"x","relevance":6,"readability":3})");
  EXPECT_EQ(error_code([&] { load_judgments(bad_range); }), "MalformedRecord");
  const auto missing = dir.write("b.jsonl", R"({"doc_id":"d","method":"m","annotator_id":"x","relevance":3})");
  EXPECT_EQ(error_code([&] { load_judgments(missing); }), "MalformedRecord");
  const auto fractional = dir.write("c.jsonl", R"({"doc_id":"d","method":"m","annotator_id":"x","relevance":3.5,"readability":3})");
  EXPECT_EQ(error_code([&] { load_judgments(fractional); }), "MalformedRecord");
  EXPECT_EQ(load_judgments(fixtures + "/judgments.jsonl").size(), 24u);
}

TEST(Matrix, IdentityNegationAndInsufficientData) {
  EvalReport r;
  r.metrics = {"bleu", "meteor", "rouge_l", "intent_f1"};
  const std::vector<double> xs{0.1, 0.4, 0.2, 0.9};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.rows.push_back(row("d" + std::to_string(i), "m",
                         {{"bleu", xs[i]}, {"meteor", xs[i]}, {"rouge_l", -xs[i]}, {"intent_f1", 0.5}}));
  }
  // Incomplete rows are skipped.
  r.rows.push_back(row("dx", "m", {{"bleu", 0.3}, {"meteor", std::nullopt}, {"rouge_l", 0.1}, {"intent_f1", 0.5}}));
  const auto m = metric_matrix(r);
  EXPECT_EQ(m.metrics, (std::vector<std::string>{"bleu", "meteor", "rouge_l"}));
  EXPECT_EQ(m.observations, 4u);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_NE(m.warnings[0].find("intent_f1"), std::string::npos);
  EXPECT_NEAR(m.values[0][1], 1.0, 1e-15);
  EXPECT_NEAR(m.values[0][2], -1.0, 1e-15);
  EXPECT_EQ(m.values[2][2], 1.0);
  EXPECT_EQ(matrix_csv(m).substr(0, 29), "metric,bleu,meteor,rouge_l\nbl");
  EXPECT_NE(matrix_long_tsv(m).find("bleu\trouge_l\t-1.000000\n"), std::string::npos);
  EXPECT_EQ(metric_matrix(r, stats::CorrelationKind::spearman).values[0][2], -1.0);

  r.rows.resize(2);
  EXPECT_EQ(error_code([&] { metric_matrix(r); }), "InsufficientData");
}

TEST(StatsTable, FixtureCategories) {
  const Corpus corpus = load_corpus(fixtures + "/documents.jsonl", fixtures + "/phrases.jsonl", "",
                                    default_abbreviations());
  const std::string csv = stats_csv(corpus_stats(corpus));
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "category,docs,avg_words,avg_sentences,avg_words_per_phrase");
  std::map<std::string, int> docs;
  while (std::getline(in, line)) docs[line.substr(0, line.find(','))] = std::stoi(line.substr(line.find(',') + 1));
  EXPECT_EQ(docs, (std::map<std::string, int>{{"corruption", 1}, {"land_dispute", 1}, {"murder", 2}, {"robbery", 2}}));
}

TEST(Classify, FixturePredictions) {
  const auto s = score_predictions(load_predictions(fixtures + "/predictions.jsonl"));
  EXPECT_EQ(s.accuracy, 0.75);
  const std::string csv = classification_csv(s);
  EXPECT_NE(csv.find("accuracy,,,75.0000,8\n"), std::string::npos) << csv;
}

TEST(Cli, ExitCodesAndErrorPrefix) {
  TempDir dir;
  const auto err = dir.path() / "stderr.txt";
  EXPECT_EQ(run_cli("", err), 2);
  EXPECT_NE(read_file(err).find("error[UsageError]"), std::string::npos);
  EXPECT_EQ(run_cli("evaluate", err), 2);

  const auto bad = dir.write("bad.toml", "documents = \"d.jsonl\"\nsummaries = \"s.jsonl\"\nmetrics = [\"s_wms\"]\n");
  EXPECT_EQ(run_cli("evaluate --config " + bad, err), 1);
  EXPECT_EQ(read_file(err).rfind("error[ConfigError]: ", 0), 0u) << read_file(err);

  EXPECT_EQ(run_cli("evaluate --config " + (dir.path() / "absent.toml").string(), err), 1);
  EXPECT_EQ(read_file(err).rfind("error[IoError]: ", 0), 0u);

  EXPECT_EQ(run_cli("classify --predictions " + fixtures + "/predictions.jsonl", err), 0);
  EXPECT_EQ(run_cli("matrix --report " + dir.write("r.json", "{not json") + " --out " + dir.path().string(), err), 1);
}
