#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intent_eval/intent_eval.hpp"

namespace fs = std::filesystem;
using namespace intent_eval;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run_evaluate(const std::string& config_path, std::size_t threads) {
  const RunConfig config = load_run_config(config_path);
  const EvaluateOutputs out = cmd_evaluate(config, threads);
  for (const auto& row : out.report.rows) {
    for (const auto& w : row.warnings) {
      std::cerr << "warning: " << row.doc_id << '/' << row.method << '/' << detail::ratio_cell(row.ratio) << ": " << w
                << '\n';
    }
  }
  std::cout << "wrote " << out.json_path.string() << ", " << out.rows_csv_path.string() << ", "
            << out.averages_csv_path.string() << " (" << out.report.rows.size() << " rows, "
            << out.report.averages.size() << " averages)\n";
  return 0;
}

int run_correlate(const std::vector<std::string>& reports, const std::vector<std::string>& judgments,
                  std::optional<double> ratio, const std::string& out_dir) {
  if (reports.size() != judgments.size()) {
    fail(errc::config_error, "correlate: give one --judgments file per --report");
  }
  std::vector<DatasetJudgments> inputs;
  for (std::size_t i = 0; i < reports.size(); ++i) inputs.push_back({load_report(reports[i]), load_judgments(judgments[i])});
  const CorrelationTable table = cmd_correlate(inputs, ratio);
  print_warnings(table.warnings);
  const fs::path dir(out_dir);
  write_file_atomic(dir / "correlation.json", to_json(table).dump(2) + "\n");
  write_file_atomic(dir / "correlation.csv", correlation_csv(table));
  std::cout << correlation_csv(table);
  return 0;
}

int run_stats(const std::string& corpus_path, const std::optional<std::string>& phrases_path,
              const std::optional<std::string>& out) {
  std::vector<CategoryStats> rows;
  if (phrases_path) {
    const Corpus corpus = load_corpus(corpus_path, *phrases_path, "", default_abbreviations());
    rows = corpus_stats(corpus);
  } else {
    rows = corpus_stats(load_documents(corpus_path), {});
  }
  const std::string csv = stats_csv(rows);
  if (out) write_file_atomic(*out, csv);
  std::cout << csv;
  return 0;
}

int run_matrix(const std::string& report_path, const std::string& kind, const std::string& out_dir) {
  stats::CorrelationKind k = stats::CorrelationKind::pearson;
  if (kind == "spearman") k = stats::CorrelationKind::spearman;
  else if (kind != "pearson") fail(errc::config_error, "matrix: --kind must be pearson or spearman");
  const MetricMatrix m = metric_matrix(load_report(report_path), k);
  print_warnings(m.warnings);
  const fs::path dir(out_dir);
  write_file_atomic(dir / "matrix.csv", matrix_csv(m));
  write_file_atomic(dir / "matrix_long.tsv", matrix_long_tsv(m));
  std::cout << matrix_csv(m);
  return 0;
}

int run_classify(const std::string& predictions_path) {
  std::cout << classification_csv(score_predictions(load_predictions(predictions_path)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intent-based evaluation of document summaries"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t threads = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Score summaries and write report.json/report.csv/averages.csv");
  evaluate->add_option("--config", config_path, "Run configuration (TOML)")->required();
  evaluate->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::vector<std::string> reports, judgment_files;
  std::optional<double> ratio;
  std::string correlate_out = ".";
  auto* correlate = app.add_subcommand("correlate", "Spearman correlation of metrics with human judgments");
  correlate->add_option("--report", reports, "Report JSON, one per dataset")->required();
  correlate->add_option("--judgments", judgment_files, "Judgments JSONL, paired with --report by position")->required();
  correlate->add_option("--ratio", ratio, "Summary length ratio to correlate when reports hold several");
  correlate->add_option("--out", correlate_out, "Output directory");

  std::string corpus_path;
  std::optional<std::string> phrases_path, stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Per-category corpus statistics");
  stats_cmd->add_option("--corpus", corpus_path, "Documents JSONL")->required();
  stats_cmd->add_option("--phrases", phrases_path, "Intent phrases JSONL");
  stats_cmd->add_option("--out", stats_out, "CSV output path");

  std::string matrix_report, matrix_kind = "pearson", matrix_out = ".";
  auto* matrix = app.add_subcommand("matrix", "Metric-by-metric correlation matrix over report rows");
  matrix->add_option("--report", matrix_report, "Report JSON")->required();
  matrix->add_option("--kind", matrix_kind, "pearson or spearman");
  matrix->add_option("--out", matrix_out, "Output directory");

  std::string predictions_path;
  auto* classify = app.add_subcommand("classify", "Accuracy and macro-F1 of label predictions");
  classify->add_option("--predictions", predictions_path, "Predictions JSONL {id, pred, gold}")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[UsageError]: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*evaluate) return run_evaluate(config_path, threads);
    if (*correlate) return run_correlate(reports, judgment_files, ratio, correlate_out);
    if (*stats_cmd) return run_stats(corpus_path, phrases_path, stats_out);
    if (*matrix) return run_matrix(matrix_report, matrix_kind, matrix_out);
    if (*classify) return run_classify(predictions_path);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error[" << e.code() << "]: " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
