#pragma once

// Evaluation report: per-(doc, method, ratio) rows, per-(method, ratio)
// averages, metadata. JSON is the machine format; the CSV files are shaped
// like result tables and give scores in percent.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "intent_eval/error.hpp"

namespace intent_eval {

inline constexpr std::string_view report_schema_version = "intent-eval-report/1";

/// Column order of every score table.
inline const std::vector<std::string>& score_columns() {
  static const std::vector<std::string> cols{"intent_precision", "intent_recall", "intent_f1", "bleu",
                                             "meteor",           "rouge_l",       "bert_score", "s_wms"};
  return cols;
}

/// One headline score per metric family, as compared against human judgment.
inline const std::vector<std::string>& headline_metrics() {
  static const std::vector<std::string> cols{"bleu", "meteor", "rouge_l", "bert_score", "s_wms", "intent_f1"};
  return cols;
}

using ScoreMap = std::map<std::string, std::optional<double>>;

struct ScoreRow {
  std::string doc_id;
  std::string method;
  double ratio = 0.0;
  std::string category;
  bool annotated = true;
  ScoreMap scores;
  std::vector<std::string> warnings;
};

struct AverageRow {
  std::string method;
  double ratio = 0.0;
  std::size_t count = 0;
  ScoreMap scores;
  std::optional<double> intent_f1_of_means;
  std::size_t unannotated_excluded = 0;
};

struct EvalReport {
  std::string dataset;
  std::vector<std::string> metrics;  // subset of score_columns(), in that order
  std::vector<ScoreRow> rows;        // sorted by (doc_id, method, ratio)
  std::vector<AverageRow> averages;  // sorted by (method, ratio)
  nlohmann::json metadata = nlohmann::json::object();

  const ScoreRow* find(const std::string& doc_id, const std::string& method, std::optional<double> ratio) const {
    const ScoreRow* hit = nullptr;
    for (const auto& r : rows) {
      if (r.doc_id != doc_id || r.method != method) continue;
      if (ratio && std::abs(r.ratio - *ratio) > 1e-9) continue;
      if (hit) fail(errc::config_error, "report has several ratios for (" + doc_id + ", " + method + "); pass a ratio");
      hit = &r;
    }
    return hit;
  }
};

namespace detail {

inline nlohmann::json scores_to_json(const ScoreMap& m, const std::vector<std::string>& metrics) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& name : metrics) {
    auto it = m.find(name);
    if (it == m.end() || !it->second) j[name] = nullptr;
    else j[name] = *it->second;
  }
  return j;
}

inline ScoreMap scores_from_json(const nlohmann::json& j) {
  ScoreMap m;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_null()) m[it.key()] = std::nullopt;
    else m[it.key()] = it->get<double>();
  }
  return m;
}

inline std::string percent_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", *v * 100.0);
  return buf;
}

inline std::string ratio_cell(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", r);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace detail

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["version"] = report_schema_version;
  j["dataset"] = r.dataset;
  j["metrics"] = r.metrics;
  j["metadata"] = r.metadata;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"doc_id", row.doc_id},
                         {"method", row.method},
                         {"ratio", row.ratio},
                         {"category", row.category},
                         {"annotated", row.annotated},
                         {"scores", detail::scores_to_json(row.scores, r.metrics)},
                         {"warnings", row.warnings}});
  }
  j["averages"] = nlohmann::json::array();
  for (const auto& a : r.averages) {
    nlohmann::json aj{{"method", a.method},
                      {"ratio", a.ratio},
                      {"count", a.count},
                      {"unannotated_excluded", a.unannotated_excluded},
                      {"scores", detail::scores_to_json(a.scores, r.metrics)}};
    aj["intent_f1_of_means"] = a.intent_f1_of_means ? nlohmann::json(*a.intent_f1_of_means) : nlohmann::json();
    j["averages"].push_back(std::move(aj));
  }
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    if (j.at("version").get<std::string>() != report_schema_version) {
      fail(errc::parse_error, "unsupported report version " + j.at("version").dump());
    }
    r.dataset = j.at("dataset").get<std::string>();
    r.metrics = j.at("metrics").get<std::vector<std::string>>();
    r.metadata = j.at("metadata");
    for (const auto& row : j.at("rows")) {
      ScoreRow s;
      s.doc_id = row.at("doc_id").get<std::string>();
      s.method = row.at("method").get<std::string>();
      s.ratio = row.at("ratio").get<double>();
      s.category = row.at("category").get<std::string>();
      s.annotated = row.at("annotated").get<bool>();
      s.scores = detail::scores_from_json(row.at("scores"));
      s.warnings = row.at("warnings").get<std::vector<std::string>>();
      r.rows.push_back(std::move(s));
    }
    for (const auto& a : j.at("averages")) {
      AverageRow avg;
      avg.method = a.at("method").get<std::string>();
      avg.ratio = a.at("ratio").get<double>();
      avg.count = a.at("count").get<std::size_t>();
      avg.unannotated_excluded = a.at("unannotated_excluded").get<std::size_t>();
      avg.scores = detail::scores_from_json(a.at("scores"));
      if (!a.at("intent_f1_of_means").is_null()) avg.intent_f1_of_means = a.at("intent_f1_of_means").get<double>();
      r.averages.push_back(std::move(avg));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

inline EvalReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open report " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::parse_error, path + ": " + e.what());
  }
  return report_from_json(j);
}

inline std::string rows_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "doc_id,method,ratio,category,annotated";
  for (const auto& m : r.metrics) out << ',' << m;
  out << ",warnings\n";
  for (const auto& row : r.rows) {
    out << detail::csv_escape(row.doc_id) << ',' << detail::csv_escape(row.method) << ','
        << detail::ratio_cell(row.ratio) << ',' << row.category << ',' << (row.annotated ? "yes" : "no");
    for (const auto& m : r.metrics) {
      auto it = row.scores.find(m);
      out << ',' << detail::percent_cell(it == row.scores.end() ? std::nullopt : it->second);
    }
    std::string w;
    for (std::size_t k = 0; k < row.warnings.size(); ++k) w += (k ? "; " : "") + row.warnings[k];
    out << ',' << detail::csv_escape(w) << '\n';
  }
  return out.str();
}

inline std::string averages_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "method,ratio,count";
  for (const auto& m : r.metrics) out << ',' << m;
  out << ",intent_f1_of_means,unannotated_excluded\n";
  for (const auto& a : r.averages) {
    out << detail::csv_escape(a.method) << ',' << detail::ratio_cell(a.ratio) << ',' << a.count;
    for (const auto& m : r.metrics) {
      auto it = a.scores.find(m);
      out << ',' << detail::percent_cell(it == a.scores.end() ? std::nullopt : it->second);
    }
    out << ',' << detail::percent_cell(a.intent_f1_of_means) << ',' << a.unannotated_excluded << '\n';
  }
  return out.str();
}

/// Writes via a temporary file in the same directory, then renames.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(errc::io_error, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(errc::io_error, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace intent_eval
