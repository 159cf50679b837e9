#pragma once

// Run configuration, read from a small TOML subset: `key = value` pairs,
// optional [table] headers (keys become "table.key"), '#' comments, and
// values that are strings, integers, floats, booleans or single-line arrays
// of those.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "intent_eval/error.hpp"
#include "intent_eval/semantic.hpp"

namespace intent_eval {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<std::string, std::int64_t, double, bool, TomlArray> value;

  bool is_string() const { return std::holds_alternative<std::string>(value); }
  bool is_number() const { return std::holds_alternative<std::int64_t>(value) || std::holds_alternative<double>(value); }
  bool is_array() const { return std::holds_alternative<TomlArray>(value); }
  double as_double() const {
    if (auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    return std::get<double>(value);
  }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : text_(text) {}

  TomlTable parse() {
    TomlTable table;
    std::string prefix;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      line_ = text_.substr(pos, nl - pos);
      if (!line_.empty() && line_.back() == '\r') line_.remove_suffix(1);
      ++lineno;
      lineno_ = lineno;
      i_ = 0;
      skip_ws();
      if (!at_end() && peek() != '#') {
        if (peek() == '[') {
          ++i_;
          std::string name = read_key();
          skip_ws();
          expect(']');
          prefix = name + ".";
        } else {
          std::string key = prefix + read_key();
          skip_ws();
          expect('=');
          skip_ws();
          TomlValue v = read_value();
          if (table.count(key)) error("duplicate key \"" + key + "\"");
          table.emplace(std::move(key), std::move(v));
        }
        skip_ws();
        if (!at_end() && peek() != '#') error("unexpected trailing characters");
      }
      pos = nl + 1;
    }
    return table;
  }

 private:
  [[noreturn]] void error(const std::string& why) const {
    fail(errc::config_error, "config line " + std::to_string(lineno_) + ": " + why);
  }
  bool at_end() const { return i_ >= line_.size(); }
  char peek() const { return line_[i_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++i_;
  }
  void expect(char c) {
    if (at_end() || peek() != c) error(std::string("expected '") + c + "'");
    ++i_;
  }

  std::string read_key() {
    skip_ws();
    if (!at_end() && peek() == '"') return read_string();
    std::size_t start = i_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                         peek() == '.')) {
      ++i_;
    }
    if (i_ == start) error("expected a key");
    return std::string(line_.substr(start, i_ - start));
  }

  std::string read_string() {
    const char quote = peek();
    ++i_;
    std::string out;
    while (!at_end() && peek() != quote) {
      char c = peek();
      ++i_;
      if (quote == '"' && c == '\\') {
        if (at_end()) error("unterminated escape");
        char e = peek();
        ++i_;
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: error(std::string("unsupported escape \\") + e);
        }
      } else {
        out.push_back(c);
      }
    }
    if (at_end()) error("unterminated string");
    ++i_;
    return out;
  }

  TomlValue read_value() {
    if (at_end()) error("missing value");
    const char c = peek();
    if (c == '"' || c == '\'') return {read_string()};
    if (c == '[') {
      ++i_;
      TomlArray arr;
      skip_ws();
      while (!at_end() && peek() != ']') {
        arr.push_back(read_value());
        skip_ws();
        if (!at_end() && peek() == ',') {
          ++i_;
          skip_ws();
        }
      }
      expect(']');
      return {std::move(arr)};
    }
    std::size_t start = i_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != ' ' && peek() != '\t') ++i_;
    std::string_view tok = line_.substr(start, i_ - start);
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    std::string cleaned;
    for (char ch : tok)
      if (ch != '_') cleaned.push_back(ch);
    const char* b = cleaned.data();
    const char* e = cleaned.data() + cleaned.size();
    if (!cleaned.empty() && cleaned.front() == '+') ++b;
    if (cleaned.find_first_of(".eE") == std::string::npos) {
      std::int64_t iv = 0;
      auto [p, ec] = std::from_chars(b, e, iv);
      if (ec == std::errc() && p == e) return {iv};
    } else {
      double dv = 0.0;
      auto [p, ec] = std::from_chars(b, e, dv);
      if (ec == std::errc() && p == e) return {dv};
    }
    error("cannot parse value \"" + std::string(tok) + "\"");
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t i_ = 0;
  std::size_t lineno_ = 0;
};

}  // namespace detail

inline TomlTable parse_toml(std::string_view text) { return detail::TomlReader(text).parse(); }

inline constexpr std::array<std::string_view, 6> known_metrics{"intent", "bleu", "meteor", "rouge_l", "bert_score",
                                                               "s_wms"};

inline bool is_semantic_metric(std::string_view m) { return m == "bert_score" || m == "s_wms"; }

struct RunConfig {
  std::string documents;
  std::string phrases;
  std::string summaries;
  std::optional<std::string> embeddings;
  std::optional<std::string> abbreviations;
  std::set<std::string> metrics;
  std::vector<double> ratios;  // empty: every ratio present in the summaries
  SolverChoice solver = SolverChoice::exact;
  MissingTokenPolicy missing_tokens = MissingTokenPolicy::error;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::string dataset;  // defaults to the documents file stem

  bool semantic_enabled() const {
    return std::any_of(metrics.begin(), metrics.end(), [](const std::string& m) { return is_semantic_metric(m); });
  }

  /// Throws ConfigError when an invariant does not hold.
  void validate() const {
    if (documents.empty()) fail(errc::config_error, "config: \"documents\" is required");
    if (summaries.empty()) fail(errc::config_error, "config: \"summaries\" is required");
    if (metrics.empty()) fail(errc::config_error, "config: at least one metric must be enabled");
    for (const auto& m : metrics) {
      if (std::find(known_metrics.begin(), known_metrics.end(), m) == known_metrics.end()) {
        fail(errc::config_error, "config: unknown metric \"" + m + "\"");
      }
    }
    if (semantic_enabled() && !embeddings) {
      fail(errc::config_error, "config: semantic metrics (bert_score, s_wms) need an \"embeddings\" path");
    }
    if (!semantic_enabled() && embeddings) {
      fail(errc::config_error, "config: \"embeddings\" given but no semantic metric is enabled");
    }
    for (double r : ratios) {
      if (!(r > 0.0 && r <= 1.0)) fail(errc::config_error, "config: ratios must lie in (0, 1]");
    }
  }
};

inline std::string_view to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::exact: return "exact";
    case SolverChoice::sinkhorn: return "sinkhorn";
    case SolverChoice::automatic: return "auto";
  }
  return "?";
}

inline std::string_view to_string(MissingTokenPolicy p) {
  switch (p) {
    case MissingTokenPolicy::error: return "error";
    case MissingTokenPolicy::skip: return "skip";
    case MissingTokenPolicy::unknown_vector: return "unknown";
  }
  return "?";
}

/// Builds a RunConfig from TOML text. Relative paths are resolved against
/// `base_dir`.
inline RunConfig run_config_from_toml(std::string_view text, const std::filesystem::path& base_dir) {
  const TomlTable t = parse_toml(text);
  static const std::set<std::string> allowed{"documents", "phrases",  "summaries",      "embeddings",
                                             "abbreviations", "metrics", "ratios", "solver",
                                             "missing_tokens", "output_dir", "seed", "dataset"};
  for (const auto& [k, _] : t) {
    if (!allowed.count(k)) fail(errc::config_error, "config: unknown key \"" + k + "\"");
  }
  auto str = [&](const char* key) -> std::optional<std::string> {
    auto it = t.find(key);
    if (it == t.end()) return std::nullopt;
    if (!it->second.is_string()) fail(errc::config_error, std::string("config: \"") + key + "\" must be a string");
    return std::get<std::string>(it->second.value);
  };
  auto path = [&](const char* key) -> std::optional<std::string> {
    auto s = str(key);
    if (!s) return s;
    std::filesystem::path p(*s);
    if (p.is_relative()) p = base_dir / p;
    return p.lexically_normal().string();
  };

  RunConfig c;
  c.documents = path("documents").value_or("");
  c.phrases = path("phrases").value_or("");
  c.summaries = path("summaries").value_or("");
  c.embeddings = path("embeddings");
  c.abbreviations = path("abbreviations");
  c.output_dir = path("output_dir").value_or((base_dir / "out").lexically_normal().string());
  c.dataset = str("dataset").value_or(std::filesystem::path(c.documents).stem().string());

  if (auto it = t.find("metrics"); it != t.end()) {
    if (!it->second.is_array()) fail(errc::config_error, "config: \"metrics\" must be an array of strings");
    for (const auto& v : std::get<TomlArray>(it->second.value)) {
      if (!v.is_string()) fail(errc::config_error, "config: \"metrics\" must be an array of strings");
      c.metrics.insert(std::get<std::string>(v.value));
    }
  } else {
    c.metrics = {"intent", "bleu", "meteor", "rouge_l"};
    if (c.embeddings) c.metrics.insert({"bert_score", "s_wms"});
  }
  if (auto it = t.find("ratios"); it != t.end()) {
    if (!it->second.is_array()) fail(errc::config_error, "config: \"ratios\" must be an array of numbers");
    for (const auto& v : std::get<TomlArray>(it->second.value)) {
      if (!v.is_number()) fail(errc::config_error, "config: \"ratios\" must be an array of numbers");
      c.ratios.push_back(v.as_double());
    }
  }
  if (auto s = str("solver")) {
    if (*s == "exact") c.solver = SolverChoice::exact;
    else if (*s == "sinkhorn") c.solver = SolverChoice::sinkhorn;
    else if (*s == "auto") c.solver = SolverChoice::automatic;
    else fail(errc::config_error, "config: solver must be exact, sinkhorn or auto");
  }
  if (auto s = str("missing_tokens")) {
    if (*s == "error") c.missing_tokens = MissingTokenPolicy::error;
    else if (*s == "skip") c.missing_tokens = MissingTokenPolicy::skip;
    else if (*s == "unknown") c.missing_tokens = MissingTokenPolicy::unknown_vector;
    else fail(errc::config_error, "config: missing_tokens must be error, skip or unknown");
  }
  if (auto it = t.find("seed"); it != t.end()) {
    auto* i = std::get_if<std::int64_t>(&it->second.value);
    if (!i || *i < 0) fail(errc::config_error, "config: \"seed\" must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*i);
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return run_config_from_toml(text, std::filesystem::path(path).parent_path());
}

}  // namespace intent_eval
