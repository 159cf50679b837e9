#pragma once

#include <string>
#include <vector>

#include "intent_eval/corpus.hpp"
#include "intent_eval/error.hpp"

namespace intent_eval {

/// One annotator's 1-5 Likert ratings of one (document, method) summary.
struct HumanJudgment {
  std::string doc_id;
  std::string method;
  std::string annotator_id;
  int relevance = 0;
  int readability = 0;
};

inline std::vector<HumanJudgment> load_judgments(const std::string& path) {
  std::vector<HumanJudgment> out;
  detail::for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t line) {
    HumanJudgment j;
    j.doc_id = detail::require_string(obj, "doc_id", path, line);
    j.method = detail::require_string(obj, "method", path, line);
    j.annotator_id = detail::require_string(obj, "annotator_id", path, line);
    auto likert = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end()) detail::malformed(path, line, std::string("missing \"") + key + "\" field");
      if (!it->is_number_integer()) detail::malformed(path, line, std::string("\"") + key + "\" must be an integer");
      const auto v = it->get<long long>();
      if (v < 1 || v > 5) detail::malformed(path, line, std::string("\"") + key + "\" must lie in 1..5");
      return static_cast<int>(v);
    };
    j.relevance = likert("relevance");
    j.readability = likert("readability");
    out.push_back(std::move(j));
  });
  return out;
}

struct Prediction {
  std::string id;
  std::string pred;
  std::string gold;
};

inline std::vector<Prediction> load_predictions(const std::string& path) {
  std::vector<Prediction> out;
  detail::for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t line) {
    out.push_back({detail::require_string(obj, "id", path, line), detail::require_string(obj, "pred", path, line),
                   detail::require_string(obj, "gold", path, line)});
  });
  return out;
}

}  // namespace intent_eval
