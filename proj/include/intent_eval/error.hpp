#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace intent_eval {

/// Every failure raised by the library carries a stable, machine-readable
/// code (e.g. "MalformedRecord") next to the human message. The CLI prints
/// it as `error[<code>]: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr std::string_view malformed_record = "MalformedRecord";
inline constexpr std::string_view dangling_reference = "DanglingReference";
inline constexpr std::string_view duplicate_document_id = "DuplicateDocumentId";
inline constexpr std::string_view empty_phrase = "EmptyPhrase";
inline constexpr std::string_view empty_summary = "EmptySummary";
inline constexpr std::string_view no_phrases = "NoPhrases";
inline constexpr std::string_view domain_error = "DomainError";
inline constexpr std::string_view empty_list = "EmptyList";
inline constexpr std::string_view empty_reference = "EmptyReference";
inline constexpr std::string_view empty_input = "EmptyInput";
inline constexpr std::string_view dimension_mismatch = "DimensionMismatch";
inline constexpr std::string_view duplicate_key = "DuplicateKey";
inline constexpr std::string_view parse_error = "ParseError";
inline constexpr std::string_view empty_corpus = "EmptyCorpus";
inline constexpr std::string_view missing_embedding = "MissingEmbedding";
inline constexpr std::string_view unbalanced_mass = "UnbalancedMass";
inline constexpr std::string_view non_finite_cost = "NonFiniteCost";
inline constexpr std::string_view length_mismatch = "LengthMismatch";
inline constexpr std::string_view degenerate_series = "DegenerateSeries";
inline constexpr std::string_view degenerate_marginals = "DegenerateMarginals";
inline constexpr std::string_view config_error = "ConfigError";
inline constexpr std::string_view io_error = "IoError";
inline constexpr std::string_view missing_score = "MissingScore";
inline constexpr std::string_view insufficient_data = "InsufficientData";
}  // namespace errc

[[noreturn]] inline void fail(std::string_view code, const std::string& message) {
  throw Error(std::string(code), message);
}

}  // namespace intent_eval
