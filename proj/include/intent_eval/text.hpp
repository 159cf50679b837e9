#pragma once

// Canonical token space shared by every metric: lowercase, NFC, punctuation
// turned into spaces, whitespace collapsed.

#include <string>
#include <string_view>
#include <vector>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utypes.h>

#include "intent_eval/error.hpp"

namespace intent_eval {

using Tokens = std::vector<std::string>;

namespace detail {

inline const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    fail(errc::io_error, std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
  }
  return *n;
}

inline icu::UnicodeString to_nfc(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(s, status);
  if (U_FAILURE(status)) {
    fail(errc::parse_error, std::string("NFC normalization failed: ") + u_errorName(status));
  }
  return out;
}

inline bool is_space(UChar32 c) { return u_isUWhiteSpace(c) || c == 0x200B; }

}  // namespace detail

/// Lowercases, NFC-normalizes, replaces each punctuation code point with a
/// space and collapses whitespace runs. Idempotent. Invalid UTF-8 sequences
/// are replaced with U+FFFD by ICU.
inline std::string normalize(std::string_view text) {
  if (text.empty()) return {};
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u = detail::to_nfc(u);
  u.toLower(icu::Locale::getRoot());
  // Lowercasing can produce decomposed sequences (e.g. U+0130).
  u = detail::to_nfc(u);

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_ispunct(c) || detail::is_space(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) {
      out.append(static_cast<UChar>(0x20));
      pending_space = false;
    }
    out.append(c);
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

/// Whitespace split of normalize(text); never yields empty tokens.
inline Tokens tokenize(std::string_view text) {
  Tokens tokens;
  const std::string norm = normalize(text);
  std::size_t start = 0;
  while (start < norm.size()) {
    std::size_t end = norm.find(' ', start);
    if (end == std::string::npos) end = norm.size();
    if (end > start) tokens.emplace_back(norm.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

}  // namespace intent_eval
