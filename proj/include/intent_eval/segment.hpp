#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "intent_eval/error.hpp"
#include "intent_eval/text.hpp"

namespace intent_eval {

/// Byte offsets into the owning raw text, half-open.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  Tokens tokens;
  CharSpan char_span;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Abbreviations whose trailing period never ends a sentence. Entries are
/// stored lowercased and include the period ("no.", "vs.").
class AbbreviationList {
 public:
  AbbreviationList() = default;
  explicit AbbreviationList(std::initializer_list<std::string_view> entries) {
    for (auto e : entries) add(e);
  }

  void add(std::string_view entry) {
    std::string e(entry);
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!e.empty() && e.back() != '.') e.push_back('.');
    if (e.size() > 1) entries_.insert(std::move(e));
  }

  bool contains(std::string_view word) const {
    std::string w(word);
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return entries_.count(w) > 0;
  }

  std::size_t size() const { return entries_.size(); }
  const std::set<std::string>& entries() const { return entries_; }

  /// Plain text, one abbreviation per line; '#' starts a comment.
  static AbbreviationList parse(std::string_view content) {
    AbbreviationList list;
    std::size_t pos = 0;
    while (pos <= content.size()) {
      std::size_t nl = content.find('\n', pos);
      if (nl == std::string_view::npos) nl = content.size();
      std::string_view line = content.substr(pos, nl - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
      if (!line.empty()) list.add(line);
      pos = nl + 1;
    }
    return list;
  }

  static AbbreviationList load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open abbreviation list: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(content);
  }

  void merge(const AbbreviationList& other) { entries_.insert(other.entries_.begin(), other.entries_.end()); }

 private:
  std::set<std::string> entries_;
};

/// Built-in list; data/abbreviations.txt ships the same entries for users to extend.
inline const AbbreviationList& default_abbreviations() {
  static const AbbreviationList list{
      "no", "nos", "vs", "v", "dr", "mr", "mrs", "ms", "smt", "sh", "shri", "sri", "st", "hon",
      "j", "jj", "cj", "ld", "sec", "secs", "s", "ss", "art", "arts", "cl", "para", "paras",
      "r", "o", "ors", "anr", "etc", "e.g", "i.e", "viz", "cf", "ibid", "id", "supra", "op",
      "cit", "ltd", "pvt", "co", "corp", "inc", "govt", "dept", "crl", "cr", "cri", "civ",
      "app", "appl", "w.p", "s.l.p", "ipc", "crpc", "p", "pp", "vol", "ch", "u/s", "fig",
      "approx", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov",
      "dec", "prof", "sr", "jr", "qc", "sc", "hc", "fcr", "nswlr", "clr", "alr"};
  return list;
}

namespace detail {

inline bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

inline bool is_closing(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

inline UChar32 decode_at(std::string_view s, std::size_t& i) {
  UChar32 c = 0;
  int32_t idx = static_cast<int32_t>(i);
  U8_NEXT(s.data(), idx, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(idx);
  return c;
}

/// Closing punctuation directly after the terminal: ASCII quotes/brackets
/// and the typographic closing quotes U+2019/U+201D.
inline std::size_t skip_closing(std::string_view s, std::size_t i) {
  for (;;) {
    if (i < s.size() && is_closing(s[i])) {
      ++i;
    } else if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
               static_cast<unsigned char>(s[i + 1]) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) == 0x99 ||
                static_cast<unsigned char>(s[i + 2]) == 0x9D)) {
      i += 3;
    } else {
      return i;
    }
  }
}

inline bool is_ws_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// After the whitespace run at `i`, is the next letter uppercase (allowing
/// opening quotes/brackets in between)? End of text also counts.
inline bool next_starts_sentence(std::string_view s, std::size_t i) {
  while (i < s.size()) {
    std::size_t j = i;
    UChar32 c = decode_at(s, j);
    if (c < 0) return false;
    if (u_isUWhiteSpace(c) || u_hasBinaryProperty(c, UCHAR_QUOTATION_MARK) ||
        u_charType(c) == U_START_PUNCTUATION || u_charType(c) == U_INITIAL_PUNCTUATION) {
      i = j;
      continue;
    }
    return u_isupper(c) || u_istitle(c);
  }
  return true;
}

/// The whitespace-delimited word that ends at position `dot` (inclusive).
inline std::string_view word_ending_at(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_ws_byte(s[b - 1])) --b;
  std::string_view w = s.substr(b, dot + 1 - b);
  while (!w.empty() && (w.front() == '(' || w.front() == '[' || w.front() == '"' || w.front() == '\'')) {
    w.remove_prefix(1);
  }
  return w;
}

}  // namespace detail

/// Rule-based sentence splitter. A boundary is a run of . ? ! (plus closing
/// quotes/brackets) followed by whitespace and an uppercase letter, or by end
/// of text. A period closing a listed abbreviation never splits. Fragments
/// without any token are merged into a neighbour so every sentence has at
/// least one token.
inline std::vector<Sentence> segment_sentences(std::string_view raw,
                                               const AbbreviationList& abbreviations = default_abbreviations()) {
  std::vector<CharSpan> spans;
  std::size_t i = 0;
  auto skip_ws = [&](std::size_t p) {
    while (p < raw.size() && detail::is_ws_byte(raw[p])) ++p;
    return p;
  };
  std::size_t start = skip_ws(0);
  i = start;
  while (i < raw.size()) {
    if (!detail::is_terminal(raw[i])) {
      ++i;
      continue;
    }
    std::size_t last_terminal = i;
    std::size_t j = i;
    while (j < raw.size() && detail::is_terminal(raw[j])) last_terminal = j++;
    j = detail::skip_closing(raw, j);
    const bool at_end = skip_ws(j) == raw.size();
    const bool ws_follows = j < raw.size() && detail::is_ws_byte(raw[j]);
    bool boundary = at_end || (ws_follows && detail::next_starts_sentence(raw, j));
    if (boundary && raw[last_terminal] == '.' && last_terminal == i &&
        abbreviations.contains(detail::word_ending_at(raw, i))) {
      boundary = false;
    }
    if (boundary) {
      spans.push_back({start, j});
      start = skip_ws(j);
      i = start;
    } else {
      i = j;
    }
  }
  if (start < raw.size()) {
    std::size_t end = raw.size();
    while (end > start && detail::is_ws_byte(raw[end - 1])) --end;
    if (end > start) spans.push_back({start, end});
  }

  std::vector<Sentence> out;
  std::vector<CharSpan> pending;  // token-less fragments awaiting a host
  for (const CharSpan& span : spans) {
    Tokens toks = tokenize(raw.substr(span.start, span.end - span.start));
    if (toks.empty()) {
      if (!out.empty()) {
        Sentence& prev = out.back();
        prev.char_span.end = span.end;
        prev.text = std::string(raw.substr(prev.char_span.start, prev.char_span.end - prev.char_span.start));
      } else {
        pending.push_back(span);
      }
      continue;
    }
    CharSpan merged = span;
    if (!pending.empty()) {
      merged.start = pending.front().start;
      pending.clear();
      toks = tokenize(raw.substr(merged.start, merged.end - merged.start));
    }
    Sentence s;
    s.index = out.size();
    s.char_span = merged;
    s.text = std::string(raw.substr(merged.start, merged.end - merged.start));
    s.tokens = std::move(toks);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace intent_eval
