#include <gtest/gtest.h>

#include <random>

#include "intent_eval/text.hpp"

using namespace intent_eval;

TEST(Normalize, CaseAndTrailingPunctuation) { EXPECT_EQ(normalize("Preparation to Kill."), "preparation to kill"); }

TEST(Normalize, EmptyStaysEmpty) { EXPECT_EQ(normalize(""), ""); }

// Frozen from a regex rendering of the rules:
// re.sub(r"\s+", " ", re.sub(r"[^\w\s]", " ", s.lower())).strip()
TEST(Normalize, CollapsesRunsAndCommas) { EXPECT_EQ(normalize("robbed   ARTICLES,were"), "robbed articles were"); }

TEST(Normalize, ComposesToNfc) {
  // "e" + combining acute -> precomposed U+00E9
  EXPECT_EQ(normalize("Caf\x65\xCC\x81"), "caf\xC3\xA9");
}

TEST(Normalize, UnicodePunctuationAndSpaces) {
  EXPECT_EQ(normalize("\xE2\x80\x9CQuoted\xE2\x80\x9D\xC2\xA0text\xE2\x80\x94" "dash"), "quoted text dash");
  EXPECT_EQ(normalize("zero\xE2\x80\x8Bwidth"), "zero width");
}

TEST(Normalize, KeepsDigitsAndLetters) { EXPECT_EQ(normalize("Sec. 302 IPC"), "sec 302 ipc"); }

TEST(Normalize, OnlyPunctuation) { EXPECT_EQ(normalize(" .,;!? "), ""); }

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("preparation to kill"), (Tokens{"preparation", "to", "kill"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("a  b"), (Tokens{"a", "b"}));
}

TEST(Tokenize, HyphenSplits) { EXPECT_EQ(tokenize("anti-corruption"), (Tokens{"anti", "corruption"})); }

TEST(NormalizeProperty, IdempotentAndTokenizeStable) {
  const std::vector<std::string> pieces{"A", "b", " ", "  ", ".", ",", "K\xC3\x96ln", "\xC3\x9F", "\t", "\n",
                                        "x-y", "(1)", "\xE2\x80\x94", "e\xCC\x81", "\xC2\xA0", "'s", "DR.", "42"};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 12);
    for (int k = 0; k < len; ++k) s += pieces[rng() % pieces.size()];
    const std::string once = normalize(s);
    EXPECT_EQ(normalize(once), once) << s;
    EXPECT_EQ(tokenize(s), tokenize(once)) << s;
    for (const auto& t : tokenize(s)) EXPECT_FALSE(t.empty());
  }
}
